import contextlib
import io
import json
import subprocess
import sys

import pytest

from wignerlab.cli import main


def run(argv):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(list(argv))
        except SystemExit as exc:  # argparse usage errors
            code = exc.code
    return code, out.getvalue(), err.getvalue()


def test_poly_eval_json_and_csv():
    code, out, err = run(["poly", "eval", "--k", "2", "--x", "2.0"])
    assert code == 0 and err == ""
    assert json.loads(out) == {"value": 3.0}
    code, out, _ = run(["poly", "eval", "--k", "3", "--x", "2.0",
                        "--format", "csv"])
    assert (code, out) == (0, "4\n")
    # probabilist Hermite H_3(2) = 8 - 6 = 2
    code, out, _ = run(["poly", "eval", "--basis", "hermite", "--k", "3",
                        "--x", "2.0", "--format", "csv"])
    assert (code, out) == (0, "2\n")


def test_global_flags_accepted_before_subcommand():
    a = run(["--format", "csv", "poly", "eval", "--k", "3", "--x", "2.0"])
    b = run(["poly", "eval", "--k", "3", "--x", "2.0", "--format", "csv"])
    assert a == b == (0, "4\n", "")


def test_poly_decompose_equals_form_for_leading_minus():
    code, out, _ = run(["poly", "decompose", "--coeffs=-1,0,1",
                        "--format", "csv"])
    assert code == 0
    assert out == "degree,coefficient\n2,1\nrank=2\n"
    code, out, _ = run(["poly", "decompose", "--coeffs", "1,0,1"])
    assert json.loads(out) == {"coefficients": {"0": 2.0, "2": 1.0},
                               "rank": 2, "basis": "tcheb"}


def test_contractions_rows():
    code, out, _ = run(["contractions", "--q", "2,2", "--format", "csv"])
    assert code == 0
    assert out == "r_1,alpha_1_2,scalar\n0,0,0\n1,1,0\n2,2,1\n"
    code, out, _ = run(["contractions", "--q", "2,2", "--scalar-only",
                        "--format", "csv"])
    assert out == "r_1,alpha_1_2,scalar\n2,2,1\n"


def test_nc_counts_and_blocks():
    code, out, _ = run(["nc", "--kind", "pairing", "--n", "4",
                        "--count-only"])
    assert json.loads(out) == {"count": 2}
    code, out, _ = run(["nc", "--kind", "partition", "--n", "4",
                        "--count-only", "--format", "csv"])
    assert out == "14\n"
    code, out, _ = run(["nc", "--kind", "pairing", "--n", "4",
                        "--format", "csv"])
    assert out == "blocks\n{1,2}{3,4}\n{1,4}{2,3}\n"


def test_free_wick_reads_gamma_csv(tmp_path):
    gp = tmp_path / "gamma.csv"
    gp.write_text("1,0.5\n0.5,1\n")
    code, out, _ = run(["free", "wick", "--gamma", str(gp),
                        "--word", "1,2,1,2"])
    assert json.loads(out) == {"value": 0.5, "method": "wick"}
    code, out, _ = run(["free", "wick", "--gamma", str(gp),
                        "--word", "1,1,2,2", "--format", "csv"])
    assert out == "value,method\n1.25,wick\n"


def test_free_moments_poisson():
    code, out, _ = run(["free", "moments", "--cumulants", "1,1,1,1",
                        "--n", "4", "--format", "csv"])
    assert out == "k,moment\n1,1\n2,2\n3,5\n4,14\n"


def test_moment_exact_delta():
    code, out, _ = run(["moment", "exact", "--q", "2,2", "--t", "1,1",
                        "--n", "5", "--rho", "delta"])
    payload = json.loads(out)
    assert payload["value"] == 5.0
    assert payload["method"] == "exact"
    assert payload["meta"]["model"] == "delta"


def test_moment_limit_quadrature_and_mc():
    code, out, _ = run(["moment", "limit", "--q", "2", "--H", "0.7",
                        "--t", "1,1", "--method", "quadrature",
                        "--level", "8"])
    payload = json.loads(out)
    assert payload["method"] == "quadrature"
    assert payload["value"] == pytest.approx(1.0, abs=1e-3)
    assert "seed" not in payload and "stderr" not in payload
    argv = ["moment", "limit", "--q", "2", "--H", "0.7", "--t", "1,1",
            "--method", "mc", "--samples", "20000", "--seed", "3"]
    a = run(argv)
    assert a == run(argv)  # bit-reproducible at fixed seed
    payload = json.loads(a[1])
    assert payload["seed"] == 3
    assert payload["meta"]["samples"] == 20000
    assert "version" in payload["meta"]
    assert abs(payload["value"] - 1.0) <= 4 * payload["stderr"]


def test_clt_variance_ratio():
    code, out, _ = run(["clt", "variance", "--coeffs", "0,0,1",
                        "--rho", "geometric:a=0.5"])
    payload = json.loads(out)
    assert payload["free"] == pytest.approx(5.0 / 3.0)
    assert payload["classical"] == pytest.approx(10.0 / 3.0)
    assert payload["ratio"] == pytest.approx(0.5)
    assert payload["per_term"]["2"]["sum_rho_pow"] == pytest.approx(5.0 / 3.0)


def test_karamata_exact_at_n1():
    code, out, _ = run(["karamata", "--q", "2", "--D", "0.3", "--n", "1"])
    assert json.loads(out)["value"] == pytest.approx(0.4)


def test_converge_error_shrinks():
    code, out, _ = run(["converge", "--q", "2", "--D", "0.3", "--p", "2",
                        "--n-grid", "100,1000", "--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,scaled_moment,limit,abs_err"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == [100, 1000]
    assert float(rows[1][3]) < float(rows[0][3])


def test_kernel_eval_methods_agree():
    base = ["kernel", "eval", "--q", "1", "--H", "0.7", "--t", "1.0",
            "--x", "0.5"]
    _, out_a, _ = run(base)
    _, out_q, _ = run(base + ["--method", "quad"])
    va = json.loads(out_a)["value"]
    vq = json.loads(out_q)["value"]
    assert va == pytest.approx(vq, rel=1e-9)


def test_kernel_norm_near_reference():
    code, out, _ = run(["kernel", "norm", "--q", "2", "--H", "0.7",
                        "--t", "1.0", "--grid", "256"])
    payload = json.loads(out)
    assert payload["meta"]["reference"] == 1.0
    assert abs(payload["value"] - 1.0) < 0.05


def test_kernel_cumulants_trace_matches_eigen():
    code, out, _ = run(["kernel", "cumulants", "--H", "0.7", "--t", "1.0",
                        "--pmax", "3", "--grid", "64", "--format", "csv"])
    lines = out.strip().split("\n")
    assert lines[0] == "p,kappa_trace,kappa_eigen"
    for line in lines[1:]:
        _, tr, ei = line.split(",")
        assert float(tr) == pytest.approx(float(ei), rel=1e-10, abs=1e-12)


def test_simulate_wigner_deterministic():
    argv = ["simulate", "wigner", "--n", "30", "--reps", "4", "--seed", "2",
            "--format", "csv"]
    a = run(argv)
    assert a == run(argv)
    lines = a[1].strip().split("\n")
    assert lines[0] == "quantity,empirical,stderr,reference"
    assert [line.split(",")[0] for line in lines[1:]] == [
        "moment_1", "moment_2", "moment_3", "moment_4"]
    assert lines[2].split(",")[3] == "1"  # semicircle m_2 reference


def test_simulate_wigner_poly_row():
    code, out, _ = run(["simulate", "wigner", "--n", "30", "--reps", "4",
                        "--poly", "0,0,1", "--format", "csv"])
    lines = out.strip().split("\n")
    assert len(lines) == 2
    q, v, s, ref = lines[1].split(",")
    assert q == "poly_moment" and ref == "1"


def test_simulate_freeness_row():
    code, out, _ = run(["simulate", "freeness", "--n", "30", "--times", "1,2",
                        "--reps", "4", "--format", "csv"])
    lines = out.strip().split("\n")
    q, v, s, ref = lines[1].split(",")
    assert q == "alternating_product" and ref == "0"


def test_simulate_limits_rows():
    code, out, _ = run(["simulate", "limits", "--kind", "classical",
                        "--q", "2", "--rho", "geometric:a=0.5",
                        "--ntime", "200", "--reps", "20", "--seed", "0",
                        "--format", "csv"])
    lines = out.strip().split("\n")
    assert lines[1].split(",")[0] == "scaled_second_moment"
    assert lines[1].split(",")[3] == "3.333333333333333"
    assert lines[2].split(",")[:2] == ["limit_ratio_free_over_classical",
                                       "0.5"]


def test_output_flag_writes_file(tmp_path):
    target = tmp_path / "out.json"
    code, out, err = run(["--output", str(target), "poly", "eval",
                          "--k", "2", "--x", "2.0"])
    assert (code, out, err) == (0, "", "")
    assert json.loads(target.read_text()) == {"value": 3.0}


def test_args_file_expansion(tmp_path):
    af = tmp_path / "args.txt"
    af.write_text("# the evaluation point\n--x 2.0\n")
    code, out, _ = run(["poly", "eval", "--k", "2", "--args-file", str(af)])
    assert json.loads(out) == {"value": 3.0}
    code, _, err = run(["poly", "eval", "--k", "2", "--args-file",
                        str(tmp_path / "missing.txt")])
    assert code == 2
    assert err.startswith("error[usage]:")


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_exit_codes_and_stderr_prefixes():
    code, _, err = run(["poly", "eval", "--basis", "bogus", "--k", "2",
                        "--x", "1.0"])
    assert code == 3 and err.startswith("error[domain]:")
    code, _, err = run(["simulate", "wigner", "--n", "5000", "--reps", "4"])
    assert code == 4 and err.startswith("error[size]:")
    code, _, err = run(["moment", "exact", "--q", "2,2,2", "--t", "1,1,1",
                        "--n", "100000", "--rho", "delta",
                        "--budget", "1000"])
    assert code == 4 and "error[size]:" in err and "budget" in err
    code, _, err = run(["kernel", "eval", "--q", "2", "--H", "0.7",
                        "--t", "1.0", "--x=-5,0.5", "--method", "quad",
                        "--tol", "1e-30"])
    assert code == 5 and "error[accuracy]:" in err


def test_usage_errors_exit_2():
    code, _, _ = run(["poly", "eval", "--x", "1.0"])  # missing --k
    assert code == 2
    code, _, _ = run(["no-such-command"])
    assert code == 2


def test_threads_flag_and_env(monkeypatch):
    code, out, _ = run(["--threads", "1", "nc", "--kind", "pairing",
                        "--n", "6", "--count-only"])
    assert code == 0 and json.loads(out) == {"count": 5}
    monkeypatch.setenv("WIGNERLAB_THREADS", "1")
    code, out, _ = run(["nc", "--kind", "pairing", "--n", "6",
                        "--count-only"])
    assert code == 0 and json.loads(out) == {"count": 5}


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wignerlab.cli", "poly", "eval", "--k", "2",
         "--x", "2.0", "--format", "csv"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "3\n"
