"""Command-line surface: parsing, exit codes, output contracts."""

import json

import numpy as np
import pytest

from symkernel import riemann_to_dict, sphere_riemann
from symkernel.cli import main, parse_space


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# space grammar


def test_space_grammar_catalog():
    for spec, dim in [("S2:r=1", 2), ("S2", 2), ("H2:a=2.0", 2), ("S3", 3),
                      ("S4:r=0.5", 4), ("H3", 3), ("flat:n=3", 3),
                      ("S2:r=1*H2:a=1", 4), ("S2*R", 3),
                      ("sphere:n=5,r=2", 5), ("hyperbolic:n=2,a=3", 2)]:
        rd, _ = parse_space(spec)
        assert rd.n == dim, spec


def test_space_grammar_volumes():
    _, vol = parse_space("S2:r=2")
    assert vol == pytest.approx(16.0 * np.pi)
    _, vol = parse_space("S2*S2")
    assert vol == pytest.approx((4.0 * np.pi) ** 2)
    _, vol = parse_space("S2*H2")
    assert vol is None


@pytest.mark.parametrize("bad", ["S2:r=", "S2:=1", "S2:q=1", "nope", "S2**H2",
                                 "S2:r=zero", "flat:n=0", "S2:r=-1"])
def test_space_grammar_rejects(bad, capsys):
    code, _, err = run(capsys, "validate", "--space", bad)
    assert code == 2, bad
    assert "error" in err


# ---------------------------------------------------------------------------
# validate


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--space", "S2:r=1")
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert doc["worst_residual"] <= 1e-10
    assert "commutator_closure" in doc["residuals"]


def test_validate_from_file_round_trip(tmp_path, capsys):
    path = tmp_path / "space.json"
    path.write_text(json.dumps(riemann_to_dict(sphere_riemann(2, 1.0))))
    code1, out1, _ = run(capsys, "validate", "--space", str(path))
    code2, out2, _ = run(capsys, "validate", "--space", str(path))
    assert code1 == code2 == 0
    assert out1 == out2
    # residuals equal those of the in-memory construction
    _, direct, _ = run(capsys, "validate", "--space", "S2:r=1")
    assert json.loads(out1)["residuals"] == json.loads(direct)["residuals"]


def test_validate_perturbed_tensor_fails(tmp_path, capsys):
    doc = riemann_to_dict(sphere_riemann(2, 1.0))
    doc["riem"][1] += 2e-9
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "validate", "--space", str(path))
    assert code == 1
    assert "pair" in err or "residual" in err


def test_validate_output_feeds_back_as_space(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, _, _ = run(capsys, "validate", "--space", "S2:r=2", "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "diag", "--space", str(path), "--t", "0.5")
    assert code == 0
    direct_code, direct, _ = run(capsys, "diag", "--space", "S2:r=2",
                                 "--t", "0.5")
    assert direct_code == 0
    assert json.loads(out)[0]["value"] == json.loads(direct)[0]["value"]


@pytest.mark.parametrize("doc", ['{"foo": 1}', '{"n": 2}', "[1, 2, 3]",
                                 '{"n": 2, "riem": [1.0]}'])
def test_malformed_space_file_is_usage_error(doc, tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text(doc)
    code, _, err = run(capsys, "validate", "--space", str(path))
    assert code == 2, doc
    assert "error" in err


# ---------------------------------------------------------------------------
# coeffs


def test_coeffs_sphere_csv(capsys):
    code, out, _ = run(capsys, "coeffs", "--space", "S2:r=1", "--order", "2",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,trace_re"
    assert lines[1] == "0,1"
    assert lines[2] == "1,0.33333333333333331"


def test_coeffs_weight_half_hyperbolic(capsys):
    code, out, _ = run(capsys, "coeffs", "--space", "H2:a=1", "--alpha", "1/2",
                       "--order", "2", "--format", "csv")
    assert code == 0
    assert out.strip().splitlines()[2] == "1,-0.33333333333333331"


def test_coeffs_flat_all_zero_beyond_first(capsys):
    code, out, _ = run(capsys, "coeffs", "--space", "flat:n=2", "--order", "3",
                       "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert rows[0] == "0,1"
    assert all(row.split(",")[1] == "0" for row in rows[1:])


def test_coeffs_json_contract(capsys):
    code, out, _ = run(capsys, "coeffs", "--space", "S2:r=1", "--order", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["K"] == 1
    assert doc["space_tag"] == "S2:r=1"
    assert doc["rep_tag"] == "scalar"
    assert doc["trace"][1] == [pytest.approx(1.0 / 3.0), 0.0]
    assert doc["a"][0] == [[[1.0, 0.0]]]


def test_order_cap_is_usage_error(capsys):
    code, _, _ = run(capsys, "coeffs", "--space", "S2:r=1", "--order", "9")
    assert code == 2


# ---------------------------------------------------------------------------
# diag and spectrum


def test_diag_records(capsys):
    code, out, _ = run(capsys, "diag", "--space", "S2:r=1", "--t", "0.5",
                       "--t", "0.1")
    assert code == 0
    recs = json.loads(out)
    assert [r["t"] for r in recs] == [0.1, 0.5]  # sorted grid
    for rec in recs:
        assert rec["space"] == "S2:r=1"
        assert rec["alpha"] == [0, 1]
        assert rec["method"] == "contour"
        assert rec["est_error"] >= 0.0
        assert rec["value"][1] == 0.0


def test_spectrum_sphere_listing(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "S2:r=1", "--alpha", "0",
                       "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    for k, row in enumerate(rows[:6]):
        assert float(row[1]) == pytest.approx(k * (k + 1))
        assert float(row[2]) == pytest.approx(2 * k + 1)


def test_spectrum_hyperbolic_bound_states(capsys):
    code, out, _ = run(capsys, "spectrum", "--space", "H2:a=1",
                       "--alpha", "3/2")
    assert code == 0
    doc = json.loads(out)
    assert doc["continuum_edge"] == pytest.approx(0.25 + 2.25)
    assert len(doc["modes"]) == 1
    assert doc["modes"][0]["eigenvalue"] == pytest.approx(1.5)


def test_spectrum_rejects_products(capsys):
    code, _, _ = run(capsys, "spectrum", "--space", "S2*H2")
    assert code == 1


# ---------------------------------------------------------------------------
# index


def test_index_twisted(capsys):
    code, out, _ = run(capsys, "index", "--space", "S2:r=1", "--alpha", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 2
    assert doc["nearest_integer"] == -2
    assert doc["index"] == pytest.approx(-2.0, abs=1e-10)
    assert doc["t_spread"] <= 1e-6
    assert len(doc["graded"]) == len(doc["ts"]) == 3


def test_index_noncompact_fails(capsys):
    code, _, _ = run(capsys, "index", "--space", "H2:a=1")
    assert code == 1


def test_index_rep_alpha_conflict(capsys):
    code, _, _ = run(capsys, "index", "--space", "S2:r=1",
                     "--rep", "weight:1", "--alpha", "1")
    assert code == 2


# ---------------------------------------------------------------------------
# compare


def test_compare_sphere_passes(capsys):
    code, out, _ = run(capsys, "compare", "--space", "S2:r=1")
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert doc["max_rel_dev"] <= 1e-6
    assert {"contour", "spectral"} <= set(doc["rows"][0]["methods"])


def test_compare_hyperbolic_half_charge(capsys):
    code, out, _ = run(capsys, "compare", "--space", "H2:a=1",
                       "--alpha", "1/2")
    assert code == 0
    assert json.loads(out)["max_rel_dev"] <= 1e-8


def test_compare_unreachable_tolerance_is_nonconvergence(capsys):
    code, _, _ = run(capsys, "compare", "--space", "S2:r=1",
                     "--t", "0.5", "--tol-quad", "1e-30")
    assert code == 3


def test_compare_threads_do_not_change_bytes(tmp_path, capsys, monkeypatch):
    outs = []
    for threads in ("1", "8"):
        monkeypatch.setenv("SYMKERNEL_THREADS", threads)
        path = tmp_path / f"cmp{threads}.json"
        code, _, _ = run(capsys, "compare", "--space", "S2:r=1",
                         "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


# ---------------------------------------------------------------------------
# output plumbing


def test_out_file_and_plot(tmp_path, capsys):
    out = tmp_path / "diag.json"
    code, printed, _ = run(capsys, "diag", "--space", "S2:r=1", "--t", "1.0",
                           "--out", str(out), "--plot")
    assert code == 0
    assert printed == ""
    assert out.exists()
    assert (tmp_path / "diag.png").stat().st_size > 0


def test_plot_needs_out(capsys):
    code, _, _ = run(capsys, "diag", "--space", "S2:r=1", "--plot")
    assert code == 2


def test_rep_file_input(tmp_path, capsys):
    from symkernel import assemble, rep_to_dict, weight_rep
    from symkernel.report import dumps

    alg = assemble(sphere_riemann(2, 1.0))
    doc = rep_to_dict(weight_rep(alg, 1))
    path = tmp_path / "rep.json"
    path.write_text(dumps(doc))
    code, out, _ = run(capsys, "coeffs", "--space", "S2:r=1",
                       "--rep", str(path), "--order", "1")
    assert code == 0
    assert json.loads(out)["trace"][1] == [pytest.approx(1.0 / 3.0), 0.0]


def test_negative_time_rejected(capsys):
    code, _, _ = run(capsys, "diag", "--space", "S2:r=1", "--t", "-1")
    assert code == 2
