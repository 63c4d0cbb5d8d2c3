import json
import xml.etree.ElementTree as ET

import pytest

from amoebapuiseux.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_OK, EXIT_STAGE, main

F = "z^2 - x - y + 1"
CUBIC = "50*x^3+83*x^2*y+24*x*y^2+y^3+392*x^2+414*x*y+50*y^2-28*x+59*y-100"


def run(*argv):
    return main([str(a) for a in argv])


def load(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def phi1_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("solve") / "phi1.json"
    assert run("solve", "-f", F, "--component", "1,0", "--weight", 20, "-o", path) == EXIT_OK
    return path


def test_solve_one_zero(phi1_file):
    out = load(phi1_file)
    assert out["order"] == [1, 0] and out["vars"] == ["x", "y", "z"]
    (rec,) = out["expansions"]
    assert rec["d"] == 2
    assert rec["support_cone"]["generators"] == [[-1, 0], [-1, 1]]
    assert all(rec["checks"].values())
    assert rec["residual"] < 1e-9
    assert {"t_exp", "x_exp", "re", "im"} == set(rec["coefficients"][0])


def test_solve_zero_zero_gives_two_integral_branches(tmp_path):
    path = tmp_path / "phi3.json"
    assert run("solve", "-f", F, "--component", "0,0", "-o", path) == EXIT_OK
    recs = load(path)["expansions"]
    assert [r["d"] for r in recs] == [1, 1]
    leads = sorted(next(c["im"] for c in r["coefficients"] if c["t_exp"] == [0, 0]) for r in recs)
    assert leads == pytest.approx([-1, 1], abs=1e-9)


def test_solve_quasi_ordinary(tmp_path, capsys):
    path = tmp_path / "q.json"
    assert run("solve", "-f", "y^2 - x1*x2", "--grid", 32, "-o", path) == EXIT_OK
    assert "empty amoeba" in capsys.readouterr().err
    out = load(path)
    assert out["order"] == [1, 1]
    (rec,) = out["expansions"]
    assert rec["d"] == 2 and [c["t_exp"] for c in rec["coefficients"]] == [[1, 1]]
    assert rec["residual"] < 1e-12


def test_verify_accepts_solve_output(phi1_file, tmp_path):
    report = tmp_path / "report.json"
    assert run("verify", phi1_file, F, "-o", report) == EXIT_OK
    (row,) = load(report)
    assert row["residual_pass"] and row["support_pass"] and row["apex"] == [1, 0]


def _edit(src, dst, fn):
    out = load(src)
    fn(out["expansions"][0]["coefficients"])
    with open(dst, "w") as fh:
        json.dump(out, fh)
    return dst


def test_verify_flags_coefficient_moved_outside_cone(phi1_file, tmp_path):
    def move(coeffs):
        row = next(c for c in coeffs if c["t_exp"] == [-3, 4])
        row["t_exp"] = [-3, 5]  # (-4, 5) is not in the cone
    bad = _edit(phi1_file, tmp_path / "moved.json", move)
    report = tmp_path / "r.json"
    assert run("verify", bad, F, "-o", report) == EXIT_CHECK
    (row,) = load(report)
    assert not row["support_pass"] and row["offending"] == [[-3, 5]]


def test_verify_flags_corrupted_coefficient(phi1_file, tmp_path):
    def corrupt(coeffs):
        row = next(c for c in coeffs if c["t_exp"] == [-1, 2])
        row["re"] *= 1.5
    bad = _edit(phi1_file, tmp_path / "corrupt.json", corrupt)
    report = tmp_path / "r.json"
    assert run("verify", bad, F, "-o", report) == EXIT_CHECK
    (row,) = load(report)
    assert row["support_pass"] and not row["residual_pass"]


def test_solve_check_failure_exit_code(tmp_path):
    path = tmp_path / "strict.json"
    assert run("solve", "-f", F, "--component", "0,1", "--tol-residual", 1e-30, "-o", path) == EXIT_CHECK
    assert not load(path)["expansions"][0]["checks"]["residual_pass"]


@pytest.mark.parametrize("argv", [
    ("solve", "-f", "z^2 - x +", "--component", "1,0"),
    ("solve", "-f", F, "--component", "2,0"),
    ("solve", "-f", F),
    ("orders", "-f", "x + y - 1", "--res", "-3"),
    ("render", "-f", "x + y - 1"),
    ("cones", "-f", "x + 1"),
    ("frobnicate",),
])
def test_config_errors(argv):
    assert run(*argv) == EXIT_CONFIG


def test_verify_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("verify", bad, F) == EXIT_CONFIG


def test_stage_failure_exit_code(capsys):
    assert run("monodromy", "-f", F, "--component", "1,0", "--point", "-3,-3") == EXIT_STAGE
    assert "order" in capsys.readouterr().err


def test_negative_box_and_point_values(tmp_path):
    path = tmp_path / "m.json"
    assert run("monodromy", "-f", F, "--component", "0,0", "--point", "-2,-2", "-o", path) == EXIT_OK
    assert load(path)["d"] == [1, 1]


def test_render_line(tmp_path):
    svg, table = tmp_path / "a.svg", tmp_path / "a.json"
    assert run("render", "-f", "x + y - 1", "--box", "-4:4,-4:4", "--res", 80, "-o", svg,
               "--json", table) == EXIT_OK
    ET.parse(svg)
    assert sorted(tuple(r["order"]) for r in load(table)) == [(0, 0), (0, 1), (1, 0)]


def test_render_cubic_vertex_labels(tmp_path):
    svg, table = tmp_path / "c.svg", tmp_path / "c.json"
    assert run("render", "-f", CUBIC, "--box", "-6:8,-6:8", "--res", 120, "-o", svg,
               "--json", table) == EXIT_OK
    orders = {tuple(r["order"]) for r in load(table)}
    assert {(0, 0), (3, 0), (0, 3)} <= orders


def test_render_monomial_warns(tmp_path, capsys):
    svg = tmp_path / "m.svg"
    assert run("render", "-f", "x^2*y", "--res", 20, "-o", svg) == EXIT_OK
    assert "empty amoeba" in capsys.readouterr().err


def test_render_discriminant(tmp_path):
    table = tmp_path / "d.json"
    assert run("orders", "-f", F, "--discriminant", "--res", 60, "-o", table) == EXIT_OK
    assert len(load(table)) == 3


def test_cones_output(tmp_path):
    path = tmp_path / "cones.json"
    assert run("cones", "-f", F, "-o", path) == EXIT_OK
    out = load(path)
    by_order = {tuple(v["order"]): v for v in out["vertices"]}
    assert by_order[(1, 0)]["support_cone"]["generators"] == [[-1, 0], [-1, 1]]
    assert by_order[(0, 0)]["regular"] is True
    assert out["newton_polytope"]["vertices"]


def test_json_and_svg_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        js, svg, fig = tmp_path / f"s{k}.json", tmp_path / f"s{k}.svg", tmp_path / f"f{k}.svg"
        assert run("solve", "-f", F, "--component", "0,1", "--seed", 7, "-o", js,
                   "--figure", fig) == EXIT_OK
        assert run("render", "-f", "x + y - 1", "--res", 40, "--seed", 7, "-o", svg) == EXIT_OK
        outs.append([p.read_bytes() for p in (js, svg, fig)])
    assert outs[0] == outs[1]
