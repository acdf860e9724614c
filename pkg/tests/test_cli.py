import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrcmos import cli
from mrcmos.decomposition import build_partition
from mrcmos.mesh import build_grid
from mrcmos.mrcm import MultiscaleSolution
from mrcmos.problem import make_spe10_problem, synthetic_spe10_layer, write_spe10_layer


def _read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def _small(tmp_path, **extra):
    raw = {"problem": {"kind": "homogeneous", "M": 2, "n_loc": 8},
           "methods": ["MRCM", "OL-2", "OL-2,2S"], "output": str(tmp_path / "out")}
    raw.update(extra)
    return raw


def test_config_round_trip():
    raw = {"problem": {"kind": "homogeneous", "M": 2, "n_loc": 8},
           "methods": ["OL-2,2S", {"d": 1, "l": 1}], "alphas": [1, "1e-2"]}
    norm = cli.normalize_config(raw)
    assert norm["methods"] == [{"d": 2, "l": 2, "ns": 2}, {"d": 1, "l": 1, "ns": 0}]
    assert norm["alphas"] == [1.0, 0.01]
    assert cli.config_to_dict(cli.parse_config(norm)) == norm
    assert cli.normalize_config(json.loads(json.dumps(norm))) == norm


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.one_of(st.none(), st.integers(0, 9)),
                          st.integers(0, 8)), min_size=1, max_size=4),
       st.lists(st.floats(1e-8, 1e8), min_size=1, max_size=3))
def test_config_round_trip_property(methods, alphas):
    ms = [{"d": d, "l": l, "ns": ns if l is not None else 0} for d, l, ns in methods]
    raw = {"methods": ms, "alphas": alphas}
    norm = cli.normalize_config(raw)
    assert cli.config_to_dict(cli.parse_config(norm)) == norm


def test_validation_lists_all_field_paths():
    raw = {"problem": {"kind": "homogeneous", "M": 0, "n_loc": 8, "bogus": 1}}
    with pytest.raises(cli.ConfigError, match="problem.bogus"):
        cli.parse_config(raw)
    raw = {"problem": {"M": 0, "n_loc": 8},
           "methods": [{"d": 3, "l": 4}, {"d": 2, "l": None, "ns": 2}], "alphas": [-1.0]}
    with pytest.raises(cli.ConfigError) as exc:
        cli.parse_config(raw)
    msg = str(exc.value)
    for path in ("problem.M", "methods[0].d", "methods[0].l", "methods[1]", "alphas[0]"):
        assert path in msg


def test_override():
    raw = cli.apply_override({}, "problem.M=8")
    raw = cli.apply_override(raw, "methods=[\"OL-1\"]")
    raw = cli.apply_override(raw, "output=results dir")
    cfg = cli.parse_config(raw)
    assert cfg.problem.M == 8
    assert cfg.methods == [{"d": 2, "l": 1, "ns": 0}]
    assert cfg.output == "results dir"
    with pytest.raises(cli.ConfigError):
        cli.apply_override({}, "noequals")


def test_solve_writes_results_and_cost(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(_small(tmp_path)))
    assert cli.main(["solve", "--config", str(cfg)]) == 0
    rows = _read(tmp_path / "out" / "results.csv")
    assert [r["method"] for r in rows] == ["MRCM", "OL-2", "OL-2,2S"]
    assert list(rows[0]) == cli.RESULT_COLUMNS
    mantissa = rows[0]["err_p_rel"].split("e")[0].lstrip("-")
    # scientific notation with 17 significant digits
    assert len(mantissa.replace(".", "")) == 17
    cost = _read(tmp_path / "out" / "cost.csv")
    assert len(cost) == 3


def test_determinism(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert cli.main(["solve", "--set", "problem.M=2", "--set", "problem.n_loc=8",
                         "--set", 'methods=["MRCM","OL-2,2S"]', "--out", str(out)]) == 0
        rows = _read(out / "results.csv")
        outs.append([{k: v for k, v in r.items() if k != "runtime_ms"} for r in rows])
    assert outs[0] == outs[1]


def test_smooth_study_identity_and_columns(tmp_path):
    raw = _small(tmp_path, methods=["OL-2"], ns_list=[0, 1, 2])
    rows = cli.cmd_smooth_study(cli.parse_config(raw), tmp_path / "s")
    assert [r["Ns"] for r in rows] == [0, 1, 2]
    plain = cli.cmd_solve(cli.parse_config(_small(tmp_path, methods=["OL-2"], reference="fine")),
                          tmp_path / "p")
    assert rows[0]["err_u_rel"] == plain[0]["err_u_rel"]
    assert rows[0]["err_p_rel"] == plain[0]["err_p_rel"]


def test_refine_outputs(tmp_path):
    raw = _small(tmp_path, methods=["MRCM"], M_list=[1, 2])
    rows, slopes = cli.cmd_refine(cli.parse_config(raw), tmp_path / "r")
    assert {r["method"] for r in rows} == {"fine", "MRCM"}
    assert (tmp_path / "r" / "slopes.csv").exists()
    assert {s["method"] for s in slopes} == {"fine", "MRCM"}


def test_refine_rejects_spe(tmp_path):
    cfg = cli.parse_config({"problem": {"kind": "spe10"}})
    with pytest.raises(cli.ConfigError):
        cli.cmd_refine(cfg, tmp_path)


def test_dump_single_cell(tmp_path):
    g = build_grid(1, 1, 1.0)
    part = build_partition(g, 1, 1)
    sol = MultiscaleSolution.from_fine(part, np.array([0.5]), np.zeros(g.n_edges))
    files = cli.dump_solution(sol, tmp_path, vtk=True)
    assert np.loadtxt(tmp_path / "pressure.csv", delimiter=",").size == 1
    assert (tmp_path / "pressure.vtk").read_text().startswith("# vtk DataFile")
    assert {f.name for f in files} == {"pressure.csv", "flux_x.csv", "flux_y.csv", "pressure.vtk"}


def test_dump_spe_geometry_and_jump_length(tmp_path):
    pr = make_spe10_problem(synthetic_spe10_layer())
    part = build_partition(pr.grid, *pr.layout)
    sol = MultiscaleSolution.from_fine(part, np.arange(pr.grid.n_cells, dtype=float),
                                       np.zeros(pr.grid.n_edges))
    cli.dump_solution(sol, tmp_path)
    p = np.loadtxt(tmp_path / "pressure.csv", delimiter=",")
    assert p.shape == (60, 220)
    assert p[0, 1] == 1.0 and p[1, 0] == 220.0
    jump = list(tmp_path.glob("jump_*.csv"))
    assert len(jump) == 1
    assert len(_read(jump[0])) == 220
    fx = _read(tmp_path / "flux_x.csv")
    assert len(fx) == pr.grid.n_vertical


def test_dump_reports_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    g = build_grid(2, 2, 0.5)
    sol = MultiscaleSolution.from_fine(build_partition(g, 1, 1), np.zeros(4), np.zeros(g.n_edges))
    with pytest.raises(OSError):
        cli.dump_solution(sol, blocker / "sub")


def test_spe10_import_and_use(tmp_path, monkeypatch):
    perm = synthetic_spe10_layer(seed=1)
    src = tmp_path / "layer.txt"
    write_spe10_layer(perm, src, 40, "kx")
    dst = tmp_path / "cache.txt"
    assert cli.main(["spe10-import", str(src), "--out", str(dst)]) == 0
    assert dst.read_text() == src.read_text()
    assert cli.main(["spe10-import", str(tmp_path / "missing")]) == 2


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"methods": ["OL-99"]}')
    assert cli.main(["solve", "--config", str(cfg)]) == 2
    assert "methods[0].l" in capsys.readouterr().err
    cfg.write_text("{not json")
    assert cli.main(["solve", "--config", str(cfg)]) == 2


def test_print_config(capsys):
    assert cli.main(["alpha-sweep", "--print-config", "-v"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["alphas"][0] == 1e-8 and cfg["alphas"][-1] == 1e8
    assert len(cfg["alphas"]) == 17


def test_reference_option(tmp_path):
    with pytest.raises(cli.ConfigError, match="reference"):
        cli.parse_config({"reference": "exact"})
    raw = _small(tmp_path, methods=["OL-2"], ns_list=[0, 4], reference="analytic")
    analytic = cli.cmd_smooth_study(cli.parse_config(raw), tmp_path / "a")
    raw["reference"] = None
    fine = cli.cmd_smooth_study(cli.parse_config(raw), tmp_path / "f")
    # smoothing converges to the fine-grid solution, the default reference here
    assert fine[1]["err_u_abs"] < 0.1 * fine[0]["err_u_abs"]
    assert analytic[0]["err_u_abs"] != fine[0]["err_u_abs"]
    spe = cli.parse_config({"problem": {"kind": "spe10"}, "reference": "analytic"})
    with pytest.raises(cli.ConfigError):
        cli.cmd_solve(spe, tmp_path / "s")
