"""Experiment runner.

Subcommands ``solve``, ``alpha-sweep``, ``refine``, ``smooth-study`` and
``spe10-import``.  An experiment is described by one JSON document (see
:class:`ExperimentConfig`); ``--set key=value`` overrides any leaf, with
dotted keys for nested fields and JSON-parsed values.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .darcy_core import solve_fine
from .decomposition import Partition, build_partition, oversample
from .metrics import (convergence_slope, default_jump_line, flux_jump_profile,
                      l2_flux_error, l2_pressure_error)
from .mrcm import MethodSpec, MultiscaleSolution, MultiscaleSolver
from .problem import (DarcyProblem, load_spe10, make_homogeneous_problem, make_spe10_problem,
                      spe10_field, write_spe10_layer)
from .smoothing import smoothing_sweep

log = logging.getLogger("mrcmos")

SWEEP_ALPHAS = [10.0 ** k for k in range(-8, 9)]
RESULT_COLUMNS = ["method", "d", "l", "Ns", "alpha", "err_p_rel", "err_u_rel", "runtime_ms"]


class ConfigError(ValueError):
    """Invalid experiment configuration; the message lists every problem."""


@dataclass
class ProblemConfig:
    kind: str = "homogeneous"
    M: int = 4
    n_loc: int = 20
    path: Optional[str] = None
    layer: int = 40
    component: str = "kx"


@dataclass
class ExperimentConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    methods: list = field(default_factory=lambda: [{"d": 2, "l": None, "ns": 0}])
    alphas: list = field(default_factory=lambda: [1.0])
    M_list: list = field(default_factory=lambda: [2, 4, 8, 16])
    ns_list: list = field(default_factory=lambda: list(range(9)))
    output: str = "out"
    seed: int = 0
    threads: int = 1
    mean_adjust: Optional[bool] = None
    """Compare zero-mean pressures; defaults to on for pure Neumann problems."""
    dump_fields: bool = False
    vtk: bool = False
    jump_line: Optional[list] = None
    """Face indices of the flux-jump line; defaults to the middle horizontal line."""
    affine: bool = True
    smoothing_alpha: float = 1.0
    reference: Optional[str] = None
    """'analytic', 'fine' or 'auto'; the default is 'fine' for smooth-study, 'auto' otherwise."""


def _method_dict(m, where: str) -> dict:
    if isinstance(m, str):
        try:
            s = MethodSpec.parse(m)
        except ValueError as err:
            raise ConfigError(f"{where}: {err}") from None
        return {"d": s.d, "l": s.l, "ns": s.ns}
    if isinstance(m, dict):
        extra = set(m) - {"d", "l", "ns"}
        if extra:
            raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
        return {"d": int(m.get("d", 2)), "l": None if m.get("l") is None else int(m["l"]),
                "ns": int(m.get("ns", 0))}
    raise ConfigError(f"{where}: expected a method name or an object, got {m!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    """Build a validated config from a JSON object; unknown keys are errors."""
    raw = copy.deepcopy(raw)
    errors = []
    known = set(ExperimentConfig.__dataclass_fields__)
    for k in sorted(set(raw) - known):
        errors.append(f"{k}: unknown field")
    prob_raw = raw.pop("problem", {}) or {}
    pknown = set(ProblemConfig.__dataclass_fields__)
    for k in sorted(set(prob_raw) - pknown):
        errors.append(f"problem.{k}: unknown field")
    if errors:
        raise ConfigError("; ".join(errors))
    prob = ProblemConfig(**prob_raw)
    cfg = ExperimentConfig(problem=prob, **{k: v for k, v in raw.items() if k in known})
    cfg.methods = [_method_dict(m, f"methods[{i}]") for i, m in enumerate(cfg.methods)]
    cfg.alphas = [float(a) for a in cfg.alphas]
    cfg.M_list = [int(m) for m in cfg.M_list]
    cfg.ns_list = [int(n) for n in cfg.ns_list]
    cfg.smoothing_alpha = float(cfg.smoothing_alpha)
    validate_config(cfg)
    return cfg


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)


def normalize_config(raw: dict) -> dict:
    """Canonical form: defaults filled in, method names expanded, numbers typed."""
    return config_to_dict(parse_config(raw))


def _local_size(cfg: ExperimentConfig) -> int:
    return 20 if cfg.problem.kind == "spe10" else cfg.problem.n_loc


def validate_config(cfg: ExperimentConfig) -> None:
    errors = []
    p = cfg.problem
    if p.kind not in ("homogeneous", "spe10"):
        errors.append(f"problem.kind: expected 'homogeneous' or 'spe10', got {p.kind!r}")
    if p.kind == "homogeneous":
        if p.M < 1:
            errors.append(f"problem.M: must be >= 1, got {p.M}")
        if p.n_loc < 2:
            errors.append(f"problem.n_loc: must be >= 2, got {p.n_loc}")
    if p.component not in ("kx", "ky", "kz"):
        errors.append(f"problem.component: expected kx, ky or kz, got {p.component!r}")
    n_loc = _local_size(cfg)
    for i, m in enumerate(cfg.methods):
        if m["d"] not in (1, 2):
            errors.append(f"methods[{i}].d: must be 1 or 2, got {m['d']}")
        if m["ns"] < 0:
            errors.append(f"methods[{i}].ns: must be >= 0, got {m['ns']}")
        if m["l"] is not None and not 0 <= 2 * m["l"] < n_loc:
            errors.append(f"methods[{i}].l: oversampling needs 0 <= l*h < H/2, "
                          f"i.e. l < {(n_loc + 1) // 2} for {n_loc} local cells, got {m['l']}")
        if m["ns"] > 0 and m["l"] is None:
            errors.append(f"methods[{i}]: smoothing needs an oversampling width l")
    for i, a in enumerate(cfg.alphas):
        if not a > 0 or not np.isfinite(a):
            errors.append(f"alphas[{i}]: must be positive and finite, got {a}")
    if cfg.smoothing_alpha <= 0:
        errors.append(f"smoothing_alpha: must be positive, got {cfg.smoothing_alpha}")
    for i, m in enumerate(cfg.M_list):
        if m < 1:
            errors.append(f"M_list[{i}]: must be >= 1, got {m}")
    for i, n in enumerate(cfg.ns_list):
        if n < 0:
            errors.append(f"ns_list[{i}]: must be >= 0, got {n}")
    if cfg.reference not in (None, "auto", "analytic", "fine"):
        errors.append(f"reference: expected auto, analytic or fine, got {cfg.reference!r}")
    if cfg.threads < 1:
        errors.append(f"threads: must be >= 1, got {cfg.threads}")
    if errors:
        raise ConfigError("; ".join(errors))


def apply_override(raw: dict, assignment: str) -> dict:
    """Apply one ``dotted.key=value`` override; the value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, text = assignment.split("=", 1)
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    parts = key.strip().split(".")
    node = raw
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {key}: {p} is not an object")
    node[parts[-1]] = value
    return raw


# --------------------------------------------------------------------------
# problems and runs

def build_problem(cfg: ExperimentConfig, M: Optional[int] = None) -> tuple[DarcyProblem, Partition]:
    p = cfg.problem
    if p.kind == "homogeneous":
        m = p.M if M is None else M
        prob = make_homogeneous_problem(m, p.n_loc)
    else:
        path = p.path or os.environ.get("SPE10_PERM")
        if not path:
            log.warning("no SPE10 data given (problem.path or $SPE10_PERM); "
                        "using the synthetic stand-in layer")
        prob = make_spe10_problem(spe10_field(path, p.layer, p.component))
    return prob, build_partition(prob.grid, *prob.layout)


def method_name(m: dict) -> str:
    return MethodSpec(m["d"], m["l"], m["ns"]).name


def _mean_adjust(cfg: ExperimentConfig, prob: DarcyProblem) -> bool:
    return prob.pure_neumann if cfg.mean_adjust is None else bool(cfg.mean_adjust)


@dataclass
class Reference:
    pressure: np.ndarray
    flux: np.ndarray
    kind: str


def reference_for(prob: DarcyProblem, kind: str = "auto") -> Reference:
    """Analytic solution or fine-grid solve; ``auto`` prefers the analytic one."""
    if kind == "analytic" and not prob.has_exact:
        raise ConfigError("reference: the problem has no analytic solution")
    if kind in ("auto", "analytic") and prob.has_exact:
        return Reference(prob.exact_cell_pressure(), prob.exact_edge_flux(), "analytic")
    fs = solve_fine(prob)
    return Reference(fs.pressure, fs.flux, "fine-grid")


def _errors(sol: MultiscaleSolution, ref: Reference, h: float, mean_adjust: bool):
    pa, pr = l2_pressure_error(sol.pressure, ref.pressure, h, mean_adjust)
    ua, ur = l2_flux_error(sol, ref.flux)
    return pa, pr, ua, ur


def _runtime(sol: MultiscaleSolution) -> float:
    return float(sum(sol.meta.get("runtime_ms", {}).values()))


def run_method(solver: MultiscaleSolver, m: dict, alpha: float, smoothing_alpha: float = 1.0,
               threads: int = 1) -> MultiscaleSolution:
    sol = solver.solve(alpha, m["d"], m["l"])
    if m["ns"]:
        op = oversample(solver.partition, m["l"])
        t0 = time.perf_counter()
        for _ in range(m["ns"]):
            sol = smoothing_sweep(sol, op, solver.cache, smoothing_alpha, threads)
        sol.meta["ns"] = m["ns"]
        sol.meta["runtime_ms"]["smoothing"] = 1e3 * (time.perf_counter() - t0)
        if solver.problem.pure_neumann:
            sol.pressure -= sol.pressure.mean()
    return sol


def cost_rows(part: Partition, methods: Sequence[dict], affine: bool = True) -> list[dict]:
    """Local-problem count per core, local and interface problem sizes.

    The local count is for a subdomain with four interior faces: one solve
    per Robin basis function, one bar solve, one forced oversampled solve
    when the affine offset is on, and one solve per smoothing sweep.
    """
    n_loc = min(part.n_loc)
    rows = []
    for m in methods:
        l = m["l"] or 0
        n_basis = 4 * m["d"]
        nlc = n_basis + 1 + m["ns"] + (1 if affine and l > 0 else 0)
        ip = sum(m["d"] * len(part.faces_of[i]) for i in range(part.n_sub))
        side = n_loc + 2 * l
        rows.append({"method": method_name(m), "l": l, "Ns": m["ns"], "NLC": nlc,
                     "LP": f"{side}x{side}", "IP": f"{ip}x{ip}"})
    return rows


# --------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.16e" % v
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_fmt(r[c]) for c in columns])
    except OSError as err:
        raise OSError(f"cannot write {path}: {err.strerror}") from err


def _jump_name(part: Partition, faces: Sequence[int]) -> str:
    f = part.faces[faces[0]]
    i, j = part.block(f.lo)
    return f"h{j}" if f.axis == 1 else f"v{i}"


def dump_solution(sol: MultiscaleSolution, out: Path, jump_faces: Optional[Sequence[int]] = None,
                  vtk: bool = False) -> list[Path]:
    """Write pressure and flux fields and a flux-jump profile; returns the files written.

    ``pressure.csv`` holds ``ny`` rows of ``nx`` values, bottom row first.
    The flux files list every edge of one orientation with the values seen
    from its lower (``u_lo``) and upper (``u_hi``) side; they differ only on
    the skeleton.
    """
    part = sol.partition
    g = part.grid
    out.mkdir(parents=True, exist_ok=True)
    written = []
    p_path = out / "pressure.csv"
    try:
        np.savetxt(p_path, sol.pressure.reshape(g.ny, g.nx), fmt="%.16e", delimiter=",")
    except OSError as err:
        raise OSError(f"cannot write {p_path}: {err.strerror}") from err
    written.append(p_path)
    mid = g.edge_midpoints
    for axis, name in ((0, "flux_x.csv"), (1, "flux_y.csv")):
        e = np.flatnonzero(g.edge_axis == axis)
        rows = [{"edge": int(k), "x": float(mid[k, 0]), "y": float(mid[k, 1]),
                 "u_lo": float(sol.flux_lo[k]), "u_hi": float(sol.flux_hi[k])} for k in e]
        write_csv(out / name, ["edge", "x", "y", "u_lo", "u_hi"], rows)
        written.append(out / name)
    if part.faces:
        faces = list(jump_faces) if jump_faces is not None else default_jump_line(part)
        if faces:
            jump = flux_jump_profile(sol, faces)
            edges = np.concatenate([part.faces[f].edges for f in
                                    sorted(faces, key=lambda f: part.block(part.faces[f].lo))])
            coord = mid[edges, 0] if part.faces[faces[0]].axis == 1 else mid[edges, 1]
            path = out / f"jump_{_jump_name(part, faces)}.csv"
            write_csv(path, ["s", "jump"], [{"s": float(s), "jump": float(j)}
                                             for s, j in zip(coord, jump)])
            written.append(path)
    if vtk:
        path = out / "pressure.vtk"
        try:
            with open(path, "w") as fh:
                fh.write("# vtk DataFile Version 3.0\npressure\nASCII\nDATASET STRUCTURED_POINTS\n")
                fh.write(f"DIMENSIONS {g.nx + 1} {g.ny + 1} 1\n")
                fh.write(f"ORIGIN {g.origin[0]!r} {g.origin[1]!r} 0\nSPACING {g.h!r} {g.h!r} 1\n")
                fh.write(f"CELL_DATA {g.n_cells}\nSCALARS pressure double 1\nLOOKUP_TABLE default\n")
                fh.write("\n".join("%.16e" % v for v in sol.pressure))
                fh.write("\n")
        except OSError as err:
            raise OSError(f"cannot write {path}: {err.strerror}") from err
        written.append(path)
    return written


# --------------------------------------------------------------------------
# subcommands

def _result_row(m: dict, alpha: float, sol: MultiscaleSolution, errs) -> dict:
    return {"method": method_name(m), "d": m["d"], "l": "" if m["l"] is None else m["l"],
            "Ns": m["ns"], "alpha": alpha, "err_p_rel": errs[1], "err_u_rel": errs[3],
            "runtime_ms": _runtime(sol)}


def _run_matrix(cfg: ExperimentConfig, alphas: Sequence[float], out: Path, csv_name: str,
                dump: bool) -> list[dict]:
    prob, part = build_problem(cfg)
    ref = reference_for(prob, cfg.reference or "auto")
    adj = _mean_adjust(cfg, prob)
    solver = MultiscaleSolver(prob, part, cfg.threads, affine=cfg.affine)
    rows = []
    for m in cfg.methods:
        for a in alphas:
            sol = run_method(solver, m, a, cfg.smoothing_alpha, cfg.threads)
            errs = _errors(sol, ref, prob.grid.h, adj)
            rows.append(_result_row(m, a, sol, errs))
            log.info("%s alpha=%g: err_p_rel=%.3e err_u_rel=%.3e", method_name(m), a,
                     errs[1], errs[3])
            if dump:
                dump_solution(sol, out / "fields" / f"{method_name(m)}_alpha{a:g}",
                              cfg.jump_line, cfg.vtk)
    write_csv(out / csv_name, RESULT_COLUMNS, rows)
    write_csv(out / "cost.csv", ["method", "l", "Ns", "NLC", "LP", "IP"],
              cost_rows(part, cfg.methods, cfg.affine))
    return rows


def cmd_solve(cfg: ExperimentConfig, out: Path) -> list[dict]:
    return _run_matrix(cfg, cfg.alphas, out, "results.csv", cfg.dump_fields)


def cmd_alpha_sweep(cfg: ExperimentConfig, out: Path) -> list[dict]:
    return _run_matrix(cfg, cfg.alphas, out, "alpha_sweep.csv", cfg.dump_fields)


REFINE_COLUMNS = ["method", "d", "l", "Ns", "alpha", "M", "h", "err_p_abs", "err_u_abs",
                  "err_p_rel", "err_u_rel", "runtime_ms"]


def cmd_refine(cfg: ExperimentConfig, out: Path) -> tuple[list[dict], list[dict]]:
    if cfg.problem.kind != "homogeneous":
        raise ConfigError("problem.kind: refine needs the homogeneous problem")
    rows = []
    for M in cfg.M_list:
        prob, part = build_problem(cfg, M)
        ref = reference_for(prob, cfg.reference or "auto")
        adj = _mean_adjust(cfg, prob)
        h = prob.grid.h
        t0 = time.perf_counter()
        fs = solve_fine(prob)
        fine = MultiscaleSolution.from_fine(part, fs.pressure, fs.flux)
        e = _errors(fine, ref, h, adj)
        rows.append({"method": "fine", "d": "", "l": "", "Ns": 0, "alpha": "", "M": M, "h": h,
                     "err_p_abs": e[0], "err_u_abs": e[2], "err_p_rel": e[1], "err_u_rel": e[3],
                     "runtime_ms": 1e3 * (time.perf_counter() - t0)})
        solver = MultiscaleSolver(prob, part, cfg.threads, affine=cfg.affine)
        for m in cfg.methods:
            if m["l"] is not None and 2 * m["l"] >= min(part.n_loc):
                continue
            for a in cfg.alphas:
                sol = run_method(solver, m, a, cfg.smoothing_alpha, cfg.threads)
                e = _errors(sol, ref, h, adj)
                row = _result_row(m, a, sol, e)
                row.update({"M": M, "h": h, "err_p_abs": e[0], "err_u_abs": e[2]})
                rows.append(row)
                log.info("M=%d %s alpha=%g: err_p=%.3e err_u=%.3e", M, method_name(m), a,
                         e[0], e[2])
    write_csv(out / "refine.csv", REFINE_COLUMNS, rows)
    slopes = []
    groups = {}
    for r in rows:
        groups.setdefault((r["method"], r["d"], r["l"], r["Ns"], r["alpha"]), []).append(r)
    for (name, d, l, ns, a), rs in groups.items():
        if len(rs) < 2:
            continue
        sp = convergence_slope([(r["h"], r["err_p_abs"]) for r in rs])
        su = convergence_slope([(r["h"], r["err_u_abs"]) for r in rs])
        slopes.append({"method": name, "d": d, "l": l, "Ns": ns, "alpha": a,
                       "slope_p": sp, "slope_u": su})
    write_csv(out / "slopes.csv", ["method", "d", "l", "Ns", "alpha", "slope_p", "slope_u"],
              slopes)
    return rows, slopes


SMOOTH_COLUMNS = RESULT_COLUMNS[:-1] + ["err_p_abs", "err_u_abs", "runtime_ms"]


def cmd_smooth_study(cfg: ExperimentConfig, out: Path) -> list[dict]:
    """Errors after each sweep count in ``ns_list`` for every oversampled method."""
    prob, part = build_problem(cfg)
    ref = reference_for(prob, cfg.reference or "fine")
    adj = _mean_adjust(cfg, prob)
    h = prob.grid.h
    solver = MultiscaleSolver(prob, part, cfg.threads, affine=cfg.affine)
    counts = sorted(set(cfg.ns_list))
    rows = []
    for m in cfg.methods:
        if m["l"] is None:
            log.warning("%s has no oversampling; skipped in the smoothing study", method_name(m))
            continue
        op = oversample(part, m["l"])
        for a in cfg.alphas:
            sol = solver.solve(a, m["d"], m["l"])
            t_base = _runtime(sol)
            done, t_smooth = 0, 0.0
            for n in counts:
                t0 = time.perf_counter()
                for _ in range(n - done):
                    sol = smoothing_sweep(sol, op, solver.cache, cfg.smoothing_alpha, cfg.threads)
                t_smooth += 1e3 * (time.perf_counter() - t0)
                done = n
                if prob.pure_neumann:
                    sol.pressure -= sol.pressure.mean()
                e = _errors(sol, ref, h, adj)
                mm = dict(m, ns=n)
                row = _result_row(mm, a, sol, e)
                row.update({"err_p_abs": e[0], "err_u_abs": e[2], "runtime_ms": t_base + t_smooth})
                rows.append(row)
    write_csv(out / "smooth_study.csv", SMOOTH_COLUMNS, rows)
    return rows


def cmd_spe10_import(path: str, out_file: Path, layer: int, component: str) -> Path:
    perm = load_spe10(path, layer, component)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    write_spe10_layer(perm, out_file, layer, component)
    v = perm.values
    log.info("layer %d %s: %d values in [%.3e, %.3e] written to %s", layer, component, v.size,
             v.min(), v.max(), out_file)
    return out_file


# --------------------------------------------------------------------------
# entry point

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")
    ap = argparse.ArgumentParser(prog="mrcmos", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("solve", "run the configured method matrix"),
                           ("alpha-sweep", "Robin parameter sweep (default 1e-8 .. 1e8)"),
                           ("refine", "mesh refinement on the homogeneous problem"),
                           ("smooth-study", "errors against the number of smoothing sweeps")):
        p = sub.add_parser(name, help=helptext, parents=[common])
        p.add_argument("--config", type=Path, help="JSON experiment configuration")
        p.add_argument("--out", type=Path, help="output directory (overrides 'output')")
        p.add_argument("--threads", type=int, help="worker threads for local solves")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration leaf, e.g. problem.M=8")
        p.add_argument("--print-config", action="store_true",
                       help="print the normalized configuration and exit")
    p = sub.add_parser("spe10-import", help="extract one SPE10 layer into a cache file",
                       parents=[common])
    p.add_argument("path", help="raw SPE10 permeability file")
    p.add_argument("--layer", type=int, default=40)
    p.add_argument("--component", default="kx", choices=("kx", "ky", "kz"))
    p.add_argument("--out", type=Path, default=Path("spe10_layer.txt"), help="cache file to write")
    return ap


def load_config(args) -> ExperimentConfig:
    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as err:
            raise ConfigError(f"cannot read config {args.config}: {err.strerror}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"{args.config}: invalid JSON ({err})") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: top level must be an object")
    if args.command == "alpha-sweep" and "alphas" not in raw:
        raw["alphas"] = list(SWEEP_ALPHAS)
    for s in args.set:
        apply_override(raw, s)
    if args.threads is not None:
        raw["threads"] = args.threads
    if args.out is not None:
        raw["output"] = str(args.out)
    return parse_config(raw)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "spe10-import":
            cmd_spe10_import(args.path, args.out, args.layer, args.component)
            return 0
        cfg = load_config(args)
        if args.print_config:
            print(json.dumps(config_to_dict(cfg), indent=2))
            return 0
        out = Path(cfg.output)
        {"solve": cmd_solve, "alpha-sweep": cmd_alpha_sweep, "refine": cmd_refine,
         "smooth-study": cmd_smooth_study}[args.command](cfg, out)
    except (ConfigError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
