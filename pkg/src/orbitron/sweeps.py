"""Parameter sweeps and single-point tasks behind the command line."""

from concurrent.futures import ThreadPoolExecutor
import csv
import json
import math
import os

import numpy as np

from .dynamics import (TRAJECTORY_COLUMNS, hamiltonian, integrate, momentum_map,
                       trajectory_rows)
from .errors import (ComplementDegenerate, DegenerateVelocity, EigenFailure, NotCritical,
                     PoleSingularity, SignConstraint)
from .field import StandardField
from .linearization import classify_branch
from .releq import make_regular, make_singular, probe_steps, scaled_residual
from .stability import stability_report

FLAG_NAMES = {
    ("regular", "standard"): ("kozorez_left", "kozorez_right", "spin"),
    ("regular", "generalized"): ("existence", "kozorez", "vertical", "spin"),
    ("singular", "standard"): ("radial", "vertical", "orbital_rate", "spin"),
    ("singular", "generalized"): ("radial", "vertical", "orbital_rate", "spin"),
}

NUMERICAL = (EigenFailure, NotCritical, ComplementDegenerate, PoleSingularity)
DEGENERATE = (SignConstraint, DegenerateVelocity)


def fmt(v):
    """CSV cell: floats with 17 significant digits, booleans as 0/1."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def field_kind(field):
    return "standard" if isinstance(field, StandardField) else "generalized"


def make_branch(body, field, kind, r=None, xi1=None, xi2=0.0, sign=1):
    if kind == "regular":
        return make_regular(body, field, r, sign=sign, xi2=xi2)
    return make_singular(body, field, xi1, xi2)


def sweep_header(axes, kind, fkind):
    n = 8 if kind == "regular" else 10
    flags = FLAG_NAMES[(kind, fkind)]
    head = list(axes)
    head += [] if "xi1" in axes else ["xi1"]
    head += [f"pivot_{i}" for i in range(1, n + 1)]
    head += ["n_plus", "n_minus", "n_zero", "definite"]
    head += [f"flag_{f}" for f in flags] + [f"margin_{f}" for f in flags]
    for i in range(1, n + 1):
        head += [f"re_{i}", f"im_{i}"]
    head += ["max_re", "classification", "verdict", "status"]
    return head


def evaluate_point(body, field, kind, r=None, xi1=None, xi2=0.0, sign=1):
    """Nonlinear and spectral verdict at one parameter point, as a dict."""
    out = {"kind": kind, "r": r, "xi1": xi1, "xi2": xi2, "status": "ok"}
    try:
        br = make_branch(body, field, kind, r, xi1, xi2, sign)
        out["xi1"] = br.xi.xi1
        v = classify_branch(br, body, field)
    except DEGENERATE as exc:
        out["status"] = f"degenerate: {exc}"
        return out
    except NUMERICAL as exc:
        out["status"] = f"error: {exc}"
        return out
    out["report"] = v.nonlinear
    out["spectrum"] = v.spectrum
    out["verdict"] = v.verdict
    return out


def point_row(res, axes, kind, fkind):
    n = 8 if kind == "regular" else 10
    flags = FLAG_NAMES[(kind, fkind)]
    row = [res[a] for a in axes]
    if "xi1" not in axes:
        row.append(res["xi1"] if res["xi1"] is not None else math.nan)
    if res["status"] != "ok":
        nan_count = n + 4 + 2 * len(flags) + 2 * n + 1
        return row + [math.nan] * nan_count + ["degenerate", "undecided", res["status"]]
    rep, spec = res["report"], res["spectrum"]
    row += list(rep.pivots) + list(rep.signature) + [rep.definite]
    row += [bool(rep.condition_flags.get(f, False)) for f in flags]
    row += [float(rep.margins.get(f, math.nan)) for f in flags]
    for lam in spec.eigenvalues:
        row += [float(lam.real), float(lam.imag)]
    row += [spec.max_re, spec.classification, res["verdict"], "ok"]
    return row


def _grid_points(task, p):
    if task == "sweep_r":
        return ("r",), [{"r": float(r), "xi2": float(p["xi2"])}
                        for r in np.linspace(p["r_min"], p["r_max"], p["n"])]
    if task == "sweep_xi2":
        fixed = {"r": float(p["r"])} if p.get("branch", "regular") == "regular" else \
            {"xi1": float(p["xi1"])}
        return ("xi2",), [dict(fixed, xi2=float(x))
                          for x in np.linspace(p["xi2_min"], p["xi2_max"], p["n"])]
    # grid
    if p.get("branch", "regular") == "regular":
        a_name, a_vals = "r", np.linspace(p["r_min"], p["r_max"], p["n_r"])
    else:
        a_name, a_vals = "xi1", np.linspace(p["xi1_min"], p["xi1_max"], p["n_xi1"])
    xs = np.linspace(p["xi2_min"], p["xi2_max"], p["n_xi2"])
    return (a_name, "xi2"), [{a_name: float(a), "xi2": float(x)} for x in xs for a in a_vals]


def run_sweep(scn, threads=1):
    """Evaluate every grid point; rows come back in grid order."""
    p = scn.params
    kind = p.get("branch", "regular")
    sign = p.get("sign", 1)
    fkind = field_kind(scn.field)
    axes, points = _grid_points(scn.task, p)

    def one(pt):
        return evaluate_point(scn.body, scn.field, kind, pt.get("r"), pt.get("xi1"),
                              pt["xi2"], sign)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(pt) for pt in points]
    if scn.task == "sweep_xi2":
        head_axes = ("xi2", "r") if kind == "regular" else ("xi2", "xi1")
    elif scn.task == "sweep_r":
        head_axes = ("r", "xi2")
    else:
        head_axes = axes
    header = sweep_header(head_axes, kind, fkind)
    rows = [point_row(res, head_axes, kind, fkind) for res in results]
    return header, rows, results


# -- single-point tasks -------------------------------------------------------

def single_branch(scn):
    p = scn.params
    kind = p.get("branch", "regular")
    return make_branch(scn.body, scn.field, kind, p.get("r"), p.get("xi1"),
                       float(p.get("xi2", 0.0)), p.get("sign", 1))


def releq_summary(scn):
    br = single_branch(scn)
    J = momentum_map(br.z0)
    return {"branch": br.to_dict(),
            "scaled_residual": scaled_residual(scn.body, scn.field, br.z0, br.xi),
            "J": [J.J1, J.J2],
            "energy": hamiltonian(scn.body, scn.field, br.z0)}


def stability_summary(scn):
    br = single_branch(scn)
    return {"branch": br.to_dict(), "report": stability_report(br, scn.body, scn.field).to_dict()}


def linearize_summary(scn):
    br = single_branch(scn)
    v = classify_branch(br, scn.body, scn.field)
    return br, v


def initial_point(scn):
    """Branch point, optionally pushed off by a seeded random perturbation."""
    br = single_branch(scn)
    eps = float(scn.params.get("perturb", 0.0))
    if eps == 0.0:
        return br, br.z0
    rng = np.random.default_rng(scn.params.get("seed", 0))
    scales = probe_steps(scn.body, scn.field, br.z0) / 1e-5
    return br, br.z0.perturbed(eps * scales * rng.standard_normal(12))


def simulate(scn):
    p = scn.params
    br, z0 = initial_point(scn)
    xi = br.xi if p.get("frame", "space") == "rotating" else None
    traj = integrate(scn.body, scn.field, z0, float(p["t_end"]), float(p["dt"]),
                     stride=p.get("stride", 1), xi=xi)
    return br, traj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


class TaskResult:
    """Files written by a task and whether any numerical failure occurred."""

    def __init__(self):
        self.files = []
        self.failures = []

    def add(self, path):
        self.files.append(path)
        return path


def run_task(scn, out_dir, threads=1, figures=True):
    from . import plotting
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, scn.name)
    res = TaskResult()
    if scn.task in ("sweep_r", "sweep_xi2", "grid"):
        header, rows, results = run_sweep(scn, threads)
        write_csv(res.add(stem + ".csv"), header, rows)
        res.failures += [r["status"] for r in results if r["status"].startswith("error")]
        if figures:
            kind = "heatmap" if scn.task == "grid" else "line"
            plotting.render(stem + ".csv", res.add(stem + ".png"), kind, scn.name)
    elif scn.task == "simulate":
        br, traj = simulate(scn)
        write_csv(res.add(stem + ".csv"), list(TRAJECTORY_COLUMNS), trajectory_rows(traj))
        write_json(res.add(stem + ".json"), {
            "branch": br.to_dict(), "flag": traj.flag, "message": traj.message,
            "steps": len(traj.h) - 1, "reprojections": traj.reprojections,
            "max_rel_drift": traj.max_rel_drift()})
        if traj.flag != "ok":
            res.failures.append(traj.message)
        if figures:
            plotting.render(stem + ".csv", res.add(stem + ".png"), "line", scn.name)
    elif scn.task == "releq":
        write_json(res.add(stem + ".json"), releq_summary(scn))
    elif scn.task == "stability":
        write_json(res.add(stem + ".json"), stability_summary(scn))
    elif scn.task == "linearize":
        br, v = linearize_summary(scn)
        n = len(v.spectrum.eigenvalues)
        header = ["r", "xi1", "xi2"] + [c for i in range(1, n + 1) for c in (f"re_{i}", f"im_{i}")]
        header += ["max_re", "classification"]
        row = [br.r, br.xi.xi1, br.xi.xi2]
        for lam in v.spectrum.eigenvalues:
            row += [float(lam.real), float(lam.imag)]
        row += [v.spectrum.max_re, v.spectrum.classification]
        write_csv(res.add(stem + ".csv"), header, [row])
        write_json(res.add(stem + ".json"), {"branch": br.to_dict(), **v.to_dict()})
    return res

