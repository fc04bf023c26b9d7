"""Scenario files: JSON documents describing one task on one body and field."""

from dataclasses import dataclass, field as dc_field
import json
import math

from .constants import MU0
from .dynamics import BodyParams
from .errors import ScenarioError
from .field import ConstantProfileField, EquatorialProfile, PolePairsField, StandardField

SCHEMA_VERSION = 1
TASKS = ("simulate", "releq", "stability", "linearize", "sweep_r", "sweep_xi2", "grid")


@dataclass
class Scenario:
    name: str
    body: BodyParams
    field: object
    task: str
    params: dict = dc_field(default_factory=dict)
    source: dict = dc_field(default_factory=dict)


def _num(d, key, where, positive=False, required=True, default=None):
    if key not in d:
        if required:
            raise ScenarioError(f"{where}.{key} is required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{where}.{key} must be a finite number, got {v!r}")
    if positive and not v > 0:
        raise ScenarioError(f"{where}.{key} must be positive, got {v!r}")
    return float(v)


def _int(d, key, where, minimum, default=None):
    if key not in d:
        if default is None:
            raise ScenarioError(f"{where}.{key} is required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ScenarioError(f"{where}.{key} must be an integer >= {minimum}, got {v!r}")
    return v


def _obj(d, key, where):
    v = d.get(key)
    if not isinstance(v, dict):
        raise ScenarioError(f"{where}.{key} must be an object")
    return v


def parse_body(d):
    vals = {k: _num(d, k, "body", positive=(k != "mu")) for k in ("M", "I1", "I3", "mu")}
    return BodyParams(**vals)


def parse_field(d):
    kind = d.get("kind", "standard")
    if kind == "standard":
        return StandardField(_num(d, "q", "field"), _num(d, "h", "field", positive=True),
                             _num(d, "mu0", "field", positive=True, required=False, default=MU0))
    if kind == "pole_pairs":
        pairs = d.get("pairs")
        if not isinstance(pairs, list) or not pairs:
            raise ScenarioError("field.pairs must be a non-empty list of [q, h]")
        out = []
        for i, pr in enumerate(pairs):
            if not (isinstance(pr, list) and len(pr) == 2):
                raise ScenarioError(f"field.pairs[{i}] must be [q, h]")
            q = _num({"q": pr[0]}, "q", f"field.pairs[{i}]")
            h = _num({"h": pr[1]}, "h", f"field.pairs[{i}]", positive=True)
            out.append((q, h))
        return PolePairsField(out, _num(d, "mu0", "field", positive=True, required=False,
                                        default=MU0))
    if kind == "profile":
        prof = EquatorialProfile(*(_num(d, k, "field") for k in ("f0", "f1p", "f1pp", "f2pp")))
        r = _num(d, "r", "field", required=False, default=0.0)
        if r < 0:
            raise ScenarioError(f"field.r must be non-negative, got {r!r}")
        return ConstantProfileField(prof, r)
    raise ScenarioError(f"field.kind must be standard, pole_pairs or profile, got {kind!r}")


def _check_range(p, lo, hi, where):
    a, b = _num(p, lo, where), _num(p, hi, where)
    if not b > a:
        raise ScenarioError(f"{where}.{hi} must exceed {where}.{lo}")
    return a, b


def _check_params(task, p, field):
    where = "params"
    branch = p.get("branch", "regular")
    if branch not in ("regular", "singular"):
        raise ScenarioError(f"params.branch must be regular or singular, got {branch!r}")
    if p.get("sign", 1) not in (1, -1):
        raise ScenarioError("params.sign must be 1 or -1")
    if task == "sweep_r":
        if branch != "regular":
            raise ScenarioError("sweep_r needs the regular branch")
        if isinstance(field, ConstantProfileField):
            raise ScenarioError("sweep_r needs a field defined at every radius")
        a, _ = _check_range(p, "r_min", "r_max", where)
        if not a > 0:
            raise ScenarioError("params.r_min must be positive")
        _int(p, "n", where, 2)
        _num(p, "xi2", where)
    elif task == "sweep_xi2":
        _check_range(p, "xi2_min", "xi2_max", where)
        _int(p, "n", where, 2)
        if branch == "regular":
            _num(p, "r", where, positive=True)
        else:
            _num(p, "xi1", where)
    elif task == "grid":
        _check_range(p, "xi2_min", "xi2_max", where)
        _int(p, "n_xi2", where, 2)
        if branch == "regular":
            if isinstance(field, ConstantProfileField):
                raise ScenarioError("a regular grid needs a field defined at every radius")
            a, _ = _check_range(p, "r_min", "r_max", where)
            if not a > 0:
                raise ScenarioError("params.r_min must be positive")
            _int(p, "n_r", where, 2)
        else:
            _check_range(p, "xi1_min", "xi1_max", where)
            _int(p, "n_xi1", where, 2)
    elif task in ("releq", "stability", "linearize", "simulate"):
        if branch == "regular":
            _num(p, "r", where, positive=True)
        else:
            _num(p, "xi1", where)
        _num(p, "xi2", where, required=False, default=0.0)
        if task == "simulate":
            _num(p, "t_end", where, positive=True)
            _num(p, "dt", where, positive=True)
            _int(p, "stride", where, 1, default=1)
            _num(p, "perturb", where, required=False, default=0.0)
            _int(p, "seed", where, 0, default=0)
            if p.get("frame", "space") not in ("space", "rotating"):
                raise ScenarioError("params.frame must be space or rotating")
            if isinstance(field, ConstantProfileField):
                raise ScenarioError("simulate needs a field with a full B(x)")


def parse_scenario(doc):
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    ver = doc.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version must be {SCHEMA_VERSION}, got {ver!r}")
    task = doc.get("task")
    if task not in TASKS:
        raise ScenarioError(f"task must be one of {', '.join(TASKS)}, got {task!r}")
    try:
        body = parse_body(_obj(doc, "body", "scenario"))
        field = parse_field(_obj(doc, "field", "scenario"))
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError("params must be an object")
    _check_params(task, params, field)
    name = doc.get("name", task)
    if not isinstance(name, str) or not name:
        raise ScenarioError("name must be a non-empty string")
    return Scenario(name, body, field, task, params, doc)


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return parse_scenario(doc)
