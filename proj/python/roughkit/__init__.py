"""Python front end of the roughkit C++ library.

Functions and vector fields are given as dicts in the JSON schema the CLI
reads (see `roughkit --help`); reports come back as dicts.
"""

import json

from . import _roughkit
from ._roughkit import (
    InputError,
    NumericalError,
    OrderError,
    RoughPath,
    default_level,
    deshuffles,
    sample_fbm,
    shuffle,
)

__all__ = [
    "InputError",
    "NumericalError",
    "OrderError",
    "RoughPath",
    "default_level",
    "deshuffles",
    "duality_check",
    "fields",
    "function",
    "sample_fbm",
    "shuffle",
    "signature",
    "solve_continuity",
    "solve_rde",
    "solve_transport",
    "verify_continuity",
    "verify_transport",
]


def function(spec):
    if isinstance(spec, _roughkit.Function):
        return spec
    return _roughkit.Function.from_json(json.dumps(spec))


def fields(specs):
    if isinstance(specs, _roughkit.Fields):
        return specs
    if isinstance(specs, dict):
        return _roughkit.Fields.from_json(json.dumps(specs))
    return _roughkit.Fields([function(s) for s in specs])


def signature(times, values, gamma, level=0):
    """Lift of the piecewise-linear path; returns W_{0T} as {word: value}."""
    w = RoughPath.lift(list(times), [list(v) for v in values], gamma, level)
    return w.increment(w.times[0], w.horizon)


def solve_rde(x0, vector_fields, driver, mesh=1e-3, horizon=None):
    times, states, residual, level = _roughkit.solve_rde(list(x0), fields(vector_fields), driver, mesh, horizon)
    return {"times": times, "states": states, "residual": residual, "level": level}


def solve_transport(vector_fields, terminal, driver, queries, mesh=1e-3, horizon=None):
    q = [(float(s), list(x)) for s, x in queries]
    return _roughkit.solve_transport(fields(vector_fields), function(terminal), driver, q, mesh, horizon)


def verify_transport(vector_fields, terminal, driver, grid, times=256, mesh=1e-3):
    text = _roughkit.verify_transport(fields(vector_fields), function(terminal), driver, [list(x) for x in grid], times, mesh)
    return json.loads(text)


def solve_continuity(vector_fields, driver, weights, points, times=256, mesh=1e-3):
    t, pts = _roughkit.solve_continuity(fields(vector_fields), driver, list(weights), [list(p) for p in points], times, mesh)
    return {"times": t, "points": pts}


def verify_continuity(vector_fields, driver, weights, points, phis, times=256, mesh=1e-3):
    text = _roughkit.verify_continuity(
        fields(vector_fields), driver, list(weights), [list(p) for p in points], [function(p) for p in phis], times, mesh
    )
    return json.loads(text)


def duality_check(vector_fields, terminal, driver, weights, points, times=16, mesh=1e-3):
    t, alpha, drift = _roughkit.duality_check(
        fields(vector_fields), function(terminal), driver, list(weights), [list(p) for p in points], times, mesh
    )
    return {"times": t, "alpha": alpha, "drift": drift}
