"""Treed bridges, BDG maps and boundary geodesics of half-planar maps."""

import json
from fractions import Fraction

from . import _uihp
from ._uihp import (
    BudgetExceeded,
    CapExceeded,
    NoConvergence,
    Unresolved,
    closed_h,
    face_census,
    membership,
    min_label_tail,
    oracle_h,
    target_names,
)

__version__ = _uihp.__version__


def nl_system(M=100):
    return json.loads(_uihp.nl_system_json(M))


def series(which, N):
    """Coefficient table; exact entries come back as Fractions."""
    t = json.loads(_uihp.series_json(which, N))
    if "exact" in t:
        t["exact"] = [Fraction(x) for x in t["exact"]]
    return t


def tail_trend(points=(100, 1000, 10000)):
    return json.loads(_uihp.tail_trend_json(list(points)))


def triangular_tables(M=100):
    return json.loads(_uihp.triangular_json(M))


def sample_window(seed, replicate=0, model="quad", lo=-30, hi=30, **budgets):
    return json.loads(_uihp.window_json(seed, replicate, model, lo, hi, **budgets))


def build_map(seed, replicate=0, model="quad", window=30, format="json"):
    out = _uihp.map_export(seed, replicate, model, window, format)
    return out if format == "dot" else json.loads(out)


def trace(seed, replicate=0, model="quad", horizon=10):
    return json.loads(_uihp.trace_json(seed, replicate, model, horizon))


def run_plan(check_ceiling=True, **plan):
    """Keys as in the C++ plan: target, model, grid, horizon, window, replicates, seed, ..."""
    return json.loads(_uihp.run_plan_json(json.dumps(plan), check_ceiling))


def battery(scale="quick", seed=42, workers=1, only=()):
    return json.loads(_uihp.battery_json(scale, seed, workers, list(only)))
