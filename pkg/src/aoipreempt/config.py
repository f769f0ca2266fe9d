"""JSON scenario configuration shared by every CLI subcommand.

Sections::

    {
      "distribution": {"kind": "weibull", "alpha": 0.9, "beta": 2, "M": 8},
      "policy":       {"kind": "PSP", "p1": 1, "p2": 1, "p3": 0, "p4": 1,
                       "split1": 1, "split2": 4, "threshold": 6},
      "arrivals":     {"q": 0.35},
      "sim":          {"slots": 1000000, "warmup": 10000, "seed": 42},
      "optimizer":    {"grid_step": 0.05}
    }

``distribution.kind`` is ``weibull`` (alpha, beta), ``geometric`` (y) or
``tail`` (tail = [P(Y>0), ..., P(Y>M)]).  ``policy.kind`` is one of
AP/PP/PAP/PSP with the family parameters inline, or ``raw`` with
``thresholds`` (last entry ``null`` or ``"inf"``) and ``table``.
Only ``distribution`` and ``arrivals`` are required; ``policy`` is
required by ``evaluate`` and ``simulate``.
"""
from __future__ import annotations

import json
import math

from .delay import build_from_tail, build_geometric, build_weibull
from .errors import InvalidConfiguration
from .policy import UNBOUNDED, EvaluationScenario, make_named_policy, make_policy

SIM_DEFAULTS = {"slots": 1_000_000, "warmup": 10_000, "seed": 0, "batches": 50}
DEFAULT_GRID_STEP = 0.05


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise InvalidConfiguration(f"config file not found: {path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfiguration(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InvalidConfiguration("config must be a JSON object")
    for section in ("distribution", "arrivals"):
        if not isinstance(cfg.get(section), dict):
            raise InvalidConfiguration(f"config is missing the '{section}' section")
    return cfg


def _get(section: dict, key: str, where: str):
    if key not in section:
        raise InvalidConfiguration(f"'{where}' section is missing '{key}'")
    return section[key]


def _int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise InvalidConfiguration(f"{name} must be an integer, got {value!r}")
    return int(value)


def model_from_config(cfg: dict, **overrides):
    """Delay model from the ``distribution`` section; keyword overrides
    replace individual keys (used by sweeps)."""
    dist = dict(cfg["distribution"])
    dist.update(overrides)
    kind = str(_get(dist, "kind", "distribution")).lower()
    M = _int(_get(dist, "M", "distribution"), "M")
    if kind == "weibull":
        return build_weibull(float(_get(dist, "alpha", "distribution")),
                             float(_get(dist, "beta", "distribution")), M)
    if kind == "geometric":
        return build_geometric(float(_get(dist, "y", "distribution")), M)
    if kind == "tail":
        return build_from_tail(_get(dist, "tail", "distribution"), M)
    raise InvalidConfiguration(f"unknown distribution kind {kind!r}")


def _threshold(t):
    if t is None or (isinstance(t, str) and t.lower() in ("inf", "infinity")):
        return UNBOUNDED
    if isinstance(t, (int, float)) and not isinstance(t, bool):
        return UNBOUNDED if math.isinf(t) else t
    raise InvalidConfiguration(f"bad threshold {t!r}")


def policy_from_config(cfg: dict, M: int):
    pol = cfg.get("policy")
    if not isinstance(pol, dict):
        raise InvalidConfiguration("config is missing the 'policy' section")
    pol = dict(pol)
    kind = str(_get(pol, "kind", "policy"))
    if kind.lower() == "raw":
        thresholds = [_threshold(t) for t in _get(pol, "thresholds", "policy")]
        return make_policy(thresholds, _get(pol, "table", "policy"), M)
    del pol["kind"]
    return make_named_policy(kind, pol, M)


def arrival_probability(cfg: dict, override=None) -> float:
    q = override if override is not None else _get(cfg["arrivals"], "q", "arrivals")
    if isinstance(q, bool) or not isinstance(q, (int, float)):
        raise InvalidConfiguration(f"q must be a number, got {q!r}")
    return float(q)


def scenario_from_config(cfg: dict) -> EvaluationScenario:
    model = model_from_config(cfg)
    policy = policy_from_config(cfg, model.M)
    return EvaluationScenario(model, policy, arrival_probability(cfg))


def sim_settings(cfg: dict) -> dict:
    out = dict(SIM_DEFAULTS)
    sim = cfg.get("sim") or {}
    if not isinstance(sim, dict):
        raise InvalidConfiguration("'sim' section must be an object")
    for key in out:
        if key in sim:
            out[key] = _int(sim[key], key)
    return out


def grid_step(cfg: dict) -> float:
    opt = cfg.get("optimizer") or {}
    return float(opt.get("grid_step", DEFAULT_GRID_STEP))
