"""JSON wire formats for measures, velocity plans, and functional specs.

Measure documents look like::

    {"manifold": {"kind": "euclidean", "ambient_dim": 2},
     "level": 2,
     "measure": {"weights": [0.5, 0.5],
                 "atoms": [{"weights": [1.0], "atoms": [{"point": [0.0, 0.0]}]},
                           {"weights": [1.0], "atoms": [{"point": [2.0, 0.0]}]}]}}

Velocity-plan documents extend the scheme with ``"tangent"`` at the leaves
and ``"fibers"`` at internal nodes; ``fibers[i]`` lists the weighted
sub-plans attached to base atom ``i``.  Floats are emitted with ``repr``
(shortest round-trip), so write-then-read is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .manifolds import Manifold, euclidean, sphere
from .measures import HierMeasure, kahan_sum, require_valid
from .plans import FiberEntry, VelocityPlan, validate_plan

INGEST_MASS_TOL = 1e-9


def _manifold_to_obj(man: Manifold) -> dict:
    return {"kind": man.kind, "ambient_dim": man.ambient_dim}


def _manifold_from_obj(obj) -> Manifold:
    try:
        kind = obj["kind"]
        dim = int(obj["ambient_dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad manifold object: {exc}") from exc
    if kind == "euclidean":
        return euclidean(dim)
    if kind == "sphere":
        return sphere(dim)
    raise SchemaError(f"unknown manifold kind {kind!r}")


def _node_to_obj(mu: HierMeasure) -> dict:
    if mu.level == 0:
        return {"point": [float(c) for c in mu.point]}
    return {"weights": [float(w) for w in mu.weights],
            "atoms": [_node_to_obj(a) for a in mu.atoms]}


def measure_to_obj(mu: HierMeasure) -> dict:
    return {"manifold": _manifold_to_obj(mu.manifold),
            "level": mu.level,
            "measure": _node_to_obj(mu)}


def _node_from_obj(obj, man: Manifold, level: int) -> HierMeasure:
    if not isinstance(obj, dict):
        raise SchemaError("measure node must be an object")
    if level == 0:
        if "point" not in obj:
            raise SchemaError("level-0 node must carry a point")
        return HierMeasure(man, 0, point=man.check_point(obj["point"]))
    if "weights" not in obj or "atoms" not in obj:
        raise SchemaError("interior node must carry weights and atoms")
    weights = [float(w) for w in obj["weights"]]
    atoms = obj["atoms"]
    if len(weights) != len(atoms) or not atoms:
        raise SchemaError("weights and atoms must be non-empty and aligned")
    total = kahan_sum(weights)
    if abs(total - 1.0) > INGEST_MASS_TOL:
        raise SchemaError(f"node weights sum to {total}")
    return HierMeasure(man, level, weights=tuple(weights),
                       atoms=tuple(_node_from_obj(a, man, level - 1) for a in atoms))


def measure_from_obj(obj) -> HierMeasure:
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object")
    try:
        man = _manifold_from_obj(obj["manifold"])
        level = int(obj["level"])
        node = obj["measure"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad measure document: {exc}") from exc
    if level < 0:
        raise SchemaError("level must be nonnegative")
    mu = _node_from_obj(node, man, level)
    require_valid(mu, mass_tol=INGEST_MASS_TOL)
    return mu


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save_measure(mu: HierMeasure, path) -> None:
    Path(path).write_text(dumps(measure_to_obj(mu)))


def load_measure(path) -> HierMeasure:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    return measure_from_obj(obj)


# ---------------------------------------------------------------------------
# velocity plans


def _plan_node_to_obj(gamma: VelocityPlan):
    if gamma.level == 0:
        return {"tangent": [float(c) for c in gamma.tangent]}
    return {"fibers": [[{"weight": float(e.weight),
                         "plan": _plan_node_to_obj(e.plan)} for e in fiber]
                       for fiber in gamma.fibers]}


def plan_to_obj(gamma: VelocityPlan) -> dict:
    return {"manifold": _manifold_to_obj(gamma.manifold),
            "level": gamma.level,
            "base": _node_to_obj(gamma.base),
            "plan": _plan_node_to_obj(gamma)}


def _plan_node_from_obj(obj, base: HierMeasure) -> VelocityPlan:
    if not isinstance(obj, dict):
        raise SchemaError("plan node must be an object")
    if base.level == 0:
        if "tangent" not in obj:
            raise SchemaError("leaf plan node must carry a tangent")
        vec = np.asarray(obj["tangent"], dtype=float)
        try:
            vec = base.manifold.check_tangent(base.point, vec)
        except Exception as exc:
            raise SchemaError(f"bad leaf tangent: {exc}") from exc
        return VelocityPlan(base=base, tangent=vec)
    fibers_obj = obj.get("fibers")
    if not isinstance(fibers_obj, list) or len(fibers_obj) != len(base.atoms):
        raise SchemaError("fibers must align with the base atoms")
    fibers = []
    for atom, fiber_obj in zip(base.atoms, fibers_obj):
        entries = []
        for e in fiber_obj:
            try:
                w = float(e["weight"])
                sub = e["plan"]
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad fiber entry: {exc}") from exc
            entries.append(FiberEntry(w, _plan_node_from_obj(sub, atom)))
        if not entries:
            raise SchemaError("empty fiber")
        fibers.append(tuple(entries))
    return VelocityPlan(base=base, fibers=tuple(fibers))


def plan_from_obj(obj) -> VelocityPlan:
    if not isinstance(obj, dict):
        raise SchemaError("document must be a JSON object")
    try:
        man = _manifold_from_obj(obj["manifold"])
        level = int(obj["level"])
        base = _node_from_obj(obj["base"], man, level)
        node = obj["plan"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad plan document: {exc}") from exc
    require_valid(base, mass_tol=INGEST_MASS_TOL)
    gamma = _plan_node_from_obj(node, base)
    try:
        validate_plan(gamma)
    except Exception as exc:
        raise SchemaError(f"invalid plan: {exc}") from exc
    return gamma


def save_plan(gamma: VelocityPlan, path) -> None:
    Path(path).write_text(dumps(plan_to_obj(gamma)))


def load_plan(path) -> VelocityPlan:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    return plan_from_obj(obj)


# ---------------------------------------------------------------------------
# functional specs


def functional_spec_from_obj(obj, manifold: Manifold, level: int):
    """Build a FunctionalSpec from its JSON form.

    Terms: ``{"type": "potential", "name": ..., "params": {...}, "weight": w}``
    or ``{"type": "half_w2_sq", "target": <measure doc or path>, "weight": w}``.
    """
    from .functionals import (DistanceTerm, FunctionalSpec, PotentialTerm,
                              make_potential)
    if not isinstance(obj, dict) or "terms" not in obj:
        raise SchemaError("functional spec must carry a terms list")
    terms = []
    for t in obj["terms"]:
        kind = t.get("type")
        weight = float(t.get("weight", 1.0))
        if kind == "potential":
            try:
                pot = make_potential(t["name"], manifold, t.get("params", {}))
            except (KeyError, Exception) as exc:
                raise SchemaError(f"bad potential term: {exc}") from exc
            terms.append(PotentialTerm(pot, weight))
        elif kind == "half_w2_sq":
            target = t.get("target")
            if isinstance(target, str):
                mu = load_measure(target)
            else:
                mu = measure_from_obj(target)
            if mu.level != level or mu.manifold != manifold:
                raise SchemaError("distance target has a different level/manifold")
            terms.append(DistanceTerm(mu, weight))
        else:
            raise SchemaError(f"unknown term type {kind!r}")
    return FunctionalSpec(tuple(terms))


def format_float(x: float) -> str:
    """17 significant digits (always round-trips for printing CSVs)."""
    return f"{float(x):.17g}"
