import json

import numpy as np
import pytest

from hierot import euclidean, sphere
from hierot.errors import SchemaError
from hierot.plans import plan_norm, plans_structurally_equal, w_mu
from hierot.sampling import random_measure, random_plan, rng_from_seed
from hierot.serialization import (dumps, load_measure, load_plan,
                                  measure_from_obj, measure_to_obj,
                                  plan_from_obj, plan_to_obj, save_measure,
                                  save_plan)
from hierot.wasserstein import w2


def test_measure_roundtrip_bit_exact(tmp_path):
    rng = rng_from_seed(1)
    for man in (euclidean(2), sphere(3)):
        for level in (0, 1, 2, 3):
            mu = random_measure(rng, man, level, 3)
            path = tmp_path / f"m{man.kind}{level}.json"
            save_measure(mu, path)
            back = load_measure(path)
            assert back.structural_key() == mu.structural_key()
            if level >= 1:
                assert w2(mu, back) == 0.0


def test_roundtrip_is_byte_stable(tmp_path):
    rng = rng_from_seed(2)
    mu = random_measure(rng, euclidean(2), 2, 3)
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    save_measure(mu, p1)
    save_measure(load_measure(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_plan_roundtrip(tmp_path):
    rng = rng_from_seed(3)
    for man in (euclidean(2), sphere(3)):
        mu = random_measure(rng, man, 2, 3)
        g = random_plan(rng, mu, 1.0)
        path = tmp_path / "plan.json"
        save_plan(g, path)
        back = load_plan(path)
        assert plans_structurally_equal(g, back, 0.0)
        assert w_mu(g, back) <= 1e-12
        assert plan_norm(back) == plan_norm(g)


def test_schema_errors():
    with pytest.raises(SchemaError):
        measure_from_obj({"level": 1})
    with pytest.raises(SchemaError):
        measure_from_obj({"manifold": {"kind": "torus", "ambient_dim": 2},
                          "level": 0, "measure": {"point": [0, 0]}})
    with pytest.raises(SchemaError):
        measure_from_obj({"manifold": {"kind": "euclidean", "ambient_dim": 1},
                          "level": 1,
                          "measure": {"weights": [0.5, 0.6],
                                      "atoms": [{"point": [0.0]},
                                                {"point": [1.0]}]}})
    with pytest.raises(SchemaError):
        measure_from_obj({"manifold": {"kind": "euclidean", "ambient_dim": 1},
                          "level": 1, "measure": {"weights": [], "atoms": []}})


def test_plan_schema_fiber_alignment():
    man = euclidean(1)
    obj = {"manifold": {"kind": "euclidean", "ambient_dim": 1},
           "level": 1,
           "base": {"weights": [1.0], "atoms": [{"point": [0.0]}]},
           "plan": {"fibers": []}}
    with pytest.raises(SchemaError):
        plan_from_obj(obj)


def test_plan_json_references_base_atoms():
    man = euclidean(1)
    mu_obj = {"weights": [0.5, 0.5],
              "atoms": [{"point": [0.0]}, {"point": [2.0]}]}
    obj = {"manifold": {"kind": "euclidean", "ambient_dim": 1},
           "level": 1, "base": mu_obj,
           "plan": {"fibers": [
               [{"weight": 0.5, "plan": {"tangent": [1.0]}}],
               [{"weight": 0.25, "plan": {"tangent": [0.0]}},
                {"weight": 0.25, "plan": {"tangent": [-1.0]}}]]}}
    g = plan_from_obj(obj)
    assert g.level == 1
    assert len(g.fibers[1]) == 2
    rt = plan_from_obj(json.loads(dumps(plan_to_obj(g))))
    assert plans_structurally_equal(g, rt, 0.0)


def test_sphere_points_renormalized_on_ingestion():
    obj = {"manifold": {"kind": "sphere", "ambient_dim": 3},
           "level": 0,
           "measure": {"point": [1.0 + 1e-8, 0.0, 0.0]}}
    mu = measure_from_obj(obj)
    assert abs(np.linalg.norm(mu.point) - 1.0) <= 1e-15
    bad = {"manifold": {"kind": "sphere", "ambient_dim": 3},
           "level": 0, "measure": {"point": [2.0, 0.0, 0.0]}}
    with pytest.raises(Exception):
        measure_from_obj(bad)


def test_measure_to_obj_shape():
    mu = random_measure(rng_from_seed(4), euclidean(2), 2, 2)
    obj = measure_to_obj(mu)
    assert set(obj) == {"manifold", "level", "measure"}
    node = obj["measure"]
    assert "weights" in node and "atoms" in node
