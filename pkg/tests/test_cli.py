import json
import subprocess
import sys

import numpy as np
import pytest

from hierot import euclidean, sphere
from hierot.cli import main
from hierot.measures import dirac, dirac_lift, mixture
from hierot.sampling import random_measure, rng_from_seed
from hierot.serialization import (load_measure, load_plan, measure_to_obj,
                                  save_measure)

E1 = euclidean(1)
S3 = sphere(3)


def write_level2_pair(tmp_path):
    pt = lambda x: dirac(E1, [float(x)])
    p = mixture((0.5, 0.5), [mixture((1.0,), [pt(0)]),
                             mixture((1.0,), [pt(2)])])
    q = mixture((1.0,), [mixture((0.5, 0.5), [pt(0), pt(2)])])
    pa = tmp_path / "p.json"
    qa = tmp_path / "q.json"
    save_measure(p, pa)
    save_measure(q, qa)
    return pa, qa


def test_distance_level2(tmp_path, capsys):
    pa, qa = write_level2_pair(tmp_path)
    plan_file = tmp_path / "plan.json"
    code = main(["distance", str(pa), str(qa), "--plan", str(plan_file)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["w2"] == pytest.approx(np.sqrt(2.0), abs=1e-12)
    assert out["plan_summary"]["top_support_size"] == 2
    g = load_plan(plan_file)
    assert g.level == 2


def test_distance_identical_files(tmp_path, capsys):
    pa, _ = write_level2_pair(tmp_path)
    code = main(["distance", str(pa), str(pa)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["w2"] == 0.0


def test_distance_dirac_poles(tmp_path, capsys):
    a = tmp_path / "n.json"
    b = tmp_path / "s.json"
    save_measure(dirac_lift(S3, [0.0, 0.0, 1.0], 1), a)
    save_measure(dirac_lift(S3, [0.0, 0.0, -1.0], 1), b)
    code = main(["distance", str(a), str(b)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["w2"] == pytest.approx(np.pi, abs=1e-10)


def test_distance_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    good, _ = write_level2_pair(tmp_path)
    assert main(["distance", str(bad), str(good)]) == 2
    capsys.readouterr()


def test_distance_level_mismatch_exit_code(tmp_path, capsys):
    pa, _ = write_level2_pair(tmp_path)
    flat = tmp_path / "flat.json"
    save_measure(mixture((1.0,), [dirac(E1, [0.0])]), flat)
    assert main(["distance", str(pa), str(flat)]) == 3
    capsys.readouterr()


def test_geodesic_outputs(tmp_path, capsys):
    pa, qa = write_level2_pair(tmp_path)
    outdir = tmp_path / "geo"
    code = main(["geodesic", str(pa), str(qa), "--steps", "4",
                 "--out", str(outdir)])
    capsys.readouterr()
    assert code == 0
    files = sorted(outdir.glob("geodesic_*.json"))
    assert len(files) == 5
    csv = (outdir / "geodesic.csv").read_text().strip().splitlines()
    assert csv[0] == "t,w2_to_start,w2_to_end,speed_deviation"
    assert len(csv) == 6
    for line in csv[1:]:
        dev = float(line.split(",")[3])
        assert dev <= 1e-8
    # interpolants are valid measures
    mid = load_measure(files[2])
    assert mid.level == 2


def test_geodesic_single_step(tmp_path, capsys):
    pa, qa = write_level2_pair(tmp_path)
    outdir = tmp_path / "geo1"
    code = main(["geodesic", str(pa), str(qa), "--steps", "1",
                 "--out", str(outdir)])
    capsys.readouterr()
    assert code == 0
    assert len(list(outdir.glob("geodesic_*.json"))) == 2


def test_geodesic_dirac_endpoints_are_dirac_lifts(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_measure(dirac_lift(E1, [0.0], 2), a)
    save_measure(dirac_lift(E1, [1.0], 2), b)
    outdir = tmp_path / "geo2"
    code = main(["geodesic", str(a), str(b), "--steps", "2",
                 "--out", str(outdir)])
    capsys.readouterr()
    assert code == 0
    mid = load_measure(outdir / "geodesic_0001.json")
    assert mid.weights == (1.0,)
    assert mid.atoms[0].atoms[0].point[0] == pytest.approx(0.5)


def test_flow_command(tmp_path, capsys):
    init = tmp_path / "init.json"
    save_measure(mixture((0.5, 0.5), [dirac(E1, [0.0]), dirac(E1, [2.0])]),
                 init)
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "terms": [{"type": "potential", "name": "quadratic",
                   "params": {"center": [1.0]}, "weight": 1.0}]}))
    trace = tmp_path / "trace.csv"
    final = tmp_path / "final.json"
    code = main(["flow", "--spec", str(spec), "--init", str(init),
                 "--tau", "0.5", "--iters", "8", "--trace", str(trace),
                 "--final", str(final)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    lines = trace.read_text().strip().splitlines()
    assert lines[0] == "step,value,step_norm"
    assert len(lines) == 10
    values = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(v2 <= v1 + 1e-12 for v1, v2 in zip(values, values[1:]))
    assert out["final_value"] <= out["initial_value"]
    end = load_measure(final)
    assert end.level == 1


def test_flow_with_distance_term(tmp_path, capsys):
    rng = rng_from_seed(8)
    init = tmp_path / "init.json"
    target_mu = random_measure(rng, E1, 1, 3)
    save_measure(random_measure(rng, E1, 1, 3), init)
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "terms": [{"type": "half_w2_sq",
                   "target": measure_to_obj(target_mu),
                   "weight": 1.0}]}))
    trace = tmp_path / "trace.csv"
    code = main(["flow", "--spec", str(spec), "--init", str(init),
                 "--tau", "1.0", "--iters", "1", "--trace", str(trace)])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["final_value"] <= 1e-14


def test_check_command_and_determinism(tmp_path, capsys):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    code = main(["check", "--suite", "metric", "--seed", "11",
                 "--samples", "2", "--report", str(r1)])
    capsys.readouterr()
    assert code == 0
    code = main(["check", "--suite", "metric", "--seed", "11",
                 "--samples", "2", "--report", str(r2)])
    capsys.readouterr()
    assert code == 0
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert report["passed"] is True
    assert set(report["suites"]) == {"metric"}


def test_check_fault_injection_fails_geodesic_suite(tmp_path, capsys):
    from hierot.manifolds import set_fault_injection
    set_fault_injection("pt_sign")
    try:
        code = main(["check", "--suite", "geodesic", "--seed", "1",
                     "--samples", "2"])
    finally:
        set_fault_injection(None)
    out = json.loads(capsys.readouterr().out)
    assert code == 4
    assert out["passed"] is False


def test_cli_entrypoint_subprocess(tmp_path):
    pa, qa = write_level2_pair(tmp_path)
    res = subprocess.run(
        [sys.executable, "-m", "hierot.cli", "distance", str(pa), str(qa)],
        capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["w2"] == pytest.approx(np.sqrt(2.0))
