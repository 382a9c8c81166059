import math
import os
from pathlib import Path

import pytest

import kawarada

CONFIGS = Path(os.environ.get("KAWARADA_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))

SMALL = """
[problem]
edges = 1 1 1
q = 1
[grid]
dim = 3
n = 3
[stepping]
tau0 = 1e-3
[guard]
strict = false
[output]
prefix = smoke
[stability]
steps = 20
[convergence]
taus = 0.02 0.01 0.005
t_common = 0.1
quench_runs = false
"""


def test_benchmark_quench_time():
    res = kawarada.run_benchmark1d(100)
    assert res["outcome"] == "quenched"
    assert abs(res["T"] - 0.780265747310047) / 0.780265747310047 < 0.01
    assert len(res["t"]) == res["steps"] == len(res["max_v"])
    assert res["D"][-1] > 100


def test_run_from_config_file():
    cfg = kawarada.load_config(str(CONFIGS / "cube_q1.ini"))
    res = kawarada.run(cfg)
    assert res["outcome"] == "quenched"
    assert all(b >= a for a, b in zip(res["max_v"], res["max_v"][1:]))
    assert len(res["final_state"]) == cfg.unknowns


def test_verify_rows_pass():
    cfg = kawarada.parse_config(SMALL)
    rows = kawarada.verify(cfg)
    assert rows
    assert all(r["status"] != "fail" for r in rows)


def test_stability_modes():
    cfg = kawarada.parse_config(SMALL)
    frozen = kawarada.stability(cfg, mode="frozen", magnitude=1e-8, seed=3)
    assert frozen["c_emp"] <= frozen["envelope"] * (1 + 1e-12)
    live = kawarada.stability(cfg, mode="live")
    assert math.isfinite(live["c_emp"])
    with pytest.raises(kawarada.KawaradaError):
        kawarada.stability(cfg, magnitude=0.0)


def test_convergence_orders():
    cfg = kawarada.parse_config(SMALL)
    res = kawarada.convergence(cfg)
    assert len(res["rows"]) == 3
    assert res["orders"][0] > 0.8


def test_config_errors_carry_kind():
    with pytest.raises(kawarada.KawaradaError) as info:
        kawarada.parse_config("[problem]\nbogus = 1\n")
    assert info.value.kind == "config"
