import json
import math

import pytest

import wkam as w


def test_grid_basics():
    g = w.make_grid(1.0, 64)
    assert g.points == 64
    assert g.spacing == pytest.approx(1.0 / 64)
    assert g.wrap_x(1.25) == pytest.approx(0.25)


def test_interp_matches_samples():
    g = w.make_grid(1.0, 64)
    f = w.sample(g, lambda x: math.sin(2 * math.pi * x))
    for k in range(g.points):
        assert w.interp(f, g.node(k)) == pytest.approx(f.values[k])


def test_pendulum_hamiltonian_and_lagrangian():
    m = w.pendulum(1)
    # H(x, p, u) = p^2/2 + cos(2 pi x); L is its Legendre transform in p
    assert m.hamiltonian(0.0, 0.0, 0.0) == pytest.approx(1.0)
    assert m.lagrangian(0.5, 0.0, 0.0) == pytest.approx(1.0)
    assert w.fenchel_lagrangian(m, 0.25, 1.0, 0.0) == pytest.approx(
        m.lagrangian(0.25, 1.0, 0.0), abs=1e-4
    )


def test_discounted_solve_converges():
    g = w.make_grid(1.0, 64)
    m = w.pendulum(1)
    sp = w.reference_scheme()
    sol = w.solve_discounted(m, 0.05, 1.0, sp, w.make_constant(g, 0.0))
    assert sol.converged
    assert sol.residual < 1e-8
    discount = w.GridFunction(sol.u.grid, [0.05 * v for v in sol.u.values])
    step = w.lax_oleinik_step(m, discount, sol.u, 1.0, sp)
    assert w.sup_dist(step, sol.u) < 1e-7


def test_mather_lp_and_critical_value():
    g = w.make_grid(1.0, 64)
    m = w.pendulum(1)
    sp = w.reference_scheme()
    p = w.build_polytope(g, sp.vgrid, sp.tau)
    r = w.solve_mather_lp(p, m, 0.0)
    assert r.value == pytest.approx(-1.0, abs=1e-6)
    assert r.mu.mass() == pytest.approx(1.0, abs=1e-9)
    cv = w.critical_value_lp(p, m, 0.0)
    assert cv.value == pytest.approx(1.0, abs=1e-6)


def test_l4_probe_verdicts():
    g = w.make_grid(1.0, 64)
    sp = w.reference_scheme()
    p = w.build_polytope(g, sp.vgrid, sp.tau)
    m = w.discounted_linear(1)
    rep = w.check_L4(p, m, w.solve_mather_lp(p, m, 0.0))
    assert rep.holds()


def test_run_experiment_json_roundtrip():
    cfg = {
        "kind": "solve",
        "model": {"name": "pendulum", "n": 1},
        "points_per_period": 48,
        "tau": 0.02,
        "vmax": 3.0,
        "velocity_count": 61,
        "tol": 1e-8,
        "lambda_ladder": [0.1],
        "c": 1.0,
    }
    rep = w.run_experiment_json(json.dumps(cfg))
    assert rep.kind == "solve"
    assert rep.all_pass()
    parsed = json.loads(rep.to_json())
    assert parsed["kind"] == "solve"
    assert all(v["pass"] for v in parsed["verdicts"])
