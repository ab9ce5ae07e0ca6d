import numpy as np
import pytest

import reslab


def small_problem(points=199):
    text = reslab.default_config().replace("points = 999", f"points = {points}")
    return reslab.Problem(text)


def test_ladder():
    doc = reslab.plan_ladder(12)
    assert doc["exponents"] == [[2, 1], [3, 1], [6, 1]]
    assert doc["j0"] == 1
    assert reslab.plan_ladder(4, "5")["j0"] == "trivial"
    assert reslab.plan_ladder(5, "4")["terminal"] == "CB0"
    with pytest.raises(reslab.DomainError):
        reslab.plan_ladder(7, "3")


def test_example_hypotheses():
    rep = reslab.check_example(1.0)
    assert rep["failed"] == []
    with pytest.raises(reslab.DomainError):
        reslab.check_example(-1.0)


def test_config_errors():
    with pytest.raises(reslab.ConfigError):
        reslab.Problem("[grid]\nbogus = 1\n")
    p = reslab.Problem()
    assert len(p.config_hash) == 16
    assert reslab.Problem(p.config).config_hash == p.config_hash


def test_spectrum_orthonormal():
    p = small_problem()
    mu, psi = p.spectrum(3)
    assert mu.shape == (3,) and np.all(np.diff(mu) > 0)
    h = np.diff(p.coordinates())[0]
    assert np.allclose(h * psi.T @ psi, np.eye(3), atol=1e-10)


def test_solve_and_energy_gradient():
    p = small_problem()
    u, state = p.solve(-0.2, p.seed(3, 4.0))
    assert state["converged"] and state["residual"] < 1e-9
    assert state["morse_m"] == 3
    assert np.linalg.norm(p.residual(-0.2, u)) < 1e-6

    # away from the solution, where <F(w), v> is not small
    w = p.seed(3, 4.0)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(w.size)
    t = 1e-4
    fd = (p.energy(-0.2, w + t * v) - p.energy(-0.2, w - t * v)) / (2 * t)
    h = np.diff(p.coordinates())[0]
    assert fd == pytest.approx(h * p.residual(-0.2, w) @ v, rel=1e-6)


def test_branch_and_probe():
    p = small_problem()
    br = p.continue_branch(-0.2, 0.0, 5, p.seed(3, 4.0))
    assert br["outcome"] == "reached_sigma0"
    assert len(br["states"]) == 6
    rec = p.probe(-0.5, 5)
    assert rec["converged"] > 0
    assert rec["counter_witnesses"] == []
