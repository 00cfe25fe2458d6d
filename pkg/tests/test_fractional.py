import math

import numpy as np
import pytest

from cefsim.fractional import (FdeAbortError, MemoryKernel, SolverConfig,
                               caputo_derivative_estimate, gamma,
                               memory_weight, mittag_leffler, solve_fde_ivp)


# ------------------------------------------------------------------ gamma

def test_gamma_identities():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-12)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-12)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


def test_gamma_domain():
    for bad in (0.0, -1.0, -0.5):
        with pytest.raises(ValueError):
            gamma(bad)


# ----------------------------------------------------------------- kernel

def test_kernel_weight_value():
    k = MemoryKernel(0.5)
    assert memory_weight(1.0, k) == pytest.approx(1 / gamma(0.5), rel=1e-12)


def test_kernel_degenerate_at_integer_order():
    k = MemoryKernel(1.0)
    assert k.degenerate
    assert k.n == 1
    with pytest.raises(ValueError, match="degenerate"):
        memory_weight(0.5, k)
    assert not MemoryKernel(0.5).degenerate
    assert MemoryKernel(1.3).n == 2


def test_kernel_rejects_nonpositive_gap():
    k = MemoryKernel(0.5)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            memory_weight(bad, k)


def test_kernel_recent_past_ordering():
    # subdiffusive orders amplify the recent past; the steeper curve wins
    # once the gap is large enough for the normalization not to dominate
    assert memory_weight(0.05, MemoryKernel(0.65)) > memory_weight(0.05, MemoryKernel(0.8))


def test_kernel_monotone_in_order_within_branches():
    # near the end of the unit gap the weight decreases with the order,
    # separately on each branch
    for lo, hi in ((0.65, 0.8), (0.3, 0.6), (1.2, 1.4), (1.1, 1.7)):
        assert memory_weight(0.9, MemoryKernel(lo)) > memory_weight(0.9, MemoryKernel(hi))


def test_kernel_positive_and_fading():
    k = MemoryKernel(0.8)
    weights = [memory_weight(d, k) for d in (0.01, 0.1, 1.0, 10.0, 100.0)]
    assert all(w > 0 for w in weights)
    assert weights == sorted(weights, reverse=True)


def test_kernel_amplitude_scaling():
    assert memory_weight(0.3, MemoryKernel(0.7, amplitude=2.0)) == pytest.approx(
        2 * memory_weight(0.3, MemoryKernel(0.7)), rel=1e-12)


# ---------------------------------------------------- derivative estimate

def test_caputo_of_constant_is_zero():
    y = np.full(101, 7.0)
    for a in (0.3, 0.7, 1.5):
        assert np.max(np.abs(caputo_derivative_estimate(y, a, 0.01))) < 1e-12


def test_caputo_power_rule():
    n = 10_000
    y = np.linspace(0.0, 1.0, n + 1)
    est = caputo_derivative_estimate(y, 0.5, 1.0 / n)
    assert est[-1] == pytest.approx(1 / gamma(1.5), abs=1e-3)


def test_caputo_integer_order_is_gradient():
    y = np.linspace(0.0, 1.0, 11)
    assert np.allclose(caputo_derivative_estimate(y, 1.0, 0.1), 1.0, atol=1e-12)


def test_caputo_rejects_short_input():
    with pytest.raises(ValueError, match="samples"):
        caputo_derivative_estimate([1.0, 2.0], 1.5, 0.1)


# ---------------------------------------------------------- Mittag-Leffler

def test_mittag_leffler_values():
    assert mittag_leffler(0.8, 0.0) == 1.0
    assert mittag_leffler(1.0, -1.0) == pytest.approx(math.exp(-1), rel=1e-12)
    assert mittag_leffler(1.0, 2.0) == pytest.approx(math.exp(2), rel=1e-12)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(math.e * math.erfc(1.0), rel=1e-10)


def test_mittag_leffler_domain():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0)
    with pytest.raises(ValueError):
        mittag_leffler(0.8, 100.0)


# ----------------------------------------------------------------- solver

def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(alpha=2.5)
    with pytest.raises(ValueError):
        SolverConfig(alpha=0.8, horizon=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(alpha=0.8, steps=1)
    cfg = SolverConfig(alpha=0.8, horizon=2.0, steps=400)
    assert cfg.h == pytest.approx(0.005)


def test_stationary_field_stays_put():
    for a in (0.6, 1.0, 1.5):
        sol = solve_fde_ivp(lambda y: np.zeros_like(y), [0.3, 0.7],
                            SolverConfig(alpha=a, steps=50))
        assert np.allclose(sol.states, [0.3, 0.7], atol=1e-15)
        assert np.all(np.diff(sol.times) > 0)


def test_linear_problem_oracles():
    for a in (0.8, 1.0, 1.2):
        sol = solve_fde_ivp(lambda y: -y, [1.0], SolverConfig(alpha=a, steps=2000))
        assert sol.states[-1, 0] == pytest.approx(mittag_leffler(a, -1.0), abs=1e-3)


def test_integer_order_matches_classical_scheme():
    n = 10_000
    h = 1.0 / n
    sol = solve_fde_ivp(lambda y: -y, [1.0], SolverConfig(alpha=1.0, steps=n))
    # classical explicit Euler predictor with trapezoid corrector
    x = 1.0
    for _ in range(n):
        pred = x - h * x
        x = x + h / 2 * (-x - pred)
    assert sol.states[-1, 0] == pytest.approx(x, abs=1e-6)
    assert sol.states[-1, 0] == pytest.approx(math.exp(-1), abs=1e-4)


def test_convergence_order():
    errs = []
    for n in (250, 500, 1000):
        sol = solve_fde_ivp(lambda y: -y, [1.0], SolverConfig(alpha=0.8, steps=n))
        errs.append(abs(sol.states[-1, 0] - mittag_leffler(0.8, -1.0)))
    assert errs[0] / errs[1] >= 1.8
    assert errs[1] / errs[2] >= 1.8


def test_initial_derivative_free_term():
    # zero field: the solution is exactly the free part x0 + t*x'(0)
    sol = solve_fde_ivp(lambda y: np.zeros_like(y), [1.0],
                        SolverConfig(alpha=1.5, steps=100, initial_derivative=[2.0]))
    assert sol.states[-1, 0] == pytest.approx(3.0, abs=1e-12)


def test_full_window_truncation_matches_full_memory():
    full = solve_fde_ivp(lambda y: -y, [1.0], SolverConfig(alpha=0.8, steps=200))
    windowed = solve_fde_ivp(lambda y: -y, [1.0],
                             SolverConfig(alpha=0.8, steps=200, memory_truncation=200))
    assert np.allclose(full.states, windowed.states, atol=1e-14)


def test_truncation_error_shrinks_with_window():
    # short-memory truncation carries a real error on slowly-decaying
    # problems; growing the window must shrink it monotonically
    full = solve_fde_ivp(lambda y: -y, [1.0], SolverConfig(alpha=0.8, steps=400))
    errs = []
    for w in (50, 100, 200, 399):
        short = solve_fde_ivp(lambda y: -y, [1.0],
                              SolverConfig(alpha=0.8, steps=400, memory_truncation=w))
        errs.append(abs(full.states[-1, 0] - short.states[-1, 0]))
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 0.01


def test_abort_on_nonfinite_state():
    with pytest.raises(FdeAbortError) as exc:
        solve_fde_ivp(lambda y: y ** 2, [1e200], SolverConfig(alpha=1.0, steps=10))
    assert exc.value.step >= 1


def test_determinism():
    cfg = SolverConfig(alpha=0.7, steps=300)
    a = solve_fde_ivp(lambda y: -y + 0.1 * y ** 2, [0.9], cfg)
    b = solve_fde_ivp(lambda y: -y + 0.1 * y ** 2, [0.9], cfg)
    assert np.array_equal(a.states, b.states)
