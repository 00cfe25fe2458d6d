"""Evolution engine: couples the federation game's replicator field with
the fractional solver and analyzes the resulting trajectories.

Produces trajectories, convergence/equilibrium reports, direction fields,
uniform-stability probes, and an empirical Lipschitz constant for the
replicator field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fractional import FdeSolution, SolverConfig, solve_fde_ivp
from .game import FederationGame, MixedStrategyProfile

ADJACENCY_THRESHOLD = 1e-4
NEIGHBORHOOD_THRESHOLD = 0.01


def project_simplex_flat(raw: np.ndarray, block_sizes: Sequence[int]) -> np.ndarray:
    """Clamp negatives to zero and renormalize each block to sum one.

    Identity on valid profiles and idempotent.  Rejects blocks that are
    entirely non-positive (no direction to renormalize toward).
    """
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise ValueError("cannot project non-finite vector")
    out = np.empty_like(raw)
    pos = 0
    for s in block_sizes:
        block = np.clip(raw[pos:pos + s], 0.0, None)
        total = block.sum()
        if total == 0.0:
            raise ValueError(f"block at offset {pos} is all zero after clamping")
        out[pos:pos + s] = block / total
        pos += s
    return out


def project_simplex(raw: np.ndarray, block_sizes: Sequence[int]) -> MixedStrategyProfile:
    return MixedStrategyProfile.from_flat(block_sizes, project_simplex_flat(raw, block_sizes))


@dataclass
class Trajectory:
    """Time-indexed strategy profiles with per-step diagnostics."""

    times: np.ndarray
    states: np.ndarray                  # shape (steps+1, total strategies), flat profiles
    block_sizes: tuple[int, ...]
    step_changes: np.ndarray            # max |x[j] - x[j-1]| per step, index 0 is 0
    projection_magnitudes: np.ndarray   # inf-norm of the per-step simplex correction
    game: FederationGame
    gamma: float
    solver: SolverConfig

    def profile(self, j: int) -> MixedStrategyProfile:
        return MixedStrategyProfile.from_flat(self.block_sizes, self.states[j])

    @property
    def terminal(self) -> MixedStrategyProfile:
        return self.profile(len(self.times) - 1)


@dataclass
class EquilibriumReport:
    """Terminal profile of a run with its convergence times and quality."""

    equilibrium: MixedStrategyProfile
    t_adjacency: Optional[float]
    t_neighborhood: Optional[float]
    utilities: tuple[float, ...]
    residual: float

    @property
    def converged(self) -> bool:
        return self.t_adjacency is not None


def simulate(game: FederationGame, x_init: MixedStrategyProfile,
             solver: SolverConfig, gamma: float) -> Trajectory:
    """Integrate the replicator dynamics of order solver.alpha from x_init.

    After every accepted step the state is projected back onto the product
    of simplices; the quadrature keeps the dynamics near-tangent, so the
    logged correction magnitudes should stay tiny.
    """
    sizes = tuple(e.num_strategies for e in game.eips)
    proj_mags = [0.0]

    def postprocess(raw):
        fixed = project_simplex_flat(raw, sizes)
        proj_mags.append(float(np.max(np.abs(fixed - raw))))
        return fixed

    sol = solve_fde_ivp(lambda y: game.rhs_flat(y, gamma), x_init.flat, solver,
                        postprocess=postprocess)
    changes = np.zeros(len(sol.times))
    changes[1:] = np.max(np.abs(np.diff(sol.states, axis=0)), axis=1)
    return Trajectory(times=sol.times, states=sol.states, block_sizes=sizes,
                      step_changes=changes,
                      projection_magnitudes=np.asarray(proj_mags),
                      game=game, gamma=gamma, solver=solver)


def detect_convergence(traj: Trajectory,
                       adjacency_thresh: float = ADJACENCY_THRESHOLD,
                       neighborhood_thresh: float = NEIGHBORHOOD_THRESHOLD) -> EquilibriumReport:
    """Classify convergence of a trajectory by backward scan.

    t_adjacency is the earliest time after which the per-step change stays
    below the threshold for the remainder of the run; t_neighborhood the
    earliest time after which the state stays within the threshold of the
    terminal profile.  The terminal sample is excluded from the
    neighborhood scan (it matches itself trivially).  Either time is
    absent when the condition first holds only at the very end.
    """
    n_steps = len(traj.times) - 1
    if n_steps < 2:
        raise ValueError("need a trajectory with at least 2 steps")
    x_star = traj.terminal

    viol = np.nonzero(traj.step_changes[1:] >= adjacency_thresh)[0]
    if viol.size == 0:
        t_adj = 0.0
    else:
        last = viol[-1] + 1          # step index of the last violating move
        t_adj = float(traj.times[last]) if last < n_steps else None

    dev = np.max(np.abs(traj.states[:-1] - traj.states[-1]), axis=1)
    viol = np.nonzero(dev >= neighborhood_thresh)[0]
    if viol.size == 0:
        t_nbr = 0.0
    else:
        last = viol[-1]
        t_nbr = float(traj.times[last]) if last < n_steps - 1 else None

    utilities = tuple(traj.game.average_payoff(i, x_star) for i in range(len(traj.game.eips)))
    residual = float(np.max(np.abs(traj.game.rhs_flat(traj.states[-1], traj.gamma))))
    return EquilibriumReport(equilibrium=x_star, t_adjacency=t_adj,
                             t_neighborhood=t_nbr, utilities=utilities,
                             residual=residual)


def direction_field(game: FederationGame, initial_grid: Sequence[MixedStrategyProfile],
                    solver: SolverConfig, gamma: float, stride: int = 200) -> list[np.ndarray]:
    """Sampled trajectories from a grid of initial profiles.

    Each polyline holds every stride-th profile (flat); consecutive pairs
    form the field arrows.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    polylines = []
    for x0 in initial_grid:
        traj = simulate(game, x0, solver, gamma)
        polylines.append(traj.states[::stride].copy())
    return polylines


def estimate_lipschitz(game: FederationGame, gamma: float, sample_count: int = 1000) -> float:
    """Empirical Lipschitz constant of the replicator field over the
    strategy space: max of ||phi(x) - phi(y)||_1 / ||x - y||_1 over a
    deterministic low-discrepancy sample of profile pairs.
    """
    if sample_count < 2:
        raise ValueError("need at least 2 sample pairs")
    sizes = tuple(e.num_strategies for e in game.eips)
    dim = sum(sizes)
    # Kronecker sequence on sqrt-of-prime irrationals, folded onto the simplices
    primes = []
    candidate = 2
    while len(primes) < 2 * dim:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    alphas = np.array([math.sqrt(p) % 1 for p in primes])
    k_hat = 0.0
    for m in range(1, sample_count + 1):
        u = (m * alphas) % 1.0 + 1e-3
        x = project_simplex_flat(u[:dim], sizes)
        y = project_simplex_flat(u[dim:], sizes)
        dxy = float(np.sum(np.abs(x - y)))
        if dxy < 1e-12:
            continue
        dphi = float(np.sum(np.abs(game.rhs_flat(x, gamma) - game.rhs_flat(y, gamma))))
        k_hat = max(k_hat, dphi / dxy)
    return k_hat


@dataclass
class StabilityProbe:
    """One perturbed-start comparison run against the equilibrium."""

    initial_distance: float
    weighted_sup: float
    passed: bool
    reconverged: bool   # terminal state back within 0.01 of x_star


@dataclass
class StabilityReport:
    n_weight: float
    probes: list[StabilityProbe] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.probes)


def _perturbed_starts(x_star: MixedStrategyProfile, delta: float) -> list[MixedStrategyProfile]:
    """Deterministic set of starts with ||x0 - y0||_1 <= delta: for each
    provider, move delta/2 of mass from the heaviest strategy toward each
    other strategy in turn.
    """
    starts = []
    sizes = x_star.block_sizes
    flat = x_star.flat
    pos = 0
    for s in sizes:
        block = flat[pos:pos + s]
        src = int(np.argmax(block))
        shift = min(delta / 2.0, float(block[src]))
        for dst in range(s):
            if dst == src:
                continue
            y = flat.copy()
            y[pos + src] -= shift
            y[pos + dst] += shift
            starts.append(MixedStrategyProfile.from_flat(sizes, y))
        pos += s
    return starts


def stability_probe(game: FederationGame, x_star: MixedStrategyProfile, delta: float,
                    solver: SolverConfig, gamma: float, n_weight: float,
                    starts: Optional[Sequence[MixedStrategyProfile]] = None) -> StabilityReport:
    """Uniform-stability check around a rest point x_star.

    Runs the dynamics from x_star and from each perturbed start and tests
    sup_{t >= h} e^{-n_weight * t} ||x(t) - y(t)||_1 < ||x0 - y0||_1.
    The supremum starts at the first grid point: at t = 0 the weighted
    distance equals the initial distance identically.
    """
    residual = float(np.max(np.abs(game.rhs_flat(x_star.flat, gamma))))
    if residual > 1e-3:
        raise ValueError(f"x_star is not a rest point (residual {residual:.3g} > 1e-3)")
    if n_weight <= 0:
        raise ValueError("n_weight must be > 0")
    base = simulate(game, x_star, solver, gamma)
    if starts is None:
        starts = _perturbed_starts(x_star, delta)
    report = StabilityReport(n_weight=n_weight)
    for y0 in starts:
        d0 = float(np.sum(np.abs(x_star.flat - y0.flat)))
        traj = simulate(game, y0, solver, gamma)
        dist = np.sum(np.abs(traj.states - base.states), axis=1)
        weighted = np.exp(-n_weight * traj.times[1:]) * dist[1:]
        sup = float(np.max(weighted)) if d0 > 0 else 0.0
        passed = (d0 == 0.0) or (sup < d0)
        recon = float(np.max(np.abs(traj.states[-1] - x_star.flat))) < NEIGHBORHOOD_THRESHOLD
        report.probes.append(StabilityProbe(initial_distance=d0, weighted_sup=sup,
                                            passed=passed, reconverged=recon))
    return report


def stability_weight(k_hat: float, alpha: float, horizon: float = 1.0) -> float:
    """Weight N for the uniform-stability inequality, chosen so the
    contraction condition L*K < N^alpha holds: N = (1 + L*K)^(1/alpha)
    with L the horizon length and K the empirical Lipschitz constant.
    """
    if k_hat < 0 or horizon <= 0 or not 0 < alpha < 2:
        raise ValueError("invalid stability-weight inputs")
    return (1.0 + horizon * k_hat) ** (1.0 / alpha)


def calibrate_gamma(game: FederationGame, x_init: MixedStrategyProfile,
                    solver: SolverConfig, candidates: Sequence[float] = (0.1, 1.0, 10.0, 100.0, 1000.0),
                    residual_cutoff: float = 0.05) -> float:
    """Smallest candidate adaptation speed for which the classical (order
    one) run reaches adjacency convergence before the horizon AND ends at
    a genuine rest point (residual guard: a speed so small the dynamics
    barely move would satisfy the adjacency test vacuously).
    """
    classical = SolverConfig(alpha=1.0, horizon=solver.horizon, steps=solver.steps,
                             corrector_iterations=solver.corrector_iterations,
                             memory_truncation=solver.memory_truncation)
    for gamma in candidates:
        traj = simulate(game, x_init, classical, gamma)
        rep = detect_convergence(traj)
        # the residual scales with gamma; judge the payoff gap itself
        gap = rep.residual / gamma
        if rep.t_adjacency is not None and gap <= residual_cutoff:
            return gamma
    raise RuntimeError("no candidate adaptation speed achieved convergence")
