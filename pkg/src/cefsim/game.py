"""Core game model of a coded edge federation (CEF).

Edge infrastructure providers (EIPs) contribute workers to a shared
federation that serves coded distributed computing tasks.  Worker
assignment and result recovery follow multivariate hypergeometric
distributions, and each provider's expected utility combines task
rewards, energy cost, and an edge-resource utilization cost.  The
module culminates in the replicator right-hand side used by the
evolution engine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class EipConfig:
    """Population and cost parameters of one edge infrastructure provider."""

    index: int
    num_clouds: int          # E_i: edge clouds controlled by the provider
    max_workers: int         # L_i: largest per-cloud contribution
    fixed_cost: float        # C_i: fixed cost amortized over service provisions
    calibration_ratio: float # rho_i in (0, 1]
    cpu_cost: float          # c_i: cost per CPU cycle
    capacity: int            # W_i: total worker capacity

    def __post_init__(self):
        problems = self.validation_errors()
        if problems:
            raise ValueError("; ".join(problems))

    def validation_errors(self) -> list[str]:
        errs = []
        if self.num_clouds < 1:
            errs.append("num_clouds must be >= 1")
        if self.max_workers < 1:
            errs.append("max_workers must be >= 1")
        if self.capacity < self.num_clouds * self.max_workers:
            errs.append(
                "capacity must cover simultaneous max contribution "
                f"(capacity={self.capacity} < num_clouds*max_workers="
                f"{self.num_clouds * self.max_workers})"
            )
        if self.fixed_cost < 0:
            errs.append("fixed_cost must be >= 0")
        if self.cpu_cost < 0:
            errs.append("cpu_cost must be >= 0")
        if not 0 < self.calibration_ratio <= 1:
            errs.append("calibration_ratio must be in (0, 1]")
        return errs

    @property
    def num_strategies(self) -> int:
        return self.max_workers + 1


@dataclass(frozen=True)
class TaskSpec:
    """One coded task type: code configuration, rewards, size, arrival rate."""

    n: int            # workers requested
    k: int            # recovery threshold: first k results suffice
    r0: float         # unit base reward
    r1: float         # unit additional reward
    r2: float         # fixed participation reward
    cycles: float     # CPU cycles per sub-task batch (D)
    rate: float       # task arrival rate (lambda)

    def __post_init__(self):
        problems = self.validation_errors()
        if problems:
            raise ValueError("; ".join(problems))

    def validation_errors(self) -> list[str]:
        errs = []
        if not 1 <= self.k <= self.n:
            errs.append("k must satisfy 1 <= k <= n")
        for name in ("r0", "r1", "r2", "cycles", "rate"):
            if getattr(self, name) < 0:
                errs.append(f"{name} must be >= 0")
        return errs


class MixedStrategyProfile:
    """Per-provider probability vectors over worker-contribution levels.

    Block i has length L_i + 1 and sums to one; the flat view
    concatenates blocks provider-major, strategy-minor.
    """

    def __init__(self, blocks: Sequence[np.ndarray]):
        self.blocks = tuple(np.asarray(b, dtype=float) for b in blocks)
        for i, b in enumerate(self.blocks):
            if b.ndim != 1 or b.size < 1:
                raise ValueError(f"block {i} must be a nonempty vector")
            if np.any(b < -SIMPLEX_TOL) or np.any(b > 1 + SIMPLEX_TOL):
                raise ValueError(f"block {i} entries must lie in [0, 1]")
            if abs(b.sum() - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"block {i} must sum to 1 (got {b.sum()!r})")

    @classmethod
    def uniform(cls, eips: Sequence[EipConfig]) -> "MixedStrategyProfile":
        return cls([np.full(e.num_strategies, 1.0 / e.num_strategies) for e in eips])

    @classmethod
    def pure(cls, eips: Sequence[EipConfig], levels: Sequence[int]) -> "MixedStrategyProfile":
        blocks = []
        for e, l in zip(eips, levels):
            if not 0 <= l <= e.max_workers:
                raise ValueError(f"level {l} outside 0..{e.max_workers}")
            b = np.zeros(e.num_strategies)
            b[l] = 1.0
            blocks.append(b)
        return cls(blocks)

    @classmethod
    def from_flat(cls, sizes: Sequence[int], flat: np.ndarray) -> "MixedStrategyProfile":
        flat = np.asarray(flat, dtype=float)
        out, pos = [], 0
        for s in sizes:
            out.append(flat[pos:pos + s])
            pos += s
        if pos != flat.size:
            raise ValueError("flat vector length does not match block sizes")
        return cls(out)

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    def cloud_counts(self, i: int, eip: EipConfig) -> np.ndarray:
        """Estimated number of clouds of provider i playing each strategy."""
        return eip.num_clouds * self.blocks[i]


def _constrained_placements(limits: Sequence[int], total: int):
    """Integer vectors v with 0 <= v_i <= limits_i and sum(v) == total."""
    for combo in itertools.product(*[range(x + 1) for x in limits]):
        if sum(combo) == total:
            yield combo


def joint_assignment_pmf(levels: Sequence[int], n: int):
    """Distribution of worker placements when n workers are drawn uniformly
    from the pooled contributions `levels`.

    Returns [(placement, probability), ...]; empty when the federation
    cannot serve the task (sum(levels) < n).
    """
    levels = tuple(int(x) for x in levels)
    if any(l < 0 for l in levels):
        raise ValueError("contribution levels must be >= 0")
    total = sum(levels)
    if total < n:
        return []
    denom = math.comb(total, n)
    out = []
    for combo in _constrained_placements(levels, n):
        num = math.prod(math.comb(l, c) for l, c in zip(levels, combo))
        out.append((combo, num / denom))
    return out


def recovery_pmf(placement: Sequence[int], k: int):
    """Distribution of how the first k returned results split across
    providers, given the worker placement of the running task.
    """
    placement = tuple(int(x) for x in placement)
    total = sum(placement)
    if total < k:
        raise ValueError(f"cannot recover: {total} assigned workers < k={k}")
    denom = math.comb(total, k)
    out = []
    for combo in _constrained_placements(placement, k):
        num = math.prod(math.comb(p, c) for p, c in zip(placement, combo))
        out.append((combo, num / denom))
    return out


class FederationGame:
    """Expected payoffs and replicator dynamics of the federation game.

    `literal_utilization_cost` switches the per-strategy utilization cost
    between the primitive definition (which divides the amortized cost by
    the provider's cloud count) and the verbatim net-utility formula,
    which omits that division.
    """

    def __init__(self, eips: Sequence[EipConfig], tasks: Sequence[TaskSpec],
                 literal_utilization_cost: bool = False):
        if not eips:
            raise ValueError("need at least one provider")
        if not tasks:
            raise ValueError("need at least one task type")
        if sum(t.rate for t in tasks) <= 0:
            raise ValueError("task arrival rates must not all be zero")
        self.eips = tuple(eips)
        self.tasks = tuple(tasks)
        self.literal_utilization_cost = literal_utilization_cost
        self._base_tables = None  # lazy: task-weighted payoff sans utilization cost

    # ------------------------------------------------------------------
    # utilization and its cost

    def mean_contribution(self, i: int, x: MixedStrategyProfile) -> float:
        js = np.arange(self.eips[i].num_strategies)
        return float(js @ x.blocks[i])

    def utilization(self, i: int, x: MixedStrategyProfile) -> float:
        e = self.eips[i]
        return e.num_clouds * self.mean_contribution(i, x) / e.capacity

    def _amortized_cost(self, i: int, w: float) -> float:
        e = self.eips[i]
        return -e.fixed_cost * e.calibration_ratio * (1.0 - 1.0 / (1.0 - w))

    def utilization_cost_vector(self, i: int, x: MixedStrategyProfile) -> np.ndarray:
        """Per-strategy utilization cost for provider i at profile x."""
        e = self.eips[i]
        js = np.arange(e.num_strategies, dtype=float)
        xi = x.blocks[i]
        s = float(js @ xi)
        if s == 0.0:
            # a provider contributing nothing bears no utilization cost
            return np.zeros(e.num_strategies)
        f = self._amortized_cost(i, self.utilization(i, x))
        cost = (js * xi / s) * f
        if not self.literal_utilization_cost:
            cost = cost / e.num_clouds
        return cost

    def utilization_cost(self, i: int, j: int, x: MixedStrategyProfile) -> float:
        return float(self.utilization_cost_vector(i, x)[j])

    # ------------------------------------------------------------------
    # payoffs

    def _expected_task_value(self, i: int, levels: Sequence[int], task: TaskSpec) -> float:
        """Fixed reward plus expected assignment/recovery rewards minus
        energy cost, for provider i under the pure profile `levels`.
        Excludes the utilization cost.
        """
        value = task.r2
        for placement, p in joint_assignment_pmf(levels, task.n):
            nt_i = placement[i]
            term = task.r0 * task.n * nt_i
            term -= self.eips[i].cpu_cost * task.cycles / task.k * nt_i
            exp_recovered = sum(q * kt[i] for kt, q in recovery_pmf(placement, task.k))
            term += task.r1 * task.k * exp_recovered
            value += p * term
        return value

    def pure_payoff(self, i: int, l_i: int, levels: Sequence[int],
                    x: MixedStrategyProfile, task: TaskSpec) -> float:
        levels = tuple(levels)
        if levels[i] != l_i:
            raise ValueError("levels[i] must equal l_i")
        return self._expected_task_value(i, levels, task) - self.utilization_cost(i, l_i, x)

    def _task_weight(self, task: TaskSpec) -> float:
        return task.rate / sum(t.rate for t in self.tasks)

    def base_payoff(self, i: int, levels: Sequence[int]) -> float:
        """Task-weighted expected payoff of provider i at a pure profile,
        excluding the utilization cost (which depends on the mixed state).
        """
        return sum(self._task_weight(t) * self._expected_task_value(i, levels, t)
                   for t in self.tasks)

    def _tables(self) -> list[np.ndarray]:
        if self._base_tables is None:
            shape = tuple(e.num_strategies for e in self.eips)
            tables = [np.zeros(shape) for _ in self.eips]
            for levels in itertools.product(*[range(s) for s in shape]):
                for i in range(len(self.eips)):
                    tables[i][levels] = self.base_payoff(i, levels)
            self._base_tables = tables
        return self._base_tables

    def _contract_opponents(self, i: int, blocks: Sequence[np.ndarray]) -> np.ndarray:
        """Average the base payoff table of provider i over the opponents'
        mixed strategies, leaving a vector indexed by provider i's strategy.
        Contracting the highest axis first keeps lower axis indices stable.
        """
        table = self._tables()[i]
        for other in range(len(self.eips) - 1, -1, -1):
            if other != i:
                table = np.tensordot(table, blocks[other], axes=(other, 0))
        return np.asarray(table, dtype=float).reshape(self.eips[i].num_strategies)

    def payoff_vector(self, i: int, x: MixedStrategyProfile) -> np.ndarray:
        """Expected payoff of each strategy of provider i against the
        opponents' mixed strategies.
        """
        return self._contract_opponents(i, x.blocks) - self.utilization_cost_vector(i, x)

    def mixed_payoff(self, i: int, l_i: int, x: MixedStrategyProfile) -> float:
        return float(self.payoff_vector(i, x)[l_i])

    def average_payoff(self, i: int, x: MixedStrategyProfile) -> float:
        return float(x.blocks[i] @ self.payoff_vector(i, x))

    # ------------------------------------------------------------------
    # replicator dynamics

    def replicator_rhs(self, x: MixedStrategyProfile, gamma: float) -> np.ndarray:
        """Growth rate of every strategy share: gamma * x_ij * (u_ij - u_i).

        Returned flat, aligned with `x.flat`.
        """
        if gamma <= 0:
            raise ValueError("adaptation speed gamma must be > 0")
        parts = []
        for i in range(len(self.eips)):
            u = self.payoff_vector(i, x)
            xi = x.blocks[i]
            parts.append(gamma * xi * (u - xi @ u))
        return np.concatenate(parts)

    def rhs_flat(self, flat: np.ndarray, gamma: float) -> np.ndarray:
        """Fast path for integrators: same as replicator_rhs but on the
        flat state vector, skipping profile validation.
        """
        sizes = [e.num_strategies for e in self.eips]
        blocks, pos = [], 0
        for s in sizes:
            blocks.append(flat[pos:pos + s])
            pos += s
        out = np.empty_like(flat)
        pos = 0
        for i, e in enumerate(self.eips):
            u = self._contract_opponents(i, blocks)
            xi = blocks[i]
            js = np.arange(e.num_strategies, dtype=float)
            s = float(js @ xi)
            if s != 0.0:
                w = e.num_clouds * s / e.capacity
                f = self._amortized_cost(i, w)
                cost = (js * xi / s) * f
                if not self.literal_utilization_cost:
                    cost = cost / e.num_clouds
                u = u - cost
            ubar = float(xi @ u)
            out[pos:pos + e.num_strategies] = gamma * xi * (u - ubar)
            pos += e.num_strategies
        return out
