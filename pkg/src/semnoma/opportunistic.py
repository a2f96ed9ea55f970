"""Opportunistic semantic/bit mode switching for a two-user uplink NOMA pair.

The primary user sends bits at fixed power and is decoded first, treating the
secondary user as interference. The secondary user is decoded interference-free
after SIC and picks, per fading state, a mode (semantic or bit) and a transmit
power on a uniform grid over [0, p_peak]. The ergodic (equivalent) semantic rate
of the secondary is maximised subject to

    E[p] <= p_avg,   p <= p_peak,   E[R_primary] >= r_req,

by projected subgradient descent on the two multipliers, followed by a greedy
per-state repair of the best feasible iterate.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from semnoma.channel import FadingEnsemble, NoiseModel
from semnoma.errors import InfeasibleError
from semnoma.rates import (
    BitEquivalence,
    SemanticTextModel,
    bit_rate,
    bit_to_equiv_semantic,
    semantic_rate,
)

log = logging.getLogger(__name__)

# subgradient iterations before falling back to the monotone price search
_RECOVER_AT = 100


class CommMode(str, enum.Enum):
    SEMANTIC = "semantic"
    BIT = "bit"

    def __str__(self) -> str:
        return self.value


class PolicyDecision(NamedTuple):
    mode: CommMode
    power: float


@dataclass(frozen=True)
class DualVars:
    lambda_apc: float = 0.0
    nu_primary: float = 0.0

    def __post_init__(self):
        for v in (self.lambda_apc, self.nu_primary):
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("dual variables must be finite and >= 0")


@dataclass(frozen=True)
class UplinkScenario:
    """Uplink pair parameters.

    Attributes:
        primary_power: fixed transmit power of the primary (bit) user, W.
        bandwidth: shared bandwidth, Hz.
        r_req: required ergodic primary bit rate, bits/s.
        p_avg: average power budget of the secondary user, W.
        p_peak: peak power of the secondary user, W.
    """

    primary_power: float
    bandwidth: float
    r_req: float
    p_avg: float
    p_peak: float
    noise: NoiseModel = field(default_factory=lambda: NoiseModel(1.0))
    semantic: SemanticTextModel = field(default_factory=SemanticTextModel)
    conversion: BitEquivalence = field(default_factory=BitEquivalence)

    def __post_init__(self):
        if not (self.primary_power > 0 and self.bandwidth > 0 and self.p_avg > 0 and self.p_peak > 0):
            raise ValueError("primary_power, bandwidth, p_avg and p_peak must be > 0")
        if self.p_avg > self.p_peak:
            raise ValueError("p_avg must not exceed p_peak")
        if not self.r_req >= 0:
            raise ValueError("r_req must be >= 0")

    def with_r_req(self, r_req: float) -> "UplinkScenario":
        return UplinkScenario(self.primary_power, self.bandwidth, r_req, self.p_avg, self.p_peak,
                              self.noise, self.semantic, self.conversion)


@dataclass(frozen=True, eq=False)
class OpportunisticResult:
    ergodic_secondary: float
    ergodic_primary: float
    avg_power: float
    policy: tuple[PolicyDecision, ...]
    duals: DualVars
    converged: bool
    iterations: int = 0
    dual_value: float = math.inf


def _state(state):
    g_p, g_s = state
    return np.asarray(g_p, dtype=float)[()], np.asarray(g_s, dtype=float)[()]


def primary_rate(secondary_power, state, scn: UplinkScenario):
    """Primary bit rate, decoded first with the secondary signal as interference."""
    if np.any(np.asarray(secondary_power) < 0):
        raise ValueError("secondary power must be >= 0")
    g_p, g_s = _state(state)
    W = scn.bandwidth
    return bit_rate(W, scn.primary_power * g_p / (secondary_power * g_s + W * scn.noise.n0))


def _utilities(power, g_s, scn: UplinkScenario):
    W = scn.bandwidth
    gamma = power * g_s / (W * scn.noise.n0)
    sem = semantic_rate(scn.semantic, W, gamma, np.asarray(power) > 0)
    bit = bit_to_equiv_semantic(bit_rate(W, gamma), scn.semantic, scn.conversion)
    return sem, bit


def secondary_utility(mode: CommMode, power, state, scn: UplinkScenario):
    """Secondary rate in suts/s (bit mode converted to its semantic equivalent)."""
    p = np.asarray(power, dtype=float)
    if np.any(p < 0) or np.any(p > scn.p_peak):
        raise ValueError(f"power must lie in [0, p_peak={scn.p_peak}]")
    _, g_s = _state(state)
    sem, bit = _utilities(p, g_s, scn)
    return sem if CommMode(mode) is CommMode.SEMANTIC else bit


class _PolicyTable:
    """Per-state, per-grid-power utility and primary rate, precomputed once.

    The mode at each (state, power) is the better of the allowed modes; ties
    and zero power resolve to bit mode.
    """

    def __init__(self, scn: UplinkScenario, ensemble: FadingEnsemble,
                 power_grid: int, modes: Sequence[CommMode]):
        if power_grid < 2:
            raise ValueError("power_grid must be >= 2")
        self.scn = scn
        self.weights = ensemble.weights
        self.powers = np.linspace(0.0, scn.p_peak, power_grid)
        g_p = ensemble.primary_gains[:, None]
        g_s = ensemble.secondary_gains[:, None]
        p = self.powers[None, :]
        W = scn.bandwidth
        sem, bit = _utilities(p, g_s, scn)
        modes = {CommMode(m) for m in modes}
        if modes == {CommMode.SEMANTIC}:
            self.utility = sem
            self.semantic_mode = np.broadcast_to(p > 0, sem.shape)
        elif modes == {CommMode.BIT}:
            self.utility = bit
            self.semantic_mode = np.zeros(sem.shape, dtype=bool)
        else:
            self.semantic_mode = sem > bit
            self.utility = np.where(self.semantic_mode, sem, bit)
        self.primary = bit_rate(W, scn.primary_power * g_p / (p * g_s + W * scn.noise.n0))

    def best_response(self, lam: float, nu: float) -> np.ndarray:
        lagr = self.utility + nu * self.primary - lam * self.powers[None, :]
        return np.argmax(lagr, axis=1)

    def lagrangian_max(self, lam: float, nu: float) -> np.ndarray:
        lagr = self.utility + nu * self.primary - lam * self.powers[None, :]
        return lagr.max(axis=1)

    def pick(self, idx: np.ndarray):
        rows = np.arange(idx.size)
        return self.utility[rows, idx], self.primary[rows, idx], self.powers[idx]

    def averages(self, idx: np.ndarray) -> tuple[float, float, float]:
        u, r, p = self.pick(idx)
        w = self.weights
        return float(w @ u), float(w @ r), float(w @ p)

    def dual_value(self, lam: float, nu: float) -> float:
        scn = self.scn
        return float(self.weights @ self.lagrangian_max(lam, nu)) + lam * scn.p_avg - nu * scn.r_req

    def policy(self, idx: np.ndarray) -> tuple[PolicyDecision, ...]:
        rows = np.arange(idx.size)
        sem = self.semantic_mode[rows, idx] & (idx > 0)
        return tuple(PolicyDecision(CommMode.SEMANTIC if s else CommMode.BIT, float(self.powers[i]))
                     for s, i in zip(sem.tolist(), idx.tolist()))


def silent_primary_rate(scn: UplinkScenario, ensemble: FadingEnsemble) -> float:
    """Ergodic primary rate with the secondary user silent: the largest feasible ``r_req``."""
    return ensemble.mean(primary_rate(0.0, (ensemble.primary_gains, ensemble.secondary_gains), scn))


def solve_per_state(duals: DualVars, state, scn: UplinkScenario, power_grid: int = 201,
                    modes: Sequence[CommMode] = (CommMode.SEMANTIC, CommMode.BIT)) -> PolicyDecision:
    """Maximise utility + nu * primary_rate - lambda * power over the finite candidate set."""
    ens = FadingEnsemble.from_states([tuple(map(float, _state(state)))])
    table = _PolicyTable(scn, ens, power_grid, modes)
    idx = table.best_response(duals.lambda_apc, duals.nu_primary)
    return table.policy(idx)[0]


class _Feasibility:
    def __init__(self, scn: UplinkScenario, tol: float):
        self.p_cap = scn.p_avg * (1 + tol)
        self.r_floor = scn.r_req * (1 - tol)

    def __call__(self, avg_p: float, er: float) -> bool:
        return avg_p <= self.p_cap and er >= self.r_floor


def _smallest_ok(ok, lo: float, hi: float | None, scale: float, rtol: float = 1e-10) -> float:
    """Smallest x in [lo, hi] with ok(x), for ok monotone (False then True).

    ``hi`` is a known-ok bound or ``None`` to search upward from ``scale``.
    """
    if ok(lo):
        return lo
    if hi is None:
        hi = max(lo, scale)
        for _ in range(200):
            if ok(hi):
                break
            hi *= 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _recover(table: _PolicyTable, feasible: _Feasibility, lam_scale: float, nu_scale: float,
             rounds: int = 30):
    """Least price pair whose best response is feasible.

    Average power is nonincreasing and the primary rate nondecreasing in both
    prices, so alternating one-dimensional searches move lambda up and nu down
    monotonically until neither changes.
    """
    lam, nu_hi = 0.0, None
    nu = 0.0
    for _ in range(rounds):
        nu = _smallest_ok(lambda x: table.averages(table.best_response(lam, x))[1] >= feasible.r_floor,
                          0.0, nu_hi, nu_scale)
        new_lam = _smallest_ok(lambda x: table.averages(table.best_response(x, nu))[2] <= feasible.p_cap,
                               lam, None, lam_scale)
        if new_lam == lam and nu_hi is not None and nu == nu_hi:
            break
        lam, nu_hi = new_lam, nu
    return lam, nu, table.best_response(lam, nu)


def _repair(table: _PolicyTable, idx: np.ndarray, feasible: _Feasibility,
            max_sweeps: int = 50, pair_budget: float = 2e6) -> np.ndarray:
    """Local search from a feasible policy: improving single-state moves, plus
    pair-of-states moves when the ensemble is small enough to afford them."""
    idx = idx.copy()
    w = table.weights
    n, g = table.utility.shape
    u, r, p = table.pick(idx)
    er, ap = float(w @ r), float(w @ p)
    use_pairs = n > 1 and n * (n - 1) / 2 * g * g <= pair_budget

    def move(i, j):
        nonlocal er, ap
        er += w[i] * (table.primary[i, j] - r[i])
        ap += w[i] * (table.powers[j] - p[i])
        idx[i] = j
        u[i], r[i], p[i] = table.utility[i, j], table.primary[i, j], table.powers[j]

    for _ in range(max_sweeps):
        improved = False
        for i in range(n):
            d_obj = w[i] * (table.utility[i] - u[i])
            new_er = er + w[i] * (table.primary[i] - r[i])
            new_ap = ap + w[i] * (table.powers - p[i])
            ok = (new_ap <= feasible.p_cap) & (new_er >= feasible.r_floor) & (d_obj > 0)
            if ok.any():
                move(i, int(np.argmax(np.where(ok, d_obj, -np.inf))))
                improved = True
        if use_pairs:
            for i in range(n):
                for k in range(i + 1, n):
                    d_obj = (w[i] * (table.utility[i] - u[i]))[:, None] + w[k] * (table.utility[k] - u[k])
                    new_er = er + (w[i] * (table.primary[i] - r[i]))[:, None] + w[k] * (table.primary[k] - r[k])
                    new_ap = ap + (w[i] * (table.powers - p[i]))[:, None] + w[k] * (table.powers - p[k])
                    ok = (new_ap <= feasible.p_cap) & (new_er >= feasible.r_floor) & (d_obj > 0)
                    if ok.any():
                        a, b = np.unravel_index(np.argmax(np.where(ok, d_obj, -np.inf)), ok.shape)
                        move(i, int(a))
                        move(k, int(b))
                        improved = True
        if not improved:
            break
    return idx


def _solve(scn: UplinkScenario, ensemble: FadingEnsemble, modes: Sequence[CommMode],
           power_grid: int, max_iters: int, tol: float) -> OpportunisticResult:
    table = _PolicyTable(scn, ensemble, power_grid, modes)
    r_silent = silent_primary_rate(scn, ensemble)
    if scn.r_req > r_silent:
        raise InfeasibleError(
            f"required primary rate {scn.r_req:.6g} bits/s exceeds the maximum achievable "
            f"{r_silent:.6g} bits/s (secondary silent)", achievable=r_silent)
    feasible = _Feasibility(scn, tol)

    u_ref = max(float(table.weights @ table.utility.max(axis=1)), 1e-300)
    lam_scale = u_ref / scn.p_avg
    nu_scale = u_ref / r_silent

    def certified(obj: float, dual: float) -> bool:
        return dual - obj <= tol * max(obj, tol * u_ref)

    # the all-silent policy is always feasible once the precheck passed
    best_idx = np.zeros(len(ensemble), dtype=int)
    best_obj = 0.0
    dual_min, dual_arg = math.inf, (0.0, 0.0)
    lam = nu = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        idx = table.best_response(lam, nu)
        obj, er, ap = table.averages(idx)
        dual = table.dual_value(lam, nu)
        if dual < dual_min:
            dual_min, dual_arg = dual, (lam, nu)
        if feasible(ap, er) and obj > best_obj:
            best_idx, best_obj = idx, obj
        if it == _RECOVER_AT:
            rl, rn, ridx = _recover(table, feasible, lam_scale, nu_scale)
            robj, rer, rap = table.averages(ridx)
            rdual = table.dual_value(rl, rn)
            if rdual < dual_min:
                dual_min, dual_arg = rdual, (rl, rn)
            if feasible(rap, rer) and robj > best_obj:
                best_idx, best_obj = ridx, robj
        if certified(best_obj, dual_min):
            converged = True
            break
        step = 1.0 / math.sqrt(it)
        lam = max(0.0, lam + step * lam_scale * (ap - scn.p_avg) / scn.p_avg)
        nu = max(0.0, nu + step * nu_scale * (scn.r_req - er) / r_silent)

    best_idx = _repair(table, best_idx, feasible)
    obj, er, ap = table.averages(best_idx)
    converged = converged or (feasible(ap, er) and certified(obj, dual_min))
    return OpportunisticResult(
        ergodic_secondary=obj, ergodic_primary=er, avg_power=ap,
        policy=table.policy(best_idx), duals=DualVars(*dual_arg),
        converged=bool(converged), iterations=it, dual_value=dual_min)


def solve_dual(scn: UplinkScenario, ensemble: FadingEnsemble, power_grid: int = 201,
               max_iters: int = 2000, tol: float = 1e-3) -> OpportunisticResult:
    """Opportunistic mode switching: the secondary may use either mode per state."""
    return _solve(scn, ensemble, (CommMode.SEMANTIC, CommMode.BIT), power_grid, max_iters, tol)


def evaluate_fixed_mode(scn: UplinkScenario, ensemble: FadingEnsemble, mode: CommMode,
                        power_grid: int = 201, max_iters: int = 2000,
                        tol: float = 1e-3) -> OpportunisticResult:
    """Baseline where the secondary always uses ``mode``."""
    return _solve(scn, ensemble, (CommMode(mode),), power_grid, max_iters, tol)


def evaluate_policy(scn: UplinkScenario, ensemble: FadingEnsemble,
                    policy: Iterable[PolicyDecision]) -> tuple[float, float, float]:
    """Re-evaluate a policy state by state: (ergodic secondary, ergodic primary, avg power)."""
    u, r, p = [], [], []
    for (g_p, g_s), (mode, power) in zip(ensemble.states, policy):
        u.append(float(secondary_utility(mode, power, (g_p, g_s), scn)))
        r.append(float(primary_rate(power, (g_p, g_s), scn)))
        p.append(power)
    return ensemble.mean(u), ensemble.mean(r), ensemble.mean(p)


SCHEMES = {
    "opportunistic": None,
    "semantic-only": CommMode.SEMANTIC,
    "bit-only": CommMode.BIT,
}


@dataclass
class CurvePoint:
    r_req: float
    result: OpportunisticResult | None  # None when infeasible


@dataclass
class RreqSweep:
    curves: dict[str, list[CurvePoint]]
    monotone_violations: list[str]


def sweep_rreq(scn: UplinkScenario, ensemble: FadingEnsemble, r_req_values: Sequence[float],
               power_grid: int = 201, max_iters: int = 2000, tol: float = 1e-3,
               executor=None) -> RreqSweep:
    """Run the opportunistic solver and both fixed-mode baselines over ``r_req_values``.

    Each scheme's curve must be nonincreasing in r_req within ``2 * tol``;
    violations are logged and reported rather than raised.
    """
    values = [float(v) for v in r_req_values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("r_req values must be strictly increasing")

    def run(name: str, r: float) -> CurvePoint:
        s = scn.with_r_req(r)
        mode = SCHEMES[name]
        try:
            if mode is None:
                res = solve_dual(s, ensemble, power_grid, max_iters, tol)
            else:
                res = evaluate_fixed_mode(s, ensemble, mode, power_grid, max_iters, tol)
        except InfeasibleError:
            return CurvePoint(r, None)
        return CurvePoint(r, res)

    jobs = [(name, r) for name in SCHEMES for r in values]
    if executor is None:
        points = [run(*j) for j in jobs]
    else:
        points = list(executor.map(lambda j: run(*j), jobs))
    curves = {name: points[k * len(values):(k + 1) * len(values)] for k, name in enumerate(SCHEMES)}

    violations = []
    for name, curve in curves.items():
        feas = [c for c in curve if c.result is not None]
        for a, b in zip(feas, feas[1:]):
            ra, rb = a.result.ergodic_secondary, b.result.ergodic_secondary
            if rb > ra * (1 + 2 * tol):
                msg = f"{name}: rate rises from {ra:.6g} to {rb:.6g} between r_req {a.r_req:.6g} and {b.r_req:.6g}"
                log.warning(msg)
                violations.append(msg)
    return RreqSweep(curves, violations)
