"""
Verification Suites
Machine-checkable forms of the model assumptions, the coupling lemmas and
the atom-mass recursion, as seeded property suites and deterministic oracles

Randomness comes from numpy's counter-based Philox generator keyed by
(seed, case index), so a failing case is reproduced from its two integers
on any platform.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from .core.config import get_settings
from .core.errors import (
    DegeneratePopulationError,
    PreconditionError,
    SelmutError,
)
from .dynamics import RecursionKernel, _check_beta, step
from .fitness import FitnessModel, KingmanFitness, LenskiFitness, SelectionState
from .limits import LimitResult, limit_distribution
from .measure import (
    Interval,
    Measure,
    cdf,
    dirac,
    is_component,
    levy_distance,
    measure_from_arrays,
    restrict,
    total_variation,
    truncate_at,
    upper_support,
)
from .utils.logging_config import SelmutLogger

logger = SelmutLogger.get_logger(__name__)


@dataclass(frozen=True)
class DominatedPair:
    """
    u and v with v_[0,M) ≺ u_[0,M) and v({M}) = u({M}) + moved_mass.

    v is u with part of its mass below M moved up to M.
    """
    u: Measure
    v: Measure
    moved_mass: float
    bound: float


class CheckReport(BaseModel):
    """Outcome of one check or one aggregated suite"""
    check: str = Field(description="Check name")
    passed: bool = Field(description="worst_violation within tolerance")
    worst_violation: float = Field(description="Largest observed violation")
    tolerance: float = Field(description="Declared absolute tolerance")
    witness: Optional[str] = Field(default=None, description="Input behind the worst case")
    seeds: List[int] = Field(default_factory=list, description="Seeds of the inputs")
    hypothesis_met: bool = Field(default=True, description="False if the check did not apply")
    details: Dict[str, Any] = Field(default_factory=dict, description="Per-check extras")

    @classmethod
    def from_violation(
        cls,
        check: str,
        worst_violation: float,
        tolerance: Optional[float] = None,
        **kwargs: Any,
    ) -> "CheckReport":
        tolerance = get_settings().verify.violation_tolerance if tolerance is None else tolerance
        return cls(
            check=check,
            passed=worst_violation <= tolerance,
            worst_violation=worst_violation,
            tolerance=tolerance,
            **kwargs,
        )


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(list(entropy)))


def _tol() -> float:
    return get_settings().verify.violation_tolerance


# ============================================================================
# Random inputs
# ============================================================================

def sample_measure(
    seed: int,
    n_atoms: int,
    bound: float = 1.0,
    top_atom: bool = True,
    index: int = 0,
) -> Measure:
    """
    Seeded random probability measure on [0, bound].

    Args:
        seed: Base seed
        n_atoms: Number of atoms (before merging)
        bound: Upper end M of the type space
        top_atom: Place one of the atoms exactly at M
        index: Case index, mixed into the generator key

    Returns:
        Probability measure with Dirichlet(1, ..., 1) masses
    """
    if n_atoms < 1:
        raise ValueError(f"n_atoms must be positive, got {n_atoms}")
    rng = _rng(seed, index)
    xs = rng.uniform(0.0, bound, size=n_atoms)
    if top_atom:
        xs[-1] = bound
    ms = rng.dirichlet(np.ones(n_atoms))
    return measure_from_arrays(xs, ms / math.fsum(ms))


def generate_dominated_pair(
    seed: int,
    base: Measure,
    bound: Optional[float] = None,
) -> DominatedPair:
    """
    u = base, v = base - r + |r| δ_M.

    r takes an independent uniform fraction of each atom of base below M.

    Example:
        >>> pair = generate_dominated_pair(0, dirac(1.0))
        >>> pair.moved_mass
        0.0
    """
    top = upper_support(base) if bound is None else float(bound)
    if upper_support(base) > top:
        raise PreconditionError(f"Base measure exceeds the bound M={top!r}")
    below = base.locations < top
    fractions = _rng(seed).uniform(0.0, 1.0, size=int(below.sum()))
    taken = fractions * base.masses[below]
    moved = math.fsum(taken)
    xs = np.append(base.locations[below], top)
    ms = np.append(base.masses[below] - taken, base.mass_at(top) + moved)
    return DominatedPair(u=base, v=measure_from_arrays(xs, ms), moved_mass=moved, bound=top)


def _advantages(model: FitnessModel, u: Measure, grid: np.ndarray) -> Optional[np.ndarray]:
    try:
        state: SelectionState = model.evaluate(u)
    except DegeneratePopulationError:
        return None
    if state.degenerate:
        return None
    return state.advantage(grid)


# ============================================================================
# Assumptions
# ============================================================================

def check_assumption1(
    model: FitnessModel,
    pairs: Sequence[DominatedPair],
    grid: Sequence[float],
) -> CheckReport:
    """
    s(x, u) >= s(x, v) on the grid for every dominated pair.

    worst_violation = max of s(x, v) - s(x, u); pairs with a member in the
    degenerate branch are skipped and counted.
    """
    xs = np.asarray(grid, dtype=float)
    worst, witness, skipped = 0.0, None, 0
    for k, pair in enumerate(pairs):
        su = _advantages(model, pair.u, xs)
        sv = _advantages(model, pair.v, xs)
        if su is None or sv is None:
            skipped += 1
            continue
        gap = sv - su
        j = int(np.argmax(gap))
        if gap[j] > worst:
            worst = float(gap[j])
            witness = f"pair {k} at x={float(xs[j])!r}"
    return CheckReport.from_violation(
        "assumption1",
        worst,
        witness=witness,
        details={"pairs": len(pairs), "skipped_degenerate": skipped, "model": model.kind},
    )


def _assumption2_hypothesis(pair: DominatedPair, a: float, eps: float) -> bool:
    return cdf(pair.u, a) >= cdf(pair.v, a) + eps


def check_assumption2_kingman(pair: DominatedPair, a: float, eps: float) -> CheckReport:
    """
    s(M, u) >= c(a, eps) s(M, v) with c(a, eps) = 1 / (1 - eps (1 - a/M)).

    Requires D_u(a) >= D_v(a) + eps; otherwise, or when u has zero mean,
    the report is marked hypothesis-unmet and passes.
    """
    top = pair.bound
    c = 1.0 / (1.0 - eps * (1.0 - a / top))
    details = {"a": a, "eps": eps, "c": c}
    if not _assumption2_hypothesis(pair, a, eps):
        return CheckReport.from_violation(
            "assumption2_kingman", 0.0, hypothesis_met=False,
            witness="hypothesis unmet: D_u(a) < D_v(a) + eps", details=details,
        )
    model = KingmanFitness()
    su = _advantages(model, pair.u, np.asarray([top]))
    sv = _advantages(model, pair.v, np.asarray([top]))
    if su is None or sv is None:
        return CheckReport.from_violation(
            "assumption2_kingman", 0.0, hypothesis_met=False,
            witness="hypothesis unmet: zero mean fitness (degenerate branch)", details=details,
        )
    deficit = float(c * sv[0] - su[0])
    return CheckReport.from_violation(
        "assumption2_kingman", max(deficit, 0.0),
        witness=None if deficit <= _tol() else f"s(M,u)={su[0]!r} < c*s(M,v)={c * sv[0]!r}",
        details=details,
    )


def check_assumption2_lenski(
    model: LenskiFitness,
    pair: DominatedPair,
    a: float,
    eps: float,
) -> CheckReport:
    """
    Qualitative form for the Lenski model: s(M, u) > s(M, v) strictly.

    No constant c(a, eps) is asserted; the margin s(M, u) - s(M, v) is
    reported and worst_violation is its negative.
    """
    details: Dict[str, Any] = {"a": a, "eps": eps}
    if not _assumption2_hypothesis(pair, a, eps):
        return CheckReport.from_violation(
            "assumption2_lenski", 0.0, hypothesis_met=False,
            witness="hypothesis unmet: D_u(a) < D_v(a) + eps", details=details,
        )
    top = np.asarray([pair.bound])
    su = _advantages(model, pair.u, top)
    sv = _advantages(model, pair.v, top)
    if su is None or sv is None:
        return CheckReport.from_violation(
            "assumption2_lenski", 0.0, hypothesis_met=False,
            witness="hypothesis unmet: degenerate population", details=details,
        )
    margin = float(su[0] - sv[0])
    details["margin"] = margin
    return CheckReport(
        check="assumption2_lenski",
        passed=margin > 0,
        worst_violation=-margin,
        tolerance=0.0,
        witness=None if margin > 0 else f"s(M,u)={su[0]!r} <= s(M,v)={sv[0]!r}",
        details=details,
    )


# ============================================================================
# Couplings
# ============================================================================

def _grid_advantages(kernel: RecursionKernel, vec: np.ndarray) -> np.ndarray:
    # s(x, p) on the whole kernel grid, including types p does not charge;
    # degenerate steps act as s = 1.
    pos = vec > 0
    try:
        state = kernel.model.evaluate_arrays(kernel.grid[pos], vec[pos], kernel.last_context)
    except DegeneratePopulationError:
        return np.ones(kernel.grid.size)
    if state.degenerate:
        return np.ones(kernel.grid.size)
    return state.advantage(kernel.grid)


def _below_component(u: Measure, v: Measure, top: float) -> bool:
    below = Interval.half_open(0.0, top)
    return is_component(restrict(u, below), restrict(v, below), below)


def _run_vectors(kernel: RecursionKernel, vec: np.ndarray, n: int) -> List[np.ndarray]:
    states = [vec]
    for _ in range(n):
        vec = kernel.advance(vec).masses
        states.append(vec)
    return states


def check_coupling(
    model: FitnessModel,
    h0: Measure,
    hhat0: Measure,
    q: Measure,
    beta: float,
    n: int,
    bound: Optional[float] = None,
) -> CheckReport:
    """
    Run h and ĥ with the same mutant distribution q for n steps and check
    (ĥ_i)_[0,M) ≺ (h_i)_[0,M) and ĥ_i({M}) >= h_i({M}) at every step.

    Raises:
        PreconditionError: If (ĥ_0)_[0,M) is not a component of (h_0)_[0,M)
    """
    top = max(upper_support(h0), upper_support(hhat0), upper_support(q)) if bound is None else bound
    if not _below_component(hhat0, h0, top):
        raise PreconditionError("(hhat_0)_[0,M) is not a component of (h_0)_[0,M)")
    kernel = RecursionKernel(model, q, beta, h0, hhat0, bound=top)
    below = kernel.grid < top
    h = _run_vectors(kernel, kernel.vector(h0), n)
    hhat = _run_vectors(kernel, kernel.vector(hhat0), n)
    worst, witness = 0.0, None
    for i, (hv, hh) in enumerate(zip(h, hhat)):
        excess = float(np.max(hh[below] - hv[below], initial=0.0))
        atom_gap = kernel.top_mass(hv) - kernel.top_mass(hh)
        gap = max(excess, atom_gap)
        if gap > worst:
            worst, witness = gap, f"step {i}"
    return CheckReport.from_violation(
        "coupling", worst, witness=witness,
        details={"steps": n, "model": model.kind},
    )


def check_truncated_coupling(
    model: FitnessModel,
    p0: Measure,
    phat0: Measure,
    qhat: Measure,
    beta: float,
    n: int,
) -> CheckReport:
    """
    Coupling with a truncated mutant distribution.

    p runs with q = qhat^m, m = m_{p0}, and p̂ with qhat. Checks
    (p̂_i)_[0,m) ≺ (p_i)_[0,m) and that p_i puts no mass on (m, M].

    Raises:
        PreconditionError: If m_{p0} > m_{p̂0} or (p̂_0)_[0,m) is not a
            component of (p_0)_[0,m)
    """
    m = upper_support(p0)
    if m > upper_support(phat0):
        raise PreconditionError("m_p0 must not exceed m_phat0")
    if not _below_component(phat0, p0, m):
        raise PreconditionError("(phat_0)_[0,m) is not a component of (p_0)_[0,m)")
    q = truncate_at(qhat, m)
    # Same measure set, same grid: the two kernels index alike.
    kernel = RecursionKernel(model, q, beta, p0, phat0, qhat)
    kernel_hat = RecursionKernel(model, qhat, beta, p0, phat0, q)
    below = kernel.grid < m
    above = kernel.grid > m + get_settings().numerics.merge_tolerance * max(1.0, m)
    p = _run_vectors(kernel, kernel.vector(p0), n)
    phat = _run_vectors(kernel_hat, kernel_hat.vector(phat0), n)
    worst, witness = 0.0, None
    for i, (pv, ph) in enumerate(zip(p, phat)):
        gap = max(
            float(np.max(ph[below] - pv[below], initial=0.0)),
            float(np.max(pv[above], initial=0.0)),
        )
        if gap > worst:
            worst, witness = gap, f"step {i}"
    return CheckReport.from_violation(
        "truncated_coupling", worst, witness=witness,
        details={"steps": n, "m": m, "model": model.kind},
    )


def check_monotone_from_top(
    model: FitnessModel,
    q: Measure,
    beta: float,
    n: int,
    bound: Optional[float] = None,
) -> CheckReport:
    """
    From p_0 = δ_M: (p_i)_[0,M) ≺ (p_{i+1})_[0,M), p_i({M}) nonincreasing
    and s(x, p_i) nondecreasing in i on the grid.

    Component and atom comparisons use the component slack; the advantage
    comparison uses the violation tolerance.
    """
    top = upper_support(q) if bound is None else float(bound)
    slack = get_settings().numerics.component_slack
    kernel = RecursionKernel(model, q, beta, dirac(top), bound=top)
    below = kernel.grid < top
    states = _run_vectors(kernel, kernel.vector(dirac(top)), n)
    worst_component = worst_atom = worst_adv = 0.0
    prev_adv = _grid_advantages(kernel, states[0])
    for prev, nxt in zip(states, states[1:]):
        worst_component = max(worst_component, float(np.max(prev[below] - nxt[below], initial=0.0)))
        worst_atom = max(worst_atom, kernel.top_mass(nxt) - kernel.top_mass(prev))
        adv = _grid_advantages(kernel, nxt)
        worst_adv = max(worst_adv, float(np.max(prev_adv - adv)))
        prev_adv = adv
    passed = worst_component <= slack and worst_atom <= slack and worst_adv <= _tol()
    return CheckReport(
        check="monotone_from_top",
        passed=passed,
        worst_violation=max(worst_component, worst_atom, worst_adv),
        tolerance=slack,
        details={
            "steps": n,
            "component": worst_component,
            "atom_mass": worst_atom,
            "advantage": worst_adv,
            "model": model.kind,
        },
    )


def check_fixed_point(
    model: FitnessModel,
    limit: LimitResult,
    q: Measure,
    beta: float,
) -> CheckReport:
    """TV(step(p*, q^a), p*) for p* = limit.measure"""
    p_star = limit.measure
    gap = total_variation(step(model, p_star, truncate_at(q, limit.a), beta), p_star)
    return CheckReport.from_violation(
        "fixed_point", gap,
        details={"case": limit.case_tag.value, "a": limit.a, "model": model.kind},
    )


# ============================================================================
# Atom-mass recursion
# ============================================================================

def _advantages_at_top(kernel: RecursionKernel, states: Sequence[np.ndarray]) -> np.ndarray:
    if kernel.top_index is None:
        return np.zeros(len(states))
    return np.asarray([float(_grid_advantages(kernel, vec)[kernel.top_index]) for vec in states])


def atom_mass_recursion(
    model: FitnessModel,
    p0: Measure,
    q: Measure,
    beta: float,
    n: int,
    bound: Optional[float] = None,
) -> List[float]:
    """
    p_i({M}) for i = 0..n from the product/sum form

        p_i({M}) = R1_i p_0({M}) + R2_i q({M})
        R1_i = (1-β)^i Π_{k<i} s(M, p_k)
        R2_i = β Σ_{k=0}^{i-1} (1-β)^k Π_{j=1}^{k} s(M, p_{i-j})

    with s(M, p_k) taken from the trajectory states.
    """
    _check_beta(beta)
    top = max(upper_support(p0), upper_support(q)) if bound is None else float(bound)
    kernel = RecursionKernel(model, q, beta, p0, bound=top)
    states = _run_vectors(kernel, kernel.vector(p0), max(n - 1, 0))
    factors = (1.0 - beta) * _advantages_at_top(kernel, states[:n])
    p0_top, q_top = p0.mass_at(top), q.mass_at(top)

    masses = [p0_top]
    for i in range(1, n + 1):
        r1 = float(np.prod(factors[:i]))
        # cumprod over the i most recent predecessors p_{i-1}, p_{i-2}, ...
        tail = np.cumprod(factors[i - 1::-1])[: i - 1]
        r2 = beta * (1.0 + math.fsum(tail))
        masses.append(r1 * p0_top + r2 * q_top)
    return masses


def check_recursion_oracle(
    model: FitnessModel,
    p0: Measure,
    q: Measure,
    beta: float,
    n: int,
    bound: Optional[float] = None,
) -> CheckReport:
    """atom_mass_recursion against the raw atom masses of a direct run"""
    top = max(upper_support(p0), upper_support(q)) if bound is None else float(bound)
    oracle = atom_mass_recursion(model, p0, q, beta, n, bound=top)
    kernel = RecursionKernel(model, q, beta, p0, bound=top)
    vec = kernel.vector(p0)
    direct = [kernel.top_mass(vec)]
    for _ in range(n):
        out = kernel.advance(vec)
        direct.append(out.atom_mass_at_top)
        vec = out.masses
    gaps = np.abs(np.asarray(oracle) - np.asarray(direct))
    i = int(np.argmax(gaps))
    return CheckReport.from_violation(
        "recursion_oracle", float(gaps[i]),
        witness=f"step {i}" if gaps[i] > _tol() else None,
        details={"steps": n, "model": model.kind},
    )


# ============================================================================
# Truncated limits
# ============================================================================

def assumption3_diagnostic(
    model: FitnessModel,
    q: Measure,
    beta: float,
    a_values: Sequence[float],
    bound: Optional[float] = None,
) -> CheckReport:
    """
    Lévy distance between p^{a,*} and p^{M,*} along increasing a.

    Passes iff the distances are nonincreasing within the configured slack
    and the last one is below the configured final bound.

    Raises:
        SelmutError: If a limit solver fails at some a
    """
    cfg = get_settings().verify
    top = upper_support(q) if bound is None else float(bound)
    target = limit_distribution(model, q, beta, top).measure
    distances = [
        levy_distance(limit_distribution(model, q, beta, a).measure, target)
        for a in a_values
    ]
    rises = [later - earlier for earlier, later in zip(distances, distances[1:])]
    worst_rise = max(rises, default=0.0)
    final = distances[-1] if distances else 0.0
    passed = worst_rise <= cfg.assumption3_slack and final <= cfg.assumption3_final_bound
    return CheckReport(
        check="assumption3",
        passed=passed,
        worst_violation=max(worst_rise, final),
        tolerance=cfg.assumption3_final_bound,
        details={
            "a_values": list(a_values),
            "distances": distances,
            "bound": top,
            "model": model.kind,
        },
    )


# ============================================================================
# Suites
# ============================================================================

def _merge(check: str, reports: Sequence[CheckReport], seed: int, **details: Any) -> CheckReport:
    applied = [r for r in reports if r.hypothesis_met]
    failures = [r for r in applied if not r.passed]
    worst = max(applied, key=lambda r: r.worst_violation, default=None)
    tolerance = worst.tolerance if worst is not None else _tol()
    merged = dict(details)
    merged.update(cases=len(reports), failures=len(failures), hypothesis_unmet=len(reports) - len(applied))
    report = CheckReport(
        check=check,
        passed=not failures,
        worst_violation=worst.worst_violation if worst is not None else 0.0,
        tolerance=tolerance,
        witness=(failures[0].witness if failures else None),
        seeds=[seed],
        hypothesis_met=bool(applied),
        details=merged,
    )
    status = "passed" if report.passed else "FAILED"
    logger.info(
        f"🔎 {check}: {status} ({len(reports)} cases, worst violation "
        f"{report.worst_violation:.3e})"
    )
    return report


def _pair(seed: int, k: int, n_atoms: int) -> DominatedPair:
    base = sample_measure(seed, n_atoms, top_atom=True, index=k)
    return generate_dominated_pair(seed * 1_000_003 + k, base, bound=1.0)


def assumption1_suite(model: FitnessModel, n_pairs: int, seed: int, grid_size: int) -> CheckReport:
    """check_assumption1 over n_pairs seeded pairs on [0, 1]"""
    pairs = [_pair(seed, k, 2 + k % 7) for k in range(n_pairs)]
    report = check_assumption1(model, pairs, np.linspace(0.0, 1.0, grid_size))
    report.seeds = [seed]
    logger.info(f"🔎 assumption1: {'passed' if report.passed else 'FAILED'} ({n_pairs} pairs)")
    return report


def assumption2_suite(model: FitnessModel, n_pairs: int, seed: int) -> CheckReport:
    """
    Assumption 2 over seeded pairs; a is drawn uniformly and eps is a random
    fraction of D_u(a) - D_v(a), so the hypothesis holds whenever that gap is
    positive.
    """
    reports = []
    for k in range(n_pairs):
        pair = _pair(seed, k, 2 + k % 7)
        rng = _rng(seed, k, 2)
        a = float(rng.uniform(0.0, 1.0))
        eps = float(rng.uniform(0.0, 1.0)) * (cdf(pair.u, a) - cdf(pair.v, a))
        if isinstance(model, LenskiFitness):
            reports.append(check_assumption2_lenski(model, pair, a, eps))
        else:
            reports.append(check_assumption2_kingman(pair, a, eps))
    name = "assumption2_lenski" if isinstance(model, LenskiFitness) else "assumption2_kingman"
    return _merge(name, reports, seed, model=model.kind)


def coupling_suite(model: FitnessModel, n_pairs: int, n_steps: int, seed: int, beta: float) -> List[CheckReport]:
    """
    Seeded coupled runs: dominated pairs under a shared random q, the
    δ_M-coupling, and the truncated-q coupling.
    """
    plain, top, truncated = [], [], []
    for k in range(n_pairs):
        pair = _pair(seed, k, 2 + k % 5)
        q = sample_measure(seed + 1, 1 + k % 4, top_atom=False, index=k)
        plain.append(check_coupling(model, pair.u, pair.v, q, beta, n_steps, bound=1.0))
        top.append(check_coupling(model, pair.u, dirac(1.0), q, beta, n_steps, bound=1.0))

        rng = _rng(seed, k, 3)
        m = float(rng.uniform(0.3, 0.9))
        p0 = sample_measure(seed + 2, 2 + k % 4, bound=m, top_atom=True, index=k)
        lifted = generate_dominated_pair(seed * 7 + k, p0, bound=m)
        # Push the moved mass from m into (m, 1].
        target = float(rng.uniform(m, 1.0))
        phat0 = restrict(lifted.v, Interval.half_open(0.0, m)) + dirac(target, lifted.v.mass_at(m))
        qhat = sample_measure(seed + 3, 2 + k % 4, top_atom=bool(k % 2), index=k)
        truncated.append(check_truncated_coupling(model, p0, phat0, qhat, beta, n_steps))
    return [
        _merge("coupling", plain, seed, model=model.kind, steps=n_steps),
        _merge("coupling_from_top", top, seed, model=model.kind, steps=n_steps),
        _merge("truncated_coupling", truncated, seed, model=model.kind, steps=n_steps),
    ]


def recursion_suite(model: FitnessModel, n_scenarios: int, n_steps: int, seed: int) -> CheckReport:
    """Atom-mass oracle over seeded (p0, q, β) with p0 or q charging M"""
    reports = []
    for k in range(n_scenarios):
        rng = _rng(seed, k, 4)
        beta = float(rng.uniform(0.05, 0.95))
        p0 = sample_measure(seed, 1 + k % 5, top_atom=True, index=k)
        q = sample_measure(seed + 1, 1 + k % 4, top_atom=bool(k % 2), index=k)
        reports.append(check_recursion_oracle(model, p0, q, beta, n_steps, bound=1.0))
    return _merge("recursion_oracle", reports, seed, model=model.kind, steps=n_steps)


def fixed_point_suite(model: FitnessModel, n_cases: int, seed: int) -> CheckReport:
    """check_fixed_point for seeded (q, β); a = 1 and a drawn in (0.5, 1)"""
    reports = []
    for k in range(n_cases):
        rng = _rng(seed, k, 5)
        beta = float(rng.uniform(0.05, 0.95))
        q = sample_measure(seed + 4, 1 + k % 6, top_atom=False, index=k)
        a = 1.0 if k % 2 == 0 else float(rng.uniform(0.5, 1.0))
        limit = limit_distribution(model, q, beta, a)
        reports.append(check_fixed_point(model, limit, q, beta))
    cases = {tag: sum(1 for r in reports if r.details["case"] == tag) for tag in ("case1", "case2")}
    return _merge("fixed_point", reports, seed, model=model.kind, **cases)


_ASSUMPTION_NUMBERS = {"assumption1": 1, "assumption2": 2, "assumption3": 3}


def run_verification(
    model: FitnessModel,
    beta: float,
    seed: int = 0,
    n_pairs: Optional[int] = None,
    n_coupling_pairs: Optional[int] = None,
    coupling_steps: Optional[int] = None,
    n_recursion_scenarios: Optional[int] = None,
    recursion_steps: Optional[int] = None,
    grid_size: Optional[int] = None,
    q: Optional[Measure] = None,
    a_values: Optional[Sequence[float]] = None,
    bound: float = 1.0,
) -> List[CheckReport]:
    """
    Run every suite for one model.

    Suite sizes default to the verify settings. The Assumption 3 diagnostic
    runs only when q and a_values are given, against p^{M,*} at M = bound;
    solver failures there become a failed report instead of aborting the run.
    """
    cfg = get_settings().verify
    _check_beta(beta)
    reports = [
        assumption1_suite(model, n_pairs or cfg.n_pairs, seed, grid_size or cfg.grid_size),
        assumption2_suite(model, n_pairs or cfg.n_pairs, seed),
    ]
    reports += coupling_suite(
        model,
        n_coupling_pairs or cfg.n_coupling_pairs,
        coupling_steps or cfg.coupling_steps,
        seed,
        beta,
    )
    reports.append(recursion_suite(
        model,
        n_recursion_scenarios or cfg.n_recursion_scenarios,
        recursion_steps or cfg.recursion_steps,
        seed,
    ))
    reports.append(fixed_point_suite(model, cfg.n_fixed_point_cases, seed))
    if q is not None and a_values:
        try:
            reports.append(assumption3_diagnostic(model, q, beta, a_values, bound=bound))
        except SelmutError as e:
            logger.error(f"❌ assumption3 diagnostic failed: {e}")
            reports.append(CheckReport(
                check="assumption3", passed=False, worst_violation=math.inf,
                tolerance=cfg.assumption3_final_bound, witness=str(e),
            ))
    for report in reports:
        number = _ASSUMPTION_NUMBERS.get(report.check.split("_")[0])
        if number in model.declared_assumptions and not report.passed:
            logger.warning(f"⚠️  {model!r} declares assumption {number} but {report.check} failed")
    return reports
