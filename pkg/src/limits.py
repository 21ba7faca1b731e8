"""
Limit Distributions
Closed-form limits p^{a,*} of the Kingman and Lenski recursions

For a truncation point 0 < a <= M the limit of the run started at δ_a with
mutant distribution q^a = truncate_at(q, a) is explicit. A criterion
integral decides between an absolutely continuous limit (Case 1, given by
the root s_a of a monotone equation) and a condensed limit (Case 2, with an
atom at a). Integrals are finite sums over the atoms of q^a.

Kingman:  criterion ∫ β q^a(dx) / (1 - x/a)
          Case 1 p(dx) = β s_a q^a(dx) / (s_a - (1 - β) x)
Lenski:   criterion ∫ β q^a(dx) / (1 - c^{1 - x/a}),   c = (1 - β)/γ
          Case 1 p(dx) = β q^a(dx) / (1 - c e^{s_a x})

In the Lenski case c e^{s* x} = c^{1 - x/a} at s* = ln(γ/(1 - β))/a, so the
Case 1 equation evaluated at s* is the criterion; with a = M the root is the
a = M instance of the same equation.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .core.config import get_settings
from .core.errors import CaseMismatchError, MeasureError
from .core.solvers import RootResult, expand_bracket, find_root
from .dynamics import Trajectory, _check_beta
from .fitness import FitnessModel, KingmanFitness, LenskiFitness
from .measure import Measure, dirac, measure_from_arrays, truncate_at, upper_support
from .utils.logging_config import SelmutLogger

logger = SelmutLogger.get_logger(__name__)


class CaseTag(str, Enum):
    """Which branch of the limit formula applies"""
    CASE1 = "case1"
    CASE2 = "case2"


class ConvergenceMode(str, Enum):
    STRONG = "strong"
    WEAK = "weak"


@dataclass(frozen=True)
class LimitResult:
    """Closed-form limit: a part absolutely continuous w.r.t. q^a plus an atom at a"""
    ac_part: Measure
    atom_at_a: float
    case_tag: CaseTag
    root: Optional[float]
    criterion_value: float
    a: float
    model_kind: str
    residual: Optional[float] = None
    iterations: int = 0

    @property
    def measure(self) -> Measure:
        """ac_part + atom_at_a δ_a"""
        if self.atom_at_a > 0:
            return self.ac_part + dirac(self.a, self.atom_at_a)
        return self.ac_part


@dataclass(frozen=True)
class CondensationReport:
    """Limit atom at M against the atom masses a trajectory actually carried"""
    limit_atom: float
    terminal_atom_mass: float
    max_trajectory_atom_mass: float
    bound: float
    condensation: bool


@dataclass(frozen=True)
class ConvergenceExpectation:
    """What the convergence theory promises for a run"""
    mode: ConvergenceMode
    reason: str


def _check_point(a: float) -> None:
    if not a > 0:
        raise MeasureError(f"Truncation point must be positive, got {a!r}")


def _split_case2(ac_masses: np.ndarray) -> float:
    atom = 1.0 - math.fsum(ac_masses)
    # Criterion <= 1 makes the atom nonnegative; clip rounding noise only.
    return max(atom, 0.0) if atom > -1e-12 else atom


# ============================================================================
# Kingman
# ============================================================================

def kingman_criterion(q: Measure, beta: float, a: float) -> float:
    """
    ∫ β q^a(dx) / (1 - x/a); +inf when q^a charges a.

    Example:
        >>> kingman_criterion(make_measure([(0.2, 0.5), (0.4, 0.5)]), 0.8, 1.0)
        1.1666666666666667
    """
    _check_point(a)
    _check_beta(beta)
    qa = truncate_at(q, a)
    if qa.mass_at(a) > 0:
        return math.inf
    return math.fsum(beta * qa.masses / (1.0 - qa.locations / a))


def _kingman_equation(qa: Measure, beta: float) -> Callable[[float], float]:
    guard = get_settings().numerics.denominator_guard
    xs, ms = qa.locations, qa.masses

    def excess(s: float) -> float:
        denom = s - (1.0 - beta) * xs
        if np.any(denom <= guard):
            return math.inf
        return math.fsum(beta * s * ms / denom) - 1.0

    return excess


def kingman_equation_residual(q: Measure, beta: float, a: float, s: float) -> float:
    """|∫ β s q^a(dx) / (s - (1 - β) x) - 1|"""
    return abs(_kingman_equation(truncate_at(q, a), beta)(s))


def _solve_kingman(q: Measure, beta: float, a: float) -> RootResult:
    criterion = kingman_criterion(q, beta, a)
    if criterion <= 1:
        raise CaseMismatchError(
            f"Kingman criterion {criterion!r} <= 1: Case 2, no root s_a"
        )
    num = get_settings().numerics
    excess = _kingman_equation(truncate_at(q, a), beta)
    # At s = (1 - β) a the equation reproduces the criterion, so excess > 0 there.
    lo = (1.0 - beta) * a
    hi = expand_bracket(excess, lo, max(lo, 1.0), want_positive=False)
    result = find_root(
        excess, lo, hi,
        residual_tol=num.root_residual,
        max_iterations=num.root_max_iterations,
    )
    logger.debug(
        f"Kingman s_a={result.root!r} (a={a!r}, residual {result.residual:.2e}, "
        f"{result.iterations} iterations)"
    )
    return result


def solve_kingman_s(q: Measure, beta: float, a: float) -> float:
    """
    Root s_a of 1 = ∫ β s q^a(dx) / (s - (1 - β) x).

    Raises:
        CaseMismatchError: If the criterion is <= 1
    """
    return _solve_kingman(q, beta, a).root


def kingman_limit(q: Measure, beta: float, a: float) -> LimitResult:
    """
    Limit of the Kingman recursion started at δ_a with mutants q^a.

    Case 1 (criterion > 1): β s_a q^a(dx) / (s_a - (1 - β) x).
    Case 2: β q^a(dx) / (1 - x/a) plus the remaining mass at a.
    """
    criterion = kingman_criterion(q, beta, a)
    qa = truncate_at(q, a)
    if criterion > 1:
        result = _solve_kingman(q, beta, a)
        s = result.root
        ac = beta * s * qa.masses / (s - (1.0 - beta) * qa.locations)
        return LimitResult(
            ac_part=measure_from_arrays(qa.locations, ac),
            atom_at_a=0.0,
            case_tag=CaseTag.CASE1,
            root=s,
            criterion_value=criterion,
            a=a,
            model_kind=KingmanFitness.kind,
            residual=result.residual,
            iterations=result.iterations,
        )
    ac = beta * qa.masses / (1.0 - qa.locations / a)
    return LimitResult(
        ac_part=measure_from_arrays(qa.locations, ac),
        atom_at_a=_split_case2(ac),
        case_tag=CaseTag.CASE2,
        root=(1.0 - beta) * a,
        criterion_value=criterion,
        a=a,
        model_kind=KingmanFitness.kind,
    )


# ============================================================================
# Lenski
# ============================================================================

def _check_gamma(gamma: float) -> None:
    if not gamma > 1:
        raise MeasureError(f"gamma must exceed 1, got {gamma!r}")


def lenski_criterion(q: Measure, beta: float, gamma: float, a: float) -> float:
    """∫ β q^a(dx) / (1 - ((1 - β)/γ)^{1 - x/a}); +inf when q^a charges a"""
    _check_point(a)
    _check_beta(beta)
    _check_gamma(gamma)
    qa = truncate_at(q, a)
    if qa.mass_at(a) > 0:
        return math.inf
    c = (1.0 - beta) / gamma
    return math.fsum(beta * qa.masses / (1.0 - np.power(c, 1.0 - qa.locations / a)))


def _lenski_equation(qa: Measure, beta: float, gamma: float) -> Callable[[float], float]:
    guard = get_settings().numerics.denominator_guard
    log_c = math.log((1.0 - beta) / gamma)
    xs, ms = qa.locations, qa.masses

    def excess(s: float) -> float:
        denom = 1.0 - np.exp(log_c + s * xs)
        if np.any(denom <= guard):
            return math.inf
        return math.fsum(beta * ms / denom) - 1.0

    return excess


def lenski_equation_residual(q: Measure, beta: float, gamma: float, a: float, s: float) -> float:
    """|∫ β q^a(dx) / (1 - (1 - β)/γ e^{s x}) - 1|"""
    return abs(_lenski_equation(truncate_at(q, a), beta, gamma)(s))


def lenski_boundary(beta: float, gamma: float, a: float) -> float:
    """s* = ln(γ / (1 - β)) / a, where the Case 1 equation becomes the criterion"""
    return math.log(gamma / (1.0 - beta)) / a


def _solve_lenski(q: Measure, beta: float, gamma: float, a: float) -> RootResult:
    criterion = lenski_criterion(q, beta, gamma, a)
    if criterion <= 1:
        raise CaseMismatchError(
            f"Lenski criterion {criterion!r} <= 1: Case 2, no root s_a"
        )
    qa = truncate_at(q, a)
    if upper_support(qa) == 0.0:
        # Only reachable through a corrupted criterion: for q = δ_0 it is βγ/(γ-1+β) < 1.
        raise CaseMismatchError("q^a = δ_0: the Case 1 equation does not depend on s")
    num = get_settings().numerics
    excess = _lenski_equation(qa, beta, gamma)
    hi = lenski_boundary(beta, gamma, a)
    lo = expand_bracket(excess, hi, -1.0, want_positive=False)
    result = find_root(
        excess, lo, hi,
        residual_tol=num.root_residual,
        max_iterations=num.root_max_iterations,
    )
    logger.debug(
        f"Lenski s_a={result.root!r} (a={a!r}, residual {result.residual:.2e}, "
        f"{result.iterations} iterations)"
    )
    return result


def solve_lenski_s(q: Measure, beta: float, gamma: float, a: float) -> float:
    """
    Root s_a of 1 = ∫ β q^a(dx) / (1 - (1 - β)/γ e^{s x}), searched below s*.

    Raises:
        CaseMismatchError: If the criterion is <= 1
    """
    return _solve_lenski(q, beta, gamma, a).root


def lenski_limit(q: Measure, beta: float, gamma: float, a: float) -> LimitResult:
    """
    Limit of the Lenski recursion started at δ_a with mutants q^a.

    Case 1: β q^a(dx) / (1 - (1 - β)/γ e^{s_a x}).
    Case 2: β q^a(dx) / (1 - ((1 - β)/γ)^{1 - x/a}) plus the remaining mass at a.
    """
    criterion = lenski_criterion(q, beta, gamma, a)
    qa = truncate_at(q, a)
    c = (1.0 - beta) / gamma
    if criterion > 1:
        result = _solve_lenski(q, beta, gamma, a)
        s = result.root
        ac = beta * qa.masses / (1.0 - np.exp(math.log(c) + s * qa.locations))
        return LimitResult(
            ac_part=measure_from_arrays(qa.locations, ac),
            atom_at_a=0.0,
            case_tag=CaseTag.CASE1,
            root=s,
            criterion_value=criterion,
            a=a,
            model_kind=LenskiFitness.kind,
            residual=result.residual,
            iterations=result.iterations,
        )
    ac = beta * qa.masses / (1.0 - np.power(c, 1.0 - qa.locations / a))
    return LimitResult(
        ac_part=measure_from_arrays(qa.locations, ac),
        atom_at_a=_split_case2(ac),
        case_tag=CaseTag.CASE2,
        root=lenski_boundary(beta, gamma, a),
        criterion_value=criterion,
        a=a,
        model_kind=LenskiFitness.kind,
    )


def limit_distribution(model: FitnessModel, q: Measure, beta: float, a: float) -> LimitResult:
    """
    Closed-form limit for the model at truncation point a.

    Raises:
        ValueError: For models without a closed form
    """
    if isinstance(model, KingmanFitness):
        return kingman_limit(q, beta, a)
    if isinstance(model, LenskiFitness):
        return lenski_limit(q, beta, model.gamma, a)
    raise ValueError(
        f"No closed-form limit for {model!r}; iterate from δ_M to estimate it"
    )


# ============================================================================
# Reports
# ============================================================================

def condensation_report(limit: LimitResult, trajectory: Trajectory) -> CondensationReport:
    """
    Flag condensation: the limit has an atom at M although no state of the
    trajectory carried mass there.
    """
    if not math.isclose(limit.a, trajectory.bound, rel_tol=1e-12, abs_tol=1e-12):
        logger.warning(
            f"Limit truncation point {limit.a!r} differs from trajectory bound "
            f"{trajectory.bound!r}"
        )
    series = trajectory.atom_mass_series
    never_charged = bool(np.all(series == 0.0))
    return CondensationReport(
        limit_atom=limit.atom_at_a,
        terminal_atom_mass=float(series[-1]),
        max_trajectory_atom_mass=float(series.max()),
        bound=trajectory.bound,
        condensation=never_charged and limit.atom_at_a > 0,
    )


def expected_convergence(
    p0: Measure,
    q: Measure,
    limit: LimitResult,
    bound: float,
) -> ConvergenceExpectation:
    """
    Mode of convergence of the run from p0 toward the limit at a = bound.

    Strong when p0 = δ_M, when q charges M, or when the limit has no atom
    at M; otherwise weak, with strong convergence on every [0, a], a < M.
    """
    if len(p0) == 1 and p0.mass_at(bound) > 0:
        return ConvergenceExpectation(ConvergenceMode.STRONG, "initial distribution is δ_M")
    if q.mass_at(bound) > 0:
        return ConvergenceExpectation(ConvergenceMode.STRONG, "mutant distribution charges M")
    if limit.atom_at_a == 0:
        return ConvergenceExpectation(ConvergenceMode.STRONG, "limit has no atom at M")
    if p0.mass_at(bound) > 0:
        return ConvergenceExpectation(
            ConvergenceMode.WEAK, "p0 charges M, q does not: strong on [0,a] for a < M"
        )
    return ConvergenceExpectation(
        ConvergenceMode.WEAK, "neither p0 nor q charges M: strong on [0,a] for a < M"
    )
