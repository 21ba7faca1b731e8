"""
Fitness Models
Fitness w(x, u), the Lenski cycle time and the selective advantage s(x, u)

A fitness model maps a type x and the current type distribution u to an
offspring size. Distribution-level quantities (the Lenski cycle time) are
solved once per distribution in FitnessModel.context() and reused for every
atom of a step.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional, Tuple

import numpy as np

from .core.config import get_settings
from .core.errors import DegeneratePopulationError, ExpOverflowError, RootFindingError
from .measure import Measure
from .utils.logging_config import SelmutLogger

logger = SelmutLogger.get_logger(__name__)


@dataclass(frozen=True)
class FitnessContext:
    """Distribution-level inputs of w(., u)"""
    cycle_time: Optional[float] = None


@dataclass(frozen=True)
class SelectionState:
    """Fitness of one distribution: mean fitness plus what w(., u) needs"""
    model: "FitnessModel"
    context: FitnessContext
    mean_fitness: float

    @property
    def degenerate(self) -> bool:
        return self.mean_fitness <= get_settings().numerics.degenerate_mean

    def advantage(self, x) -> np.ndarray:
        """s(x, u) = w(x, u) / ∫ w(y, u) u(dy)"""
        if self.degenerate:
            raise DegeneratePopulationError(
                "Mean fitness is zero; take the degenerate branch"
            )
        return self.model.weights(np.asarray(x, dtype=float), self.context) / self.mean_fitness


class FitnessModel(ABC):
    """
    Base class for fitness functions w(x, u).

    Subclasses implement context() and weights(). Only KingmanFitness and
    LenskiFitness are wired to scenario files; other models are for
    programmatic use.
    """

    kind: str = "custom"
    declared_assumptions: FrozenSet[int] = frozenset()

    @abstractmethod
    def context(
        self,
        locations: np.ndarray,
        masses: np.ndarray,
        hint: Optional[FitnessContext] = None,
    ) -> FitnessContext:
        """Solve distribution-level quantities for u given by its atoms; `hint` is a nearby solution"""

    @abstractmethod
    def weights(self, x: np.ndarray, context: FitnessContext) -> np.ndarray:
        """w(x, u) for an array of types"""

    def evaluate_arrays(
        self,
        locations: np.ndarray,
        masses: np.ndarray,
        hint: Optional[FitnessContext] = None,
    ) -> SelectionState:
        ctx = self.context(locations, masses, hint)
        w = self.weights(locations, ctx)
        return SelectionState(self, ctx, math.fsum(w * masses))

    def evaluate(self, u: Measure) -> SelectionState:
        return self.evaluate_arrays(u.locations, u.masses)

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class KingmanFitness(FitnessModel):
    """w(x, u) = x"""

    kind = "kingman"
    declared_assumptions = frozenset({1, 2, 3})

    def context(
        self,
        locations: np.ndarray,
        masses: np.ndarray,
        hint: Optional[FitnessContext] = None,
    ) -> FitnessContext:
        return FitnessContext()

    def weights(self, x: np.ndarray, context: FitnessContext) -> np.ndarray:
        return np.asarray(x, dtype=float)

    def __repr__(self) -> str:
        return "KingmanFitness()"


class LenskiFitness(FitnessModel):
    """w(x, u) = exp(t_u x), where t_u solves ∫ e^{t_u x} u(dx) = gamma"""

    kind = "lenski"
    declared_assumptions = frozenset({1, 2, 3})

    def __init__(self, gamma: float):
        if not gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {gamma!r}")
        self.gamma = float(gamma)

    def context(
        self,
        locations: np.ndarray,
        masses: np.ndarray,
        hint: Optional[FitnessContext] = None,
    ) -> FitnessContext:
        initial = hint.cycle_time if hint is not None else None
        return FitnessContext(cycle_time=solve_cycle_time(locations, masses, self.gamma, initial))

    def weights(self, x: np.ndarray, context: FitnessContext) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = context.cycle_time
        if x.size and t * float(x.max()) > get_settings().numerics.exp_overflow:
            raise ExpOverflowError(f"exp({t!r} * {float(x.max())!r}) overflows")
        return np.exp(t * x)

    def to_spec(self) -> Dict[str, Any]:
        return {"kind": self.kind, "gamma": self.gamma}

    def __repr__(self) -> str:
        return f"LenskiFitness(gamma={self.gamma!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LenskiFitness) and other.gamma == self.gamma

    def __hash__(self) -> int:
        return hash((self.kind, self.gamma))


def model_from_spec(spec: Dict[str, Any]) -> FitnessModel:
    """
    Build a model from its scenario descriptor.

    Example:
        >>> model_from_spec({"kind": "lenski", "gamma": 100.0})
        LenskiFitness(gamma=100.0)
    """
    kind = spec.get("kind")
    if kind == "kingman":
        return KingmanFitness()
    if kind == "lenski":
        return LenskiFitness(spec["gamma"])
    raise ValueError(f"Unknown fitness model kind: {kind!r}")


# ============================================================================
# Cycle time
# ============================================================================

def solve_cycle_time(
    locations: np.ndarray,
    masses: np.ndarray,
    gamma: float,
    initial: Optional[float] = None,
) -> float:
    """
    Array form of lenski_time().

    With m the top location, T the total mass and u_top the mass at m,
    ln(gamma/T)/m <= t <= ln(gamma/u_top)/m. Inside that bracket the
    log-moment log ∫ e^{t x} u(dx) is convex and increasing, so Newton
    steps from a point right of the root stay right of it; steps leaving
    the bracket fall back to bisection. `initial` warm-starts the search,
    typically with the previous generation's cycle time.

    Raises:
        DegeneratePopulationError: If no positive type carries mass
        ExpOverflowError: If the cycle time is beyond the float range
        RootFindingError: If the iteration cap or residual bound is hit
    """
    xs = np.asarray(locations, dtype=float)
    ms = np.asarray(masses, dtype=float)
    charged = ms > 0
    xs, ms = xs[charged], ms[charged]
    if xs.size == 0 or float(xs.max()) <= 0.0:
        raise DegeneratePopulationError(
            "degenerate population: all mass at 0, exp moment is constant"
        )
    num = get_settings().numerics
    log_gamma = math.log(gamma)
    top = float(xs.max())
    shifted = xs - top

    lo = (log_gamma - math.log(math.fsum(ms))) / top
    hi = (log_gamma - math.log(math.fsum(ms[xs == top]))) / top
    if not math.isfinite(hi):
        raise ExpOverflowError(f"Cycle time for top type {top!r} exceeds the float range")
    if hi <= lo:
        return hi

    def excess(t: float) -> Tuple[float, float]:
        # log-moment minus log gamma, and its derivative (the tilted mean)
        e = ms * np.exp(t * shifted)
        total = float(e.sum())
        return t * top + math.log(total) - log_gamma, float(e @ xs) / total

    t = initial if initial is not None and lo < initial < hi else hi
    for _ in range(num.root_max_iterations):
        f, slope = excess(t)
        if f == 0.0:
            break
        if f > 0:
            hi = t
        else:
            lo = t
        nxt = t - f / slope
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        converged = abs(nxt - t) <= num.cycle_time_rtol * abs(nxt)
        t = nxt
        if converged:
            break
    else:
        raise RootFindingError(
            f"Cycle time not converged in {num.root_max_iterations} iterations"
        )

    residual = abs(excess(t)[0])
    if residual > num.cycle_time_residual:
        raise RootFindingError(
            f"Cycle time residual {residual:.3e} exceeds {num.cycle_time_residual:.1e}"
        )
    return t


def lenski_time(u: Measure, gamma: float) -> float:
    """
    Cycle time t_u: the growth duration after which ∫ e^{t x} u(dx) = gamma.

    Raises:
        DegeneratePopulationError: If u puts no mass on positive types

    Example:
        >>> round(lenski_time(dirac(0.5), 100.0), 6)
        9.21034
    """
    return solve_cycle_time(u.locations, u.masses, gamma)


def fitness_weight(model: FitnessModel, x: float, u: Measure) -> float:
    """w(x, u)"""
    ctx = model.context(u.locations, u.masses)
    return float(model.weights(np.asarray([x], dtype=float), ctx)[0])


def mean_fitness(model: FitnessModel, u: Measure) -> float:
    """∫ w(x, u) u(dx); 0 signals the degenerate branch of the recursion"""
    return model.evaluate(u).mean_fitness


def selective_advantage(model: FitnessModel, x: float, u: Measure) -> float:
    """
    s(x, u) = w(x, u) / ∫ w(y, u) u(dy)

    Raises:
        DegeneratePopulationError: If the mean fitness is zero
    """
    return float(model.evaluate(u).advantage(np.asarray([x]))[0])
