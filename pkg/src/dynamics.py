"""
Selection-Mutation Dynamics
The recursion p_i = (1 - beta) s(., p_{i-1}) p_{i-1} + beta q, its degenerate
branch, Convention (*) and trajectory execution with stopping rules

The support of every p_i stays inside supp(p_0) ∪ supp(q), so trajectories
run on that fixed grid as plain mass vectors (RecursionKernel) and only turn
into Measure objects when a state is handed out.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .core.config import get_settings
from .core.errors import DegeneratePopulationError, PreconditionError
from .fitness import FitnessContext, FitnessModel
from .measure import Measure, aligned_masses, measure_from_arrays, upper_support
from .utils.logging_config import SelmutLogger

logger = SelmutLogger.get_logger(__name__)


class StopReason(str, Enum):
    """Why a trajectory run ended"""
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"


class StoppingRule(BaseModel):
    """Stop after max_iterations steps or once TV(p_i, p_{i+1}) < tv_tolerance"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_iterations: int = Field(
        default_factory=lambda: get_settings().stopping.max_iterations,
        ge=1,
        description="Maximum number of steps"
    )
    tv_tolerance: float = Field(
        default_factory=lambda: get_settings().stopping.tv_tolerance,
        gt=0,
        description="Total-variation threshold between consecutive states"
    )


@dataclass(frozen=True)
class StepDiagnostics:
    """Raw (pre-renormalization) observables of one recursion step"""
    iteration: int
    tv_delta: float
    mean_fitness: float
    atom_mass_at_M: float
    cycle_time: Optional[float] = None


@dataclass(frozen=True)
class KernelStep:
    """One application of the recursion on the kernel grid"""
    masses: np.ndarray
    raw_total: float
    tv_delta: float
    mean_fitness: float
    cycle_time: Optional[float]
    degenerate: bool
    atom_mass_at_top: float


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise PreconditionError(f"beta must lie in (0,1), got {beta!r}")


class RecursionKernel:
    """
    The recursion on a fixed grid containing supp(q) and the given supports.

    Vectors handed to advance() are mass vectors aligned with `grid`.
    """

    def __init__(
        self,
        model: FitnessModel,
        q: Measure,
        beta: float,
        *supports: Measure,
        bound: Optional[float] = None,
    ):
        _check_beta(beta)
        self.model = model
        self.beta = float(beta)
        self.grid, vectors = aligned_masses(q, *supports)
        self.q = vectors[0]
        self.bound = float(self.grid[-1]) if bound is None else float(bound)
        tol = get_settings().numerics.merge_tolerance * max(1.0, self.bound)
        hits = np.flatnonzero(np.abs(self.grid - self.bound) <= tol)
        self.top_index: Optional[int] = int(hits[0]) if hits.size else None
        # last solved distribution-level context, warm start for the next step
        self.last_context: Optional[FitnessContext] = None

    def vector(self, u: Measure) -> np.ndarray:
        """Masses of u on the kernel grid"""
        grid, (_, vec) = aligned_masses(Measure(self.grid, np.ones(self.grid.size)), u)
        if grid.size != self.grid.size:
            raise PreconditionError("Measure support is not contained in the kernel grid")
        return vec

    def measure(self, vec: np.ndarray) -> Measure:
        return measure_from_arrays(self.grid, np.clip(vec, 0.0, None))

    def top_mass(self, vec: np.ndarray) -> float:
        return float(vec[self.top_index]) if self.top_index is not None else 0.0

    def advantages(self, vec: np.ndarray) -> Tuple[np.ndarray, float, Optional[float], bool]:
        """
        s(., p) on the grid for p given by vec.

        Returns:
            (advantages, mean fitness, cycle time, degenerate flag); in the
            degenerate case the advantages are all 1
        """
        pos = vec > 0
        adv = np.zeros(self.grid.size)
        try:
            state = self.model.evaluate_arrays(self.grid[pos], vec[pos], self.last_context)
        except DegeneratePopulationError:
            adv[:] = 1.0
            return adv, 0.0, None, True
        self.last_context = state.context
        if state.degenerate:
            adv[:] = 1.0
            return adv, state.mean_fitness, state.context.cycle_time, True
        adv[pos] = state.advantage(self.grid[pos])
        return adv, state.mean_fitness, state.context.cycle_time, False

    def advance(self, vec: np.ndarray) -> KernelStep:
        adv, mean_fit, cycle, degenerate = self.advantages(vec)
        if degenerate:
            logger.debug("Zero mean fitness: degenerate branch (1-β)p + βq")
        raw = (1.0 - self.beta) * adv * vec + self.beta * self.q
        total = math.fsum(raw)
        return KernelStep(
            masses=raw / total,
            raw_total=total,
            tv_delta=0.5 * math.fsum(np.abs(raw - vec)),
            mean_fitness=mean_fit,
            cycle_time=cycle,
            degenerate=degenerate,
            atom_mass_at_top=self.top_mass(raw),
        )


@dataclass
class Trajectory:
    """
    A run p_0, p_1, ..., p_n with per-step diagnostics.

    Unless the history was requested, `states` holds p_0 and the last two
    states only; diagnostics cover every step.
    """
    model: FitnessModel
    q: Measure
    beta: float
    bound: float
    states: List[Measure]
    diagnostics: List[StepDiagnostics] = field(default_factory=list)
    stop_reason: StopReason = StopReason.MAX_ITERATIONS
    history_kept: bool = False

    @property
    def initial(self) -> Measure:
        return self.states[0]

    @property
    def final(self) -> Measure:
        return self.states[-1]

    @property
    def iterations(self) -> int:
        return len(self.diagnostics)

    @property
    def converged(self) -> bool:
        return self.stop_reason == StopReason.CONVERGED

    @property
    def atom_mass_series(self) -> np.ndarray:
        """p_i({M}) for i = 0..n (raw values for i >= 1)"""
        first = self.initial.mass_at(self.bound)
        return np.array([first] + [d.atom_mass_at_M for d in self.diagnostics])


def step(model: FitnessModel, p: Measure, q: Measure, beta: float) -> Measure:
    """
    One generation: (1 - beta) s(x, p) p(dx) + beta q(dx).

    If the mean fitness of p is zero the result is (1 - beta) p + beta q.
    The output is renormalized to total mass 1.

    Raises:
        PreconditionError: If beta is outside (0, 1)
    """
    kernel = RecursionKernel(model, q, beta, p)
    return kernel.measure(kernel.advance(kernel.vector(p)).masses)


def apply_convention_star(
    p0: Measure,
    q: Measure,
    model: FitnessModel,
    beta: float,
) -> Tuple[Measure, Measure, float]:
    """
    Enforce m_q <= m_{p0} by replacing p0 with p1 when it fails.

    Returns:
        (p0', q, M) with M = m_{p0'}
    """
    _check_beta(beta)
    if upper_support(q) > upper_support(p0):
        logger.info(
            f"Convention (*): m_q={upper_support(q)!r} > m_p0={upper_support(p0)!r}, "
            f"taking p_1 as p_0"
        )
        p0 = step(model, p0, q, beta)
    return p0, q, upper_support(p0)


def iterate(
    model: FitnessModel,
    p0: Measure,
    q: Measure,
    beta: float,
    stop: Optional[StoppingRule] = None,
    bound: Optional[float] = None,
    keep_history: bool = False,
) -> Trajectory:
    """
    Run the recursion from p0 until the stopping rule fires.

    Args:
        model: Fitness model
        p0: Initial distribution (Convention (*) already applied)
        q: Mutant distribution
        beta: Mutation probability in (0, 1)
        stop: Stopping rule (defaults from settings)
        bound: Ambient bound M >= m_{p0}; defaults to m_{p0}
        keep_history: Retain every state instead of the last two

    Returns:
        Trajectory with states[0] = p0

    Raises:
        PreconditionError: If m_q or m_{p0} exceed the bound
    """
    stop = stop or StoppingRule()
    top = upper_support(p0) if bound is None else float(bound)
    if max(upper_support(p0), upper_support(q)) > top:
        raise PreconditionError(
            f"Supports exceed the bound M={top!r}; apply Convention (*) first"
        )

    kernel = RecursionKernel(model, q, beta, p0, bound=top)
    vec = kernel.vector(p0)
    prev = vec
    states = [p0]
    diagnostics: List[StepDiagnostics] = []
    reason = StopReason.MAX_ITERATIONS

    for i in range(1, stop.max_iterations + 1):
        out = kernel.advance(vec)
        diagnostics.append(StepDiagnostics(
            iteration=i,
            tv_delta=out.tv_delta,
            mean_fitness=out.mean_fitness,
            atom_mass_at_M=out.atom_mass_at_top,
            cycle_time=out.cycle_time,
        ))
        prev, vec = vec, out.masses
        if keep_history:
            states.append(kernel.measure(vec))
        if out.tv_delta < stop.tv_tolerance:
            reason = StopReason.CONVERGED
            break

    if not keep_history:
        if len(diagnostics) >= 2:
            states.append(kernel.measure(prev))
        states.append(kernel.measure(vec))

    logger.info(
        f"Trajectory stopped ({reason.value}) after {len(diagnostics)} steps, "
        f"last TV delta {diagnostics[-1].tv_delta:.3e}"
    )
    return Trajectory(
        model=model,
        q=q,
        beta=beta,
        bound=top,
        states=states,
        diagnostics=diagnostics,
        stop_reason=reason,
        history_kept=keep_history,
    )
