"""
Bracketed root finding

Used by the closed-form limit solvers.
Every search starts from a bracket with a verified sign change; endpoints
where the function is singular (+/-inf or nan) are pulled toward the
regular end before refinement.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import RootFindingError
from ..utils.logging_config import SelmutLogger

logger = SelmutLogger.get_logger(__name__)

_TINY_XTOL = 1e-300
_MIN_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class RootResult:
    """Outcome of a bracketed root search"""
    root: float
    residual: float
    iterations: int
    bracket: Tuple[float, float]


def expand_bracket(
    func: Callable[[float], float],
    anchor: float,
    step: float,
    want_positive: bool,
    max_doublings: int = 200,
) -> float:
    """
    Walk away from `anchor` by doubling offsets until func changes to the
    wanted sign.

    Args:
        func: Monotone function of one variable
        anchor: Fixed bracket end
        step: First offset (negative to walk downward)
        want_positive: Sign sought at the far end
        max_doublings: Cap on the number of doublings

    Returns:
        The far bracket end

    Raises:
        RootFindingError: If no sign change is found
    """
    offset = step
    for _ in range(max_doublings):
        x = anchor + offset
        fx = func(x)
        if (fx > 0) == want_positive and not math.isnan(fx):
            return x
        offset *= 2.0
    raise RootFindingError(
        f"No sign change within {max_doublings} doublings from {anchor!r}"
    )


def _tighten(
    func: Callable[[float], float],
    singular: float,
    f_singular: float,
    regular: float,
    f_regular: float,
    max_steps: int,
) -> Tuple[float, float, float, float]:
    # Halve toward the regular end until a finite value with the singular
    # end's sign appears; points of the other sign replace the regular end.
    side = math.copysign(1.0, f_singular) if not math.isnan(f_singular) else -math.copysign(1.0, f_regular)
    for _ in range(max_steps):
        x = 0.5 * (singular + regular)
        fx = func(x)
        if not math.isfinite(fx):
            singular = x
            continue
        if math.copysign(1.0, fx) == side:
            return x, fx, regular, f_regular
        regular, f_regular = x, fx
    raise RootFindingError(
        f"Endpoint {singular!r} stays singular after {max_steps} steps"
    )


def find_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    residual_tol: float,
    max_iterations: int = 200,
    rtol: float = _MIN_RTOL,
) -> RootResult:
    """
    Solve func(x) = 0 on a sign-changing bracket.

    Args:
        func: Continuous function, monotone on the bracket
        lo: Lower bracket end
        hi: Upper bracket end
        residual_tol: Largest accepted |func(root)|
        max_iterations: Iteration cap for the refinement
        rtol: Relative tolerance on the root location

    Returns:
        RootResult with the root, its residual and the iteration count

    Raises:
        RootFindingError: If the bracket has no sign change or the residual
            tolerance is not met
    """
    flo, fhi = func(lo), func(hi)
    if not (math.isfinite(flo) or math.isfinite(fhi)):
        raise RootFindingError(f"Both bracket ends [{lo!r}, {hi!r}] are singular")
    if not math.isfinite(flo):
        lo, flo, hi, fhi = _tighten(func, lo, flo, hi, fhi, max_iterations)
    elif not math.isfinite(fhi):
        hi, fhi, lo, flo = _tighten(func, hi, fhi, lo, flo, max_iterations)

    if flo == 0.0:
        return RootResult(lo, 0.0, 0, (lo, hi))
    if fhi == 0.0:
        return RootResult(hi, 0.0, 0, (lo, hi))
    if (flo > 0) == (fhi > 0):
        raise RootFindingError(
            f"Bracket [{lo!r}, {hi!r}] has no sign change "
            f"(f(lo)={flo!r}, f(hi)={fhi!r})"
        )

    root, info = brentq(
        func, lo, hi,
        xtol=_TINY_XTOL,
        rtol=max(rtol, _MIN_RTOL),
        maxiter=max_iterations,
        full_output=True,
        disp=False,
    )

    # Polish against the neighbouring doubles; the residual is what counts.
    best, best_res = root, abs(func(root))
    for candidate in (np.nextafter(root, -np.inf), np.nextafter(root, np.inf)):
        res = abs(func(float(candidate)))
        if res < best_res:
            best, best_res = float(candidate), res

    logger.debug(
        f"root={best!r} residual={best_res:.3e} iterations={info.iterations}"
    )
    if best_res > residual_tol:
        raise RootFindingError(
            f"Residual {best_res:.3e} exceeds tolerance {residual_tol:.1e} "
            f"after {info.iterations} iterations"
        )
    return RootResult(best, best_res, int(info.iterations), (lo, hi))
