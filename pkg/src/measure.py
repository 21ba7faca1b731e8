"""
Atomic Measures
Exact algebra of finite nonnegative atomic measures on a bounded interval [0, M]

Every distribution the engine handles (type distributions p_i, the mutant
distribution q, limits) is a finite list of atoms. Integrals against such
measures are finite sums, so no quadrature happens anywhere in the package.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .core.config import get_settings
from .core.errors import ExpOverflowError, MeasureError


class Measure:
    """
    Immutable finite atomic measure.

    Locations are strictly increasing, masses strictly positive. Build
    instances with make_measure(); the constructor trusts its input.
    """

    def __init__(self, locations: np.ndarray, masses: np.ndarray):
        self._x = np.asarray(locations, dtype=float)
        self._m = np.asarray(masses, dtype=float)
        self._x.setflags(write=False)
        self._m.setflags(write=False)
        self._total = math.fsum(self._m)
        self._cum: Optional[np.ndarray] = None

    @property
    def locations(self) -> np.ndarray:
        return self._x

    @property
    def masses(self) -> np.ndarray:
        return self._m

    @property
    def total_mass(self) -> float:
        return self._total

    @property
    def is_empty(self) -> bool:
        return self._x.size == 0

    @property
    def cumulative(self) -> np.ndarray:
        """Distribution function evaluated at each atom"""
        if self._cum is None:
            cum = np.cumsum(self._m)
            cum.setflags(write=False)
            self._cum = cum
        return self._cum

    def atoms(self) -> List[Tuple[float, float]]:
        """Atoms as (location, mass) pairs in ascending location order"""
        return [(float(x), float(m)) for x, m in zip(self._x, self._m)]

    def mass_at(self, x: float) -> float:
        """Mass of the atom at x (0 if there is none)"""
        tol = _merge_tolerance(max(x, float(self._x[-1]) if self._x.size else 0.0))
        idx = np.flatnonzero(np.abs(self._x - x) <= tol)
        return float(self._m[idx].sum()) if idx.size else 0.0

    def is_probability(self, tol: Optional[float] = None) -> bool:
        tol = get_settings().numerics.probability_tolerance if tol is None else tol
        return abs(self._total - 1.0) <= tol

    def scaled(self, factor: float) -> "Measure":
        if factor < 0:
            raise MeasureError(f"Negative scale factor: {factor}")
        return _consolidate(self._x, self._m * factor)

    def __add__(self, other: "Measure") -> "Measure":
        return _consolidate(
            np.concatenate((self._x, other._x)),
            np.concatenate((self._m, other._m)),
        )

    def __len__(self) -> int:
        return int(self._x.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Measure):
            return NotImplemented
        return (
            np.array_equal(self._x, other._x) and np.array_equal(self._m, other._m)
        )

    def __repr__(self) -> str:
        body = " + ".join(f"{m!r}δ_{x!r}" for x, m in self.atoms())
        return f"Measure({body or '0'})"


@dataclass(frozen=True)
class Interval:
    """Interval of the type space with open or closed ends"""
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise MeasureError(f"Interval lower end {self.lo} exceeds upper end {self.hi}")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def half_open(cls, lo: float, hi: float) -> "Interval":
        """[lo, hi)"""
        return cls(lo, hi, True, False)

    @classmethod
    def left_open(cls, lo: float, hi: float) -> "Interval":
        """(lo, hi]"""
        return cls(lo, hi, False, True)

    def contains(self, x: Union[float, np.ndarray]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        above = (x >= self.lo) if self.lo_closed else (x > self.lo)
        below = (x <= self.hi) if self.hi_closed else (x < self.hi)
        return above & below


# ============================================================================
# Construction
# ============================================================================

def _merge_tolerance(scale: float) -> float:
    return get_settings().numerics.merge_tolerance * max(1.0, scale)


def _consolidate(xs: np.ndarray, ms: np.ndarray) -> Measure:
    """Sort, merge near-identical locations and drop zero masses"""
    xs = np.asarray(xs, dtype=float)
    ms = np.asarray(ms, dtype=float)
    if xs.size == 0:
        return Measure(xs, ms)
    order = np.argsort(xs, kind="stable")
    xs, ms = xs[order], ms[order]
    if xs.size > 1:
        starts = np.flatnonzero(
            np.concatenate(([True], np.diff(xs) > _merge_tolerance(float(xs[-1]))))
        )
        xs = xs[starts]
        ms = np.add.reduceat(ms, starts)
    keep = ms > 0
    return Measure(xs[keep], ms[keep])


def make_measure(
    atoms: Iterable[Tuple[float, float]],
    bound: Optional[float] = None,
) -> Measure:
    """
    Build a measure from (location, mass) pairs.

    Args:
        atoms: Pairs in any order; repeated locations are merged
        bound: Ambient bound M; locations must lie in [0, M]

    Returns:
        Sorted, merged Measure without zero-mass atoms

    Raises:
        MeasureError: On a location outside [0, M], a negative or non-finite mass

    Example:
        >>> make_measure([(0.8, 0.3), (0.1, 0.7)]).atoms()
        [(0.1, 0.7), (0.8, 0.3)]
    """
    pairs = list(atoms)
    xs = np.array([p[0] for p in pairs], dtype=float)
    ms = np.array([p[1] for p in pairs], dtype=float)
    return measure_from_arrays(xs, ms, bound)


def measure_from_arrays(
    locations: Sequence[float],
    masses: Sequence[float],
    bound: Optional[float] = None,
) -> Measure:
    """Array form of make_measure()"""
    xs = np.asarray(locations, dtype=float).ravel()
    ms = np.asarray(masses, dtype=float).ravel()
    if xs.shape != ms.shape:
        raise MeasureError("locations and masses differ in length")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ms))):
        raise MeasureError("Atoms must be finite numbers")
    if np.any(ms < 0):
        raise MeasureError(f"Negative mass: {float(ms.min())!r}")
    if np.any(xs < 0):
        raise MeasureError(f"Location below 0: {float(xs.min())!r}")
    if bound is not None and np.any(xs > bound):
        raise MeasureError(f"Location {float(xs.max())!r} outside [0, {bound!r}]")
    return _consolidate(xs, ms)


def dirac(x: float, mass: float = 1.0) -> Measure:
    """mass * δ_x"""
    return make_measure([(x, mass)])


def empty_measure() -> Measure:
    return Measure(np.empty(0), np.empty(0))


def aligned_masses(*measures: Measure) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Put several measures on their common support.

    Returns:
        (grid, vectors) where grid is the merged union of atom locations and
        vectors[k][j] is the mass measures[k] puts on grid[j]
    """
    if not measures:
        return np.empty(0), []
    union = np.concatenate([u.locations for u in measures])
    if union.size == 0:
        return union, [np.zeros(0) for _ in measures]
    union.sort()
    starts = np.flatnonzero(
        np.concatenate(([True], np.diff(union) > _merge_tolerance(float(union[-1]))))
    )
    grid = union[starts]
    vectors = []
    for u in measures:
        vec = np.zeros(grid.size)
        if u.locations.size:
            idx = np.searchsorted(grid, u.locations, side="right") - 1
            np.add.at(vec, idx, u.masses)
        vectors.append(vec)
    return grid, vectors


def _require_probability(*measures: Measure) -> None:
    tol = get_settings().numerics.probability_tolerance
    for u in measures:
        if abs(u.total_mass - 1.0) > tol:
            raise MeasureError(
                f"Expected a probability measure, total mass is {u.total_mass!r}"
            )


# ============================================================================
# Evaluation
# ============================================================================

def _cdf_at(u: Measure, points: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(u.locations, points, side="right")
    padded = np.concatenate(([0.0], u.cumulative))
    return padded[idx]


def cdf(u: Measure, x: float) -> float:
    """u([0, x]), right-continuous"""
    return float(_cdf_at(u, np.asarray([x]))[0])


def upper_support(u: Measure) -> float:
    """Largest atom location m_u"""
    if u.is_empty:
        raise MeasureError("Upper support of the empty measure is undefined")
    return float(u.locations[-1])


def restrict(u: Measure, interval: Interval) -> Measure:
    """u_A(B) = u(B ∩ A)"""
    keep = interval.contains(u.locations)
    return Measure(u.locations[keep], u.masses[keep])


def is_component(
    u: Measure,
    v: Measure,
    interval: Interval,
    slack: Optional[float] = None,
) -> bool:
    """True iff v_A - u_A is a nonnegative measure (u_A ≺ v_A)"""
    slack = get_settings().numerics.component_slack if slack is None else slack
    grid, (mu, mv) = aligned_masses(u, v)
    inside = interval.contains(grid)
    return bool(np.all(mu[inside] <= mv[inside] + slack))


def stoch_dominated(u: Measure, v: Measure, slack: Optional[float] = None) -> bool:
    """True iff D_u(x) >= D_v(x) everywhere (u ≤ v)"""
    _require_probability(u, v)
    slack = get_settings().numerics.component_slack if slack is None else slack
    _, (mu, mv) = aligned_masses(u, v)
    return bool(np.all(np.cumsum(mu) >= np.cumsum(mv) - slack))


def truncate_at(h: Measure, a: float) -> Measure:
    """
    h^a = h_[0,a) + h([a, m_h]) δ_a, and h^a = h for a > m_h.

    Total mass is preserved.
    """
    if a < 0:
        raise MeasureError(f"Truncation point must be nonnegative, got {a!r}")
    if h.is_empty or a > upper_support(h):
        return h
    below = h.locations < a
    top = math.fsum(h.masses[~below])
    return _consolidate(
        np.append(h.locations[below], a),
        np.append(h.masses[below], top),
    )


def total_variation(u: Measure, v: Measure) -> float:
    """Half the atomwise absolute mass difference"""
    _, (mu, mv) = aligned_masses(u, v)
    return 0.5 * math.fsum(np.abs(mu - mv))


def kolmogorov_distance(u: Measure, v: Measure, upto: Optional[float] = None) -> float:
    """
    sup_x |D_u(x) - D_v(x)| over the union of atom locations.

    Args:
        upto: Restrict the supremum to locations <= upto
    """
    grid, (mu, mv) = aligned_masses(u, v)
    gap = np.abs(np.cumsum(mu) - np.cumsum(mv))
    if upto is not None:
        gap = gap[grid <= upto]
    return float(gap.max()) if gap.size else 0.0


def _band_excess(f: Measure, g: Measure, eps: float) -> float:
    # sup_y D_f(y) - D_g(y + eps) - eps; attained at an atom of f or at g's atoms shifted by -eps
    if f.is_empty:
        return -eps
    first = f.cumulative - _cdf_at(g, f.locations + eps)
    if g.is_empty:
        return float(first.max()) - eps
    second = _cdf_at(f, g.locations - eps) - g.cumulative
    return float(max(first.max(), second.max())) - eps


def levy_distance(u: Measure, v: Measure, accuracy: Optional[float] = None) -> float:
    """
    Lévy distance between two probability measures.

    Smallest eps with D_u(x - eps) - eps <= D_v(x) <= D_u(x + eps) + eps for
    all x, found by bisection on [0, 1].
    """
    accuracy = get_settings().numerics.levy_accuracy if accuracy is None else accuracy
    noise = 1e-14

    def holds(eps: float) -> bool:
        return _band_excess(u, v, eps) <= noise and _band_excess(v, u, eps) <= noise

    if holds(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > accuracy:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def mean(u: Measure) -> float:
    """∫ x u(dx)"""
    return math.fsum(u.locations * u.masses)


def exp_moment(u: Measure, t: float) -> float:
    """
    ∫ e^{t x} u(dx)

    Raises:
        ExpOverflowError: If t * m_u exceeds the configured overflow limit
    """
    if u.is_empty:
        return 0.0
    limit = get_settings().numerics.exp_overflow
    if t * float(u.locations[-1]) > limit:
        raise ExpOverflowError(f"exp({t!r} * {float(u.locations[-1])!r}) overflows")
    return math.fsum(np.exp(t * u.locations) * u.masses)


# ============================================================================
# Continuous families
# ============================================================================

@dataclass(frozen=True)
class UniformFamily:
    """Uniform density on [lo, hi]"""
    lo: float
    hi: float

    def cdf(self) -> Callable[[np.ndarray], np.ndarray]:
        return stats.uniform(loc=self.lo, scale=self.hi - self.lo).cdf


@dataclass(frozen=True)
class PowerFamily:
    """Density proportional to x^k on [lo, hi]"""
    k: float
    lo: float
    hi: float

    def cdf(self) -> Callable[[np.ndarray], np.ndarray]:
        if self.k <= -1:
            raise MeasureError(f"Power family needs k > -1, got {self.k!r}")
        e = self.k + 1.0
        lo_e, hi_e = self.lo ** e, self.hi ** e
        return lambda x: (np.asarray(x, dtype=float) ** e - lo_e) / (hi_e - lo_e)


@dataclass(frozen=True)
class TruncatedExponentialFamily:
    """Density proportional to e^{-rate x} on [lo, hi]; rate may be negative"""
    rate: float
    lo: float
    hi: float

    def cdf(self) -> Callable[[np.ndarray], np.ndarray]:
        width = self.hi - self.lo
        if self.rate == 0:
            return UniformFamily(self.lo, self.hi).cdf()
        r = abs(self.rate)
        dist = stats.truncexpon(b=r * width, loc=0.0, scale=1.0 / r)
        if self.rate > 0:
            return lambda x: dist.cdf(np.asarray(x, dtype=float) - self.lo)
        # Increasing density: mirror the decreasing one around the interval.
        return lambda x: dist.sf(self.hi - np.asarray(x, dtype=float))


FamilySpec = Union[UniformFamily, PowerFamily, TruncatedExponentialFamily]


def discretize_family(family: FamilySpec, n: int, bound: Optional[float] = None) -> Measure:
    """
    Midpoint-cell discretization with exact CDF increments.

    Atom j sits at lo + (j + 1/2)(hi - lo)/n and carries the family's mass
    on the j-th cell.

    Raises:
        MeasureError: On invalid parameters or hi > bound

    Example:
        >>> discretize_family(UniformFamily(0.0, 1.0), 2).atoms()
        [(0.25, 0.5), (0.75, 0.5)]
    """
    if n < 1:
        raise MeasureError(f"Need at least one cell, got n={n}")
    if not (0 <= family.lo < family.hi):
        raise MeasureError(f"Family support [{family.lo}, {family.hi}] is invalid")
    if bound is not None and family.hi > bound:
        raise MeasureError(f"Family upper end {family.hi!r} exceeds bound {bound!r}")
    width = family.hi - family.lo
    edges = family.lo + width * np.arange(n + 1) / n
    edges[-1] = family.hi
    values = np.asarray(family.cdf()(edges), dtype=float)
    values[0], values[-1] = 0.0, 1.0
    masses = np.clip(np.diff(values), 0.0, None)
    mids = family.lo + width * (np.arange(n) + 0.5) / n
    return _consolidate(mids, masses)
