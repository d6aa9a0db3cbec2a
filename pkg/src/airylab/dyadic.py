"""Exact dyadic-interval combinatorics and the refined-inequality diagnostics.

Intervals are pairs of integers (k, ell) standing for [k 2^ell, (k+1) 2^ell),
so every geometric predicate here is decided in exact arithmetic: the
well-separated relation, the four endpoint inequalities it implies, and
the bounded-overlap count of the frequency-space parallelograms carrying
the bilinear pieces.  Float ties would be spurious for these checks, hence
integers and Fractions throughout; the floating-point world only enters
through the extension fields of the restricted profiles.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import propagators
from .core import (
    DomainError,
    EmptyFamily,
    ExponentTriple,
    FreqProfile,
    PreconditionViolation,
    SpaceTimeGrid,
    l2_mass,
    _SQRT_2PI,
)
from .norms import mixed_norm

_REFINED_GAMMA = 1.0 / 6.0  # smoothing order of the diagonal refined estimate


def _pow2(ell: int) -> Fraction:
    return Fraction(2) ** ell


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """[k 2^ell, (k+1) 2^ell) with integer k and ell."""

    k: int
    ell: int

    @property
    def left(self) -> Fraction:
        return self.k * _pow2(self.ell)

    @property
    def right(self) -> Fraction:
        return (self.k + 1) * _pow2(self.ell)

    @property
    def length(self) -> Fraction:
        return _pow2(self.ell)

    @property
    def center(self) -> Fraction:
        return (2 * self.k + 1) * _pow2(self.ell - 1)

    def parent(self) -> "DyadicInterval":
        return DyadicInterval(self.k >> 1, self.ell + 1)

    def grandparent(self) -> "DyadicInterval":
        return DyadicInterval(self.k >> 2, self.ell + 2)

    @property
    def positive(self) -> bool:
        return self.k >= 0

    @property
    def negative(self) -> bool:
        return self.k + 1 <= 0

    def contains(self, x: Fraction) -> bool:
        return self.left <= x < self.right

    @staticmethod
    def containing(x: Fraction, ell: int) -> "DyadicInterval":
        return DyadicInterval(math.floor(Fraction(x) / _pow2(ell)), ell)

    def as_floats(self) -> tuple[float, float]:
        return float(self.left), float(self.right)


def adjacent(i: DyadicInterval, j: DyadicInterval) -> bool:
    """Same length and sharing exactly one extremity."""
    return i.ell == j.ell and abs(i.k - j.k) == 1


def sim_related(i: DyadicInterval, j: DyadicInterval) -> bool:
    """True iff the intervals are not adjacent, their parents are not
    adjacent, but their grandparents are; forces equal lengths and an
    integer gap of 3..7 cells."""
    if i.ell != j.ell:
        return False
    d = abs(i.k - j.k)
    if d <= 1:
        return False
    if abs((i.k >> 1) - (j.k >> 1)) <= 1:
        return False
    return abs((i.k >> 2) - (j.k >> 2)) == 1


def sim_partners(i: DyadicInterval, k_min: int | None = None,
                 k_max: int | None = None) -> Iterator[DyadicInterval]:
    """All intervals related to i, optionally clipped to a k-range."""
    for d in range(-7, 8):
        kk = i.k + d
        if k_min is not None and kk < k_min:
            continue
        if k_max is not None and kk > k_max:
            continue
        cand = DyadicInterval(kk, i.ell)
        if sim_related(i, cand):
            yield cand


def iter_sim_pairs(ell_range: Iterable[int], window_max: int,
                   ordered: bool = False) -> Iterator[tuple[DyadicInterval, DyadicInterval]]:
    """Related pairs with both intervals inside (0, window_max].

    Canonical orientation k < k' unless ``ordered``; window_max must be a
    positive integer (a power of two in the scans, but not required).
    """
    for ell in ell_range:
        if ell >= 0:
            k_hi = (window_max >> ell) - 1
            if (window_max >> ell) << ell != window_max:
                k_hi = (window_max - (1 << ell)) >> ell
        else:
            k_hi = (window_max << (-ell)) - 1
        for k in range(0, k_hi + 1):
            lo = k + 1 if not ordered else None
            for j in sim_partners(DyadicInterval(k, ell), k_min=lo, k_max=k_hi):
                yield DyadicInterval(k, ell), j


# ---------------------------------------------------------------------------
# The four endpoint inequalities of well-separated pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparationChecks:
    point_bound: bool        # |eta| <= 2|c(I)| on I
    center_comparison: bool  # |c(I')| <= 15 |c(I)|
    sum_bounds: bool         # 4/5 |c(I+I')| <= |eta+eta'| <= 6/5 |c(I+I')|
    difference_bounds: bool  # 2|I| <= |eta-eta'| <= 8|I|

    @property
    def all_hold(self) -> bool:
        return (self.point_bound and self.center_comparison
                and self.sum_bounds and self.difference_bounds)


def lemma34_check(i: DyadicInterval, j: DyadicInterval,
                  samples_per_interval: int = 8) -> SeparationChecks:
    """Verify the four separation inequalities for a related same-side pair.

    Endpoints are checked exactly on the interval closures; the bounds are
    monotone in (eta, eta'), so the endpoint checks are conclusive.  All
    four inequalities are scale-invariant, so they reduce to integer
    comparisons in (k, k').  Interior rational samples are checked as well
    when ``samples_per_interval`` > 0.
    """
    if not sim_related(i, j):
        raise PreconditionViolation("intervals are not well-separated partners")
    if not ((i.positive and j.positive) or (i.negative and j.negative)):
        raise PreconditionViolation("intervals must lie on one side of 0")

    k, kp = i.k, j.k
    # Scale by 2^{1-ell}: endpoints 2k, 2k+2; centers 2k+1.
    c = abs(2 * k + 1)
    cp = abs(2 * kp + 1)
    point = max(abs(2 * k), abs(2 * k + 2)) <= 2 * c
    centers = cp <= 15 * c
    csum = abs(2 * (k + kp + 1))
    s_lo = min(abs(2 * (k + kp)), abs(2 * (k + kp + 2)))
    s_hi = max(abs(2 * (k + kp)), abs(2 * (k + kp + 2)))
    sums = (4 * csum <= 5 * s_lo) and (5 * s_hi <= 6 * csum)
    d = abs(k - kp)
    diffs = (2 <= d - 1) and (d + 1 <= 8)

    if samples_per_interval > 0:
        m = samples_per_interval
        etas = [i.left + i.length * Fraction(r, m) for r in range(m)]
        etaps = [j.left + j.length * Fraction(r, m) for r in range(m)]
        two_ci = 2 * abs(i.center)
        point = point and all(abs(e) <= two_ci for e in etas)
        c_sum = abs(i.center + j.center)
        lo_s = Fraction(4, 5) * c_sum
        hi_s = Fraction(6, 5) * c_sum
        twoL = 2 * i.length
        eightL = 8 * i.length
        for e in etas:
            for ep in etaps:
                s = abs(e + ep)
                sums = sums and (lo_s <= s <= hi_s)
                dd = abs(e - ep)
                diffs = diffs and (twoL <= dd <= eightL)

    return SeparationChecks(point_bound=point, center_comparison=centers,
                            sum_bounds=sums, difference_bounds=diffs)


# ---------------------------------------------------------------------------
# Covering property: each off-diagonal point lies in exactly one pair
# ---------------------------------------------------------------------------

def covering_sim_pairs(eta: Fraction, eta_p: Fraction,
                       extra_scales: int = 4) -> list[tuple[DyadicInterval, DyadicInterval]]:
    """All related pairs (I, I') with eta in I and eta' in I'.

    The difference bound confines the possible lengths to a window around
    |eta - eta'|, so scanning a few scales on each side is exhaustive.
    """
    eta, eta_p = Fraction(eta), Fraction(eta_p)
    if eta == eta_p:
        raise DomainError("covering pairs are defined for distinct points")
    gap = abs(eta - eta_p)
    ell_hi = math.floor(math.log2(float(gap) / 2.0)) + extra_scales
    ell_lo = math.ceil(math.log2(float(gap) / 8.0)) - extra_scales
    found = []
    for ell in range(ell_lo, ell_hi + 1):
        i = DyadicInterval.containing(eta, ell)
        j = DyadicInterval.containing(eta_p, ell)
        if sim_related(i, j):
            found.append((i, j))
    return found


# ---------------------------------------------------------------------------
# Refined functional and bilinear diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalContribution:
    interval: DyadicInterval
    sup_value: float       # grid max of |restricted extension|
    l1_bound: float        # (2 pi)^{-1/2} int_I |xi|^{1/6} |uhat|
    weighted: float        # |c|^{-1/6} |I|^{-1/2} sup_value


@dataclass(frozen=True)
class RefinedScan:
    q_value: float
    best: DyadicInterval | None
    contributions: tuple[IntervalContribution, ...]


def refined_functional(u: FreqProfile, grid: SpaceTimeGrid,
                       family: Sequence[DyadicInterval]) -> RefinedScan:
    """Q(u) = max over the family of |c(I)|^{-1/6} |I|^{-1/2} sup |Psi[u_I]|.

    The sup is a grid max, an under-estimate of the true L-infinity norm;
    the per-interval L1 upper bound is returned alongside to quantify the
    slack.  Raises EmptyFamily on an empty family.
    """
    family = list(family)
    if not family:
        raise EmptyFamily("refined functional needs a nonempty interval family")
    xi = u.grid.nodes()
    w = u.grid.weights()
    absmod = np.abs(xi) ** _REFINED_GAMMA * np.abs(u.samples)
    entries = []
    best_val = 0.0
    best_int = None
    for I in family:
        lo, hi = I.as_floats()
        u_I = propagators.restrict_frequency(u, (lo, hi))
        if np.any(np.abs(u_I.samples) > 0.0):
            field = propagators.airy_extension(u_I, _REFINED_GAMMA, grid)
            sup = float(np.max(np.abs(field.values)))
        else:
            sup = 0.0
        mask = (xi >= lo) & (xi < hi)
        l1 = float(np.dot(w[mask], absmod[mask])) / _SQRT_2PI
        weight = float(abs(I.center)) ** (-1.0 / 6.0) * float(I.length) ** (-0.5)
        weighted = weight * sup
        entries.append(IntervalContribution(I, sup, l1, weighted))
        if weighted > best_val:
            best_val, best_int = weighted, I
    return RefinedScan(q_value=best_val, best=best_int, contributions=tuple(entries))


def default_dyadic_family(u: FreqProfile, max_per_scale: int = 64) -> list[DyadicInterval]:
    """All dyadic intervals meeting the profile support, with lengths between
    the grid step and the window width (clipped per scale for safety)."""
    mask = np.abs(u.samples) > 0.0
    if not np.any(mask):
        return []
    xi = u.grid.nodes()[mask]
    lo, hi = float(xi[0]), float(xi[-1])
    width = u.grid.xi_max - u.grid.xi_min
    ell_min = math.ceil(math.log2(u.grid.step))
    ell_max = math.floor(math.log2(width))
    out = []
    for ell in range(ell_min, ell_max + 1):
        scale = 2.0 ** ell
        k_lo = math.floor(lo / scale)
        k_hi = math.floor(hi / scale)
        if k_hi - k_lo + 1 > max_per_scale:
            continue
        for k in range(k_lo, k_hi + 1):
            out.append(DyadicInterval(k, ell))
    return out


@dataclass(frozen=True)
class RefinedRatio:
    l6_norm: float
    q_value: float
    curve: tuple[tuple[float, float], ...]  # (theta, Q^theta * mass^{(1-theta)/2})


def refined_ratio(u: FreqProfile, grid: SpaceTimeGrid,
                  family: Sequence[DyadicInterval],
                  theta_count: int = 9) -> RefinedRatio:
    """Both sides of the refined comparison, as data over an exponent grid.

    The interpolation exponent is not pinned down by the estimate itself,
    so the right side is reported as a curve over theta in (0, 1); there is
    no pass/fail here.
    """
    scan = refined_functional(u, grid, family)
    if scan.q_value <= 0.0:
        raise DomainError("refined ratio needs Q(u) > 0")
    field = propagators.airy_extension(u, _REFINED_GAMMA, grid)
    l6 = mixed_norm(field, 6.0, 6.0)
    mass = l2_mass(u)
    curve = []
    for idx in range(1, theta_count + 1):
        theta = idx / (theta_count + 1.0)
        curve.append((theta, scan.q_value ** theta * mass ** ((1.0 - theta) / 2.0)))
    return RefinedRatio(l6_norm=l6, q_value=scan.q_value, curve=tuple(curve))


def bilinear_ratio(u: FreqProfile, v: FreqProfile, i: DyadicInterval,
                   j: DyadicInterval, q: float, grid: SpaceTimeGrid) -> float:
    """Mixed q-norm of the product of restricted extensions, normalized by
    |c(I)|^{1/3 - 1/q} |I|^{1 - 3/q} ||u|| ||v||.

    A diagnostic scalar: finite and stable under refinement, with the
    interesting regime 2 <= q < 3.
    """
    if not (2.0 <= q < 3.0):
        raise PreconditionViolation(f"bilinear diagnostic expects q in [2, 3), got {q}")
    if not sim_related(i, j):
        raise PreconditionViolation("intervals are not well-separated partners")
    if not ((i.positive and j.positive) or (i.negative and j.negative)):
        raise PreconditionViolation("intervals must lie on one side of 0")
    if u.grid != v.grid:
        raise PreconditionViolation("profiles must share a frequency grid")
    fu = propagators.airy_extension(
        propagators.restrict_frequency(u, i.as_floats()), _REFINED_GAMMA, grid)
    fv = propagators.airy_extension(
        propagators.restrict_frequency(v, j.as_floats()), _REFINED_GAMMA, grid)
    product = fu.with_values(fu.values * fv.values)
    num = mixed_norm(product, q, q)
    if num == 0.0:
        return 0.0
    denom = (float(abs(i.center)) ** (1.0 / 3.0 - 1.0 / q)
             * float(i.length) ** (1.0 - 3.0 / q)
             * math.sqrt(l2_mass(u)) * math.sqrt(l2_mass(v)))
    if denom == 0.0:
        raise DomainError("bilinear normalization vanished")
    return num / denom


# ---------------------------------------------------------------------------
# Parallelograms and the bounded-overlap count
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Parallelogram:
    """{(omega, xi): xi_lo <= xi <= xi_hi,
        slope*xi + off_lo <= omega <= slope*xi + off_hi} in exact rationals.

    Built from a sum interval J: the strip direction is the tangent line at
    the center c(J) of the cubic phase surface, the slab height measures
    the curvature seen by a well-separated pair, and the whole region is
    dilated by 1 + alpha about its center.
    """

    xi_lo: Fraction
    xi_hi: Fraction
    slope: Fraction
    off_lo: Fraction
    off_hi: Fraction

    def __post_init__(self):
        if not (self.xi_lo < self.xi_hi):
            raise DomainError("parallelogram xi-interval is empty")
        if not (self.off_lo < self.off_hi):
            raise DomainError("parallelogram slab is empty")

    @staticmethod
    def from_sum_interval(center: Fraction, length: Fraction,
                          alpha: Fraction) -> "Parallelogram":
        c = Fraction(center)
        L = Fraction(length)
        alpha = Fraction(alpha)
        half = (1 + alpha) * L / 2
        slope = Fraction(3, 4) * c * c
        base = -Fraction(1, 2) * c ** 3  # (1/4)c^3 - (3/4)c^3 from expanding the strip line
        cL2 = c * L * L
        s_lo = Fraction(3, 5) - 7 * alpha
        s_hi = Fraction(73, 5) + 7 * alpha
        return Parallelogram(
            xi_lo=c - half, xi_hi=c + half, slope=slope,
            off_lo=base + s_lo * cL2, off_hi=base + s_hi * cL2,
        )


def _feasible_interval(lo: Fraction, hi: Fraction, m: Fraction,
                       b: Fraction) -> tuple[Fraction, Fraction] | None:
    """{xi in [lo, hi]: m*xi + b >= 0}, or None if empty."""
    if m == 0:
        return (lo, hi) if b >= 0 else None
    root = -b / m
    if m > 0:
        a = max(lo, root)
        return (a, hi) if a <= hi else None
    b2 = min(hi, root)
    return (lo, b2) if lo <= b2 else None


def parallelograms_intersect(p: Parallelogram, q: Parallelogram) -> bool:
    """Exact emptiness test of the intersection (closed regions)."""
    lo = max(p.xi_lo, q.xi_lo)
    hi = min(p.xi_hi, q.xi_hi)
    if lo > hi:
        return False
    f = _feasible_interval(lo, hi, q.slope - p.slope, q.off_hi - p.off_lo)
    if f is None:
        return False
    g = _feasible_interval(f[0], f[1], p.slope - q.slope, p.off_hi - q.off_lo)
    return g is not None


def admissible_alpha(alpha: Fraction) -> None:
    alpha = Fraction(alpha)
    if not (alpha > 0 and Fraction(3, 5) - 7 * alpha > 0
            and Fraction(2, 5) - Fraction(561, 80) * alpha > 0):
        raise DomainError(
            f"alpha = {alpha} violates the admissibility constraints "
            f"(need alpha > 0, 3/5 - 7a > 0, 2/5 - 561a/80 > 0)"
        )


@dataclass(frozen=True)
class OverlapScan:
    max_count: int
    pair_count: int
    sum_interval_count: int


def parallelogram_overlap(pairs: Sequence[tuple[DyadicInterval, DyadicInterval]],
                          alpha: Fraction) -> OverlapScan:
    """Maximum number of family pairs whose dilated parallelograms meet a
    given pair's parallelogram (the pair itself included).

    The parallelogram depends only on the sum interval I + I', so pairs are
    grouped by it; candidates are pruned by the exact xi-projection overlap
    before the full rational test.
    """
    alpha = Fraction(alpha)
    admissible_alpha(alpha)
    pairs = list(pairs)
    if not pairs:
        raise EmptyFamily("overlap scan needs a nonempty family of pairs")

    # Multiplicity of each sum interval: key (ell, k + k'), center (s+1) 2^ell.
    mult: dict[tuple[int, int], int] = {}
    for i, j in pairs:
        if i.ell != j.ell:
            raise PreconditionViolation("pairs must have equal lengths")
        key = (i.ell, i.k + j.k)
        mult[key] = mult.get(key, 0) + 1

    geo: dict[tuple[int, int], Parallelogram] = {}
    by_ell: dict[int, list[tuple[Fraction, tuple[int, int]]]] = {}
    for (ell, s) in mult:
        center = (s + 1) * _pow2(ell)
        length = _pow2(ell + 1)
        geo[(ell, s)] = Parallelogram.from_sum_interval(center, length, alpha)
        by_ell.setdefault(ell, []).append((center, (ell, s)))
    for lst in by_ell.values():
        lst.sort()

    one_plus = 1 + alpha
    max_count = 0
    for key, P in geo.items():
        ell, s = key
        c = (s + 1) * _pow2(ell)
        L = _pow2(ell + 1)
        count = 0
        for ell2, lst in by_ell.items():
            L2 = _pow2(ell2 + 1)
            reach = one_plus * (L + L2) / 2
            centers = [entry[0] for entry in lst]
            a = bisect_left(centers, c - reach)
            b = bisect_right(centers, c + reach)
            for idx in range(a, b):
                key2 = lst[idx][1]
                if parallelograms_intersect(P, geo[key2]):
                    count += mult[key2]
        max_count = max(max_count, count)
    return OverlapScan(max_count=max_count, pair_count=len(pairs),
                       sum_interval_count=len(geo))
