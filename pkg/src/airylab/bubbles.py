"""Concentration families at the conjugate frequencies +-1 and their limits.

A profile concentrated at the two opposite frequencies carries strictly
more of the space-time functional than one concentrated at a single
frequency; the gain is exactly the threshold constant.  The sweep driver
quantifies how fast the finite-scale quotients approach their limits.

Two evaluation paths are exposed.  The *direct* path builds the
two-bubble profile on a fine frequency grid and evaluates the cubic-flow
quotient in the original variables; its space-time windows must grow like
1/eps and 1/eps^2, which is only affordable at moderate eps.  The default
*substituted* path rescales the problem once and for all (x -> x/eps,
t -> t/eps^2, frequencies recentred at 1/eps): the two-bubble quotient
becomes the circle-averaged mixed norm of the zoomed operator T_eps on an
eps-independent window, and the single-bubble quotient the plain mixed
norm of the same field.  The circle average is evaluated by quadrature
(``homogenized_mixed_norm``); for the smooth profiles used here it agrees
with the oscillatory evaluation far below the operator-convergence error
being measured.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import propagators
from .constants import a_p_closed_form
from .core import (
    DomainError,
    ExponentTriple,
    FreqGrid,
    FreqProfile,
    GridAsymmetry,
    SpaceTimeField,
    SpaceTimeGrid,
    SupportOverlap,
    WindowOverflow,
    l2_mass,
)
from .norms import mixed_norm, mixed_norm_power, airy_quotient, schrodinger_quotient


# ---------------------------------------------------------------------------
# Profile constructors
# ---------------------------------------------------------------------------

def aligned_bubble_grid(chi_grid: FreqGrid, eps: float, pad: int = 2) -> FreqGrid:
    """Output grid whose nodes hit every rescaled sample point exactly.

    Needs 1/(eps*h) and W/h integral (h the chi step, W its half-window),
    so that both bubble centres +-1 and the rescaled chi nodes land on one
    common lattice of spacing eps*h.  With chi step <= 1/32 the output
    spacing is <= eps/32, fine enough to resolve the concentration scale.
    """
    if not chi_grid.is_symmetric:
        raise GridAsymmetry("bubble construction expects a symmetric chi grid")
    h = chi_grid.step
    a = 1.0 / (eps * h)
    b = chi_grid.xi_max / h
    if abs(a - round(a)) > 1e-9 or abs(b - round(b)) > 1e-9:
        raise DomainError(
            f"alignment needs 1/(eps*h) and W/h integral; got {a:.6g}, {b:.6g}"
        )
    k = int(round(a)) + int(round(b)) + pad
    hp = eps * h
    return FreqGrid(-k * hp, k * hp, 2 * k + 1)


def _resample(chi: FreqProfile, points: np.ndarray) -> np.ndarray:
    xi = chi.grid.nodes()
    re = np.interp(points, xi, chi.samples.real, left=0.0, right=0.0)
    im = np.interp(points, xi, chi.samples.imag, left=0.0, right=0.0)
    return re + 1j * im


def _support_extent(chi: FreqProfile) -> tuple[float, float]:
    mask = np.abs(chi.samples) > 0.0
    if not np.any(mask):
        return 0.0, 0.0
    xi = chi.grid.nodes()[mask]
    return float(xi[0]), float(xi[-1])


def _check_bubble_windows(chi: FreqProfile, eps: float, out_grid: FreqGrid,
                          two_sided: bool) -> None:
    s_lo, s_hi = _support_extent(chi)
    lo, hi = 1.0 + eps * s_lo, 1.0 + eps * s_hi
    # The mirrored copy occupies [-hi, -lo]; disjointness needs lo > -lo.
    if two_sided and lo <= -lo:
        raise SupportOverlap(
            f"rescaled supports centred at +-1 overlap (eps*|support| >= 1, eps={eps})"
        )
    edge = max(abs(lo), abs(hi))
    if edge > out_grid.xi_max + 1e-12 or -edge < out_grid.xi_min - 1e-12:
        raise WindowOverflow(
            f"bubble support [{lo:.6g}, {hi:.6g}] exceeds window "
            f"[{out_grid.xi_min:.6g}, {out_grid.xi_max:.6g}]"
        )


def two_bubble(chi: FreqProfile, eps: float, out_grid: FreqGrid) -> FreqProfile:
    """Samples of chi-hat((xi-1)/eps) + conj(chi-hat(-(xi+1)/eps)).

    The output is conjugate-symmetric, hence the profile of a real-valued
    function; its mass is 2*eps times the mass of chi once the two
    rescaled supports are disjoint.
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if not out_grid.is_symmetric:
        raise GridAsymmetry("two-sided family needs a symmetric output grid")
    _check_bubble_windows(chi, eps, out_grid, two_sided=True)
    xi = out_grid.nodes()
    plus = _resample(chi, (xi - 1.0) / eps)
    # The mirrored copy is conj(plus(-xi)); index reversal realizes the
    # mirror exactly, so the sum is conjugate-symmetric to the bit.
    minus = np.conj(plus[::-1])
    return FreqProfile(out_grid, plus + minus)


def single_bubble(chi: FreqProfile, eps: float, out_grid: FreqGrid) -> FreqProfile:
    """Only the +1-centred copy; mass is eps times the mass of chi."""
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    _check_bubble_windows(chi, eps, out_grid, two_sided=False)
    xi = out_grid.nodes()
    return FreqProfile(out_grid, _resample(chi, (xi - 1.0) / eps))


# ---------------------------------------------------------------------------
# Homogenized mixed norm (the circle-averaged limit object)
# ---------------------------------------------------------------------------

def homogenized_mixed_norm(F: SpaceTimeField, exps: ExponentTriple,
                           theta_nodes: int = 256) -> float:
    """Mixed norm with the inner integrand replaced by its circle average:

    ( sum_t w_t ( mean_theta sum_x w_x |2 Re(e^{i theta} F)|^q )^{p/q} )^{1/p}.

    Pointwise the circle average equals 2^{q/2} phi_q(1, q) |F|^q, so for a
    critical triple this is (2^{q/2} phi_q(1, q))^{1/q} times the plain
    mixed norm; the quadrature keeps the check honest.
    """
    if not exps.critical:
        raise DomainError("homogenized norm is defined for critical triples")
    p, q = exps.p, exps.q
    wx = F.grid.x_weights()
    wt = F.grid.t_weights()
    re = F.values.real
    im = F.values.imag
    acc = np.zeros(F.grid.nt)
    thetas = np.arange(theta_nodes) * (2.0 * math.pi / theta_nodes)
    for th in thetas:
        amp = 2.0 * np.abs(math.cos(th) * re - math.sin(th) * im)
        acc += (amp ** q) @ wx
    A = acc / theta_nodes
    return float(np.dot(wt, A ** (p / q))) ** (1.0 / p)


def oscillatory_vs_homogenized(envelope: Callable[[np.ndarray, np.ndarray], np.ndarray],
                               eps: float, exps: ExponentTriple,
                               t_half: float, x_half: float,
                               pts_per_period: int = 16,
                               theta_nodes: int = 256) -> tuple[float, float]:
    """Finite-eps two-scale evaluation against its homogenized limit.

    Returns (oscillatory, homogenized) where the first is the mixed norm of
    2 Re(e^{i(x/eps - 2t/eps^2)} E(t, x)) on a Simpson grid resolving both
    oscillations, and the second is the circle-averaged norm of the same
    envelope on the same grid, so that the difference isolates the
    homogenization error rather than quadrature error.
    """
    def _count(half_width: float, period: float) -> int:
        n = int(math.ceil(2.0 * half_width / (period / pts_per_period)))
        return ((max(n, 32) + 3) // 4) * 4 + 1  # 4k+1: odd, midpoint on an even node

    nt = _count(t_half, math.pi * eps ** 2)
    nx = _count(x_half, 2.0 * math.pi * eps)
    grid = SpaceTimeGrid(-t_half, t_half, nt, -x_half, x_half, nx, rule="simpson")
    T = grid.t_nodes()[:, None]
    X = grid.x_nodes()[None, :]
    E = np.asarray(envelope(T, X), dtype=np.complex128)
    E = np.broadcast_to(E, (nt, nx))
    phase = X / eps - 2.0 * T / eps ** 2
    osc_vals = 2.0 * np.real(np.exp(1j * phase) * E)
    osc = mixed_norm(SpaceTimeField(grid, osc_vals.astype(np.complex128)), exps.p, exps.q)
    hom = homogenized_mixed_norm(SpaceTimeField(grid, E.copy()), exps, theta_nodes)
    return osc, hom


# ---------------------------------------------------------------------------
# Quotients along the concentration families
# ---------------------------------------------------------------------------

def bubble_quotient_substituted(chi: FreqProfile, exps: ExponentTriple, eps: float,
                                st_grid: SpaceTimeGrid, two: bool = True,
                                theta_nodes: int = 256) -> float:
    """Quotient of the eps-family evaluated after the proof's substitution.

    The rescaled field is T_eps chi; for the two-sided family the norm is
    the circle-averaged one and the mass doubles, for the one-sided family
    the plain norm applies.  Window truncation is shared with the target
    quotients computed on the same grid, so it cancels in comparisons.
    """
    field = propagators.approx_extension(chi, exps.gamma, eps, st_grid)
    mass = l2_mass(chi)
    if mass <= 0.0:
        raise DomainError("quotient undefined for a zero profile")
    p = exps.p
    if two:
        hom = homogenized_mixed_norm(field, exps, theta_nodes)
        return hom ** p / (2.0 * mass) ** (p / 2.0)
    return mixed_norm_power(field, p, exps.q) / mass ** (p / 2.0)


def bubble_quotient_direct(chi: FreqProfile, exps: ExponentTriple, eps: float,
                           st_grid: SpaceTimeGrid, out_grid: FreqGrid | None = None,
                           two: bool = True) -> float:
    """Quotient of the constructed eps-profile in the original variables."""
    if out_grid is None:
        out_grid = aligned_bubble_grid(chi.grid, eps)
    family = two_bubble if two else single_bubble
    prof = family(chi, eps, out_grid)
    return airy_quotient(prof, exps, st_grid)


def direct_window(eps: float, s_half: float, y_half: float) -> tuple[float, float]:
    """Original-variable window (t_half, x_half) matching a substituted
    window of half-sizes (s_half, y_half); accounts for the shear x -> x - 3t."""
    t_half = s_half / eps ** 2
    return t_half, y_half / eps + 3.0 * t_half


@dataclass(frozen=True)
class SweepRow:
    eps: float
    quotient_two: float
    quotient_one: float
    target_two: float
    target_one: float
    rel_err_two: float
    rel_err_one: float


SWEEP_COLUMNS = ("eps", "quotient_two", "quotient_one", "target_two",
                 "target_one", "rel_err_two", "rel_err_one")


def bubble_sweep(chi: FreqProfile, exps: ExponentTriple, eps_list: Sequence[float],
                 st_grid: SpaceTimeGrid, theta_nodes: int = 256) -> list[SweepRow]:
    """Finite-eps quotients of both families against their limits.

    Targets: the one-sided limit is the quadratic-flow quotient of chi, the
    two-sided limit is the threshold constant times it.  Rows keep the
    eps order given; the list must be strictly decreasing.
    """
    eps_arr = list(eps_list)
    if any(b >= a for a, b in zip(eps_arr, eps_arr[1:])):
        raise DomainError("eps_list must be strictly decreasing")
    if not exps.critical:
        raise DomainError("bubble sweep is defined for critical triples")
    rows: list[SweepRow] = []
    if not eps_arr:
        return rows
    target_one = schrodinger_quotient(chi, exps, st_grid)
    target_two = a_p_closed_form(exps) * target_one
    for eps in eps_arr:
        q2 = bubble_quotient_substituted(chi, exps, eps, st_grid, two=True,
                                         theta_nodes=theta_nodes)
        q1 = bubble_quotient_substituted(chi, exps, eps, st_grid, two=False)
        rows.append(SweepRow(
            eps=eps, quotient_two=q2, quotient_one=q1,
            target_two=target_two, target_one=target_one,
            rel_err_two=abs(q2 - target_two) / target_two,
            rel_err_one=abs(q1 - target_one) / target_one,
        ))
    return rows


def write_sweep_csv(path: str | Path, rows: Sequence[SweepRow]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for r in rows:
            w.writerow([repr(float(getattr(r, c))) for c in SWEEP_COLUMNS])
