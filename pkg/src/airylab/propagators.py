"""Extension operators on the truncated frequency grid.

Every operator here is an exact Fourier multiplier evaluated by direct
phase summation: the field at (t, x) is the weighted node sum

    F(t, x) = (2 pi)^{-1/2} sum_j w_j m(xi_j) e^{i (t omega(xi_j) + x xi_j)} uhat_j

with omega(xi) = xi^3 for the cubic flow, 3 xi^2 for the quadratic one,
and 3 xi^2 + delta xi^3 for the approximate family interpolating between
them.  The double loop is organised as one (nt x n) @ (n x nx) complex
matrix product, chunked over x to bound memory; within a row the
summation order is fixed, so results are run-to-run deterministic.

Resolution caveat: the node spacing must resolve the phase oscillation,
i.e. step * max|t omega'(xi) + x| should stay below ~pi/2 over the grid.
Callers choose grids accordingly; nothing here adapts automatically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    FreqGrid,
    FreqProfile,
    GridAsymmetry,
    SpaceTimeField,
    SpaceTimeGrid,
    SupportViolation,
    WindowOverflow,
    _SQRT_2PI,
)

_X_CHUNK = 1024


def _phase_sum(u: FreqProfile, multiplier: np.ndarray, omega: np.ndarray,
               grid: SpaceTimeGrid) -> SpaceTimeField:
    xi = u.grid.nodes()
    coef = (u.grid.weights() * multiplier * u.samples) / _SQRT_2PI
    t = grid.t_nodes()
    x = grid.x_nodes()
    B = np.exp(1j * np.outer(t, omega))
    B *= coef
    vals = np.empty((grid.nt, grid.nx), dtype=np.complex128)
    for lo in range(0, grid.nx, _X_CHUNK):
        hi = min(lo + _X_CHUNK, grid.nx)
        vals[:, lo:hi] = B @ np.exp(1j * np.outer(xi, x[lo:hi]))
    return SpaceTimeField(grid, vals)


def _abs_power(xi: np.ndarray, gamma: float) -> np.ndarray:
    """|xi|^gamma with 0^gamma = 0 for gamma > 0, 0^0 = 1, and the node at
    exactly xi = 0 dropped for gamma < 0 (a measure-zero node)."""
    if gamma == 0.0:
        return np.ones_like(xi)
    with np.errstate(divide="ignore"):
        m = np.abs(xi) ** gamma
    if gamma < 0.0:
        m[xi == 0.0] = 0.0
    return m


def airy_extension(u: FreqProfile, gamma: float, grid: SpaceTimeGrid) -> SpaceTimeField:
    """Cubic-flow extension with smoothing weight |xi|^gamma.

    F(t, x) = (2 pi)^{-1/2} sum_j w_j |xi_j|^gamma e^{i(t xi_j^3 + x xi_j)} uhat_j.
    """
    if gamma <= -0.5:
        raise DomainError(f"gamma must exceed -1/2, got {gamma}")
    xi = u.grid.nodes()
    return _phase_sum(u, _abs_power(xi, gamma), xi ** 3, grid)


def schrodinger_extension(u: FreqProfile, grid: SpaceTimeGrid) -> SpaceTimeField:
    """Quadratic-flow extension: multiplier e^{i 3 t xi^2}."""
    xi = u.grid.nodes()
    return _phase_sum(u, np.ones_like(xi), 3.0 * xi ** 2, grid)


def approx_extension(u: FreqProfile, gamma: float, delta: float,
                     grid: SpaceTimeGrid) -> SpaceTimeField:
    """Zoomed cubic extension T_delta interpolating to the quadratic flow.

    F(t, x) = (2 pi)^{-1/2} sum_j w_j |1 + delta xi_j|^gamma
              e^{i(x xi_j + t (3 xi_j^2 + delta xi_j^3))} uhat_j.

    Requires 1 + delta xi >= 0 at every node carrying a nonzero sample;
    at delta = 0 this reduces exactly to ``schrodinger_extension``.
    """
    xi = u.grid.nodes()
    carrier = np.abs(u.samples) > 0.0
    bad = carrier & (1.0 + delta * xi < 0.0)
    if np.any(bad):
        raise SupportViolation(
            f"{int(np.count_nonzero(bad))} nodes with nonzero samples violate "
            f"1 + delta*xi >= 0 (delta = {delta})",
            nodes=xi[bad],
        )
    mult = np.abs(1.0 + delta * xi) ** gamma
    return _phase_sum(u, mult, 3.0 * xi ** 2 + delta * xi ** 3, grid)


def restrict_frequency(u: FreqProfile, interval: tuple[float, float]) -> FreqProfile:
    """Zero the samples outside [a, b); node membership is half-open."""
    a, b = interval
    xi = u.grid.nodes()
    keep = (xi >= a) & (xi < b)
    return u.with_samples(np.where(keep, u.samples, 0.0))


# ---------------------------------------------------------------------------
# Symmetry group: cubic time flow, space translation, L2 dilation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryElement:
    """Group element (t0, x0, lambda0): time flow by t0, translation by x0,
    L2-normalized dilation by lambda0 > 0."""

    t0: float
    x0: float
    lambda0: float

    def __post_init__(self):
        if not (self.lambda0 > 0.0):
            raise DomainError(f"dilation parameter must be positive, got {self.lambda0}")


def apply_symmetry(g: SymmetryElement, u: FreqProfile,
                   out_grid: FreqGrid | None = None) -> FreqProfile:
    """Frequency-side group action.

    The transformed profile is
        vhat(xi) = lambda0^{-1/2} e^{i x0 xi / lambda0}
                   e^{i t0 (xi/lambda0)^3} uhat(xi / lambda0).

    With ``out_grid=None`` the result lives on the dilated grid
    [lambda0 xi_min, lambda0 xi_max] with the same node count, so every
    output node maps exactly onto an input node and no interpolation
    happens.  With an explicit ``out_grid`` the samples are resampled by
    linear interpolation (exact whenever nodes align); the dilated support
    must fit inside the output window or WindowOverflow is raised.
    """
    lam = g.lambda0
    src_xi = u.grid.nodes()

    if out_grid is None:
        phase = np.exp(1j * (g.x0 * src_xi + g.t0 * src_xi ** 3))
        vals = phase * u.samples / math.sqrt(lam)
        return FreqProfile(FreqGrid(lam * u.grid.xi_min, lam * u.grid.xi_max, u.grid.n), vals)

    support = np.abs(u.samples) > 0.0
    if np.any(support):
        lo = lam * src_xi[support][0]
        hi = lam * src_xi[support][-1]
        if lo < out_grid.xi_min - 1e-12 or hi > out_grid.xi_max + 1e-12:
            raise WindowOverflow(
                f"dilated support [{lo:.6g}, {hi:.6g}] exceeds output window "
                f"[{out_grid.xi_min:.6g}, {out_grid.xi_max:.6g}]"
            )
    pulled = out_grid.nodes() / lam
    re = np.interp(pulled, src_xi, u.samples.real, left=0.0, right=0.0)
    im = np.interp(pulled, src_xi, u.samples.imag, left=0.0, right=0.0)
    phase = np.exp(1j * (g.x0 * pulled + g.t0 * pulled ** 3))
    return FreqProfile(out_grid, phase * (re + 1j * im) / math.sqrt(lam))


def transformed_spacetime_grid(g: SymmetryElement, grid: SpaceTimeGrid) -> SpaceTimeGrid:
    """Space-time window corresponding to ``grid`` after applying g.

    The transformed field at (t, x) equals the original field at
    (lambda0^3 t + t0, lambda0 x + x0) up to an exact power of lambda0,
    so the matching window is the pullback of the original one.  Node
    counts are kept, which oversamples when lambda0 > 1.
    """
    lam3 = g.lambda0 ** 3
    return SpaceTimeGrid(
        (grid.t_min - g.t0) / lam3, (grid.t_max - g.t0) / lam3, grid.nt,
        (grid.x_min - g.x0) / g.lambda0, (grid.x_max - g.x0) / g.lambda0, grid.nx,
        grid.rule,
    )


def symmetrize_real(u: FreqProfile) -> tuple[FreqProfile, FreqProfile]:
    """Split uhat = f1 + i f2 into conjugate-symmetric halves.

    f1(xi) = (uhat(xi) + conj(uhat(-xi))) / 2 and
    f2(xi) = (uhat(xi) - conj(uhat(-xi))) / (2i); both correspond to
    real-valued functions and the masses add: |f1|^2 + |f2|^2 pointwise
    averages to |uhat|^2 under the mirror symmetry.
    """
    if not u.grid.is_symmetric or u.grid.n % 2 == 0:
        raise GridAsymmetry(
            "real symmetrization needs a symmetric grid with odd node count"
        )
    mirrored = np.conj(u.samples[::-1])
    f1 = 0.5 * (u.samples + mirrored)
    f2 = (u.samples - mirrored) / 2j
    return u.with_samples(f1), u.with_samples(f2)


def gaussian_schrodinger_closed_form(grid: SpaceTimeGrid) -> SpaceTimeField:
    """Exact quadratic-flow field of the unit Gaussian profile.

    For uhat(xi) = e^{-xi^2/2} the extension is
    (1 - 6it)^{-1/2} e^{-x^2 / (2 (1 - 6it))}, principal branch.
    """
    t = grid.t_nodes()[:, None]
    x = grid.x_nodes()[None, :]
    a = 1.0 - 6j * t
    vals = np.exp(-(x ** 2) / (2.0 * a)) / np.sqrt(a)
    return SpaceTimeField(grid, np.broadcast_to(vals, (grid.nt, grid.nx)).copy())
