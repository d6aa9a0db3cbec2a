"""Mixed space-time norms and the variational quotients.

The norm convention is outer-p in time of inner-q in space:

    ||F||_{p,q} = ( sum_t w_t ( sum_x w_x |F|^q )^{p/q} )^{1/p}

with the grid's quadrature weights.  Quotients are reported as p-th
powers, matching the normalization of the variational problems, so the
threshold comparison reads directly without extracting roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import propagators
from .core import (
    DomainError,
    ExponentTriple,
    FreqProfile,
    SpaceTimeField,
    SpaceTimeGrid,
    l2_mass,
    same_grid,
)


def _inner_q(F: SpaceTimeField, q: float) -> np.ndarray:
    """Per-row space integrals sum_x w_x |F|^q; the grid sup for q = inf."""
    absF = np.abs(F.values)
    if math.isinf(q):
        return np.max(absF, axis=1)
    return (absF ** q) @ F.grid.x_weights()


def mixed_norm_power(F: SpaceTimeField, p: float, q: float) -> float:
    """||F||_{p,q}^p.  Accepts q = inf (inner sup instead of integral)."""
    if not (p > 0.0) or not (q > 0.0):
        raise DomainError(f"exponents must be positive, got p={p}, q={q}")
    if math.isinf(p):
        raise DomainError("outer exponent p = inf is not supported")
    A = _inner_q(F, q)
    if math.isinf(q):
        integrand = A ** p
    else:
        integrand = A ** (p / q)
    return float(np.dot(F.grid.t_weights(), integrand))


def mixed_norm(F: SpaceTimeField, p: float, q: float) -> float:
    """||F||_{p,q}; zero iff F vanishes identically on the grid."""
    return mixed_norm_power(F, p, q) ** (1.0 / p)


@dataclass(frozen=True)
class TriangleCheck:
    lhs: float   # ||F + G||^beta
    rhs: float   # ||F||^beta + ||G||^beta
    beta: float  # min(p, q, 1)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def mixed_triangle_check(F: SpaceTimeField, G: SpaceTimeField,
                         p: float, q: float) -> TriangleCheck:
    """beta-triangle inequality data for the mixed norm, beta = min(p, q, 1).

    The discrete mixed norm is a genuine mixed norm on a discrete measure
    space, so lhs <= rhs holds exactly up to roundoff for all p, q > 0.
    """
    same_grid(F, G)
    if not (p > 0.0) or not (q > 0.0):
        raise DomainError(f"exponents must be positive, got p={p}, q={q}")
    beta = min(p, q, 1.0)
    lhs = mixed_norm(F.with_values(F.values + G.values), p, q) ** beta
    rhs = mixed_norm(F, p, q) ** beta + mixed_norm(G, p, q) ** beta
    return TriangleCheck(lhs=lhs, rhs=rhs, beta=beta)


# ---------------------------------------------------------------------------
# Variational quotients (p-th power normalization)
# ---------------------------------------------------------------------------

def _quotient(field: SpaceTimeField, u: FreqProfile, p: float, q: float) -> float:
    mass = l2_mass(u)
    if mass <= 0.0:
        raise DomainError("quotient undefined for a zero profile")
    return mixed_norm_power(field, p, q) / mass ** (p / 2.0)


def airy_quotient(u: FreqProfile, exps: ExponentTriple, grid: SpaceTimeGrid) -> float:
    """||cubic-flow extension||_{p,q}^p / ||u||_{L2}^p.

    Any value is a lower-bound witness for the sharp constant, up to
    discretization and window truncation.
    """
    field = propagators.airy_extension(u, exps.gamma, grid)
    return _quotient(field, u, exps.p, exps.q)


def schrodinger_quotient(u: FreqProfile, exps: ExponentTriple,
                         grid: SpaceTimeGrid) -> float:
    """Same quotient for the quadratic flow (no smoothing weight)."""
    field = propagators.schrodinger_extension(u, grid)
    return _quotient(field, u, exps.p, exps.q)


def approx_quotient(u: FreqProfile, exps: ExponentTriple, delta: float,
                    grid: SpaceTimeGrid) -> float:
    """Quotient of the zoomed operator T_delta at the triple's gamma."""
    field = propagators.approx_extension(u, exps.gamma, delta, grid)
    return _quotient(field, u, exps.p, exps.q)


# ---------------------------------------------------------------------------
# Window sizing
# ---------------------------------------------------------------------------

def adaptive_grid(u: FreqProfile, exps: ExponentTriple, objective: str = "airy",
                  t_half: float = 2.0, x_half: float = 8.0,
                  t_density: float = 16.0, x_density: float = 4.0,
                  shell_tol: float = 1e-4, max_doublings: int = 6) -> SpaceTimeGrid:
    """Double the centered window until the outermost shell is negligible.

    The shell contribution is measured on the p-th power of the mixed
    norm; dispersive decay makes the loop terminate for profiles supported
    away from pathological frequencies.  Node counts scale with the window
    so the step density (nodes per unit length) stays fixed.
    """
    if objective not in ("airy", "schrodinger"):
        raise DomainError(f"unknown objective {objective!r}")

    def build(th, xh):
        nt = max(64, int(round(2 * th * t_density)) | 1)
        nx = max(64, int(round(2 * xh * x_density)) | 1)
        return SpaceTimeGrid(-th, th, nt, -xh, xh, nx)

    def power(g):
        if objective == "airy":
            f = propagators.airy_extension(u, exps.gamma, g)
        else:
            f = propagators.schrodinger_extension(u, g)
        return mixed_norm_power(f, exps.p, exps.q)

    grid = build(t_half, x_half)
    val = power(grid)
    for _ in range(max_doublings):
        bigger = build(2 * grid.t_max, 2 * grid.x_max)
        val_big = power(bigger)
        if val_big > 0 and abs(val_big - val) <= shell_tol * val_big:
            return grid
        grid, val = bigger, val_big
    return grid
