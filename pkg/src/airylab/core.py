"""Domain types shared by the whole laboratory.

The optimization variable throughout is a frequency profile: complex
samples of u-hat on a uniform grid, with trapezoid quadrature weights so
that ``l2_mass`` approximates the squared L2 norm of u (unitary Fourier
convention).  Space-time fields carry the output of the extension
operators on a rectangular (t, x) grid together with its quadrature rule.

All types are immutable after construction and safe to share across
threads.  Sums are evaluated in a fixed order (numpy reductions), so
repeated runs are bit-reproducible.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

# Default relative tolerance for algebraic identities (exact in the
# continuum, roundoff-limited on the grid).
REL_TOL_ALGEBRA = 1e-10

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class GridMismatch(ValueError):
    """Two fields or profiles live on different grids."""


class GridAsymmetry(DomainError):
    """Operation requires a grid symmetric about zero."""


class WindowOverflow(DomainError):
    """Requested support does not fit inside the representable window."""


class SupportOverlap(DomainError):
    """Rescaled supports that must be disjoint are not."""


class SupportViolation(DomainError):
    """Profile support violates an operator's admissibility condition."""

    def __init__(self, message: str, nodes: np.ndarray | None = None):
        super().__init__(message)
        self.nodes = np.asarray(nodes) if nodes is not None else None


class PreconditionViolation(DomainError):
    """A stated precondition of a check does not hold."""


class EmptyFamily(DomainError):
    """An interval family argument is empty."""


class SingularPoint(DomainError):
    """Evaluation requested exactly at a singularity."""


class NonFiniteObjective(RuntimeError):
    """An optimization objective evaluated to NaN or infinity."""


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentTriple:
    """Validated (gamma, p, q) satisfying -gamma + 3/p + 1/q = 1/2.

    ``gamma`` is the smoothing order of the |D_x|^gamma weight, ``p`` the
    time exponent and ``q`` the space exponent.  The triple is *critical*
    when gamma = 1/p, in which case 2/p + 1/q = 1/2.
    """

    gamma: float
    p: float
    q: float

    def __post_init__(self):
        if not (4.0 < self.p < math.inf):
            raise DomainError(f"time exponent p must lie in (4, inf), got {self.p}")
        if not (2.0 <= self.q < math.inf):
            raise DomainError(f"space exponent q must lie in [2, inf), got {self.q}")
        if not (-0.5 < self.gamma <= 1.0 / self.p + 1e-12):
            raise DomainError(
                f"smoothing order gamma must lie in (-1/2, 1/p], got {self.gamma}"
            )
        residual = -self.gamma + 3.0 / self.p + 1.0 / self.q - 0.5
        if abs(residual) > 1e-12:
            raise DomainError(
                f"scaling relation -gamma + 3/p + 1/q = 1/2 violated by {residual:.3e}"
            )

    @property
    def critical(self) -> bool:
        return abs(self.gamma - 1.0 / self.p) <= 1e-12


def make_exponents(p: float, gamma: float) -> ExponentTriple:
    """Solve the space exponent q from the scaling relation.

    Raises DomainError if p <= 4, gamma is out of range, or the resulting
    q falls outside [2, inf).  The endpoint q = inf (for example gamma = 0
    with p = 6) is rejected here; the sup-norm variant is handled by the
    dedicated experiment drivers.
    """
    if not (p > 4.0):
        raise DomainError(f"p must exceed 4, got {p}")
    if not (-0.5 < gamma <= 1.0 / p + 1e-12):
        raise DomainError(f"gamma must lie in (-1/2, 1/p], got {gamma}")
    inv_q = 0.5 + gamma - 3.0 / p
    if inv_q <= 0.0:
        raise DomainError(
            f"exponents (p={p}, gamma={gamma}) give 1/q = {inv_q:.3e} <= 0 (q = inf endpoint)"
        )
    q = 1.0 / inv_q
    if q < 2.0:
        raise DomainError(f"resulting q = {q} < 2")
    return ExponentTriple(gamma=gamma, p=p, q=q)


# ---------------------------------------------------------------------------
# Quadrature weights
# ---------------------------------------------------------------------------

def trapezoid_weights(n: int, step: float) -> np.ndarray:
    if n < 2:
        raise DomainError("trapezoid rule needs at least 2 nodes")
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


def simpson_weights(n: int, step: float) -> np.ndarray:
    if n < 3 or n % 2 == 0:
        raise DomainError("Simpson rule needs an odd node count >= 3")
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (step / 3.0)


# ---------------------------------------------------------------------------
# Frequency grid and profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreqGrid:
    """Uniform frequency window [xi_min, xi_max] with n sample nodes."""

    xi_min: float
    xi_max: float
    n: int

    def __post_init__(self):
        if not (self.xi_min < self.xi_max):
            raise DomainError("frequency window is empty")
        if self.n < 2:
            raise DomainError("frequency grid needs n >= 2")

    @property
    def step(self) -> float:
        return (self.xi_max - self.xi_min) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.n)

    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.n, self.step)

    @property
    def is_symmetric(self) -> bool:
        span = self.xi_max - self.xi_min
        return abs(self.xi_min + self.xi_max) <= 1e-12 * span


def symmetric_grid(xi_max: float, n: int) -> FreqGrid:
    """Grid on [-xi_max, xi_max]; odd n places a node exactly at 0."""
    return FreqGrid(-xi_max, xi_max, n)


@dataclass(frozen=True)
class FreqProfile:
    """Complex samples of u-hat at the nodes of a FreqGrid."""

    grid: FreqGrid
    samples: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if arr.shape != (self.grid.n,):
            raise DomainError(
                f"expected {self.grid.n} samples, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise DomainError("profile samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def with_samples(self, samples: np.ndarray) -> "FreqProfile":
        return FreqProfile(self.grid, samples)

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        """True iff u-hat(-xi) == conj(u-hat(xi)) at all mirrored nodes.

        Requires a symmetric grid; mirrored nodes are index-reversed.
        """
        if not self.grid.is_symmetric:
            return False
        scale = float(np.max(np.abs(self.samples))) or 1.0
        dev = np.max(np.abs(self.samples[::-1] - np.conj(self.samples)))
        return bool(dev <= tol * scale)


def l2_mass(u: FreqProfile) -> float:
    """Trapezoid approximation of the integral of |u-hat|^2.

    Equals the squared L2 norm of u by Plancherel (unitary convention).
    """
    return float(np.dot(u.grid.weights(), np.abs(u.samples) ** 2))


# ---------------------------------------------------------------------------
# Trial profiles
# ---------------------------------------------------------------------------

def gaussian_profile(grid: FreqGrid, center: float = 0.0, width: float = 1.0,
                     phase: float = 0.0) -> FreqProfile:
    """u-hat(xi) = exp(-((xi-center)/width)^2 / 2) with a constant phase."""
    xi = grid.nodes()
    vals = np.exp(-0.5 * ((xi - center) / width) ** 2) * np.exp(1j * phase)
    return FreqProfile(grid, vals)


def bump_profile(grid: FreqGrid, lo: float, hi: float) -> FreqProfile:
    """Smooth compactly supported bump on (lo, hi), zero outside."""
    if not (lo < hi):
        raise DomainError("bump support is empty")
    xi = grid.nodes()
    s = 2.0 * (xi - lo) / (hi - lo) - 1.0
    vals = np.zeros(grid.n)
    inside = np.abs(s) < 1.0
    vals[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return FreqProfile(grid, vals * math.e)


def random_profile(grid: FreqGrid, rng: np.random.Generator,
                   center: float = 0.0, width: float = 1.5) -> FreqProfile:
    """Seeded complex profile: low-order random polynomial under a Gaussian
    envelope, so the samples are smooth on the grid scale."""
    xi = grid.nodes()
    s = (xi - center) / width
    coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    poly = np.polyval(coeffs, s)
    return FreqProfile(grid, poly * np.exp(-0.5 * s ** 2))


# ---------------------------------------------------------------------------
# Space-time grid and fields
# ---------------------------------------------------------------------------

_RULES = ("trapezoid", "simpson")


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Rectangular (t, x) grid with a per-axis quadrature rule."""

    t_min: float
    t_max: float
    nt: int
    x_min: float
    x_max: float
    nx: int
    rule: str = "trapezoid"

    def __post_init__(self):
        if not (self.t_min < self.t_max and self.x_min < self.x_max):
            raise DomainError("space-time window is empty")
        if self.nt < 2 or self.nx < 2:
            raise DomainError("space-time grid needs nt, nx >= 2")
        if self.rule not in _RULES:
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.rule == "simpson" and (self.nt % 2 == 0 or self.nx % 2 == 0):
            raise DomainError("Simpson rule requires odd nt and nx")

    @property
    def t_step(self) -> float:
        return (self.t_max - self.t_min) / (self.nt - 1)

    @property
    def x_step(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    def t_nodes(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nt)

    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def _weights(self, n: int, step: float) -> np.ndarray:
        if self.rule == "simpson":
            return simpson_weights(n, step)
        return trapezoid_weights(n, step)

    def t_weights(self) -> np.ndarray:
        return self._weights(self.nt, self.t_step)

    def x_weights(self) -> np.ndarray:
        return self._weights(self.nx, self.x_step)


def centered_grid(t_half: float, nt: int, x_half: float, nx: int,
                  rule: str = "trapezoid") -> SpaceTimeGrid:
    return SpaceTimeGrid(-t_half, t_half, nt, -x_half, x_half, nx, rule)


@dataclass(frozen=True)
class SpaceTimeField:
    """Complex samples of an extension-operator output on a SpaceTimeGrid."""

    grid: SpaceTimeGrid
    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.complex128)
        if arr.shape != (self.grid.nt, self.grid.nx):
            raise DomainError(
                f"expected values of shape ({self.grid.nt}, {self.grid.nx}), "
                f"got {arr.shape}"
            )
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise DomainError("field values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def with_values(self, values: np.ndarray) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, values)


def same_grid(a: SpaceTimeField, b: SpaceTimeField) -> None:
    if a.grid != b.grid:
        raise GridMismatch("fields live on different space-time grids")


# ---------------------------------------------------------------------------
# CSV round-trip with JSON metadata sidecar
# ---------------------------------------------------------------------------

def _sidecar(path: Path) -> Path:
    return path.with_suffix(path.suffix + ".json")


def write_profile_csv(path: str | Path, u: FreqProfile) -> None:
    """Write ``xi,re,im`` rows (strictly increasing xi) plus a JSON sidecar
    carrying the grid parameters."""
    path = Path(path)
    xi = u.grid.nodes()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "re", "im"])
        for x, z in zip(xi, u.samples):
            w.writerow([repr(float(x)), repr(float(z.real)), repr(float(z.imag))])
    meta = {"kind": "freq_profile", "xi_min": u.grid.xi_min,
            "xi_max": u.grid.xi_max, "n": u.grid.n}
    _sidecar(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def read_profile_csv(path: str | Path) -> FreqProfile:
    path = Path(path)
    xi, re, im = [], [], []
    with path.open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header[:3] != ["xi", "re", "im"]:
            raise DomainError(f"unexpected profile CSV header {header}")
        for row in r:
            xi.append(float(row[0])); re.append(float(row[1])); im.append(float(row[2]))
    xi = np.asarray(xi)
    if len(xi) < 2 or not np.all(np.diff(xi) > 0):
        raise DomainError("profile CSV must list strictly increasing xi")
    steps = np.diff(xi)
    if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
        raise DomainError("profile CSV nodes are not uniformly spaced")
    grid = FreqGrid(float(xi[0]), float(xi[-1]), len(xi))
    return FreqProfile(grid, np.asarray(re) + 1j * np.asarray(im))


def write_field_csv(path: str | Path, F: SpaceTimeField) -> None:
    """Write ``t,x,re,im`` rows, t-major, plus a JSON sidecar."""
    path = Path(path)
    t = F.grid.t_nodes()
    x = F.grid.x_nodes()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "re", "im"])
        for i, ti in enumerate(t):
            for k, xk in enumerate(x):
                z = F.values[i, k]
                w.writerow([repr(float(ti)), repr(float(xk)),
                            repr(float(z.real)), repr(float(z.imag))])
    meta = {"kind": "spacetime_field", "t_min": F.grid.t_min, "t_max": F.grid.t_max,
            "nt": F.grid.nt, "x_min": F.grid.x_min, "x_max": F.grid.x_max,
            "nx": F.grid.nx, "rule": F.grid.rule}
    _sidecar(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
