"""The compactness-threshold constant and the cosine averages behind it.

Two independent routes to the same constant: a closed form in Gamma
functions, and a periodic trapezoid quadrature of the circle average
(1/2pi) int (1 + cos)^{q/2}.  The integrand is smooth and periodic, so
the trapezoid rule converges spectrally; for even q it is a trigonometric
polynomial and already exact at a handful of nodes.

The two-point interaction enters through ``cosine_average``: the circle
average of |e^{i theta} z1 + e^{-i theta} z2|^q collapses to a function of
the moduli alone, maximal when |z1| = |z2|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import DomainError, ExponentTriple

# Node count at which the periodic trapezoid rule is converged to roundoff
# for every exponent q >= 2 used here.
THETA_NODES_DEFAULT = 2048


def _require_critical(exps: ExponentTriple) -> None:
    if not exps.critical:
        raise DomainError(
            f"threshold constant needs a critical triple (gamma = 1/p), "
            f"got gamma={exps.gamma}, p={exps.p}"
        )


def _circle_mean(values_at_nodes: np.ndarray) -> float:
    # Periodic rule: equal weights, endpoint not duplicated.
    return float(np.mean(values_at_nodes))


def _theta_nodes(nodes: int) -> np.ndarray:
    return np.arange(nodes) * (2.0 * math.pi / nodes)


def phi_q(a: float, q: float, nodes: int = THETA_NODES_DEFAULT) -> float:
    """Circle average (1/2pi) int_0^{2pi} (1 + a cos theta)^{q/2} d theta.

    Defined for 0 <= a <= 1 and q >= 2; equals 1 at a = 0 and is maximal
    at a = 1 (Jensen, strict convexity of x -> x^{q/2}).
    """
    if not (0.0 <= a <= 1.0):
        raise DomainError(f"interaction parameter a must lie in [0, 1], got {a}")
    if q < 2.0:
        raise DomainError(f"exponent q must be >= 2, got {q}")
    theta = _theta_nodes(nodes)
    return _circle_mean((1.0 + a * np.cos(theta)) ** (q / 2.0))


def a_p_closed_form(exps: ExponentTriple) -> float:
    """Gamma-function form of the threshold constant.

    2^{p/2} / pi^{p/(2q)} * (Gamma((q+1)/2) / Gamma((q+2)/2))^{p/q},
    evaluated in log space for stability.  Requires a critical triple.
    """
    _require_critical(exps)
    p, q = exps.p, exps.q
    log_val = (0.5 * p * math.log(2.0)
               - p / (2.0 * q) * math.log(math.pi)
               + (p / q) * (gammaln((q + 1.0) / 2.0) - gammaln((q + 2.0) / 2.0)))
    return float(math.exp(log_val))


def a_p_quadrature(exps: ExponentTriple, nodes: int = THETA_NODES_DEFAULT) -> float:
    """Quadrature form: ((1/2pi) int (1 + cos)^{q/2})^{p/q}."""
    _require_critical(exps)
    if nodes < 16:
        raise DomainError(f"need at least 16 quadrature nodes, got {nodes}")
    return phi_q(1.0, exps.q, nodes) ** (exps.p / exps.q)


def cosine_average(z1: complex, z2: complex, q: float,
                   nodes: int = THETA_NODES_DEFAULT) -> float:
    """Circle average of |e^{i theta} z1 + e^{-i theta} z2|^q by quadrature.

    Equals (|z1|^2 + |z2|^2)^{q/2} * phi_q(2|z1||z2| / (|z1|^2 + |z2|^2), q)
    whenever |z1| + |z2| > 0.
    """
    theta = _theta_nodes(nodes)
    vals = np.abs(np.exp(1j * theta) * z1 + np.exp(-1j * theta) * z2) ** q
    return _circle_mean(vals)


@dataclass(frozen=True)
class APValue:
    """Threshold constant by both routes, with their agreement checked."""

    p: float
    q: float
    gamma_form: float
    quad_form: float

    def __post_init__(self):
        if abs(self.gamma_form - self.quad_form) > 1e-8 * abs(self.gamma_form):
            raise DomainError(
                f"threshold-constant routes disagree: {self.gamma_form!r} vs "
                f"{self.quad_form!r}"
            )
        if not self.gamma_form > 1.0:
            raise DomainError(f"threshold constant must exceed 1, got {self.gamma_form}")

    @property
    def agreement(self) -> float:
        return abs(self.gamma_form - self.quad_form) / abs(self.gamma_form)


def compute_ap(exps: ExponentTriple, nodes: int = THETA_NODES_DEFAULT) -> APValue:
    return APValue(p=exps.p, q=exps.q,
                   gamma_form=a_p_closed_form(exps),
                   quad_form=a_p_quadrature(exps, nodes))
