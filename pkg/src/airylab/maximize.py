"""Projected gradient ascent on the unit L2 sphere for the variational
quotients, and the threshold report assembling the evidence for the
strict comparison between the cubic-flow and quadratic-flow constants.

The objective is the log of the p-power quotient; its homogeneity removes
the radial direction, and the log stabilizes the backtracking line
search.  Iterates are renormalized to unit mass after every step, and
optionally projected onto conjugate-symmetric (real-valued) profiles.

The report never claims to decide the existence question: all quotients
are lower-bound witnesses on truncated grids, and turning the comparison
into a theorem would need an upper bound on the quadratic-flow constant,
which is only known if Gaussians maximize it for the given exponent.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bubbles, propagators
from .constants import a_p_closed_form, a_p_quadrature
from .core import (
    DomainError,
    ExponentTriple,
    FreqGrid,
    FreqProfile,
    NonFiniteObjective,
    SpaceTimeGrid,
    gaussian_profile,
    l2_mass,
    random_profile,
    _SQRT_2PI,
)

_OBJECTIVES = ("airy", "schrodinger")

CAVEATS = (
    "All reported quotients are lower-bound witnesses on truncated grids. "
    "A rigorous test of the strict comparison needs an upper bound on the "
    "quadratic-flow constant, available only if Gaussians maximize it for "
    "this exponent; this is known for p = 6 and p = 8 and open otherwise."
)


@dataclass(frozen=True)
class AscentConfig:
    max_iters: int = 300
    step0: float = 0.5
    backtrack: float = 0.5
    stall_tol: float = 1e-7
    stall_window: int = 20
    restarts: int = 3
    real_constraint: bool = False
    objective: str = "airy"
    seed: int = 20250809

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if not (self.step0 > 0.0):
            raise DomainError("initial step must be positive")
        if not (0.0 < self.backtrack < 1.0):
            raise DomainError("backtracking factor must lie in (0, 1)")
        if self.objective not in _OBJECTIVES:
            raise DomainError(f"unknown objective {self.objective!r}")


def _extension(u: FreqProfile, objective: str, exps: ExponentTriple,
               grid: SpaceTimeGrid):
    if objective == "airy":
        return propagators.airy_extension(u, exps.gamma, grid)
    return propagators.schrodinger_extension(u, grid)


def quotient_value(u: FreqProfile, objective: str, exps: ExponentTriple,
                   grid: SpaceTimeGrid) -> float:
    """p-power quotient of the chosen flow; the ascent objective is its log."""
    mass = l2_mass(u)
    if mass <= 0.0:
        raise DomainError("quotient undefined for a zero profile")
    F = _extension(u, objective, exps, grid)
    wx = F.grid.x_weights()
    wt = F.grid.t_weights()
    A = (np.abs(F.values) ** exps.q) @ wx
    val = float(np.dot(wt, A ** (exps.p / exps.q))) / mass ** (exps.p / 2.0)
    if not math.isfinite(val):
        raise NonFiniteObjective(f"quotient evaluated to {val}")
    return val


def quotient_gradient(u: FreqProfile, objective: str, exps: ExponentTriple,
                      grid: SpaceTimeGrid) -> FreqProfile:
    """Gradient of the log-quotient with respect to the sample coordinates.

    Returned as a complex profile g with g_j = dJ/d(Re u_j) + i dJ/d(Im u_j).
    The norm term is assembled by applying the adjoint of the extension to
    the weighted field p w_t A_t^{p/q - 1} w_x |F|^{q-2} F; the mass term
    is p w_j u_j / mass.  Needs p, q > 2 for smoothness away from zero.
    """
    p, q = exps.p, exps.q
    if not (p > 2.0 and q > 2.0):
        raise DomainError("gradient needs p, q > 2")
    mass = l2_mass(u)
    if mass <= 0.0:
        raise DomainError("gradient undefined for a zero profile")

    xi = u.grid.nodes()
    w = u.grid.weights()
    if objective == "airy":
        from .propagators import _abs_power
        mult = _abs_power(xi, exps.gamma)
        omega = xi ** 3
    else:
        mult = np.ones_like(xi)
        omega = 3.0 * xi ** 2
    coef = (w * mult) / _SQRT_2PI

    t = grid.t_nodes()
    x = grid.x_nodes()
    B = np.exp(1j * np.outer(t, omega)) * (coef * u.samples)
    E = np.exp(1j * np.outer(xi, x))
    F = B @ E

    wt = grid.t_weights()
    wx = grid.x_weights()
    absF = np.abs(F)
    A = (absF ** q) @ wx
    norm_p = float(np.dot(wt, A ** (p / q)))
    if norm_p <= 0.0:
        raise DomainError("gradient undefined where the field vanishes")

    outer = np.zeros_like(A)
    pos = A > 0.0
    outer[pos] = A[pos] ** (p / q - 1.0)
    H = (p * wt * outer)[:, None] * (wx[None, :] * absF ** (q - 2.0) * F)
    # Adjoint of F = (B_full * uhat) @ E with B_full = e^{i t omega} coef:
    # g_j = sum_{i,k} H_ik conj(B_full_ij) conj(E_jk).
    P = H @ np.conj(E.T)
    B_full = np.exp(1j * np.outer(t, omega)) * coef
    g_norm = np.sum(np.conj(B_full) * P, axis=0)

    g = g_norm / norm_p - p * (w * u.samples) / mass
    return u.with_samples(g)


def _normalize(samples: np.ndarray, w: np.ndarray) -> np.ndarray:
    m = float(np.dot(w, np.abs(samples) ** 2))
    if m <= 0.0:
        raise DomainError("cannot normalize a zero profile")
    return samples / math.sqrt(m)


def _real_project(samples: np.ndarray) -> np.ndarray:
    return 0.5 * (samples + np.conj(samples[::-1]))


@dataclass(frozen=True)
class AscentResult:
    best_profile: FreqProfile
    history: np.ndarray
    converged: bool
    iterations: int


def ascend(u0: FreqProfile, cfg: AscentConfig, exps: ExponentTriple,
           grid: SpaceTimeGrid) -> AscentResult:
    """Backtracking projected gradient ascent from u0.

    The history of quotients is nondecreasing by construction: a step is
    accepted only if the (projected, renormalized) trial does not lower
    the quotient.  Convergence is declared when the relative quotient gain
    over ``stall_window`` iterations drops below ``stall_tol``, or when
    the line search cannot make progress at the minimum step.
    """
    w = u0.grid.weights()
    samples = _normalize(u0.samples.copy(), w)
    if cfg.real_constraint:
        if not u0.grid.is_symmetric or u0.grid.n % 2 == 0:
            raise DomainError("real constraint needs a symmetric odd grid")
        samples = _normalize(_real_project(samples), w)
    u = u0.with_samples(samples)

    q_cur = quotient_value(u, cfg.objective, exps, grid)
    history = [q_cur]
    step = cfg.step0
    converged = False

    for it in range(cfg.max_iters):
        g = quotient_gradient(u, cfg.objective, exps, grid).samples
        grad_c = 2.0 * w * u.samples
        denom = float(np.real(np.vdot(grad_c, grad_c)))
        g_tan = g - (float(np.real(np.vdot(grad_c, g))) / denom) * grad_c

        accepted = False
        s = step
        for _ in range(40):
            trial = u.samples + s * g_tan
            if cfg.real_constraint:
                trial = _real_project(trial)
            m = float(np.dot(w, np.abs(trial) ** 2))
            if m > 0.0:
                trial = trial / math.sqrt(m)
                u_trial = u.with_samples(trial)
                q_trial = quotient_value(u_trial, cfg.objective, exps, grid)
                if q_trial >= q_cur:
                    accepted = True
                    break
            s *= cfg.backtrack
        if not accepted:
            converged = True  # no ascent direction at minimum step
            break
        moved = q_trial > q_cur
        u, q_cur = u_trial, q_trial
        history.append(q_cur)
        step = min(s * 1.6, 64.0)
        if not moved:
            converged = True
            break
        if len(history) > cfg.stall_window:
            ref = history[-1 - cfg.stall_window]
            if abs(history[-1] - ref) <= cfg.stall_tol * abs(history[-1]):
                converged = True
                break

    return AscentResult(best_profile=u, history=np.asarray(history),
                        converged=converged, iterations=len(history) - 1)


def gaussian_trial_value(exps: ExponentTriple, objective: str, freq_grid: FreqGrid,
                         st_grid: SpaceTimeGrid,
                         widths=(0.7, 0.85, 1.0, 1.15, 1.3, 1.5)) -> float:
    """Best quotient over a small family of centred Gaussian profiles.

    In the continuum every width gives the same quotient (dilation
    symmetry); on a truncated grid the width scan picks the family member
    the window represents best, which is the honest trial value to compare
    optimizer output against.
    """
    return max(quotient_value(gaussian_profile(freq_grid, width=w), objective,
                              exps, st_grid) for w in widths)


# ---------------------------------------------------------------------------
# Threshold report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdReport:
    p: float
    q: float
    A_p_est: float
    S_p_est: float
    S_p_gaussian: float
    a_p_exact: float
    margin: float
    verdict: str
    caveats: str
    A_converged: bool
    S_converged: bool
    candidates: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "p", "q", "A_p_est", "S_p_est", "S_p_gaussian", "a_p_exact",
            "margin", "verdict", "caveats", "A_converged", "S_converged")}
        d["candidates"] = dict(self.candidates)
        return d


def _start_menu(freq_grid: FreqGrid, cfg: AscentConfig, objective: str,
                rng: np.random.Generator) -> list[tuple[str, FreqProfile]]:
    starts = [("gaussian", gaussian_profile(freq_grid, center=0.0, width=1.0))]
    if objective == "airy":
        starts.append(("bump_at_one", gaussian_profile(freq_grid, center=1.0, width=0.5)))
    for r in range(cfg.restarts):
        starts.append((f"random_{r}", random_profile(freq_grid, rng)))
    return starts


def threshold_report(exps: ExponentTriple, cfg: AscentConfig,
                     freq_grid: FreqGrid, st_grid: SpaceTimeGrid,
                     bubble_eps: float = 0.1,
                     bubble_chi_grid: FreqGrid | None = None,
                     bubble_st_grid: SpaceTimeGrid | None = None) -> ThresholdReport:
    """Assemble lower-bound estimates of both constants and compare.

    Both objectives are ascended from a fixed menu of starts (Gaussian,
    a one-sided bump, seeded randoms); the cubic-flow side additionally
    records the two-frequency trial value at ``bubble_eps``, evaluated on
    its own properly resolved grids via the rescaled path (the original
    variables would need windows growing like 1/eps^2).  The verdict is
    ``condition-holds-empirically`` only when the margin is positive, the
    ascents converged, and the quadratic-flow estimate is at least its
    Gaussian trial value; otherwise ``inconclusive``.
    """
    if not exps.critical:
        raise DomainError("threshold report is defined for critical triples")
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    candidates: dict = {}

    def best_over_starts(objective: str) -> tuple[float, bool]:
        sub = AscentConfig(max_iters=cfg.max_iters, step0=cfg.step0,
                           backtrack=cfg.backtrack, stall_tol=cfg.stall_tol,
                           stall_window=cfg.stall_window, restarts=cfg.restarts,
                           real_constraint=cfg.real_constraint,
                           objective=objective, seed=cfg.seed)
        best, conv = -math.inf, False
        for name, u0 in _start_menu(freq_grid, cfg, objective, rng):
            res = ascend(u0, sub, exps, st_grid)
            q_end = float(res.history[-1])
            candidates[f"{objective}:{name}"] = {"quotient": q_end,
                                                 "converged": res.converged,
                                                 "iterations": res.iterations}
            if q_end > best:
                best, conv = q_end, res.converged
        return best, conv

    S_est, S_conv = best_over_starts("schrodinger")
    A_est, A_conv = best_over_starts("airy")

    S_gauss = gaussian_trial_value(exps, "schrodinger", freq_grid, st_grid)
    candidates["schrodinger:gaussian_trial"] = {"quotient": S_gauss, "converged": True}

    chi_grid = bubble_chi_grid or freq_grid
    bub_grid = bubble_st_grid or st_grid
    chi = gaussian_profile(chi_grid, center=0.0, width=1.0)
    bubble_val = bubbles.bubble_quotient_substituted(chi, exps, bubble_eps,
                                                     bub_grid, two=True)
    candidates["airy:two_bubble_trial"] = {"quotient": bubble_val, "eps": bubble_eps,
                                           "converged": True}
    if bubble_val > A_est:
        A_est = bubble_val

    ap = a_p_closed_form(exps)
    candidates["a_p_quadrature"] = {"value": a_p_quadrature(exps)}
    margin = A_est - ap * S_est
    ok = (margin > 0.0 and A_conv and S_conv and S_est >= S_gauss * (1.0 - 1e-9))
    return ThresholdReport(
        p=exps.p, q=exps.q, A_p_est=A_est, S_p_est=S_est, S_p_gaussian=S_gauss,
        a_p_exact=ap, margin=margin,
        verdict="condition-holds-empirically" if ok else "inconclusive",
        caveats=CAVEATS, A_converged=A_conv, S_converged=S_conv,
        candidates=candidates,
    )


def write_history_csv(path: str | Path, history: np.ndarray) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("iteration,quotient\n")
        for i, qv in enumerate(history):
            fh.write(f"{i},{float(qv)!r}\n")
