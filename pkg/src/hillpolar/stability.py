"""Monodromy matrices, symplectic spectrum reduction, and stability classes.

The full-period fundamental matrix is assembled from the half-period
variational matrix A and the reversing symmetry R as M = R A^-1 R A, with
A^-1 = -J A^T J (symplectic inverse).  The trivial unit pair is deflated
from the degree-6 characteristic polynomial by synthetic division at 1,
leaving the quartic x^4 - s1 x^3 + s2 x^2 - s1 x + 1 whose roots follow
from two quadratics via rho = lambda + 1/lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gamma import Chart, INVOLUTION_SIGNS, gamma_field
from .integrator import IntegratorConfig, integrate_with_variational
from .orbit import OrbitRecord, section_state

__all__ = ["StabilityClass", "MonodromySpectrum", "ReductionError",
           "monodromy", "reduce_spectrum", "classify", "spectrum_of_record",
           "rotating_kepler_degeneracies", "CLASS_TOL"]

CLASS_TOL = 1e-7
_J6 = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])
_R6 = np.diag(INVOLUTION_SIGNS)


class ReductionError(RuntimeError):
    """No trivial eigenvalue pair near 1: orbit not converged or inconsistent."""


class StabilityClass(str, Enum):
    ELLIPTIC_ELLIPTIC = "elliptic_elliptic"
    ELLIPTIC_NEG_HYPERBOLIC = "elliptic_neg_hyperbolic"
    HYPERBOLIC_NEG_HYPERBOLIC = "hyperbolic_neg_hyperbolic"
    POSITIVE_HYPERBOLIC_PAIR = "positive_hyperbolic_pair"
    COMPLEX_HYPERBOLIC = "complex_hyperbolic"
    DEGENERATE = "degenerate"


@dataclass
class MonodromySpectrum:
    """Reduced 4x4 symplectic spectrum of a periodic orbit."""

    s1: float
    s2: float
    s3: float
    det4: float
    eigenvalues: np.ndarray
    stability_class: StabilityClass
    trivial_pair_error: float
    period_doubling: bool
    tol: float = CLASS_TOL


def monodromy(record: OrbitRecord, config=None) -> np.ndarray:
    """Full-period fundamental matrix of the regularized flow at the record.

    Integrated directly over the full period at a tightened tolerance: the
    half-period assembly M = R A^-1 R A (available as
    :func:`assemble_from_half` and used as a cross-check) amplifies the
    variational error by ||A||^2 through the inverse, which costs about two
    digits on strongly hyperbolic orbits.
    """
    ch = Chart(record.chart, record.mu, record.h)
    sp = record.section_point
    x0 = section_state(sp.Q2, sp.P1, sp.Q3)
    cfg = config or IntegratorConfig()
    tight = IntegratorConfig(abs_tol=min(cfg.abs_tol, 3e-16),
                             rel_tol=min(cfg.rel_tol, 3e-16),
                             order_min=cfg.order_min, order_max=cfg.order_max,
                             max_step=cfg.max_step, max_steps=cfg.max_steps)
    _, M7, _ = integrate_with_variational(gamma_field(ch), x0, np.eye(7),
                                          (0.0, record.period_s), tight)
    return M7[:6, :6]


def assemble_from_half(A: np.ndarray) -> np.ndarray:
    """Monodromy from the half-period variational matrix and the involution."""
    A_inv = -_J6 @ A.T @ _J6
    return _R6 @ A_inv @ _R6 @ A


def _deflate_quadratic(coeffs, sigma, pi0):
    """Synthetic division of a monic polynomial by x^2 - sigma x + pi0.

    Dividing by the trivial pair's own quadratic factor (its symmetric
    functions are second-order accurate) instead of (x - 1)^2 keeps the
    pair's Jordan-split noise out of the quotient coefficients.
    """
    n = len(coeffs)
    b = np.zeros(n - 2)
    b[0] = coeffs[0]
    b[1] = coeffs[1] + sigma * b[0]
    for k in range(2, n - 2):
        b[k] = coeffs[k] + sigma * b[k - 1] - pi0 * b[k - 2]
    r1 = coeffs[n - 2] + sigma * b[n - 3] - pi0 * b[n - 4]
    r0 = coeffs[n - 1] - pi0 * b[n - 3]
    return b, r1, r0


def _quartet_from_s(s1, s2, tol):
    """Four multipliers from s1, s2 via rho = lambda + 1/lambda.

    The rho-discriminant gets a noise floor: symplectically collided pairs
    (doubled unit-circle eigenvalues, exact in the rotating Kepler problem)
    produce roundoff of either sign which would otherwise be amplified by
    the square root.
    """
    disc = s1 * s1 - 4.0 * (s2 - 2.0)
    if abs(disc) < 1e-10 * max(1.0, s1 * s1):
        disc = 0.0
    sq = np.sqrt(complex(disc))
    rho = np.array([0.5 * (s1 + sq), 0.5 * (s1 - sq)])
    lam = np.empty(4, dtype=complex)
    for i, r in enumerate(rho):
        d = np.sqrt(r * r - 4.0 + 0j)
        lam[2 * i] = 0.5 * (r + d)
        lam[2 * i + 1] = 0.5 * (r - d)
    return rho, lam


def reduce_spectrum(M: np.ndarray, tol: float = CLASS_TOL,
                    trivial_directions=None) -> MonodromySpectrum:
    """Reduce a 6x6 monodromy matrix to the transverse symplectic quartet.

    With ``trivial_directions=(v, g)`` (flow direction and energy gradient
    at the base point, exact unit right/left eigenvectors of M), the matrix
    is restricted to their Euclidean complement, which realizes the quotient
    by the trivial pair; s1, s2 are then traces of a well-conditioned 4x4
    matrix.  Without them, the trivial pair is deflated from the degree-6
    characteristic polynomial by synthetic division with the pair's own
    quadratic factor.  The slice route is preferred when available: near
    the rotating-Kepler degeneracies six eigenvalues cluster at 1 and any
    eigenvalue-proximity pairing becomes ill-posed.
    """
    M = np.asarray(M, dtype=float)
    if trivial_directions is not None:
        v, g = (np.asarray(w, dtype=float) for w in trivial_directions)
        nv, ng = np.linalg.norm(v), np.linalg.norm(g)
        trivial_err = max(float(np.linalg.norm(M @ v - v)) / nv,
                          float(np.linalg.norm(M.T @ g - g)) / ng)
        if trivial_err > 1e-4:
            raise ReductionError(
                f"trivial directions not preserved (residual {trivial_err:.3e}); "
                "orbit not converged or system not autonomous-consistent")
        full, _ = np.linalg.qr(np.column_stack([v / nv, g / ng, np.eye(6)]),
                               mode="complete")
        B = full[:, 2:]
        Mr = B.T @ M @ B
        s1 = float(np.trace(Mr))
        s2 = 0.5 * (s1 * s1 - float(np.trace(Mr @ Mr)))
        # e3, e4 through the inverse: avoids the cancellation the higher
        # Newton identities suffer when the multipliers are large
        det4 = float(np.linalg.det(Mr))
        s3 = float(np.trace(np.linalg.solve(Mr, np.eye(4)))) * det4
    else:
        lam6 = np.linalg.eigvals(M)
        order = np.argsort(np.abs(lam6 - 1.0))
        pair = lam6[order[:2]]
        pair_dist = float(np.abs(pair[1] - 1.0))
        coeffs = np.poly(M).real
        sigma = float(np.real(pair[0] + pair[1]))
        pi0 = float(np.real(pair[0] * pair[1]))
        quartic, _, _ = _deflate_quadratic(coeffs, sigma, pi0)
        scale = max(1.0, float(np.max(np.abs(coeffs))))
        # chi(1) vanishes whenever a unit pair is present, including at
        # degeneracies where six eigenvalues cluster at 1 and the raw
        # proximity measure splits as the fourth root of roundoff
        unit_residual = abs(float(np.sum(coeffs))) / scale
        if pair_dist > 1e-4 and unit_residual > 1e-9:
            raise ReductionError(
                f"trivial pair off unity by {pair_dist:.3e}; "
                "orbit not converged or system not autonomous-consistent")
        # The unit pair is a Jordan block, so the individual eigenvalues
        # split as sqrt(roundoff); their symmetric functions are clean.
        trivial_err = float(max(abs(pi0 - 1.0), 0.5 * abs(sigma - 2.0)))
        s1 = -float(quartic[1])
        s2 = float(quartic[2])
        s3 = -float(quartic[3])
        det4 = float(quartic[4])
    rho, lam = _quartet_from_s(s1, s2, tol)
    cls, pd = _classify_quartet(s1, s2, lam, tol)
    return MonodromySpectrum(float(s1), float(s2), float(s3), float(det4),
                             lam, cls, trivial_err, pd, tol)


def _classify_quartet(s1, s2, lam, tol):
    pd = bool(np.any(np.abs(lam + 1.0) <= tol))
    if np.any(np.abs(lam - 1.0) <= tol):
        return StabilityClass.DEGENERATE, pd
    disc = s1 * s1 - 4.0 * (s2 - 2.0)
    if abs(disc) < 1e-10 * max(1.0, s1 * s1):
        disc = 0.0
    if disc < -tol:
        return StabilityClass.COMPLEX_HYPERBOLIC, pd
    rho = np.array([0.5 * (s1 + np.sqrt(max(disc, 0.0))),
                    0.5 * (s1 - np.sqrt(max(disc, 0.0)))])
    labels = []
    for r in rho:
        if r > 2.0 + tol:
            labels.append("pos")
        elif r < -2.0 - tol:
            labels.append("neg")
        else:
            labels.append("ell")
    labels.sort()
    if labels == ["ell", "ell"]:
        return StabilityClass.ELLIPTIC_ELLIPTIC, pd
    if labels == ["ell", "neg"]:
        return StabilityClass.ELLIPTIC_NEG_HYPERBOLIC, pd
    if labels == ["neg", "pos"] or labels == ["neg", "neg"]:
        return StabilityClass.HYPERBOLIC_NEG_HYPERBOLIC, pd
    return StabilityClass.POSITIVE_HYPERBOLIC_PAIR, pd


def classify(spectrum: MonodromySpectrum) -> StabilityClass:
    return spectrum.stability_class


def spectrum_of_record(record: OrbitRecord, config=None) -> MonodromySpectrum:
    """Spectrum of the record's orbit, cached on the record.

    Uses the transverse-slice reduction: the record supplies the section
    point, so the exact trivial directions (flow and energy gradient) are
    available.
    """
    if record.spectrum is None:
        from .gamma import gamma_field, gamma_gradient
        ch = Chart(record.chart, record.mu, record.h)
        sp = record.section_point
        x0 = section_state(sp.Q2, sp.P1, sp.Q3)
        v = np.array(gamma_field(ch)(x0)[:6], dtype=float)
        g = gamma_gradient(ch, x0[:6])
        record.spectrum = reduce_spectrum(monodromy(record, config),
                                          trivial_directions=(v, g))
    return record.spectrum


def rotating_kepler_degeneracies(k_max: int) -> list:
    """Energies where the rotating-Kepler polar orbit period is k * 2 pi.

    Rectilinear Kepler gives T = 2 pi a^(3/2) with a = 1/(2|E|), so the
    k-th degeneracy sits at E_k = -(1/2) k^(-2/3).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    return [-0.5 * k ** (-2.0 / 3.0) for k in range(1, k_max + 1)]
