"""Moser stereographic regularization on T*S^n as a constrained system.

The momentum chart plays the role of position: x = p, y = q.  The sphere
T*S^n sits inside T*R^(n+1) as the zero set of

    f1 = |xi|^2/2 - 1/2,   f2 = <xi, eta>,

and Hamiltonian flows on it are computed in the ambient space with the
constraint-preserving multipliers c1, c2.  This path exists to validate the
Belbruno chart: production solves run on the Belbruno side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Dual

__all__ = ["MoserState", "moser_chart_to_sphere", "moser_sphere_to_chart",
           "constraint_values", "constrained_vector_field", "constrained_field",
           "ChartExcludedError", "ConstraintError", "moser_hamiltonian"]


class ChartExcludedError(ValueError):
    """xi0 = 1 (north pole): the momentum chart does not cover this point."""


class ConstraintError(ValueError):
    """State violates the T*S^n constraints beyond tolerance."""


@dataclass
class MoserState:
    """Point of T*R^(n+1) intended to lie on T*S^n."""

    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=float)
        self.eta = np.asarray(self.eta, dtype=float)
        if self.xi.shape != self.eta.shape:
            raise ValueError("xi and eta must have equal length")

    @property
    def x(self):
        return np.concatenate([self.xi, self.eta])


def moser_chart_to_sphere(x, y) -> MoserState:
    """Embed a chart point (x, y) of T*R^n into T*S^n in T*R^(n+1)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = x @ x
    xi0 = (w - 1.0) / (w + 1.0)
    xiv = -2.0 * x / (w + 1.0)
    eta0 = -(x @ y)
    etav = 0.5 * (w + 1.0) * y - (x @ y) * x
    return MoserState(np.concatenate([[xi0], xiv]),
                      np.concatenate([[eta0], etav]))


def moser_sphere_to_chart(state: MoserState):
    """Inverse of :func:`moser_chart_to_sphere`; excluded at the north pole."""
    xi0, xiv = state.xi[0], state.xi[1:]
    eta0, etav = state.eta[0], state.eta[1:]
    if xi0 == 1.0:
        raise ChartExcludedError("chart excluded: xi0 = 1")
    x = -xiv / (1.0 - xi0)
    y = eta0 * xiv + (1.0 - xi0) * etav
    return x, y


def constraint_values(state: MoserState):
    f1 = 0.5 * (state.xi @ state.xi) - 0.5
    f2 = state.xi @ state.eta
    return f1, f2


def moser_hamiltonian(ham, n=3):
    """Pull a chart Hamiltonian ham(q, p) back to the ambient T*R^(n+1).

    Payload-generic: the chart maps are rational, so the composition
    evaluates on series and duals.  The role swap x = p, y = q is applied
    here; the swap and the stereographic sign are both antisymplectic, so
    their composition preserves the form and the plain ambient flow runs in
    physical forward time (verified against the direct flow).
    """

    def hn(z):
        xi0 = z[0]
        xiv = z[1:n + 1]
        eta0 = z[n + 1]
        etav = z[n + 2:]
        inv = 1.0 / (1.0 - xi0)
        x = [-c * inv for c in xiv]
        y = [eta0 * xiv[i] + (1.0 - xi0) * etav[i] for i in range(n)]
        return ham(y, x)

    return hn


def _ambient_gradient(hn, z):
    d = len(z)
    duals = [Dual(z[i], np.eye(d)[i]) for i in range(d)] \
        if isinstance(z, np.ndarray) else None
    if duals is not None:
        return np.asarray(hn(duals).g)
    raise TypeError("ambient gradient expects a float vector")


def constrained_vector_field(hn, state, tol=1e-8, sign=1.0):
    """Hamiltonian field of hn restricted to T*S^n, in ambient coordinates.

    hn takes the concatenated (xi, eta) vector.  The returned field
    X = sign * (X_hn + c1 X_f1 + c2 X_f2) is tangent to the constraint set:
    df1(X) = df2(X) = 0.  Errors when the state is off the constraints.
    """
    if isinstance(state, MoserState):
        z = state.x
    else:
        z = np.asarray(state, dtype=float)
    m = z.shape[0] // 2
    xi, eta = z[:m], z[m:]
    f1 = 0.5 * (xi @ xi) - 0.5
    f2 = xi @ eta
    if abs(f1) > tol or abs(f2) > tol:
        raise ConstraintError(f"constraints violated: f1={f1:.3e}, f2={f2:.3e}")
    grad = _ambient_gradient(hn, z)
    h_xi, h_eta = grad[:m], grad[m:]
    c1 = eta @ h_eta - xi @ h_xi
    c2 = -(xi @ h_eta)
    dxi = h_eta + c2 * xi
    deta = -h_xi - c1 * xi - c2 * eta
    return sign * np.concatenate([dxi, deta])


def constrained_field(hn, n=3, sign=1.0):
    """Payload-generic constrained RHS for the Taylor integrator.

    No constraint check here (the integrator calls it on series payloads);
    use :func:`constrained_vector_field` for checked point evaluation.
    """
    d = 2 * (n + 1)

    def fieldfn(z):
        m = n + 1
        duals = [Dual(z[i], _seed(i, d, z)) for i in range(d)]
        out = hn(duals)
        grad = out.g          # ndarray (float path) or TSeries batch
        h_xi = [_chan(grad, i) for i in range(m)]
        h_eta = [_chan(grad, m + i) for i in range(m)]
        xi = z[:m]
        eta = z[m:]
        c1 = _dot(eta, h_eta) - _dot(xi, h_xi)
        c2 = -_dot(xi, h_eta)
        dxi = [sign * (h_eta[i] + c2 * xi[i]) for i in range(m)]
        deta = [sign * (-h_xi[i] - c1 * xi[i] - c2 * eta[i]) for i in range(m)]
        return dxi + deta

    return fieldfn


def _seed(i, d, z):
    sample = z[0]
    from .jets import TSeries
    if isinstance(sample, TSeries):
        g = np.zeros((sample.n, d))
        g[0, i] = 1.0
        return TSeries(g)
    return np.eye(d)[i]


def _chan(grad, i):
    from .jets import TSeries
    if isinstance(grad, TSeries):
        return TSeries(grad.c[:, i].copy())
    return grad[i]


def _dot(a, b):
    out = a[0] * b[0]
    for i in range(1, len(a)):
        out = out + a[i] * b[i]
    return out
