"""Ricci curvature of diagonal left-invariant metrics.

For a metric g = A th1^2 + ... + E th5^2 the frame Yhat_i = Y_i / sqrt(g_i)
is orthonormal and the Ricci tensor of the (unimodular) group is the
quadratic form

    Ric(W, W) = -1/2 sum_i |[W, Yhat_i]|^2
                -1/2 sum_i <[W, [W, Yhat_i]], Yhat_i>
                +1/2 sum_{i<j} <[Yhat_i, Yhat_j], W>^2 ,

evaluated on the rescaled structure constants.  The flow of the diagonal
coefficients is dg_i/dt = -2 g_i Ric(Yhat_i, Yhat_i), which is consistent
only while the off-diagonal components vanish; ``flow_rhs`` enforces that.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .liecore import StructureConstants

__all__ = [
    "DiagonalMetric",
    "RicciForm",
    "DiagonalityViolation",
    "NonpositiveMetricError",
    "unit_frame_brackets",
    "ricci_quadratic",
    "ricci_tensor",
    "flow_rhs",
    "DEFAULT_OFFDIAG_TOL",
]

DEFAULT_OFFDIAG_TOL = 1e-10


class NonpositiveMetricError(ValueError):
    """A diagonal metric coefficient is zero or negative."""


class DiagonalityViolation(RuntimeError):
    """Off-diagonal Ricci components exceed tolerance: the diagonal ansatz
    is inconsistent (the bracket parameters are unconstrained)."""


@dataclass(frozen=True)
class DiagonalMetric:
    """Coefficients (A, B, C, D, E) of a diagonal left-invariant metric."""

    coeffs: tuple[float, float, float, float, float]

    def __post_init__(self):
        coeffs = tuple(float(x) for x in self.coeffs)
        if len(coeffs) != 5:
            raise ValueError("expected five metric coefficients")
        if any(not np.isfinite(x) or x <= 0.0 for x in coeffs):
            raise NonpositiveMetricError(f"metric coefficients must be positive: {coeffs}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    @classmethod
    def unit(cls) -> "DiagonalMetric":
        return cls((1.0, 1.0, 1.0, 1.0, 1.0))


@dataclass(frozen=True)
class RicciForm:
    """Ricci components Ric(Yhat_i, Yhat_j) in the orthonormal frame."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (5, 5) or not np.allclose(m, m.T, atol=0.0):
            raise ValueError("Ricci form must be a symmetric 5x5 matrix")
        if not np.all(np.isfinite(m)):
            raise ValueError("Ricci form entries must be finite")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    @property
    def max_offdiag(self) -> float:
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.max(np.abs(off)))


def _unit_frame_tensor(c: np.ndarray, g: np.ndarray) -> np.ndarray:
    """chat[i,j,k] = c[i,j,k] * sqrt(g_k / (g_i g_j))."""
    s = np.sqrt(g)
    return c * (s[None, None, :] / (s[:, None, None] * s[None, :, None]))


def unit_frame_brackets(sc: StructureConstants, g: DiagonalMetric) -> StructureConstants:
    """Structure constants of the orthonormal frame Yhat_i = Y_i/sqrt(g_i)."""
    return StructureConstants(_unit_frame_tensor(sc.c, g.array))


def ricci_quadratic(sc: StructureConstants, g: DiagonalMetric, w: np.ndarray) -> float:
    """Ric(W, W) for W = sum_i w_i Yhat_i, by the three-term formula.

    This is the literal sum-by-sum evaluation; it serves as the independent
    oracle for the tensor-contraction path in :func:`ricci_tensor`.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (sc.dim,):
        raise ValueError(f"frame vector must have length {sc.dim}")
    chat = _unit_frame_tensor(sc.c, g.array)
    n = sc.dim

    # m[i, :] = [W, Yhat_i]
    m = np.einsum("j,jik->ik", w, chat)
    term1 = -0.5 * float(np.sum(m * m))

    term2 = 0.0
    for i in range(n):
        wwi = m[i] @ m  # [W, [W, Yhat_i]]
        term2 += wwi[i]
    term2 *= -0.5

    term3 = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            term3 += float(chat[i, j] @ w) ** 2
    term3 *= 0.5

    return term1 + term2 + term3


def _ricci_matrix(chat: np.ndarray) -> np.ndarray:
    """Symmetric matrix R with w.R.w = Ric(W, W); three contractions.

    Polarizing the quadratic form gives, term by term,
      term1 -> -1/2 chat[p,i,k] chat[q,i,k]
      term2 -> -1/4 (S + S^T),  S[p,q] = chat[q,i,k] chat[p,k,i]
      term3 -> +1/4 chat[i,j,p] chat[i,j,q]
    """
    b1 = -0.5 * np.einsum("pik,qik->pq", chat, chat)
    s = np.einsum("qik,pki->pq", chat, chat)
    b2 = -0.25 * (s + s.T)
    b3 = 0.25 * np.einsum("ijp,ijq->pq", chat, chat)
    r = b1 + b2 + b3
    return 0.5 * (r + r.T)


def ricci_tensor(sc: StructureConstants, g: DiagonalMetric) -> RicciForm:
    """Full Ricci form in the orthonormal frame.

    Diagonal entries equal ricci_quadratic(Yhat_i); off-diagonal entries are
    the polarization (Q(Yhat_i+Yhat_j) - Q(Yhat_i) - Q(Yhat_j))/2.
    """
    chat = _unit_frame_tensor(sc.c, g.array)
    return RicciForm(_ricci_matrix(chat))


def _flow_rhs_array(c: np.ndarray, g: np.ndarray, offdiag_tol: float) -> tuple[np.ndarray, float]:
    """(dg/dt, max off-diagonal Ricci) for raw arrays; hot path of the flow."""
    chat = _unit_frame_tensor(c, g)
    r = _ricci_matrix(chat)
    diag = np.einsum("ii->i", r)
    off = float(np.max(np.abs(r - np.diag(diag))))
    if off > offdiag_tol:
        raise DiagonalityViolation(
            f"off-diagonal Ricci component {off:.3e} exceeds tolerance {offdiag_tol:.1e}"
        )
    return -2.0 * g * diag, off


def flow_rhs(
    sc: StructureConstants,
    g: DiagonalMetric,
    offdiag_tol: float = DEFAULT_OFFDIAG_TOL,
) -> np.ndarray:
    """Right-hand side (dA/dt, ..., dE/dt) = -2 g_i Ric(Yhat_i, Yhat_i).

    Raises DiagonalityViolation if any off-diagonal Ricci component exceeds
    ``offdiag_tol``, which signals that a diagonal metric would not stay
    diagonal under the flow.
    """
    rhs, _ = _flow_rhs_array(sc.c, g.array, offdiag_tol)
    return rhs
