"""Finite-dimensional Lie algebras given by structure constants.

A Lie algebra on basis (e_1, ..., e_n) is stored as the dense coefficient
tensor c with [e_i, e_j] = sum_k c[i,j,k] e_k.  Everything here is plain
numpy on (n, n, n) arrays; at n = 5 sparsity is not worth any indirection.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "StructureConstants",
    "BasisChange",
    "bracket_apply",
    "jacobi_residual",
    "unimodularity_defect",
    "change_basis",
]

_ANTISYM_TOL = 1e-12


@dataclass(frozen=True)
class StructureConstants:
    """Bracket coefficients c[i,j,k] of [e_i, e_j] on basis vector e_k.

    The tensor must be antisymmetric in (i, j); that is checked at
    construction.  The Jacobi identity is *not* enforced here, so that
    :func:`jacobi_residual` can be used to measure how badly a candidate
    table fails it.
    """

    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError(f"structure tensor must be cubic, got shape {c.shape}")
        asym = np.max(np.abs(c + np.swapaxes(c, 0, 1)))
        if asym > _ANTISYM_TOL:
            raise ValueError(f"structure tensor not antisymmetric (defect {asym:.3e})")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def zero(cls, dim: int) -> "StructureConstants":
        """The abelian algebra: all brackets vanish."""
        return cls(np.zeros((dim, dim, dim)))

    @classmethod
    def from_brackets(
        cls, dim: int, entries: Mapping[tuple[int, int, int], float]
    ) -> "StructureConstants":
        """Build from {(i, j, k): coeff} for i < j; the antisymmetric
        completion c[j,i,k] = -c[i,j,k] is filled in automatically."""
        c = np.zeros((dim, dim, dim))
        for (i, j, k), v in entries.items():
            if i == j:
                raise ValueError("diagonal bracket [e_i, e_i] must vanish")
            c[i, j, k] += v
            c[j, i, k] -= v
        return cls(c)


@dataclass(frozen=True)
class BasisChange:
    """Lower-unitriangular change of basis y_i = sum_k matrix[i,k] x_k."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("basis change must be a square matrix")
        if np.max(np.abs(np.diag(m) - 1.0)) > 1e-14:
            raise ValueError("basis change must have unit diagonal")
        if np.max(np.abs(np.triu(m, 1))) > 0:
            raise ValueError("basis change must be lower triangular")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "BasisChange":
        return cls(np.eye(dim))

    @classmethod
    def from_offdiag(cls, a: Sequence[float]) -> "BasisChange":
        """5x5 unitriangular matrix from the ten subdiagonal entries
        (a1, ..., a10), filled column-major below the diagonal:

            [ 1                ]
            [ a1  1            ]
            [ a2  a5  1        ]
            [ a3  a6  a8  1    ]
            [ a4  a7  a9  a10 1]
        """
        a = list(a)
        if len(a) != 10:
            raise ValueError("expected 10 subdiagonal entries")
        m = np.eye(5)
        slots = [(1, 0), (2, 0), (3, 0), (4, 0), (2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 3)]
        for (i, j), v in zip(slots, a):
            m[i, j] = v
        return cls(m)

    def inverse(self) -> "BasisChange":
        # unitriangular: invert by forward substitution, never a general solve
        inv = solve_triangular(
            self.matrix, np.eye(self.dim), lower=True, unit_diagonal=True
        )
        return BasisChange(inv)


def bracket_apply(sc: StructureConstants, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """[u, v] for coefficient vectors u, v: w_k = sum_{ij} u_i v_j c[i,j,k]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (sc.dim,) or v.shape != (sc.dim,):
        raise ValueError(f"coefficient vectors must have length {sc.dim}")
    return np.einsum("i,j,ijk->k", u, v, sc.c)


def jacobi_residual(sc: StructureConstants) -> float:
    """Max component of the Jacobi cyclic sum over all index triples.

    [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j] has k-component
    T[i,j,l,k] + T[j,l,i,k] + T[l,i,j,k] with T[i,j,l,k] = c[i,j,m] c[m,l,k];
    zero for a genuine Lie algebra.
    """
    t = np.einsum("ijm,mlk->ijlk", sc.c, sc.c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc)))


def unimodularity_defect(sc: StructureConstants) -> float:
    """max_j |tr ad_{e_j}| = max_j |sum_i c[j,i,i]|; zero iff unimodular."""
    traces = np.einsum("jii->j", sc.c)
    return float(np.max(np.abs(traces)))


def change_basis(sc: StructureConstants, t: BasisChange) -> StructureConstants:
    """Structure constants in the basis y_i = t.matrix[i,k] x_k."""
    if t.dim != sc.dim:
        raise ValueError("basis change dimension mismatch")
    m = t.matrix
    inv = t.inverse().matrix
    c_new = np.einsum("pi,qj,ijk,kr->pqr", m, m, sc.c, inv)
    return StructureConstants(c_new)
