"""Singular M-matrices built from nonnegative matrices.

A nonnegative H determines A = rho(H) I - H, a singular M-matrix whose
zero eigenvalue carries the Perron structure of H. This module builds
that object once, with multiplicities and Perron vectors attached, and
provides the comparison-matrix predicates used by the stability
criteria.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .linalg import as_square_matrix, fro, spectral_radius_nonneg, spectrum

#: relative singular-value threshold for the zero eigenspace
DEFAULT_RANK_TOL = 1e-9
#: relative window around zero for counting algebraic multiplicity
DEFAULT_ALG_WINDOW = 1e-7
#: Perron-vector entries in [-1e-12, 0) are treated as rounding noise
PERRON_CLAMP = 1e-12


@dataclass(frozen=True)
class SingularMMatrix:
    """A = rho(H) I - H together with its zero-eigenvalue structure.

    z_right spans ker(A) and z_left spans ker(A^T) when the kernel is
    one-dimensional (geo_mult_zero == 1); both are None otherwise. They
    are unit vectors, sign-fixed so the entry of largest magnitude is
    positive, with tiny negative entries clamped to zero.
    """

    H: np.ndarray = field(repr=False)
    rho: float
    A: np.ndarray = field(repr=False)
    irreducible: bool
    geo_mult_zero: int
    alg_mult_zero: int
    z_left: np.ndarray | None = field(repr=False, default=None)
    z_right: np.ndarray | None = field(repr=False, default=None)

    @property
    def n(self):
        return self.H.shape[0]

    def __repr__(self):
        return (
            f"SingularMMatrix(n={self.n}, rho={self.rho:.12g}, "
            f"irreducible={self.irreducible}, geo={self.geo_mult_zero}, "
            f"alg={self.alg_mult_zero})"
        )


def _normalize_perron(vec):
    v = vec / np.linalg.norm(vec)
    if v[np.argmax(np.abs(v))] < 0.0:
        v = -v
    v[(v < 0.0) & (v >= -PERRON_CLAMP)] = 0.0
    return v / np.linalg.norm(v)


def build(h, rank_tol=DEFAULT_RANK_TOL, alg_window=DEFAULT_ALG_WINDOW):
    """Construct the singular M-matrix record for a nonnegative H."""
    hm = as_square_matrix(h, "H")
    if np.any(hm < 0.0):
        raise DomainError("H must be entrywise nonnegative")
    if rank_tol <= 0.0 or alg_window <= 0.0:
        raise DomainError("tolerances must be positive")
    n = hm.shape[0]
    rho = spectral_radius_nonneg(hm)
    a = rho * np.eye(n) - hm
    # rho carries up to ~5e-12 relative error from its acceptance
    # certificates, so A is singular only up to that resolution; the
    # floor keeps the kernel detectable even when A itself is tiny.
    floor = 1e-11 * (rho + fro(hm))
    u, sv, vt = np.linalg.svd(a)
    rank = int(np.count_nonzero(sv > max(rank_tol * sv[0], floor)))
    geo = n - rank
    z_left = z_right = None
    if geo == 1:
        z_right = _normalize_perron(vt[-1])
        z_left = _normalize_perron(u[:, -1])
    window = max(alg_window * fro(a), floor)
    eigs = spectrum(a).values
    alg = int(np.count_nonzero(np.abs(eigs) <= window))
    return SingularMMatrix(
        H=hm,
        rho=float(rho),
        A=a,
        irreducible=is_irreducible(hm),
        geo_mult_zero=geo,
        alg_mult_zero=alg,
        z_left=z_left,
        z_right=z_right,
    )


def is_irreducible(h):
    """Strong connectivity of the directed graph with edges where h > 0.

    Two reachability sweeps, one on the graph and one on its reverse;
    a 1x1 matrix is irreducible by convention.
    """
    hm = as_square_matrix(h, "H")
    n = hm.shape[0]
    if n == 1:
        return True
    adj = hm > 0.0
    for mat in (adj, adj.T):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            i = stack.pop()
            for j in np.nonzero(mat[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        if not seen.all():
            return False
    return True


def comparison_matrix(b):
    """Entrywise comparison matrix: |diagonal|, negated |off-diagonal|."""
    bm = as_square_matrix(b, "B")
    m = -np.abs(bm)
    np.fill_diagonal(m, np.abs(np.diag(bm)))
    return m


def is_nonsingular_m_matrix(m, tol=1e-10):
    """Z-sign pattern plus diagonal dominance over the spectral radius.

    Writes M = gamma I - P with gamma the largest diagonal entry and
    requires gamma > rho(P) + tol * |M|_F. Off-diagonal entries must not
    exceed tol.
    """
    mm = as_square_matrix(m, "M")
    if tol < 0.0:
        raise DomainError("tol must be nonnegative")
    off = mm - np.diag(np.diag(mm))
    if np.any(off > tol):
        return False
    gamma = float(np.diag(mm).max())
    p = gamma * np.eye(mm.shape[0]) - mm
    np.clip(p, 0.0, None, out=p)
    return bool(gamma > spectral_radius_nonneg(p) + tol * fro(mm))


def is_h_matrix_positive_diagonal(b, tol=1e-10):
    """Whether the comparison matrix of B is a nonsingular M-matrix and
    the diagonal of B itself is positive."""
    bm = as_square_matrix(b, "B")
    if np.any(np.diag(bm) <= 0.0):
        return False
    return is_nonsingular_m_matrix(comparison_matrix(bm), tol)
