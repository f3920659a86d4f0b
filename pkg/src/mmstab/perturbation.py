"""Rank-one perturbations B = A + v w^T of a singular M-matrix.

The assembled system carries the quantities every later analysis needs:
the projection test on the Perron pair (nonzero-projection condition),
and for symmetric bases the alignment ratio alpha and the smallest
nonzero eigenvalue tau that drive the imaginary-crossing bounds.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotGeometricallySimple, SingularShiftError
from .linalg import as_vector, fro, shifted_solve, spectrum
from .mmatrix import DEFAULT_ALG_WINDOW, SingularMMatrix

#: per-factor relative tolerance for the nonzero-projection condition
NZP_RTOL = 1e-9
#: relative symmetry defect below which the base counts as symmetric
SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class RankOneSystem:
    """A singular M-matrix base plus one rank-one update.

    B is materialized as base.A + outer(v, w), so B - A recovers the
    update exactly in the sense of bitwise reproducibility. `nzp` is the
    nonzero-projection flag (z_l . v)(w . z_r) != 0, None when the base
    has no one-dimensional kernel. `alpha` and `tau` are populated only
    for a symmetric base with simple kernel: alpha the rotation-free
    alignment |<v,z><w,z>| / (|v||w||z|^2), tau the smallest nonzero
    eigenvalue of A.
    """

    base: SingularMMatrix
    v: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    nzp: bool | None
    symmetric_base: bool
    alpha: float | None
    tau: float | None

    @property
    def n(self):
        return self.base.n

    def __repr__(self):
        return (
            f"RankOneSystem(n={self.n}, nzp={self.nzp}, "
            f"symmetric_base={self.symmetric_base}, alpha={self.alpha}, "
            f"tau={self.tau})"
        )


def assemble(base, v, w):
    """Build the rank-one perturbed system for a prepared base."""
    if not isinstance(base, SingularMMatrix):
        raise DomainError("base must be a SingularMMatrix")
    n = base.n
    vv = as_vector(v, n, "v")
    ww = as_vector(w, n, "w")
    b = base.A + np.outer(vv, ww)

    nzp_flag = None
    if base.geo_mult_zero == 1:
        nzp_flag = _nzp(vv, ww, base.z_left, base.z_right)

    a = base.A
    sym = fro(a - a.T) <= SYMMETRY_RTOL * max(fro(a), 1e-300)
    alpha = tau = None
    if sym and base.geo_mult_zero == 1:
        alpha = _alignment(vv, ww, base.z_right)
        tau = _smallest_nonzero_eigenvalue(a)
    return RankOneSystem(
        base=base,
        v=vv,
        w=ww,
        B=b,
        nzp=nzp_flag,
        symmetric_base=bool(sym),
        alpha=alpha,
        tau=tau,
    )


def _nzp(v, w, z_left, z_right):
    lhs = abs(float(z_left @ v))
    rhs = abs(float(w @ z_right))
    tol_l = NZP_RTOL * np.linalg.norm(v) * np.linalg.norm(z_left)
    tol_r = NZP_RTOL * np.linalg.norm(w) * np.linalg.norm(z_right)
    return bool(lhs > tol_l and rhs > tol_r)


def _alignment(v, w, z):
    nv = np.linalg.norm(v)
    nw = np.linalg.norm(w)
    nz2 = float(z @ z)
    if nv == 0.0 or nw == 0.0:
        return None
    a = abs(float(v @ z) * float(w @ z)) / (nv * nw * nz2)
    return float(min(a, 1.0))


def _smallest_nonzero_eigenvalue(a):
    window = max(DEFAULT_ALG_WINDOW * fro(a), 1e-300)
    nonzero = [z.real for z in spectrum(a) if abs(z) > window]
    if not nonzero:
        return None
    return float(min(nonzero))


def nzp(system):
    """The nonzero-projection condition of an assembled system.

    Requires a one-dimensional kernel; with a larger kernel there is no
    distinguished Perron pair to project onto.
    """
    if system.base.geo_mult_zero != 1:
        raise NotGeometricallySimple(
            "the projection condition needs a one-dimensional kernel, "
            f"got geometric multiplicity {system.base.geo_mult_zero}"
        )
    return system.nzp


def secular_residual(system, mu):
    """w^T (mu I - A)^{-1} v - 1 at a complex shift mu.

    Zeros of this function away from the spectrum of A are exactly the
    eigenvalues of B that are not eigenvalues of A.
    """
    x = shifted_solve(system.base.A, mu, system.v.astype(np.complex128))
    return complex(system.w @ x - 1.0)


def sherman_morrison_resolvent(system, mu, tol=1e-8):
    """Resolvent (mu I - B)^{-1} assembled from the base resolvent.

    R_B = R_A + R_A v w^T R_A / (1 - w^T R_A v) with R_A = (mu I-A)^{-1}.
    The shift must avoid the spectra of both A (through the base
    resolvent) and B (through the secular denominator).
    """
    a = system.base.A
    n = system.n
    s = complex(mu) * np.eye(n) - a
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] <= 1e-10 * (fro(a) + abs(mu)):
        raise SingularShiftError(
            f"shift {mu} is too close to the base spectrum",
            condition_estimate=float(sv[0] / max(sv[-1], 1e-300)),
        )
    r = np.linalg.inv(s)
    rv = r @ system.v
    wr = system.w @ r
    denom = 1.0 - complex(system.w @ rv)
    if abs(denom) <= tol:
        raise SingularShiftError(
            f"shift {mu} is an eigenvalue of the perturbed matrix within {tol:g}"
        )
    return r + np.outer(rv, wr) / denom
