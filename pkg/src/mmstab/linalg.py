"""Dense linear-algebra entry points shared by every analysis module.

Eigenvalues come from the in-package Hessenberg + Francis QR kernels;
spectral radii of nonnegative matrices are computed by power iteration
with certified acceptance and fall back to the full spectrum. Rank and
null-space questions are delegated to numpy's SVD, complex shifted
solves to numpy's LU solver; both are treated as infrastructure behind
the residual checks done here.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, EigenConvergenceError, SingularShiftError

#: relative backward-error tolerance for the eigensolver
DEFAULT_EIG_TOL = 1e-10
#: relative threshold below which an imaginary part is snapped to zero
CONJUGATE_SNAP = 1e-9
#: iteration cap and Rayleigh-change tolerance for the power iteration
POWER_MAX_ITER = 10000
POWER_RTOL = 1e-12
#: QR sweep budget per matrix dimension
QR_BUDGET_FACTOR = 30


def as_square_matrix(m, name="matrix"):
    """Validate and convert to a square, finite, real float64 array."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise DomainError(f"{name} must have positive dimension")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(a)


def as_vector(v, n, name="vector"):
    """Validate and convert to a finite real float64 vector of length n."""
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or a.shape[0] != n:
        raise DomainError(f"{name} must be a vector of length {n}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(a)


def fro(m):
    return float(np.linalg.norm(m, "fro"))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset of a real matrix.

    `values` is complex128, sorted lexicographically by (real, imag).
    Nonreal values occur in exact conjugate pairs: imaginary parts below
    CONJUGATE_SNAP * (1 + |value|) are snapped to zero and the surviving
    pair members carry bitwise-negated imaginary parts by construction
    of the 2x2 resolution in the QR kernel.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.complex128))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        inner = ", ".join(format_complex(z) for z in self.values)
        return f"Spectrum([{inner}])"

    @property
    def min_real_part(self):
        return float(self.values.real.min())

    @property
    def max_real_part(self):
        return float(self.values.real.max())

    @property
    def spectral_radius(self):
        return float(np.abs(self.values).max())

    def witness_min_real(self):
        """The sorted-first eigenvalue attaining the minimal real part."""
        i = int(np.argmin(self.values.real))
        return complex(self.values[i])

    def multiset_match(self, other, tol):
        """Greedy multiset comparison within absolute tolerance `tol`."""
        a = list(self.values)
        b = list(np.asarray(other, dtype=np.complex128))
        if len(a) != len(b):
            return False
        for x in a:
            j = min(range(len(b)), key=lambda k: abs(b[k] - x))
            if abs(b[j] - x) > tol:
                return False
            b.pop(j)
        return True


def format_complex(z):
    """Deterministic plain-text rendering used across reports."""
    if z.imag == 0.0:
        return f"{z.real:.12g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.12g}{sign}{abs(z.imag):.12g}i"


def _sort_key(values):
    return np.lexsort((values.imag, values.real))


def spectrum(m, tol=DEFAULT_EIG_TOL):
    """All eigenvalues of a real square matrix.

    `tol` is the backward-error budget relative to the matrix norm; the
    Francis QR iteration is backward stable well inside 1e-10, and
    tolerances below what double precision supports are rejected.
    """
    a = as_square_matrix(m)
    n = a.shape[0]
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    if tol < 50 * n * np.finfo(np.float64).eps:
        raise DomainError(
            f"tol={tol:g} is below the attainable backward error in double precision"
        )
    # Exact power-of-two prescaling: keeps the shift polynomial of the
    # double-shift sweep out of under/overflow for extreme magnitudes.
    amax = float(np.abs(a).max())
    if amax == 0.0:
        return Spectrum(np.zeros(n, dtype=np.complex128))
    expo = int(np.frexp(amax)[1])
    scaled = np.ldexp(a, -expo)
    # Entries this far below the largest one are beneath any admissible
    # backward-error budget; dropping them keeps intermediate products
    # of the shift polynomial away from underflow.
    scaled[np.abs(scaled) < 1e-20] = 0.0
    h = kernels.hessenberg_reduce(scaled)
    wr, wi, status = kernels.hqr_eigvals(h, QR_BUDGET_FACTOR * n)
    if status != 0:
        raise EigenConvergenceError(
            f"QR iteration did not converge within {QR_BUDGET_FACTOR * n} sweeps"
        )
    vals = np.ldexp(wr, expo) + 1j * np.ldexp(wi, expo)
    snap = np.abs(vals.imag) <= CONJUGATE_SNAP * (1.0 + np.abs(vals))
    vals = np.where(snap, vals.real + 0j, vals)
    return Spectrum(vals[_sort_key(vals)])


def spectral_radius_nonneg(h):
    """Spectral radius of an entrywise nonnegative matrix.

    Power iteration from the all-ones vector with certified acceptance;
    when no certificate is reached within the iteration cap the full
    spectrum is computed instead.
    """
    a = as_square_matrix(h, "H")
    if np.any(a < 0.0):
        raise DomainError("matrix must be entrywise nonnegative")
    lam, status = kernels.power_iteration(a, POWER_MAX_ITER, POWER_RTOL)
    if status == 1:
        return float(lam)
    return spectrum(a).spectral_radius


def shifted_solve(a, mu, rhs, tol=1e-10):
    """Solve (mu I - A) x = rhs for complex shift mu.

    The shift must stay away from the spectrum; this is enforced by an
    a-posteriori residual check |(mu I - A) x - rhs| <= tol * (|A| +
    |mu|) * |x|, which fails exactly when the solve was meaningless.
    """
    am = as_square_matrix(a, "A")
    n = am.shape[0]
    b = np.asarray(rhs, dtype=np.complex128)
    if b.shape != (n,):
        raise DomainError(f"rhs must have shape ({n},), got {b.shape}")
    s = complex(mu) * np.eye(n) - am
    scale = fro(am) + abs(mu)
    # A backward-stable solve has a small residual even at a singular
    # shift (the solution blows up instead), so nearness to the spectrum
    # is checked on the smallest singular value of the shifted matrix.
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] <= tol * scale:
        raise SingularShiftError(
            f"shift {format_complex(complex(mu))} is within {tol:g} * scale "
            "of the spectrum",
            condition_estimate=float(sv[0] / max(sv[-1], 1e-300)),
        )
    try:
        x = np.linalg.solve(s, b)
    except np.linalg.LinAlgError:
        raise SingularShiftError(
            f"shift {format_complex(complex(mu))} is an eigenvalue to working precision"
        ) from None
    resid = np.linalg.norm(s @ x - b)
    if not np.all(np.isfinite(x)) or resid > tol * (
        scale * np.linalg.norm(x) + np.linalg.norm(b)
    ):
        raise SingularShiftError(
            f"shift {format_complex(complex(mu))} solve failed the residual check "
            f"({resid:.3e})",
            condition_estimate=float(sv[0] / sv[-1]),
        )
    return x


def determinant(m):
    """Determinant by LU with partial pivoting."""
    a = as_square_matrix(m)
    return float(kernels.lu_det(a.copy()))


def numerical_rank(m, tol=1e-9):
    """Number of singular values above tol times the largest one."""
    a = as_square_matrix(m)
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    sv = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(sv > tol * sv[0]))


def is_normal(m, tol=1e-10):
    """Whether M commutes with its transpose, relative to |M|_F^2."""
    a = as_square_matrix(m)
    defect = fro(a @ a.T - a.T @ a)
    return bool(defect <= tol * max(fro(a) ** 2, 1e-300))
