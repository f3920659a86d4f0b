"""Exhaustive principal-minor computation and P/P0-matrix classification.

A rank-one nonnegative update of a singular M-matrix is always a
P0-matrix, and is a P-matrix when the base is irreducible and the
update couples to the kernel (nonzero projections).  Both statements
are checked here by brute force: every principal submatrix gets its
own LU factorization.  At the guarded maximum n = 22 that is ~4e6
determinants, which is affordable and leaves nothing to trust beyond
the LU itself.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisNotMet, SizeError, TheoryViolationError
from .kernels import batch_minors
from .linalg import as_square_matrix, as_vector, fro
from .mmatrix import SingularMMatrix
from .perturbation import assemble

# Enumeration guard: 2^n - 1 subsets, each an O(k^3) LU.
MAX_MINOR_DIM = 22

# Relative scale of the sign tolerance; see minor_tolerance.
MINOR_TOL_SCALE = 1e-10


class Classification(str, enum.Enum):
    """Sign class of the full principal-minor list."""

    P = "P"
    P0_NOT_P = "P0_not_P"
    NOT_P0 = "NotP0"


@dataclass(frozen=True, repr=False)
class MinorReport:
    """Every principal minor of a square matrix, with its sign class.

    ``minors`` maps each nonempty index subset (a sorted tuple of
    0-based row/column indices) to the determinant of the corresponding
    principal submatrix.  Iteration order is by cardinality and then
    lexicographic, so reports are reproducible and the numerically
    best-conditioned (smallest) minors come first.
    """

    n: int
    minors: dict[tuple[int, ...], float]
    min_minor: float
    classification: Classification
    tol: float

    def minor(self, subset) -> float:
        """Determinant of the principal submatrix on ``subset``."""
        return self.minors[tuple(sorted(int(i) for i in subset))]

    def worst_subset(self) -> tuple[int, ...]:
        """Subset attaining the minimum minor (first in report order)."""
        for beta, value in self.minors.items():
            if value == self.min_minor:
                return beta
        raise AssertionError("min_minor not present in minors map")

    def __repr__(self) -> str:
        return (
            f"MinorReport(n={self.n}, subsets={len(self.minors)}, "
            f"min_minor={self.min_minor:.12g}, "
            f"classification={self.classification.value}, tol={self.tol:.3e})"
        )


def minor_tolerance(m: np.ndarray) -> float:
    """Sign tolerance for classifying minors of ``m``.

    Determinant magnitudes grow like ||M||^k with the subset size (by
    Hadamard's inequality), so a single absolute tolerance misreads
    either the 1x1 minors or the full determinant.  The tolerance is
    pinned to the full dimension's scale, 1e-10 * max(1, ||M||_F^n).
    """
    mm = as_square_matrix(m, "m")
    n = mm.shape[0]
    return MINOR_TOL_SCALE * max(1.0, fro(mm) ** n)


def _subsets(n: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for k in range(1, n + 1):
        out.extend(itertools.combinations(range(n), k))
    return out


def principal_minors(m, tol: float | None = None) -> MinorReport:
    """Compute all 2^n - 1 principal minors of ``m`` and classify.

    Classification uses ``tol`` (defaulting to ``minor_tolerance``):
    P when every minor exceeds tol, P0_not_P when the minimum lies in
    [-tol, tol], NotP0 when some minor falls below -tol.
    """
    mm = as_square_matrix(m, "m")
    n = mm.shape[0]
    if n > MAX_MINOR_DIM:
        raise SizeError(
            f"principal-minor enumeration is limited to n <= {MAX_MINOR_DIM}, got n = {n}"
        )
    if tol is None:
        tol = minor_tolerance(mm)
    elif tol < 0:
        raise DomainError("tol must be nonnegative")

    subsets = _subsets(n)
    lengths = np.fromiter((len(b) for b in subsets), dtype=np.int64, count=len(subsets))
    offsets = np.zeros(len(subsets) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    idx = np.fromiter(
        (i for beta in subsets for i in beta), dtype=np.int64, count=int(offsets[-1])
    )
    values = batch_minors(mm, idx, offsets)

    minors = {beta: float(values[s]) for s, beta in enumerate(subsets)}
    min_minor = float(values.min())
    if min_minor > tol:
        classification = Classification.P
    elif min_minor >= -tol:
        classification = Classification.P0_NOT_P
    else:
        classification = Classification.NOT_P0
    return MinorReport(
        n=n,
        minors=minors,
        min_minor=min_minor,
        classification=classification,
        tol=float(tol),
    )


def _checked_update(base: SingularMMatrix, v, w) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(base, SingularMMatrix):
        raise DomainError("base must be a SingularMMatrix")
    vv = as_vector(v, base.n, "v")
    ww = as_vector(w, base.n, "w")
    if np.any(vv < 0.0) or np.any(ww < 0.0):
        raise HypothesisNotMet(
            "nonnegative v and w are required; the minor statements say "
            "nothing about signed updates"
        )
    return vv, ww


def verify_p0_theorem(base: SingularMMatrix, v, w) -> bool:
    """Check that A + v w^T is a P0-matrix for nonnegative v, w.

    Returns True when every principal minor is nonnegative up to the
    sign tolerance.  A minor below -tol contradicts a proved statement
    and is raised as a theory violation rather than returned.
    """
    vv, ww = _checked_update(base, v, w)
    b = base.A + np.outer(vv, ww)
    report = principal_minors(b)
    if report.classification is Classification.NOT_P0:
        worst = report.worst_subset()
        raise TheoryViolationError(
            "a nonnegative rank-one update of a singular M-matrix produced "
            "a negative principal minor",
            diagnostics={
                "subset": worst,
                "minor": report.minors[worst],
                "tol": report.tol,
                "min_minor": report.min_minor,
            },
        )
    return True


def verify_p_theorem(base: SingularMMatrix, v, w) -> bool:
    """Check that A + v w^T is a P-matrix under the coupling hypotheses.

    Hypotheses: ``base`` irreducible, v >= 0, w >= 0, and the update
    couples to the kernel (both Perron projections nonzero).  Unmet
    hypotheses raise the skip signal HypothesisNotMet; a nonpositive
    minor under met hypotheses raises a theory violation.
    """
    vv, ww = _checked_update(base, v, w)
    if not base.irreducible:
        raise HypothesisNotMet("an irreducible base is required")
    system = assemble(base, vv, ww)
    if system.nzp is None:
        raise HypothesisNotMet(
            "kernel is not simple; the projection condition is undefined"
        )
    if not system.nzp:
        raise HypothesisNotMet(
            "update does not couple to the kernel (a Perron projection vanishes)"
        )
    report = principal_minors(system.B)
    if report.classification is not Classification.P:
        worst = report.worst_subset()
        raise TheoryViolationError(
            "a coupled nonnegative rank-one update of an irreducible "
            "singular M-matrix produced a nonpositive principal minor",
            diagnostics={
                "subset": worst,
                "minor": report.minors[worst],
                "tol": report.tol,
                "min_minor": report.min_minor,
                "classification": report.classification.value,
            },
        )
    return True
