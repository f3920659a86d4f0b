"""Eigenvalue homotopy for the one-parameter family G(t) = A + t v w^T.

The family interpolates between the singular base (t = 0) and the full
rank-one update (t = 1) and beyond.  Tracing its spectrum over a grid
locates imaginary-axis crossings: the parameter values where strict
positive stability is lost or regained.  Alongside the trace live the
analytic crossing bounds for symmetric bases - when the admissible
imaginary-part window is empty, no crossing can exist at any t, which
is exactly how the small-alignment stability criterion operates.

Crossings are detected on the min-real-part envelope rather than on
individual eigenvalue paths: the envelope is continuous, cannot be
mis-associated when paths collide, and its sign changes are precisely
the stability transitions of interest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .errors import (
    DomainError,
    EigenConvergenceError,
    HypothesisNotMet,
    TheoryViolationError,
)
from .linalg import Spectrum, fro, shifted_solve, spectrum
from .perturbation import RankOneSystem

GRID_STEPS = 400
BISECT_BUDGET = 200
# accept a refined crossing when |min re| <= CROSSING_RTOL * ||G(t)||_F
CROSSING_RTOL = 1e-10
# ... or when the bracket has shrunk below INTERVAL_RTOL * t_max
INTERVAL_RTOL = 1e-12
# smallest t probed by the near-zero subdivision fallback
SUBDIVIDE_FLOOR = 1e-12


class Crossing(NamedTuple):
    """A refined imaginary-axis crossing: G(t) has eigenvalues +-bi."""

    t: float
    b: float


@dataclass(frozen=True)
class HomotopyTrace:
    """Spectra of G(t) on a uniform grid plus refined crossing events.

    Conjugate crossings are reported once with b > 0; envelope sign
    changes whose refined witness is real do not constitute crossings
    into oscillatory instability and are not recorded.
    """

    t_grid: np.ndarray = field(repr=False)
    spectra: tuple[Spectrum, ...] = field(repr=False)
    min_real_parts: np.ndarray = field(repr=False)
    crossings: tuple[Crossing, ...]

    @property
    def first_crossing(self) -> Crossing | None:
        return self.crossings[0] if self.crossings else None

    def csv_rows(self) -> Iterator[tuple[float, int, float, float, float]]:
        """Rows (t, eigenvalue index, re, im, min_real_part) for export."""
        for t, spec, mr in zip(self.t_grid, self.spectra, self.min_real_parts):
            for j, lam in enumerate(spec.values):
                yield float(t), j, float(lam.real), float(lam.imag), float(mr)

    def __repr__(self) -> str:
        return (
            f"HomotopyTrace(points={len(self.t_grid)}, "
            f"t_max={float(self.t_grid[-1]):.12g}, "
            f"crossings={list(self.crossings)!r})"
        )


def _spectrum_at(a: np.ndarray, update: np.ndarray, t: float) -> Spectrum:
    try:
        return spectrum(a + t * update)
    except EigenConvergenceError as exc:
        raise EigenConvergenceError(
            f"eigensolver failed on the homotopy path at t = {t:.17g}"
        ) from exc


def _refine(a, update, lo, flo, hi, fhi, t_scale):
    """Bisect a sign change of the min-real-part envelope.

    Returns (t*, spectrum at t*) for the best axis point seen.  The
    envelope is continuous, so with the iteration budget the bracket
    collapses far below INTERVAL_RTOL * t_scale even when the relative
    tolerance is never met.
    """
    best_abs = np.inf
    best = (0.5 * (lo + hi), None)
    lo_negative = flo < 0.0
    for _ in range(BISECT_BUDGET):
        mid = 0.5 * (lo + hi)
        spec = _spectrum_at(a, update, mid)
        f = spec.min_real_part
        if abs(f) < best_abs:
            best_abs = abs(f)
            best = (mid, spec)
        scale = max(fro(a + mid * update), 1e-300)
        if abs(f) <= CROSSING_RTOL * scale or (hi - lo) <= INTERVAL_RTOL * t_scale:
            break
        if (f < 0.0) == lo_negative:
            lo = mid
        else:
            hi = mid
    return best


def _require_system(sys: RankOneSystem) -> RankOneSystem:
    if not isinstance(sys, RankOneSystem):
        raise DomainError("expected a RankOneSystem")
    return sys


def trace(sys: RankOneSystem, t_max: float, steps: int = GRID_STEPS) -> HomotopyTrace:
    """Spectra of G(t) = A + t v w^T on a uniform grid over [0, t_max].

    Sign changes of the min-real-part envelope between grid points are
    refined by bisection to |min re| <= 1e-10 * ||G(t)||_F; refined
    events whose witness eigenvalue is a conjugate pair are recorded as
    crossings (t*, b) with b > 0.
    """
    _require_system(sys)
    t_max = float(t_max)
    if not np.isfinite(t_max) or t_max <= 0.0:
        raise DomainError("t_max must be positive")
    steps = int(steps)
    if steps < 2:
        raise DomainError("steps must be at least 2")

    a = sys.base.A
    update = np.outer(sys.v, sys.w)
    grid = np.linspace(0.0, t_max, steps + 1)
    spectra = [_spectrum_at(a, update, t) for t in grid]
    mrp = np.array([s.min_real_part for s in spectra])

    crossings: list[Crossing] = []
    for i in range(steps):
        flo, fhi = mrp[i], mrp[i + 1]
        if flo == 0.0:
            # grid point exactly on the axis: handled as the previous
            # interval's endpoint (or it is the meaningless t = 0 start)
            continue
        if fhi == 0.0:
            t_star, spec_star = grid[i + 1], spectra[i + 1]
        elif flo * fhi < 0.0:
            t_star, spec_star = _refine(a, update, grid[i], flo, grid[i + 1], fhi, t_max)
        else:
            continue
        b = abs(spec_star.witness_min_real().imag)
        if b > 0.0:
            crossings.append(Crossing(t=float(t_star), b=float(b)))
    return HomotopyTrace(
        t_grid=grid,
        spectra=tuple(spectra),
        min_real_parts=mrp,
        crossings=tuple(crossings),
    )


def small_t_stability(sys: RankOneSystem, steps: int = GRID_STEPS) -> float:
    """Empirical stability horizon t0 near t = 0, capped at 1.

    Hypotheses: algebraically simple zero eigenvalue, nonnegative v and
    w, nonzero projections.  Under them G(t) is strictly positive
    stable for all small t > 0, so a positive horizon must exist; if
    none is found down to the subdivision floor the statement itself is
    contradicted and a theory violation is raised.

    Returns the refined envelope zero bounding the verified-positive
    grid prefix, or 1.0 when the envelope stays positive throughout.
    """
    _require_system(sys)
    if sys.base.alg_mult_zero != 1:
        raise HypothesisNotMet(
            "algebraically simple zero eigenvalue required "
            f"(multiplicity {sys.base.alg_mult_zero})"
        )
    if np.any(sys.v < 0.0) or np.any(sys.w < 0.0):
        raise HypothesisNotMet("nonnegative v and w required")
    if not sys.nzp:
        raise HypothesisNotMet("update does not couple to the kernel")

    tr = trace(sys, 1.0, steps)
    grid, mrp = tr.t_grid, tr.min_real_parts
    a = sys.base.A
    update = np.outer(sys.v, sys.w)

    bad = None
    for i in range(1, len(grid)):
        if mrp[i] <= 0.0:
            bad = i
            break
    if bad is None:
        return 1.0
    if bad > 1:
        if mrp[bad] == 0.0:
            return float(grid[bad])
        t0, _ = _refine(a, update, grid[bad - 1], mrp[bad - 1], grid[bad], mrp[bad], 1.0)
        return float(t0)

    # envelope nonpositive already at the first grid point: the window,
    # which must exist, is below grid resolution; subdivide toward zero
    t_hi, f_hi = float(grid[1]), float(mrp[1])
    t = t_hi
    while t > SUBDIVIDE_FLOOR:
        t *= 0.5
        f = _spectrum_at(a, update, t).min_real_part
        if f > 0.0:
            if f_hi == 0.0:
                return t_hi
            t0, _ = _refine(a, update, t, f, t_hi, f_hi, 1.0)
            return float(t0)
    raise TheoryViolationError(
        "no positive stability window found near t = 0 although the "
        "small-t hypotheses hold",
        diagnostics={
            "min_real_at_first_grid_point": f_hi,
            "first_grid_point": t_hi,
            "subdivide_floor": SUBDIVIDE_FLOOR,
        },
    )


def crossing_bounds(sys: RankOneSystem) -> tuple[float, float]:
    """Admissible window for the imaginary part of an axis crossing.

    For a symmetric base (hence positive semidefinite A) with simple
    kernel and nonzero v, w, any purely imaginary eigenvalue bi (b > 0)
    of A + v w^T satisfies

        sqrt(alpha / (1 - alpha)) * tau  <=  b  <=  ||v|| ||w|| / 2,

    with alpha the kernel alignment of the update and tau the smallest
    nonzero eigenvalue of A.  The window being empty (lower > upper)
    therefore rules out crossings entirely - at every scaling t, since
    alpha is scale-invariant.
    """
    _require_system(sys)
    if not sys.symmetric_base:
        raise HypothesisNotMet("a symmetric base is required")
    if sys.base.geo_mult_zero != 1:
        raise HypothesisNotMet("kernel is not simple; alignment is undefined")
    nv = float(np.linalg.norm(sys.v))
    nw = float(np.linalg.norm(sys.w))
    if nv == 0.0 or nw == 0.0:
        raise HypothesisNotMet("v and w must be nonzero")
    if sys.alpha is None or sys.tau is None:
        raise HypothesisNotMet("kernel alignment is undefined for this system")
    if sys.alpha >= 1.0 - 1e-12:
        raise HypothesisNotMet(
            "both update vectors are parallel to the kernel (alignment 1); "
            "the bound degenerates"
        )
    lower = float(np.sqrt(sys.alpha / (1.0 - sys.alpha)) * sys.tau)
    upper = 0.5 * nv * nw
    return lower, upper


def imaginary_decomposition_residual(sys: RankOneSystem, b: float) -> float:
    """Defect of the kernel/complement resolvent split at shift bi.

    For symmetric A with kernel direction z and P the orthogonal
    projector onto z, the quadratic form of the resolvent splits as

        Im w^T (bi I - A)^{-1} v
          = -<w,z><v,z> / (b ||z||^2)
            + Im w^T (I-P)(bi I - A)^{-1}(I-P) v.

    This identity holds for every b > 0; the returned absolute defect
    is pure solver noise and stays below 1e-10 * ||v|| ||w||.
    """
    _require_system(sys)
    if not sys.symmetric_base:
        raise HypothesisNotMet("a symmetric base is required")
    b = float(b)
    if not np.isfinite(b) or b <= 0.0:
        raise DomainError("b must be positive")
    z = sys.base.z_right
    if z is None:
        raise HypothesisNotMet("kernel is not simple; the projector is undefined")

    a = sys.base.A
    mu = 1j * b
    zz = float(z @ z)
    lhs = complex(sys.w @ shifted_solve(a, mu, sys.v)).imag

    vperp = sys.v - z * float(z @ sys.v) / zz
    wperp = sys.w - z * float(z @ sys.w) / zz
    kernel_term = -float(sys.w @ z) * float(sys.v @ z) / (b * zz)
    perp_term = complex(wperp @ shifted_solve(a, mu, vperp)).imag
    return abs(lhs - (kernel_term + perp_term))


def large_t_probe(
    sys: RankOneSystem, t_max: float, steps: int = GRID_STEPS
) -> float | None:
    """Smallest sampled t1 with min re > 0 on (t1, t_max], if any.

    Exploratory evidence for the return-to-stability question: the
    result is reproducible under the fixed grid but certifies nothing
    between samples.  Returns 0.0 when every sampled t > 0 is already
    stable and None when instability persists at t_max itself.
    """
    _require_system(sys)
    tr = trace(sys, t_max, steps)
    grid, mrp = tr.t_grid, tr.min_real_parts
    if mrp[-1] <= 0.0:
        return None
    last_bad = None
    for i in range(1, len(grid)):
        if mrp[i] <= 0.0:
            last_bad = i
    if last_bad is None:
        return 0.0
    if mrp[last_bad] == 0.0:
        return float(grid[last_bad])
    a = sys.base.A
    update = np.outer(sys.v, sys.w)
    t1, _ = _refine(
        a, update, grid[last_bad], mrp[last_bad], grid[last_bad + 1], mrp[last_bad + 1], t_max
    )
    return float(t1)
