"""Stability classification and sufficient criteria for B = A + v w^T.

`classify` decides by the spectrum alone. `check_criteria` evaluates
the sufficient conditions; each is a genuine theorem for the stated
hypotheses, so a fired clause together with the projection condition
must agree with the spectral verdict, and any disagreement is raised as
a theory violation rather than papered over.

Two clauses are stated here with hypotheses slightly stronger than the
shortest phrasing of the underlying results, because the shorter forms
are falsifiable:

* the aligned-update clause additionally requires w.v > margin; with
  w.v < 0 the zero eigenvalue moves left and B is plainly unstable
  even though v is a kernel vector and projections are nonzero.
* the small-alignment clause additionally requires <v,z><w,z> > 0; the
  derivative of the zero eigenvalue at t = 0 is that product over
  |z|^2, so a negative product exits through the real axis while every
  norm-based bound still holds.

The domination clause requires two-sided control |(H - v w^T)_ij| <=
K_ij. One-sided domination is not enough: row sums of a matrix that
dips far negative can certify disks that the true spectrum ignores.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import (
    DomainError,
    NotGeometricallySimple,
    TheoryViolationError,
)
from .linalg import (
    Spectrum,
    as_square_matrix,
    as_vector,
    format_complex,
    fro,
    is_normal,
    numerical_rank,
    spectral_radius_nonneg,
    spectrum,
)
from .mmatrix import SingularMMatrix, is_h_matrix_positive_diagonal
from .perturbation import RankOneSystem

#: default stability margin relative to |M|_F
MARGIN_RTOL = 1e-9


class Verdict(str, Enum):
    STRICT = "StrictlyStable"
    MARGINAL = "MarginallyStable"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class ClauseRecord:
    """One sufficient criterion that fired, with its numeric evidence."""

    clause: str
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        parts = ", ".join(f"{k}={v}" for k, v in sorted(self.evidence.items()))
        return f"{self.clause}({parts})"


@dataclass(frozen=True)
class StabilityReport:
    verdict: Verdict
    min_real_part: float
    witness: complex
    clauses_fired: tuple = ()
    margin: float = 0.0
    eigenvalues: np.ndarray = field(default=None, repr=False)

    def fired(self, name):
        return any(c.clause == name for c in self.clauses_fired)


def resolve_margin(m, margin):
    if margin is None:
        return MARGIN_RTOL * max(fro(m), 1e-300)
    if margin < 0.0:
        raise DomainError("margin must be nonnegative")
    return float(margin)


def classify(m, margin=None):
    """Spectral verdict: strictly stable, marginally stable, or unstable.

    Strict means every eigenvalue has real part > margin; unstable means
    some eigenvalue has real part < -margin; the band in between is
    marginal. The witness is the sorted-first eigenvalue attaining the
    minimal real part.
    """
    mm = as_square_matrix(m, "M")
    mg = resolve_margin(mm, margin)
    s = spectrum(mm)
    mrp = s.min_real_part
    if mrp > mg:
        verdict = Verdict.STRICT
    elif mrp < -mg:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.MARGINAL
    return StabilityReport(
        verdict=verdict,
        min_real_part=mrp,
        witness=s.witness_min_real(),
        margin=mg,
        eigenvalues=s.values,
    )


def _require_simple_kernel(base):
    if base.geo_mult_zero != 1:
        raise NotGeometricallySimple(
            "stability criteria need a one-dimensional kernel, got geometric "
            f"multiplicity {base.geo_mult_zero}"
        )


def check_criteria(system, k_matrix=None, margin=None):
    """Evaluate the sufficient stability criteria for B = A + v w^T.

    Returns the spectral report with `clauses_fired` filled in. When at
    least one clause fires and the projection condition holds, the
    theorems promise strict positive stability; disagreement with the
    spectral verdict raises TheoryViolationError.
    """
    if not isinstance(system, RankOneSystem):
        raise DomainError("system must be a RankOneSystem")
    base = system.base
    _require_simple_kernel(base)
    v, w, h = system.v, system.w, base.H
    n = system.n
    rho = base.rho
    z_l, z_r = base.z_left, base.z_right
    report = classify(system.B, margin)
    nonneg = bool(np.all(v >= 0.0) and np.all(w >= 0.0))
    clauses = []

    # Two-dimensional cases: trace/determinant arguments.
    if n == 2 and nonneg and base.alg_mult_zero == 1:
        clauses.append(
            ClauseRecord(
                "dim2-simple", {"alg_mult_zero": 1, "n": 2}
            )
        )
    if n == 2 and nonneg and float(w @ v) > 0.0:
        clauses.append(ClauseRecord("dim2-coupled", {"w_dot_v": float(w @ v)}))

    # Update aligned with a Perron vector: spectrum shifts one eigenvalue
    # from 0 to w.v, so strictness additionally needs w.v positive.
    wv = float(w @ v)
    for side, vec, z in (("right", v, z_r), ("left", w, z_l)):
        nv = np.linalg.norm(vec)
        if nv == 0.0:
            continue
        rel = np.linalg.norm(vec - (vec @ z) * z) / nv
        if rel <= 1e-9 and wv > report.margin:
            clauses.append(
                ClauseRecord(
                    "perron-aligned",
                    {"side": side, "relative_defect": float(rel), "w_dot_v": wv},
                )
            )
            break

    # Normal base with v = w.
    if np.array_equal(v, w) and is_normal(base.A) and np.linalg.norm(v) > 0.0:
        clauses.append(
            ClauseRecord("normal-selfadjoint", {"v_norm": float(np.linalg.norm(v))})
        )

    # Entrywise domination 2 h_ij >= v_i w_j with positive data: the
    # comparison matrix of B then dominates A plus a positive diagonal.
    if np.all(v > 0.0) and np.all(w > 0.0) and np.all(2.0 * h >= np.outer(v, w)):
        slack = float((2.0 * h - np.outer(v, w)).min())
        clauses.append(ClauseRecord("half-domination", {"min_slack": slack}))

    # Disk bound: with |(H - v w^T)_ij| <= K_ij the real parts of the
    # eigenvalues of H - v w^T stay below h_ii - v_i w_i + rho(K) - k_ii.
    m_mat = h - np.outer(v, w)
    k = np.abs(m_mat) if k_matrix is None else as_square_matrix(k_matrix, "K")
    if k_matrix is not None and (
        k.shape != (n, n) or np.any(k < 0.0) or np.any(np.abs(m_mat) > k)
    ):
        raise DomainError("K must be nonnegative and dominate |H - v w^T| entrywise")
    rho_k = spectral_radius_nonneg(k)
    gaps = rho + np.diag(k) + v * w - rho_k - np.diag(h)
    if np.all(gaps > 0.0):
        clauses.append(
            ClauseRecord(
                "disk-domination",
                {
                    "rho_K": float(rho_k),
                    "min_gap": float(gaps.min()),
                    "default_K": k_matrix is None,
                },
            )
        )

    # Small aligned mass for a symmetric base. The product of projections
    # must be positive: it is the derivative of the zero eigenvalue.
    if system.symmetric_base and system.alpha is not None and system.tau is not None:
        alpha, tau = system.alpha, system.tau
        proj = float(v @ z_r) * float(w @ z_r)
        bound = 0.5 * np.linalg.norm(v) * np.linalg.norm(w)
        if 0.0 < alpha < 1.0 and proj > 0.0:
            lower = np.sqrt(alpha / (1.0 - alpha)) * tau
            if bound < lower:
                clauses.append(
                    ClauseRecord(
                        "small-alignment",
                        {
                            "alpha": alpha,
                            "tau": tau,
                            "norm_product_half": float(bound),
                            "threshold": float(lower),
                            "projection_product": proj,
                        },
                    )
                )

    report = replace(report, clauses_fired=tuple(clauses))
    # A fired clause with nonzero projections proves min Re > 0; values
    # inside the +-margin band are tolerance-level and tolerated, an
    # eigenvalue below -margin is a genuine contradiction.
    if clauses and system.nzp and report.verdict is Verdict.UNSTABLE:
        raise TheoryViolationError(
            "a sufficient criterion fired with nonzero projections but the "
            "spectrum has an eigenvalue strictly in the left half plane",
            diagnostics={
                "clauses": [str(c) for c in clauses],
                "verdict": report.verdict.value,
                "min_real_part": report.min_real_part,
                "witness": format_complex(report.witness),
                "margin": report.margin,
            },
        )
    return report


def eigenvector_perturbation_spectrum(base, w, match_tol=1e-7):
    """Spectrum of A + z w^T where z spans the kernel of A.

    With a simple zero eigenvalue the update replaces 0 by w.z in the
    spectrum and leaves every other eigenvalue untouched; with algebraic
    multiplicity k > 1 one copy of the (numerically) smallest eigenvalue
    is replaced and zero remains in the spectrum. The prediction is
    verified against the computed spectrum of the perturbed matrix.
    """
    if not isinstance(base, SingularMMatrix):
        raise DomainError("base must be a SingularMMatrix")
    _require_simple_kernel(base)
    ww = as_vector(w, base.n, "w")
    z = base.z_right
    b = base.A + np.outer(z, ww)
    predicted = list(spectrum(base.A).values)
    drop = min(range(len(predicted)), key=lambda i: abs(predicted[i]))
    predicted.pop(drop)
    predicted.append(complex(ww @ z))
    actual = spectrum(b)
    if not actual.multiset_match(predicted, match_tol):
        raise TheoryViolationError(
            "rank-one update along the kernel vector must replace one zero "
            "eigenvalue by w.z and fix the rest",
            diagnostics={
                "predicted": [format_complex(p) for p in sorted(predicted, key=lambda q: (q.real, q.imag))],
                "actual": [format_complex(a) for a in actual],
                "w_dot_z": float(ww @ z),
                "match_tol": match_tol,
            },
        )
    vals = np.array(predicted, dtype=np.complex128)
    return Spectrum(vals[np.lexsort((vals.imag, vals.real))])


def normal_case_check(h, v, c, margin=None):
    """Stability of C (rho(H) I - H + v v^T) for normal H and SPD C.

    Fires when either (i) rho(H) is an eigenvalue of H, geometrically
    simple, and v has nonzero projection on its eigenvector, or (ii)
    rho(H) is not an eigenvalue of H at all. Also cross-checks the
    identity rho(H + H^T) = 2 max |Re mu| over mu in the spectrum of
    the normal matrix H.
    """
    hm = as_square_matrix(h, "H")
    n = hm.shape[0]
    vv = as_vector(v, n, "v")
    cm = as_square_matrix(c, "C")
    if not is_normal(hm):
        raise DomainError("H must be normal within tolerance")
    if fro(cm - cm.T) > 1e-10 * max(fro(cm), 1e-300):
        raise DomainError("C must be symmetric")
    if np.linalg.eigvalsh(cm).min() <= 0.0:
        raise DomainError("C must be positive definite")

    eigs_h = spectrum(hm)
    rho = eigs_h.spectral_radius
    scale = max(1.0, fro(hm))

    # Identity for normal matrices; violated only by a solver defect.
    lhs = spectrum(hm + hm.T).max_real_part  # symmetric: largest eigenvalue
    rhs = 2.0 * max(abs(z.real) for z in eigs_h)
    if abs(lhs - rhs) > 1e-8 * scale:
        raise TheoryViolationError(
            "rho(H + H^T) must equal twice the largest |Re| over the "
            "spectrum of a normal H",
            diagnostics={"rho_sym": lhs, "two_max_re": rhs},
        )

    hypothesis = None
    evidence = {}
    near = [z for z in eigs_h if abs(z - rho) <= 1e-8 * scale]
    if not near:
        hypothesis = "radius-not-attained"
    else:
        shifted = hm - rho * np.eye(n)
        if numerical_rank(shifted) == n - 1:
            u, sv, vt = np.linalg.svd(shifted)
            z = vt[-1]
            proj = float(vv @ z)
            evidence["projection"] = proj
            if abs(proj) > 1e-9 * max(np.linalg.norm(vv), 1e-300):
                hypothesis = "radius-simple-coupled"

    b = rho * np.eye(n) - hm + np.outer(vv, vv)
    report = classify(cm @ b, margin)
    if hypothesis is not None:
        evidence["rho"] = rho
        record = ClauseRecord(hypothesis, evidence)
        report = replace(report, clauses_fired=(record,))
        if report.verdict is Verdict.UNSTABLE:
            raise TheoryViolationError(
                "normal-base criterion fired but C(rho I - H + v v^T) has an "
                "eigenvalue strictly in the left half plane",
                diagnostics={
                    "hypothesis": hypothesis,
                    "verdict": report.verdict.value,
                    "min_real_part": report.min_real_part,
                },
            )
    return report


def _diagonal_symmetrizer(system):
    """E = diag(w_i / v_i); requires strictly nonzero v entries."""
    if np.any(system.v == 0.0):
        raise DomainError("diagonal symmetrizer needs v with nonzero entries")
    return system.w / system.v


def corollary_clauses(system, margin=None, explicit_symmetrizer_check=False):
    """Sufficient conditions for D-stability of B = A + v w^T.

    Clause names:
      dim2-irreducible   n = 2, v, w >= 0, irreducible base
      dim2-positive      n = 2, v, w > 0
      diagonal-symmetric v, w > 0 and E = diag(w/v) makes E B symmetric
      h-dominated        v, w > 0 with 2 h_ij >= v_i w_j

    The diagonal-symmetric clause is the decision procedure for the
    symmetrizability family; when it fires, the similarity
    E^(1/2) B E^(-1/2) is verified symmetric, and an independently found
    positive symmetrizer (when one exists) is checked to be consistent.
    With zero entries in v the clause is skipped silently unless
    `explicit_symmetrizer_check` forces the domain error.
    """
    if not isinstance(system, RankOneSystem):
        raise DomainError("system must be a RankOneSystem")
    base = system.base
    _require_simple_kernel(base)
    v, w, h = system.v, system.w, base.H
    n = system.n
    report = classify(system.B, margin)
    nonneg = bool(np.all(v >= 0.0) and np.all(w >= 0.0))
    positive = bool(np.all(v > 0.0) and np.all(w > 0.0))
    clauses = []

    if n == 2 and nonneg and base.irreducible:
        clauses.append(ClauseRecord("dim2-irreducible", {}))
    if n == 2 and positive:
        clauses.append(ClauseRecord("dim2-positive", {"w_dot_v": float(w @ v)}))

    can_divide = bool(np.all(v != 0.0))
    if explicit_symmetrizer_check and not can_divide:
        raise DomainError("diagonal symmetrizer needs v with nonzero entries")
    if positive and can_divide:
        e = _diagonal_symmetrizer(system)
        eb = e[:, None] * system.B
        defect = fro(eb - eb.T) / max(fro(eb), 1e-300)
        if defect <= 1e-10:
            # Similarity transported to symmetric form, as the theory says.
            rt = np.sqrt(e)
            sim = rt[:, None] * system.B / rt[None, :]
            sim_defect = fro(sim - sim.T) / max(fro(sim), 1e-300)
            if sim_defect > 1e-9:
                raise TheoryViolationError(
                    "E B symmetric but E^(1/2) B E^(-1/2) is not",
                    diagnostics={"defect": defect, "similarity_defect": sim_defect},
                )
            clauses.append(
                ClauseRecord(
                    "diagonal-symmetric",
                    {"defect": float(defect), "similarity_defect": float(sim_defect)},
                )
            )
        else:
            # If any positive diagonal symmetrizer exists, the canonical
            # one must have worked: check independently and cross-examine.
            found = _search_symmetrizer(system.B, v, w)
            if found is not None:
                raise TheoryViolationError(
                    "a positive symmetrizer exists but the canonical "
                    "diag(w/v) candidate fails",
                    diagnostics={"canonical_defect": defect},
                )

    if (
        positive
        and np.all(2.0 * h >= np.outer(v, w))
        and is_h_matrix_positive_diagonal(system.B)
    ):
        clauses.append(
            ClauseRecord(
                "h-dominated",
                {"min_slack": float((2.0 * h - np.outer(v, w)).min())},
            )
        )

    report = replace(report, clauses_fired=tuple(clauses))
    # Every corollary clause implies one of the strict-stability criteria
    # at D = I, so the unscaled verdict must already be strict; only an
    # eigenvalue below -margin contradicts that.
    if clauses and system.nzp and report.verdict is Verdict.UNSTABLE:
        raise TheoryViolationError(
            "a D-stability clause fired with nonzero projections but B "
            "itself is not strictly stable",
            diagnostics={
                "clauses": [str(cl) for cl in clauses],
                "verdict": report.verdict.value,
                "min_real_part": report.min_real_part,
            },
        )
    return report


def _search_symmetrizer(b, v, w):
    """Positive diagonal E with E B and E v w^T symmetric, or None.

    Symmetrizing v w^T with positive data already pins E to diag(w/v)
    up to scale, so the search only needs to confirm that one candidate;
    it is kept separate from the caller's candidate to stay an
    independent route.
    """
    if np.any(v <= 0.0) or np.any(w <= 0.0):
        return None
    e = w / v
    eb = e[:, None] * b
    evw = e[:, None] * np.outer(v, w)
    ok_b = fro(eb - eb.T) <= 1e-10 * max(fro(eb), 1e-300)
    ok_vw = fro(evw - evw.T) <= 1e-10 * max(fro(evw), 1e-300)
    return e if (ok_b and ok_vw) else None


def d_stability_probe(b, n_samples=1000, seed=0, margin=None, sweeps=200):
    """Randomized search for a positive diagonal D destabilizing D B.

    Samples log-uniform diagonals in [1e-3, 1e3] per entry (sample 0 is
    the identity), then runs a deterministic coordinate descent (factor
    2 up/down per coordinate) from the worst sample. Returns a dict with
    the worst min-real-part found, the diagonal achieving it, and
    whether it certifies a D-instability below -margin.
    """
    bm = as_square_matrix(b, "B")
    n = bm.shape[0]
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    mg = resolve_margin(bm, margin)
    rng = np.random.default_rng(seed)
    diags = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(n_samples, n)))
    diags[0] = 1.0

    def min_re(d):
        return spectrum(d[:, None] * bm).min_real_part

    evaluations = 0
    worst = None
    worst_d = None
    for d in diags:
        val = min_re(d)
        evaluations += 1
        if worst is None or val < worst:
            worst, worst_d = val, d.copy()

    for _ in range(sweeps):
        improved = False
        for i in range(n):
            for factor in (2.0, 0.5):
                trial = worst_d.copy()
                trial[i] *= factor
                if not (1e-6 <= trial[i] <= 1e6):
                    continue
                val = min_re(trial)
                evaluations += 1
                if val < worst:
                    worst, worst_d = val, trial
                    improved = True
        if not improved:
            break

    return {
        "worst_min_real_part": float(worst),
        "worst_diagonal": worst_d,
        "counterexample_found": bool(worst < -mg),
        "samples_tested": int(n_samples),
        "evaluations": int(evaluations),
        "margin": mg,
    }


def lyapunov_diagonal_search(b, iters=300):
    """Projected gradient ascent on d -> min eig(B^T D + D B), D = diag(d).

    Returns the certificate diagonal (unit trace) when the final minimal
    eigenvalue exceeds 1e-9, else None. A returned certificate proves
    D-stability of B; None proves nothing.
    """
    bm = as_square_matrix(b, "B")
    n = bm.shape[0]
    if iters < 1:
        raise DomainError("iters must be >= 1")
    d = np.full(n, 1.0 / n)

    def objective(dv):
        s = bm.T * dv[None, :] + dv[:, None] * bm
        vals, vecs = np.linalg.eigh(s)
        return float(vals[0]), vecs[:, 0]

    val, u = objective(d)
    step = 1.0
    for _ in range(iters):
        grad = 2.0 * u * (bm @ u)
        improved = False
        trial_step = step
        for _ in range(25):
            cand = d + trial_step * grad
            np.clip(cand, 1e-12, None, out=cand)
            cand /= cand.sum()
            cval, cu = objective(cand)
            if cval > val:
                d, val, u = cand, cval, cu
                step = trial_step * 1.5
                improved = True
                break
            trial_step *= 0.5
        if not improved:
            break
    return d if val > 1e-9 else None
