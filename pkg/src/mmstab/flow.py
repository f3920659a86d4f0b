"""Eigenpair-seeking flow on the unit sphere.

The coupled system

    dz      = (I - P_z) C (H - lambda I) z,
    dlambda = z^T C (H - lambda I) z,

with P_z the orthogonal projector onto z and C nonsingular, conserves
|z| exactly and has the eigenpairs of H as its only equilibria.  An
equilibrium (z, lambda) is locally asymptotically stable precisely when
C (lambda I - H + z z^T) is strictly positive stable - a rank-one
update of a shifted matrix, which for lambda = rho(H) and nonnegative H
is exactly the stability question the rest of the package studies.

Integration is fixed-step classical Runge-Kutta: the field is smooth,
problems are desk-scale, and a deterministic trajectory is worth more
here than adaptive step control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .errors import DomainError, FlowDivergenceError, HypothesisNotMet
from .linalg import as_square_matrix, as_vector, fro, spectrum

DEFAULT_DT = 0.01
DEFAULT_MAX_STEPS = 100_000
DEFAULT_CONV_TOL = 1e-10
# |lambda| beyond DIVERGENCE_FACTOR * max(1, ||H||_F) aborts integration
DIVERGENCE_FACTOR = 1e6
# starting z must be on the sphere to this accuracy
UNIT_NORM_TOL = 1e-12
# equilibrium gate: ||rhs|| <= EQUILIBRIUM_RTOL * ||H||_F * max(1, |lambda|)
EQUILIBRIUM_RTOL = 1e-8
# Gram-Schmidt acceptance threshold for the tangent-basis completion
GS_THRESHOLD = 0.5
# tangent-restricted and reduced spectra must agree to this tolerance
TANGENT_SPECTRUM_TOL = 1e-7


@dataclass(frozen=True)
class FlowState:
    """A point (z, lambda) on the sphere-times-line phase space."""

    z: np.ndarray = field(repr=False)
    lam: float
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "z", np.array(self.z, dtype=np.float64))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "t", float(self.t))

    def __repr__(self) -> str:
        return f"FlowState(n={self.z.shape[0]}, lam={self.lam:.12g}, t={self.t:.12g})"


@dataclass(frozen=True)
class Trajectory:
    """A time-ordered flow trajectory.

    ``residual`` is the eigen-residual |H z - lambda z| at the final
    state; ``residuals`` carries the same quantity per state and
    ``rhs_norms`` the vector-field norm (the convergence monitor).
    ``drifts`` records the pre-correction defect | |z|^2 - 1 | observed
    at each step - the conservation-law diagnostic, meaningful with or
    without renormalization.
    """

    states: tuple[FlowState, ...]
    converged: bool
    residual: float
    residuals: np.ndarray = field(repr=False)
    rhs_norms: np.ndarray = field(repr=False)
    drifts: np.ndarray = field(repr=False)

    @property
    def final_state(self) -> FlowState:
        return self.states[-1]

    @property
    def max_drift(self) -> float:
        return float(self.drifts.max())

    def __len__(self) -> int:
        return len(self.states)

    def csv_rows(self) -> Iterator[tuple]:
        """Rows (t, z_1, ..., z_n, lambda, residual) for export."""
        for state, resid in zip(self.states, self.residuals):
            yield (state.t, *map(float, state.z), state.lam, float(resid))

    def __repr__(self) -> str:
        return (
            f"Trajectory(steps={len(self.states) - 1}, converged={self.converged}, "
            f"residual={self.residual:.3e}, max_drift={self.max_drift:.3e})"
        )


def _as_pair(h, c) -> tuple[np.ndarray, np.ndarray]:
    hm = as_square_matrix(h, "H")
    cm = as_square_matrix(c, "C")
    if cm.shape != hm.shape:
        raise DomainError(
            f"C must have the same shape as H, got {cm.shape} vs {hm.shape}"
        )
    return hm, cm


def rhs(state: FlowState, h, c) -> tuple[np.ndarray, float]:
    """Vector field (dz, dlambda) at a state."""
    hm, cm = _as_pair(h, c)
    z = as_vector(state.z, hm.shape[0], "z")
    if not np.any(z != 0.0):
        raise DomainError("z must be nonzero")
    dz, dlam = kernels.flow_rhs(hm, cm, z, float(state.lam))
    return dz, float(dlam)


def integrate(
    initial: FlowState,
    h,
    c,
    dt: float = DEFAULT_DT,
    max_steps: int = DEFAULT_MAX_STEPS,
    conv_tol: float = DEFAULT_CONV_TOL,
    renormalize: bool = True,
) -> Trajectory:
    """Integrate the flow from a unit-norm start.

    Stops when the vector-field norm drops below ``conv_tol``
    (converged) or after ``max_steps`` steps.  With ``renormalize`` the
    state is projected back to the sphere after every step and the
    corrected defect is logged; without it the raw drift accumulates in
    ``drifts``, keeping the conservation law testable.
    """
    hm, cm = _as_pair(h, c)
    z0 = as_vector(initial.z, hm.shape[0], "initial z")
    if abs(float(np.linalg.norm(z0)) - 1.0) > UNIT_NORM_TOL:
        raise DomainError("initial z must have unit norm (within 1e-12)")
    dt = float(dt)
    if not np.isfinite(dt) or dt <= 0.0:
        raise DomainError("dt must be positive")
    max_steps = int(max_steps)
    if max_steps < 1:
        raise DomainError("max_steps must be at least 1")
    conv_tol = float(conv_tol)
    if not conv_tol > 0.0:
        raise DomainError("conv_tol must be positive")

    lam_guard = DIVERGENCE_FACTOR * max(1.0, fro(hm))
    zs, lams, rhs_norms, drifts, count, status = kernels.rk4_flow(
        hm, cm, z0, float(initial.lam), dt, max_steps, conv_tol,
        bool(renormalize), lam_guard,
    )
    if status == 2:
        raise FlowDivergenceError(
            f"|lambda| = {abs(lams[-1]):.6e} exceeded the divergence guard "
            f"{lam_guard:.3e} after {count - 1} steps"
        )
    states = tuple(
        FlowState(z=zs[k], lam=float(lams[k]), t=initial.t + k * dt)
        for k in range(count)
    )
    residuals = np.linalg.norm(zs @ hm.T - lams[:, None] * zs, axis=1)
    return Trajectory(
        states=states,
        converged=status == 0,
        residual=float(residuals[-1]),
        residuals=residuals,
        rhs_norms=rhs_norms,
        drifts=drifts,
    )


def _require_equilibrium(hm, cm, z, lam) -> None:
    dz, dlam = kernels.flow_rhs(hm, cm, z, lam)
    norm = float(np.sqrt(dz @ dz + dlam * dlam))
    bound = EQUILIBRIUM_RTOL * fro(hm) * max(1.0, abs(lam))
    if norm > bound:
        raise HypothesisNotMet(
            f"(z, lambda) is not an equilibrium: ||rhs|| = {norm:.3e} "
            f"exceeds {bound:.3e}"
        )


def linearization(z, lam, h, c) -> np.ndarray:
    """Jacobian of the flow at an equilibrium, in the ambient basis.

    The (n+1) x (n+1) block matrix

        [ (I - P_z) C (H - lambda I)    -(I - P_z) C z ]
        [ z^T C (H - lambda I)          -z^T C z       ]

    which drops a term proportional to (H - lambda I) z; the input is
    therefore gated on being an equilibrium.
    """
    hm, cm = _as_pair(h, c)
    n = hm.shape[0]
    zv = as_vector(z, n, "z")
    lam = float(lam)
    zz = float(zv @ zv)
    if zz == 0.0:
        raise DomainError("z must be nonzero")
    _require_equilibrium(hm, cm, zv, lam)

    proj = np.eye(n) - np.outer(zv, zv) / zz
    chl = cm @ (hm - lam * np.eye(n))
    cz = cm @ zv
    out = np.empty((n + 1, n + 1))
    out[:n, :n] = proj @ chl
    out[:n, n] = -proj @ cz
    out[n, :n] = zv @ chl
    out[n, n] = -float(zv @ cz)
    return out


def reduced_stability_matrix(z, lam, h, c) -> np.ndarray:
    """C (lambda I - H + z z^T): the equilibrium's stability certificate.

    The equilibrium is locally asymptotically stable exactly when this
    matrix is strictly positive stable.
    """
    hm, cm = _as_pair(h, c)
    n = hm.shape[0]
    zv = as_vector(z, n, "z")
    lam = float(lam)
    if abs(float(np.linalg.norm(zv)) - 1.0) > 1e-8:
        raise DomainError("z must have unit norm")
    _require_equilibrium(hm, cm, zv, lam)
    return cm @ (lam * np.eye(n) - hm + np.outer(zv, zv))


def completion_basis(z) -> np.ndarray:
    """Orthonormal completion of unit z: columns v_i with [V z] orthogonal.

    Gram-Schmidt over the canonical basis vectors, accepting residuals
    above 0.5 first; any remaining columns are filled by repeatedly
    taking the canonical vector with the largest residual, which is
    deterministic and always succeeds.
    """
    zv = np.asarray(z, dtype=np.float64)
    n = zv.shape[0]
    if abs(float(np.linalg.norm(zv)) - 1.0) > 1e-8:
        raise DomainError("z must have unit norm")
    cols: list[np.ndarray] = []

    def residual(i: int) -> np.ndarray:
        u = np.zeros(n)
        u[i] = 1.0
        u -= zv * (zv @ u)
        for col in cols:
            u -= col * (col @ u)
        # second orthogonalization pass sharpens near-parallel cases
        u -= zv * (zv @ u)
        for col in cols:
            u -= col * (col @ u)
        return u

    for i in range(n):
        if len(cols) == n - 1:
            break
        u = residual(i)
        nu = float(np.linalg.norm(u))
        if nu > GS_THRESHOLD:
            cols.append(u / nu)
    while len(cols) < n - 1:
        candidates = [residual(i) for i in range(n)]
        norms = [float(np.linalg.norm(u)) for u in candidates]
        best = int(np.argmax(norms))
        cols.append(candidates[best] / norms[best])
    return np.column_stack(cols) if cols else np.zeros((n, 0))


def equilibrium_stability_equivalence(z, lam, h, c) -> bool:
    """Check the tangent-restricted linearization against the reduction.

    Restricting the negated ambient Jacobian to the tangent basis
    {[v_i; 0], [0; 1]} is an orthogonal conjugation away from
    C (lambda I - H + z z^T), so both must have the same minimal real
    part.  Returns whether they agree within 1e-7.
    """
    hm, cm = _as_pair(h, c)
    n = hm.shape[0]
    zv = as_vector(z, n, "z")
    reduced = reduced_stability_matrix(zv, lam, hm, cm)
    ambient = linearization(zv, lam, hm, cm)
    v = completion_basis(zv)
    q = np.zeros((n + 1, n))
    q[:n, : n - 1] = v
    q[n, n - 1] = 1.0
    tangent = -(q.T @ ambient @ q)
    lhs = spectrum(tangent).min_real_part
    rhs_ = spectrum(reduced).min_real_part
    return abs(lhs - rhs_) <= TANGENT_SPECTRUM_TOL
