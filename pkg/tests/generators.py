"""Deterministic instance generators shared by unit and acceptance tests.

Each gen_* function returns a RankOneSystem built so that the named
clause fires with healthy margins and the projection condition holds.
Construction is analytic where possible; the few generators that need a
rejection loop are bounded and seeded.
"""

import numpy as np

from mmstab.linalg import spectral_radius_nonneg
from mmstab.mmatrix import build
from mmstab.perturbation import assemble


def random_irreducible_base(rng, n, symmetric=False, lo=0.2, hi=2.0):
    h = rng.uniform(lo, hi, size=(n, n))
    if symmetric:
        h = 0.5 * (h + h.T)
    return build(h)


def _nonneg_vector(rng, n, allow_zeros=True):
    v = rng.uniform(0.0 if allow_zeros else 0.1, 1.0, size=n)
    if allow_zeros:
        v *= rng.random(n) < 0.8
    if not np.any(v > 0.0):
        v[int(rng.integers(n))] = rng.uniform(0.3, 1.0)
    return v


def gen_dim2_simple(rng):
    """n = 2, simple zero eigenvalue, nonnegative update vectors."""
    if rng.random() < 0.7:
        base = random_irreducible_base(rng, 2)
        v = _nonneg_vector(rng, 2)
        w = _nonneg_vector(rng, 2)
    else:
        # reducible but with algebraically simple radius
        a, c = sorted(rng.uniform(0.3, 2.0, size=2))[::-1]
        base = build(np.array([[a, rng.uniform(0.2, 1.0)], [0.0, c * 0.9]]))
        v = rng.uniform(0.1, 1.0, size=2)
        w = rng.uniform(0.1, 1.0, size=2)
    return assemble(base, v, w)


def gen_dim2_coupled(rng):
    """n = 2, nonnegative vectors with positive inner product."""
    if rng.random() < 0.5:
        base = random_irreducible_base(rng, 2)
    else:
        # defective zero eigenvalue
        hd = rng.uniform(0.5, 1.5)
        base = build(np.array([[hd, rng.uniform(0.2, 1.0)], [0.0, hd]]))
    v = rng.uniform(0.1, 1.0, size=2)
    w = rng.uniform(0.1, 1.0, size=2)
    return assemble(base, v, w)


def gen_perron_aligned(rng, n):
    """Update vector proportional to a Perron vector, w.v pushed positive."""
    base = random_irreducible_base(rng, n)
    side = rng.random() < 0.5
    for _ in range(50):
        other = rng.normal(size=n)
        if side:
            v = rng.uniform(0.3, 2.0) * base.z_right
            w = other
        else:
            w = rng.uniform(0.3, 2.0) * base.z_left
            v = other
        wv = float(w @ v)
        if wv < 0.0:
            other = -other
            w, v = (other, v) if side else (w, other)
            wv = -wv
        if wv > 0.05 * np.linalg.norm(v) * np.linalg.norm(w):
            return assemble(base, v, w)
    raise AssertionError("rejection loop failed to couple the vectors")


def gen_normal_selfadjoint(rng, n):
    """Normal base (circulant or symmetric), v = w, coupled to the kernel."""
    if rng.random() < 0.5:
        row = rng.uniform(0.1, 1.0, size=n)
        h = np.empty((n, n))
        for i in range(n):
            h[i] = np.roll(row, i)
    else:
        h = rng.uniform(0.2, 2.0, size=(n, n))
        h = 0.5 * (h + h.T)
    base = build(h)
    for _ in range(50):
        v = rng.normal(size=n)
        if abs(float(v @ base.z_right)) > 0.1 * np.linalg.norm(v):
            return assemble(base, v, v.copy())
    raise AssertionError("rejection loop failed to couple v to the kernel")


def gen_half_domination(rng, n):
    """Positive vectors with 2 h_ij >= v_i w_j by construction."""
    v = rng.uniform(0.05, 0.4, size=n)
    w = rng.uniform(0.05, 0.4, size=n)
    h = 0.5 * np.outer(v, w) * (1.0 + rng.uniform(0.0, 1.0, size=(n, n)))
    h += rng.uniform(0.05, 0.5, size=(n, n))
    return assemble(build(h), v, w)


def gen_disk_domination(rng, n):
    """Small positive update of a near-rank-one positive base."""
    scale = rng.uniform(0.5, 2.0)
    h = scale * np.ones((n, n)) * rng.uniform(0.9, 1.1, size=(n, n))
    base = build(h)
    v = rng.uniform(0.05, 0.15, size=n) * np.sqrt(scale)
    w = rng.uniform(0.05, 0.15, size=n) * np.sqrt(scale)
    for _ in range(12):
        sys = assemble(base, v, w)
        m = base.H - np.outer(v, w)
        if np.all(m >= 0.0):
            rho_k = spectral_radius_nonneg(np.abs(m))
            gaps = base.rho + np.abs(np.diag(m)) + v * w - rho_k - np.diag(base.H)
            if np.all(gaps > 0.0):
                return sys
        v = 0.7 * v
        w = 0.7 * w
    raise AssertionError("rejection loop failed to reach disk domination")


def gen_small_alignment(rng, n):
    """Symmetric base, signed vectors, alignment below the crossing bound."""
    base = random_irreducible_base(rng, n, symmetric=True)
    z = base.z_right
    sgn = 1.0 if rng.random() < 0.5 else -1.0
    a = sgn * rng.uniform(0.1, 1.0)
    c = sgn * rng.uniform(0.1, 1.0)
    u = rng.normal(size=n)
    u -= (u @ z) * z
    u /= np.linalg.norm(u)
    p = rng.normal(size=n)
    p -= (p @ z) * z
    p /= np.linalg.norm(p)
    v = a * z + rng.uniform(0.1, 3.0) * u
    w = c * z + rng.uniform(0.1, 3.0) * p
    alpha = abs((v @ z) * (w @ z)) / (np.linalg.norm(v) * np.linalg.norm(w))
    tau = assemble(base, v, w).tau
    limit = np.sqrt(alpha / (1.0 - alpha)) * tau
    target = 0.8 * limit
    s = np.sqrt(2.0 * target / (np.linalg.norm(v) * np.linalg.norm(w)))
    return assemble(base, s * v, s * w)


def gen_diagonal_symmetric(rng, n):
    """Base diagonally symmetrizable by E, with w = E v for positive v."""
    hs = rng.uniform(0.2, 2.0, size=(n, n))
    hs = 0.5 * (hs + hs.T)
    sym_base = build(hs)  # symmetric singular M-matrix
    e = rng.uniform(0.3, 3.0, size=n)
    a = sym_base.A / e[:, None]
    hprime = (np.diag(a).max() + rng.uniform(0.5, 1.5)) * np.eye(n) - a
    base = build(hprime)
    v = rng.uniform(0.2, 1.5, size=n)
    w = e * v
    return assemble(base, v, w)


CLAUSE_GENERATORS = {
    "dim2-simple": lambda rng, n=None: gen_dim2_simple(rng),
    "dim2-coupled": lambda rng, n=None: gen_dim2_coupled(rng),
    "perron-aligned": lambda rng, n: gen_perron_aligned(rng, n),
    "normal-selfadjoint": lambda rng, n: gen_normal_selfadjoint(rng, n),
    "half-domination": lambda rng, n: gen_half_domination(rng, n),
    "disk-domination": lambda rng, n: gen_disk_domination(rng, n),
    "small-alignment": lambda rng, n: gen_small_alignment(rng, n),
}
