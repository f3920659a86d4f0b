import numpy as np
import pytest

from mmstab.errors import DomainError, NotGeometricallySimple, SingularShiftError
from mmstab.mmatrix import build
from mmstab.perturbation import (
    assemble,
    nzp,
    secular_residual,
    sherman_morrison_resolvent,
)


def make_system(rng, n, symmetric=False, positive_vw=False):
    h = rng.uniform(0.1, 2.0, size=(n, n))
    if symmetric:
        h = 0.5 * (h + h.T)
    lo = 0.1 if positive_vw else -1.0
    v = rng.uniform(lo, 1.0, size=n)
    w = rng.uniform(lo, 1.0, size=n)
    return assemble(build(h), v, w)


class TestAssemble:
    def test_b_reproducible_from_parts(self):
        rng = np.random.default_rng(1)
        for n in (2, 4, 6):
            s = make_system(rng, n)
            assert np.array_equal(s.B, s.base.A + np.outer(s.v, s.w))

    def test_nzp_positive_data(self):
        rng = np.random.default_rng(2)
        s = make_system(rng, 4, positive_vw=True)
        # strictly positive v, w against a strictly positive Perron pair
        assert s.nzp is True
        assert nzp(s) is True

    def test_nzp_fails_for_orthogonal_v(self):
        h = np.array([[0.0, 1.0], [1.0, 0.0]])  # Perron vector (1,1)/sqrt(2)
        base = build(h)
        s = assemble(base, np.array([1.0, -1.0]), np.array([1.0, 2.0]))
        assert s.nzp is False

    def test_nzp_fails_for_zero_vector(self):
        base = build(np.array([[0.0, 1.0], [1.0, 0.0]]))
        s = assemble(base, np.zeros(2), np.array([1.0, 2.0]))
        assert s.nzp is False

    def test_nzp_none_and_error_for_multiple_kernel(self):
        base = build(np.eye(3))
        s = assemble(base, np.ones(3), np.ones(3))
        assert s.nzp is None
        with pytest.raises(NotGeometricallySimple):
            nzp(s)

    def test_alpha_tau_symmetric_only(self):
        rng = np.random.default_rng(3)
        s = make_system(rng, 4, symmetric=True)
        assert s.symmetric_base
        assert s.alpha is not None and 0.0 <= s.alpha <= 1.0
        assert s.tau is not None and s.tau > 0.0
        s2 = make_system(rng, 4, symmetric=False)
        assert not s2.symmetric_base
        assert s2.alpha is None and s2.tau is None

    def test_alpha_extremes(self):
        base = build(np.array([[0.0, 1.0], [1.0, 0.0]]))
        z = base.z_right
        aligned = assemble(base, z.copy(), 2.0 * z)
        assert aligned.alpha == pytest.approx(1.0, abs=1e-12)
        u = np.array([1.0, -1.0]) / np.sqrt(2)
        orth = assemble(base, u, u.copy())
        assert orth.alpha == pytest.approx(0.0, abs=1e-12)

    def test_tau_matches_oracle(self):
        rng = np.random.default_rng(4)
        s = make_system(rng, 5, symmetric=True)
        eigs = np.linalg.eigvalsh(s.base.A)
        want = eigs[eigs > 1e-8].min()
        assert s.tau == pytest.approx(want, rel=1e-8)

    def test_dimension_mismatch(self):
        base = build(np.eye(2) * 0.5)
        with pytest.raises(DomainError):
            assemble(base, np.ones(3), np.ones(2))


class TestSecular:
    def test_zero_exactly_at_eigenvalues_of_b(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            s = make_system(rng, 5)
            eigs_b = np.linalg.eigvals(s.B)
            eigs_a = np.linalg.eigvals(s.base.A)
            for mu in eigs_b:
                # skip shared eigenvalues, where the resolvent blows up
                if np.abs(eigs_a - mu).min() < 1e-6:
                    continue
                assert abs(secular_residual(s, mu)) < 1e-7

    def test_nonzero_away_from_spectrum(self):
        rng = np.random.default_rng(6)
        s = make_system(rng, 4)
        eigs_b = np.linalg.eigvals(s.B)
        mu = 10.0 + 3.7j
        assert np.abs(eigs_b - mu).min() > 1.0
        assert abs(secular_residual(s, mu)) > 1e-6

    def test_eigenvalue_shift_of_base_rejected(self):
        rng = np.random.default_rng(7)
        s = make_system(rng, 4)
        with pytest.raises(SingularShiftError):
            secular_residual(s, 0.0)  # 0 is in the spectrum of A


class TestShermanMorrison:
    def test_inverse_identity(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            s = make_system(rng, 5)
            mu = complex(rng.normal(3, 1), rng.normal(2, 1))
            r = sherman_morrison_resolvent(s, mu)
            prod = (mu * np.eye(5) - s.B) @ r
            assert np.linalg.norm(prod - np.eye(5)) < 1e-8

    def test_agrees_with_direct_inverse(self):
        rng = np.random.default_rng(9)
        s = make_system(rng, 4)
        mu = 2.5 + 0.5j
        want = np.linalg.inv(mu * np.eye(4) - s.B)
        got = sherman_morrison_resolvent(s, mu)
        assert np.allclose(got, want, atol=1e-9 * np.linalg.norm(want))

    def test_rejects_shift_at_b_eigenvalue(self):
        rng = np.random.default_rng(10)
        s = make_system(rng, 4)
        mu = complex(np.linalg.eigvals(s.B)[0])
        # mu may be near sigma(A) too; either singular-shift path applies
        with pytest.raises(SingularShiftError):
            sherman_morrison_resolvent(s, mu)
