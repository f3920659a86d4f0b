import numpy as np
import pytest

from generators import (
    CLAUSE_GENERATORS,
    gen_diagonal_symmetric,
    gen_half_domination,
    random_irreducible_base,
)
from mmstab.errors import (
    DomainError,
    NotGeometricallySimple,
    TheoryViolationError,
)
from mmstab.mmatrix import build
from mmstab.perturbation import assemble
from mmstab.stability import (
    Verdict,
    check_criteria,
    classify,
    corollary_clauses,
    d_stability_probe,
    eigenvector_perturbation_spectrum,
    lyapunov_diagonal_search,
    normal_case_check,
)

# 6x6 system with simple kernel and nonzero projections whose rank-one
# update is nevertheless unstable: every sufficient criterion must stay
# silent on it.
H6 = np.array(
    [
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [0.0, 0.5, 1.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.35, 1.0, 1.0],
        [0.0, 0.0, 0.35, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.15],
        [0.0, 0.0, 0.0, 0.0, 0.15, 0.0],
    ]
)
V6 = np.array([0.05, 0.10, 0.05, 0.15, 0.25, 0.20])
W6 = np.array([0.65, 0.15, 0.10, 0.05, 0.30, 0.80])


def counterexample_system():
    return assemble(build(H6), V6, W6)


class TestClassify:
    def test_bands(self):
        assert classify(np.eye(2)).verdict is Verdict.STRICT
        assert classify(-np.eye(2)).verdict is Verdict.UNSTABLE
        assert classify(np.diag([1.0, 0.0])).verdict is Verdict.MARGINAL

    def test_margin_band(self):
        m = np.diag([1.0, 1e-12])
        assert classify(m).verdict is Verdict.MARGINAL
        assert classify(m, margin=1e-15).verdict is Verdict.STRICT
        assert classify(np.diag([1.0, -1e-12]), margin=1e-15).verdict is (
            Verdict.UNSTABLE
        )

    def test_witness_deterministic(self):
        r = classify(np.array([[0.0, -2.0], [2.0, 0.0]]))
        assert r.witness == -2j  # the pair member with smaller imag part
        assert r.min_real_part == pytest.approx(0.0, abs=1e-12)

    def test_rejects_negative_margin(self):
        with pytest.raises(DomainError):
            classify(np.eye(2), margin=-1.0)


class TestCheckCriteria:
    @pytest.mark.parametrize("clause", sorted(CLAUSE_GENERATORS))
    def test_each_clause_fires_and_agrees(self, clause):
        gen = CLAUSE_GENERATORS[clause]
        rng = np.random.default_rng(hash(clause) % 2**32)
        fired = 0
        for i in range(40):
            n = int(rng.integers(2, 7))
            sys = gen(rng, n)
            report = check_criteria(sys)
            if report.fired(clause):
                fired += 1
                assert report.verdict in (Verdict.STRICT, Verdict.MARGINAL)
        assert fired >= 38  # generators may rarely land on another clause first

    def test_counterexample_fires_nothing(self):
        sys = counterexample_system()
        report = check_criteria(sys)
        assert report.clauses_fired == ()
        assert report.verdict is Verdict.UNSTABLE
        assert report.min_real_part == pytest.approx(-0.00926875, abs=1e-6)

    def test_negative_coupling_not_aligned_clause(self):
        base = random_irreducible_base(np.random.default_rng(5), 4)
        v = base.z_right.copy()
        w = -np.ones(4)  # w.v < 0: zero eigenvalue moves left
        sys = assemble(base, v, w)
        report = check_criteria(sys)
        assert not report.fired("perron-aligned")
        assert report.verdict is Verdict.UNSTABLE

    def test_sign_guard_on_small_alignment(self):
        # Norm bound holds but the projection product is negative: the
        # zero eigenvalue exits left immediately.
        base = build(np.array([[0.0, 1.0], [1.0, 0.0]]))
        v = np.array([1.0, 0.0])
        w = np.array([0.5, -1.5])
        sys = assemble(base, v, w)
        alpha, tau = sys.alpha, sys.tau
        assert 0.0 < alpha < 1.0
        bound = 0.5 * np.linalg.norm(v) * np.linalg.norm(w)
        assert bound < np.sqrt(alpha / (1.0 - alpha)) * tau
        report = check_criteria(sys)
        assert not report.fired("small-alignment")
        assert report.verdict is Verdict.UNSTABLE

    def test_defective_alignment_fires_without_projection(self):
        base = build(np.array([[1.0, 1.0], [0.0, 1.0]]))
        sys = assemble(base, np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert sys.nzp is False
        report = check_criteria(sys)  # no gate without projections
        assert report.fired("perron-aligned")
        assert report.verdict is Verdict.MARGINAL

    def test_multiple_kernel_rejected(self):
        sys = assemble(build(np.eye(3)), np.ones(3), np.ones(3))
        with pytest.raises(NotGeometricallySimple):
            check_criteria(sys)

    def test_user_k_matrix(self):
        rng = np.random.default_rng(11)
        sys = CLAUSE_GENERATORS["disk-domination"](rng, 4)
        m = sys.base.H - np.outer(sys.v, sys.w)
        good = np.abs(m) + 0.001
        report = check_criteria(sys, k_matrix=good)
        assert report.fired("disk-domination")
        with pytest.raises(DomainError):
            check_criteria(sys, k_matrix=np.zeros((4, 4)))
        with pytest.raises(DomainError):
            check_criteria(sys, k_matrix=-np.abs(m))


class TestEigenvectorPerturbation:
    def test_replaces_zero_by_coupling(self):
        rng = np.random.default_rng(23)
        for n in (2, 4, 6):
            base = random_irreducible_base(rng, n)
            w = rng.normal(size=n)
            pred = eigenvector_perturbation_spectrum(base, w)
            b = base.A + np.outer(base.z_right, w)
            want = np.linalg.eigvals(b)
            got = np.sort_complex(pred.values)
            assert np.allclose(np.sort_complex(want), got, atol=1e-6)
            coupling = complex(w @ base.z_right)
            assert min(abs(z - coupling) for z in pred) < 1e-9

    def test_defective_base_keeps_zero(self):
        base = build(np.array([[1.0, 1.0], [0.0, 1.0]]))
        w = np.array([0.7, 0.3])
        pred = eigenvector_perturbation_spectrum(base, w)
        vals = sorted(pred.values, key=lambda z: z.real)
        assert vals[0] == 0.0  # one zero copy must survive
        assert vals[1] == pytest.approx(0.7, abs=1e-12)

    def test_multiple_kernel_rejected(self):
        with pytest.raises(NotGeometricallySimple):
            eigenvector_perturbation_spectrum(build(np.eye(2)), np.ones(2))


class TestNormalCase:
    def test_radius_attained_and_coupled(self):
        rng = np.random.default_rng(31)
        for n in (3, 5):
            row = rng.uniform(0.1, 1.0, size=n)
            h = np.array([np.roll(row, i) for i in range(n)])
            v = rng.normal(size=n) + 1.0
            q = rng.normal(size=(n, n))
            c = q @ q.T + n * np.eye(n)
            report = normal_case_check(h, v, c)
            assert report.fired("radius-simple-coupled")
            assert report.verdict is Verdict.STRICT

    def test_radius_not_attained(self):
        h = np.array([[0.0, -2.0], [2.0, 0.0]])  # eigenvalues +-2i
        report = normal_case_check(h, np.array([0.3, 0.1]), np.eye(2))
        assert report.fired("radius-not-attained")
        assert report.verdict is Verdict.STRICT

    def test_uncoupled_v_gives_no_assertion(self):
        h = np.array([[0.0, 1.0], [1.0, 0.0]])  # kernel vector (1,1)/sqrt2
        report = normal_case_check(h, np.array([1.0, -1.0]), np.eye(2))
        assert report.clauses_fired == ()
        assert report.verdict is Verdict.MARGINAL

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            normal_case_check(np.array([[1.0, 1.0], [0.0, 1.0]]), np.ones(2), np.eye(2))
        with pytest.raises(DomainError):
            normal_case_check(np.eye(2), np.ones(2), -np.eye(2))
        with pytest.raises(DomainError):
            normal_case_check(np.eye(2), np.ones(2), np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestCorollary:
    def test_dim2_clauses(self):
        rng = np.random.default_rng(41)
        base = random_irreducible_base(rng, 2)
        sys = assemble(base, np.array([0.5, 0.2]), np.array([0.3, 0.4]))
        report = corollary_clauses(sys)
        assert report.fired("dim2-irreducible")
        assert report.fired("dim2-positive")
        assert report.verdict is Verdict.STRICT

    def test_diagonal_symmetric(self):
        rng = np.random.default_rng(43)
        for n in (2, 4, 5):
            sys = gen_diagonal_symmetric(rng, n)
            report = corollary_clauses(sys)
            assert report.fired("diagonal-symmetric")
            assert report.verdict is Verdict.STRICT

    def test_h_dominated(self):
        rng = np.random.default_rng(47)
        sys = gen_half_domination(rng, 4)
        report = corollary_clauses(sys)
        assert report.fired("h-dominated")

    def test_zero_entry_skip_and_explicit_error(self):
        base = random_irreducible_base(np.random.default_rng(53), 3)
        sys = assemble(base, np.array([1.0, 0.0, 1.0]), np.array([1.0, 1.0, 1.0]))
        report = corollary_clauses(sys)  # silently skips the symmetrizer
        assert not report.fired("diagonal-symmetric")
        with pytest.raises(DomainError):
            corollary_clauses(sys, explicit_symmetrizer_check=True)


class TestProbeAndCertificate:
    def test_unstable_matrix_found_immediately(self):
        sys = counterexample_system()
        result = d_stability_probe(sys.B, n_samples=50, seed=1)
        assert result["counterexample_found"]
        assert result["worst_min_real_part"] < -1e-6

    def test_certified_instance_survives_probe(self):
        rng = np.random.default_rng(59)
        sys = gen_diagonal_symmetric(rng, 4)
        result = d_stability_probe(sys.B, n_samples=200, seed=2)
        assert not result["counterexample_found"]

    def test_probe_deterministic(self):
        sys = counterexample_system()
        r1 = d_stability_probe(sys.B, n_samples=30, seed=7)
        r2 = d_stability_probe(sys.B, n_samples=30, seed=7)
        assert r1["worst_min_real_part"] == r2["worst_min_real_part"]
        assert np.array_equal(r1["worst_diagonal"], r2["worst_diagonal"])

    def test_lyapunov_certificate_when_it_exists(self):
        rng = np.random.default_rng(61)
        sys = gen_diagonal_symmetric(rng, 3)
        d = lyapunov_diagonal_search(sys.B)
        assert d is not None
        s = sys.B.T @ np.diag(d) + np.diag(d) @ sys.B
        assert np.linalg.eigvalsh(s).min() > 1e-9
        assert d.sum() == pytest.approx(1.0)

    def test_lyapunov_none_for_unstable(self):
        assert lyapunov_diagonal_search(counterexample_system().B) is None
