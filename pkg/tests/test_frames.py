import math
from fractions import Fraction

import pytest

from superframe.errors import EmptyTestSet, IndexOutOfRange, ShapeMismatch, SystemTooLarge
from superframe.frames import (
    BASE,
    OVERSAMPLED,
    SUPER,
    SystemKind,
    TruncationSpec,
    corollary_kind,
    dyadic_test_corpus,
    frame_bounds_estimate,
    frame_report,
    frame_sum,
    gram_matrix,
    index_grid,
    system_element,
    verify_corollary,
    verify_decomposition,
    verify_factorization,
    verify_onb_transfer,
    verify_operator_identities,
    verify_projection,
    verify_split_frame_sum,
    window_clipped,
)
from superframe.funcspace import (
    haar,
    indicator_interval,
    random_step,
    scale_values,
    sup_distance,
    translate,
    zero,
)
from superframe.superspace import embed_s, super_norm


def haar_coefficient_sq_oracle(j, k):
    """Independent oracle: |<chi_[0,1), 2^{j/2} psi(2^j x - k)>|^2 for the
    step wavelet, computed with plain Fraction interval arithmetic.

    The element is +2^{j/2} on [k s, (k + 1/2) s) and -2^{j/2} on
    [(k + 1/2) s, (k + 1) s) with s = 2^{-j}; the squared coefficient is
    2^j (pos_len - neg_len)^2, an exact rational.
    """
    s = Fraction(2) ** (-j)

    def overlap(a, b):
        lo, hi = max(a, Fraction(0)), min(b, Fraction(1))
        return hi - lo if hi > lo else Fraction(0)

    pos = overlap(k * s, (k + Fraction(1, 2)) * s)
    neg = overlap((k + Fraction(1, 2)) * s, (k + 1) * s)
    return Fraction(2) ** j * (pos - neg) ** 2


def oracle_parseval_sum(j_min, j_max, k_window=4096):
    total = Fraction(0)
    for j in range(j_min, j_max + 1):
        # Only translates whose support can touch [0, 1) matter.
        lo = math.floor(-1 * 2**max(j, 0)) - 2
        hi = math.ceil(2 ** max(j, 0)) + 2
        for k in range(max(lo, -k_window), min(hi, k_window) + 1):
            total += haar_coefficient_sq_oracle(j, k)
    return total


class TestOracle:
    """Re-derive the exact truncated sums before trusting any constant."""

    @pytest.mark.parametrize(
        "J,expected",
        [(4, Fraction(15, 16)), (8, Fraction(255, 256)), (12, Fraction(4095, 4096))],
    )
    def test_oracle_reproduces_closed_form(self, J, expected):
        assert oracle_parseval_sum(-J, J) == expected
        assert expected == 1 - Fraction(2) ** (-J)


class TestSystemElements:
    def test_base_origin_is_wavelet(self, cs13, haar_family):
        e = system_element(BASE, 0, (0,), 0, cs13, haar_family)
        assert sup_distance(e, haar()) == 0

    def test_oversampled_element(self, cs13, haar_family):
        e = system_element(OVERSAMPLED, 0, (1,), 0, cs13, haar_family)
        expected = scale_values(translate(haar(), "1/3"), 1 / math.sqrt(3))
        assert sup_distance(e, expected) <= 1e-15

    def test_corollary_zero_label_is_base(self, cs13, haar_family):
        for j in (-2, 0, 1):
            for m in (-1, 0, 2):
                a = system_element(corollary_kind(0), j, (m,), 0, cs13, haar_family)
                b = system_element(BASE, j, (m,), 0, cs13, haar_family)
                assert sup_distance(a, b) == 0

    def test_unit_norms(self, cs13, haar_family):
        for j, k in [(0, 0), (1, 2), (-2, -1)]:
            base = system_element(BASE, j, (k,), 0, cs13, haar_family)
            assert base.norm() == pytest.approx(1.0, abs=1e-12)
            over = system_element(OVERSAMPLED, j, (k,), 0, cs13, haar_family)
            assert over.norm() == pytest.approx(1 / math.sqrt(3), abs=1e-12)
            lifted = system_element(SUPER, j, (k,), 0, cs13, haar_family)
            assert super_norm(lifted) == pytest.approx(1.0, abs=1e-12)

    def test_wavelet_index_checked(self, cs13, haar_family):
        with pytest.raises(IndexOutOfRange):
            system_element(BASE, 0, (0,), 1, cs13, haar_family)
        with pytest.raises(IndexOutOfRange):
            system_element(corollary_kind(5), 0, (0,), 0, cs13, haar_family)

    def test_kind_validation(self):
        with pytest.raises(ValueError):
            SystemKind("bogus")
        with pytest.raises(ValueError):
            SystemKind("corollary")
        with pytest.raises(ValueError):
            SystemKind("base", r=1)


class TestFrameSum:
    @pytest.mark.parametrize("J", [4, 8, 12])
    def test_parseval_constants_match_oracle(self, cs13, haar_family, J):
        value = frame_sum(
            indicator_interval(0, 1), BASE, TruncationSpec(-J, J, None), cs13, haar_family
        )
        assert value == pytest.approx(float(oracle_parseval_sum(-J, J)), abs=1e-10)

    def test_zero_function(self, cs13, haar_family):
        assert frame_sum(zero(1), BASE, TruncationSpec(-4, 4, 4), cs13, haar_family) == 0.0

    def test_monotone_in_truncation(self, cs13, haar_family):
        f = random_step(3, 4)
        values = [
            frame_sum(f, BASE, TruncationSpec(-J, J, None), cs13, haar_family)
            for J in (2, 4, 6, 8)
        ]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_explicit_box_matches_window_when_wide(self, cs13, haar_family):
        f = indicator_interval(0, 1)
        auto = frame_sum(f, BASE, TruncationSpec(-3, 3, None), cs13, haar_family)
        boxed = frame_sum(f, BASE, TruncationSpec(-3, 3, 16), cs13, haar_family)
        assert auto == pytest.approx(boxed, abs=1e-12)

    def test_space_mismatch(self, cs13, haar_family):
        with pytest.raises(ShapeMismatch):
            frame_sum(haar(), SUPER, TruncationSpec(-1, 1, 2), cs13, haar_family)
        with pytest.raises(ShapeMismatch):
            frame_sum(
                embed_s(haar(), cs13), BASE, TruncationSpec(-1, 1, 2), cs13, haar_family
            )

    def test_clipping_flag(self, cs13, haar_family):
        f = indicator_interval(0, 1)
        assert window_clipped(BASE, TruncationSpec(-8, 8, 16), cs13, haar_family, f)
        assert not window_clipped(BASE, TruncationSpec(-2, 2, 16), cs13, haar_family, f)


class TestGram:
    def test_base_identity(self, cs13, haar_family):
        _, stats = gram_matrix(BASE, TruncationSpec(-3, 3, 8), cs13, haar_family)
        assert stats.max_off_diagonal <= 1e-10
        assert stats.max_diagonal_deviation <= 1e-10

    def test_single_element(self, cs13, haar_family):
        matrix, stats = gram_matrix(BASE, TruncationSpec(0, 0, 0), cs13, haar_family)
        assert stats.size == 1
        assert matrix[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_super_identity(self, cs13, haar_family):
        _, stats = gram_matrix(SUPER, TruncationSpec(-3, 3, 8), cs13, haar_family)
        assert stats.max_off_diagonal <= 1e-10
        assert stats.max_diagonal_deviation <= 1e-10

    def test_onb_transfer_factor(self, cs13, haar_family):
        _, base_stats = gram_matrix(BASE, TruncationSpec(-2, 2, 6), cs13, haar_family)
        _, super_stats = gram_matrix(SUPER, TruncationSpec(-2, 2, 6), cs13, haar_family)
        base_dev = max(base_stats.max_off_diagonal, base_stats.max_diagonal_deviation)
        super_dev = max(super_stats.max_off_diagonal, super_stats.max_diagonal_deviation)
        assert super_dev <= 10 * base_dev + 1e-14

    def test_size_limit(self, cs13, haar_family):
        with pytest.raises(SystemTooLarge):
            gram_matrix(BASE, TruncationSpec(-3, 3, 8), cs13, haar_family, limit=10)

    def test_workers_do_not_change_result(self, cs13, haar_family):
        g1, s1 = gram_matrix(BASE, TruncationSpec(-2, 2, 4), cs13, haar_family, workers=1)
        g4, s4 = gram_matrix(BASE, TruncationSpec(-2, 2, 4), cs13, haar_family, workers=4)
        assert (g1 == g4).all()
        assert s1 == s4


class TestBounds:
    def test_dyadic_corpus_near_parseval(self, cs13, haar_family):
        corpus = dyadic_test_corpus(seed=0, count=20, levels=4)
        a, b, _ = frame_bounds_estimate(
            BASE, TruncationSpec(-10, 10, None), cs13, haar_family, corpus
        )
        assert 0.99 <= a <= b <= 1.0 + 1e-12

    def test_element_hits_upper_bound(self, cs13, haar_family):
        e = system_element(BASE, 0, (0,), 0, cs13, haar_family)
        _, b, _ = frame_bounds_estimate(
            BASE, TruncationSpec(-6, 6, None), cs13, haar_family, [e]
        )
        assert b >= 1.0 - 1e-12

    def test_super_matches_base(self, cs13, haar_family):
        corpus = dyadic_test_corpus(seed=1, count=5, levels=3)
        trunc = TruncationSpec(-8, 8, None)
        a_base, b_base, _ = frame_bounds_estimate(BASE, trunc, cs13, haar_family, corpus)
        lifted = [embed_s(f, cs13) for f in corpus]
        a_sup, b_sup, _ = frame_bounds_estimate(SUPER, trunc, cs13, haar_family, lifted)
        assert abs(a_base - a_sup) <= 1e-6
        assert abs(b_base - b_sup) <= 1e-6

    def test_empty_test_set(self, cs13, haar_family):
        with pytest.raises(EmptyTestSet):
            frame_bounds_estimate(BASE, TruncationSpec(-1, 1, 1), cs13, haar_family, [])


class TestVerificationSuites:
    def test_operators(self, cs13):
        report = verify_operator_identities(cs13, seed=0, count=10)
        assert report.passed
        assert report.max_residual <= 1e-10

    def test_decomposition(self, cs13):
        report = verify_decomposition(cs13, seed=0, count=5)
        assert report.passed

    def test_factorization_trivial_cell(self, cs13):
        # j = 0, k = 0, r = 0 pairs the embeddings directly.
        from superframe.funcspace import inner_product
        from superframe.superspace import embed_s_prime, super_inner_product

        f, g = haar(), indicator_interval(0, 1)
        lhs = super_inner_product(embed_s_prime(f, cs13), embed_s_prime(g, cs13))
        assert lhs == pytest.approx(inner_product(f, g), abs=1e-12)

    def test_factorization_sweep(self, cs13):
        report = verify_factorization(
            cs13, haar(), indicator_interval(0, 1), j_bound=3, k_bound=6
        )
        assert report.passed
        assert report.max_residual <= 1e-10
        assert report.details["max_vanishing_branch"] <= 1e-10

    def test_split_frame_sum(self, cs13, haar_family):
        for r in range(3):
            report = verify_split_frame_sum(
                cs13, haar_family, r, indicator_interval(0, 1), TruncationSpec(-4, 4, 8)
            )
            assert report.passed, report.to_json_dict()

    def test_split_zero_label_matches_base_sum(self, cs13, haar_family):
        report = verify_split_frame_sum(
            cs13, haar_family, 0, indicator_interval(0, 1), TruncationSpec(-4, 4, 20)
        )
        # With label 0 the single-space side is the plain system; wide window
        # reproduces the truncated Parseval constant.
        assert report.details["single_space_sum"] == pytest.approx(
            float(oracle_parseval_sum(-4, 4)), abs=1e-10
        )

    def test_projection(self, cs13, haar_family):
        report = verify_projection(cs13, haar_family, TruncationSpec(-3, 3, 8))
        assert report.passed
        assert report.details["geometry_exact"]
        assert report.max_residual <= 1e-12

    def test_project_first_is_component_zero(self, cs13, haar_family):
        from superframe.frames import project_first

        e = system_element(SUPER, 1, (2,), 0, cs13, haar_family)
        assert project_first(e).cells == e.components[0].cells

    def test_projection_trivial_when_p_is_one(self, haar_family):
        from superframe.intlin import IntMatrix
        from superframe.quotient import CosetSystem

        cs = CosetSystem.build(IntMatrix([[2]]), IntMatrix.identity(1))
        report = verify_projection(cs, haar_family, TruncationSpec(-2, 2, 4))
        assert report.passed

    def test_onb_transfer(self, cs13, haar_family):
        report = verify_onb_transfer(cs13, haar_family, TruncationSpec(-3, 3, 8))
        assert report.passed

    def test_corollary(self, cs13, haar_family):
        report = verify_corollary(cs13, haar_family, TruncationSpec(-3, 3, 8))
        assert report.passed


class TestFrameReport:
    def test_report_fields(self, cs13, haar_family):
        rep = frame_report(
            [indicator_interval(0, 1)], BASE, TruncationSpec(-4, 4, None), cs13, haar_family
        )
        d = rep.to_json_dict()
        assert d["A_est"] <= d["B_est"]
        assert d["sums"][0] == pytest.approx(float(oracle_parseval_sum(-4, 4)), abs=1e-10)
        assert d["k_window_clipped"] is False

    def test_grid_order_lexicographic(self, cs13, haar_family):
        grid = index_grid(BASE, TruncationSpec(-1, 1, 1), cs13, haar_family)
        assert grid == sorted(grid)
