import itertools
import json
from fractions import Fraction

import pytest

from superframe.errors import ShapeMismatch
from superframe.funcspace import (
    dilate,
    haar,
    indicator_interval,
    indicator_polygon,
    random_step,
    sup_distance,
    translate,
)
from superframe.intlin import IntMatrix
from superframe.quotient import CosetSystem, perm_power, unit_phase
from superframe.superspace import (
    SuperVector,
    decompose,
    embed_s,
    embed_s_prime,
    reassemble,
    super_add,
    super_dilate,
    super_inner_product,
    super_norm,
    super_scale_p,
    super_sup_distance,
    super_translate,
    supervector_from_json,
    supervector_to_json,
)


def random_supervector(cs, seed, cells=4):
    return SuperVector([random_step(seed + 17 * q, cells, dim=cs.dim) for q in range(cs.p)])


class TestEmbeddings:
    def test_p_one_is_identity(self):
        cs = CosetSystem.build(IntMatrix([[2]]), IntMatrix.identity(1))
        g = embed_s(haar(), cs)
        assert g.p == 1
        assert sup_distance(g[0], haar()) == 0
        gp = embed_s_prime(haar(), cs)
        assert sup_distance(gp[0], haar()) == 0

    def test_diagonal_isometry(self, cs13):
        assert super_norm(embed_s(haar(), cs13)) == pytest.approx(1.0, abs=1e-12)

    def test_components_identical(self, cs13):
        g = embed_s(indicator_interval(0, 1), cs13)
        assert g[0].cells == g[1].cells == g[2].cells

    @pytest.mark.parametrize("seed", range(5))
    def test_rescaled_isometry(self, cs13, seed):
        f = random_step(seed, 5)
        assert super_norm(embed_s_prime(f, cs13)) == pytest.approx(f.norm(), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_rescale_carries_one_embedding_to_the_other(self, cs13, seed):
        f = random_step(seed + 30, 5)
        lhs = super_scale_p(embed_s_prime(f, cs13), cs13)
        rhs = embed_s(f, cs13)
        assert super_sup_distance(lhs, rhs) <= 1e-12

    def test_rescaled_isometry_2d(self, csq):
        f = indicator_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
        assert super_norm(embed_s_prime(f, csq)) == pytest.approx(1.0, abs=1e-12)
        lhs = super_scale_p(embed_s_prime(f, csq), csq)
        assert super_sup_distance(lhs, embed_s(f, csq)) <= 1e-12


class TestTranslation:
    def test_zero_shift_is_identity(self, cs13):
        g = random_supervector(cs13, 0)
        h = super_translate(g, (0,), cs13)
        assert super_sup_distance(g, h) == 0

    def test_phases_primed(self, cs13):
        f = indicator_interval(0, 1)
        g = super_translate(embed_s_prime(f, cs13), (1,), cs13, primed=True)
        base = embed_s_prime(f, cs13)[0]
        shifted = translate(base, (1,))
        for q, expected_phase in enumerate(
            [unit_phase(Fraction(0)), unit_phase(Fraction(1, 3)), unit_phase(Fraction(2, 3))]
        ):
            cell_values = {c.value for c in g[q].cells}
            want = {expected_phase * c.value for c in shifted.cells}
            assert all(
                min(abs(v - w) for w in want) <= 1e-15 for v in cell_values
            )

    def test_base_variant_shifts_by_refined_lattice(self, cs13):
        f = indicator_interval(0, 1)
        g = super_translate(embed_s(f, cs13), (1,), cs13)
        assert g[0].cells[0].lo == Fraction(1, 3)

    @pytest.mark.parametrize("seed", range(5))
    def test_norm_preserved(self, cs13, seed):
        g = random_supervector(cs13, seed)
        n = super_norm(g)
        assert abs(super_norm(super_translate(g, (2,), cs13)) - n) <= 1e-12
        assert abs(super_norm(super_translate(g, (-3,), cs13, primed=True)) - n) <= 1e-12


class TestDilation:
    def test_zero_power_is_identity(self, cs13):
        g = random_supervector(cs13, 1)
        assert super_dilate(g, 0, cs13) is g

    def test_component_permutation(self, cs13):
        # sigma* = (0)(1 2); one step sends (f0, f1, f2) to (Df0, Df2, Df1).
        f0, f1, f2 = (random_step(s, 3) for s in (10, 11, 12))
        g = SuperVector([f0, f1, f2])
        h = super_dilate(g, 1, cs13)
        assert sup_distance(h[0], dilate(f0, cs13.m, 1)) <= 1e-15
        assert sup_distance(h[1], dilate(f2, cs13.m, 1)) <= 1e-15
        assert sup_distance(h[2], dilate(f1, cs13.m, 1)) <= 1e-15

    @pytest.mark.parametrize("j", range(-2, 3))
    def test_norm_preserved(self, cs13, j):
        g = random_supervector(cs13, 40 + j)
        assert abs(super_norm(super_dilate(g, j, cs13)) - super_norm(g)) <= 1e-12

    @pytest.mark.parametrize("j", range(-4, 5))
    def test_power_matches_iterated_single_steps(self, cs13, j):
        g = random_supervector(cs13, 60 + j, cells=3)
        direct = super_dilate(g, j, cs13, primed=True)
        iterated = g
        step = 1 if j >= 0 else -1
        for _ in range(abs(j)):
            iterated = super_dilate(iterated, step, cs13, primed=True)
        assert super_sup_distance(direct, iterated) <= 1e-10


class TestCommutationAndConjugation:
    @pytest.mark.parametrize("k", range(-3, 4))
    def test_lifted_commutation_base(self, cs13, k):
        g = random_supervector(cs13, 100 + k, cells=3)
        mk = cs13.m_prime.apply((k,))
        lhs = super_dilate(super_translate(g, mk, cs13), 1, cs13)
        rhs = super_translate(super_dilate(g, 1, cs13), (k,), cs13)
        assert super_sup_distance(lhs, rhs) <= 1e-10

    @pytest.mark.parametrize("k", range(-3, 4))
    def test_lifted_commutation_primed(self, cs13, k):
        g = random_supervector(cs13, 200 + k, cells=3)
        mk = cs13.m_prime.apply((k,))
        lhs = super_dilate(super_translate(g, mk, cs13, primed=True), 1, cs13, primed=True)
        rhs = super_translate(super_dilate(g, 1, cs13, primed=True), (k,), cs13, primed=True)
        assert super_sup_distance(lhs, rhs) <= 1e-10

    @pytest.mark.parametrize("seed", range(3))
    def test_lifted_rescale_intertwines(self, cs13, seed):
        g = random_supervector(cs13, 300 + seed, cells=3)
        lhs = super_scale_p(super_dilate(g, 1, cs13, primed=True), cs13)
        rhs = super_dilate(super_scale_p(g, cs13), 1, cs13)
        assert super_sup_distance(lhs, rhs) <= 1e-10
        lhs = super_scale_p(super_translate(g, (2,), cs13, primed=True), cs13)
        rhs = super_translate(super_scale_p(g, cs13), (2,), cs13)
        assert super_sup_distance(lhs, rhs) <= 1e-10

    @pytest.mark.parametrize("j", range(-2, 3))
    @pytest.mark.parametrize("k", [-3, -1, 0, 2])
    def test_conjugation_chain(self, cs13, j, k):
        f = random_step(j * 10 + k, 4)
        lhs = super_scale_p(
            super_dilate(
                super_translate(embed_s_prime(f, cs13), (k,), cs13, primed=True),
                j,
                cs13,
                primed=True,
            ),
            cs13,
        )
        rhs = super_dilate(super_translate(embed_s(f, cs13), (k,), cs13), j, cs13)
        assert super_sup_distance(lhs, rhs) <= 1e-10


class TestInnerProducts:
    def test_diagonal_embedding_preserves_products(self, cs13):
        f = random_step(1, 4)
        g = embed_s(f, cs13)
        assert super_inner_product(g, g) == pytest.approx(f.norm_sq(), abs=1e-12)

    def test_orthogonality_across_labels(self, cs13):
        # Shifted embeddings with different labels are orthogonal.
        f = random_step(2, 4)
        g = random_step(3, 4)
        vecs = [
            super_translate(embed_s_prime(x, cs13), cs13.translation_rep(r), cs13, primed=True)
            for r, x in ((0, f), (1, g), (2, f))
        ]
        for a, b in itertools.combinations(range(3), 2):
            assert abs(super_inner_product(vecs[a], vecs[b])) <= 1e-12

    def test_shape_mismatch(self, cs13):
        g = random_supervector(cs13, 5)
        short = SuperVector(g.components[:2])
        with pytest.raises(ShapeMismatch):
            super_inner_product(g, short)
        with pytest.raises(ShapeMismatch):
            super_add(g, short)


class TestDecomposition:
    def test_embedding_sits_on_label_zero(self, cs13):
        f = random_step(7, 4)
        parts = decompose(embed_s_prime(f, cs13), cs13)
        assert sup_distance(parts[0], f) <= 1e-12
        assert parts[1].norm() <= 1e-12
        assert parts[2].norm() <= 1e-12

    def test_shifted_embedding_sits_on_its_label(self, cs13):
        f = random_step(8, 4)
        g = super_translate(
            embed_s_prime(f, cs13), cs13.translation_rep(2), cs13, primed=True
        )
        parts = decompose(g, cs13)
        assert sup_distance(parts[2], f) <= 1e-12
        assert parts[0].norm() <= 1e-12
        assert parts[1].norm() <= 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, cs13, seed):
        g = random_supervector(cs13, 400 + seed, cells=3)
        assert super_sup_distance(reassemble(decompose(g, cs13), cs13), g) <= 1e-10

    def test_round_trip_2d(self, csq):
        g = SuperVector(
            [random_step(500 + q, 1, dim=2) for q in range(csq.p)]
        )
        assert super_sup_distance(reassemble(decompose(g, csq), csq), g) <= 1e-10

    @pytest.mark.parametrize("big_j", range(-3, 4))
    def test_dilation_permutes_labels(self, cs13, big_j):
        f = random_step(9, 3)
        for r in range(cs13.p):
            g = super_dilate(
                super_translate(
                    embed_s_prime(f, cs13), cs13.translation_rep(r), cs13, primed=True
                ),
                big_j,
                cs13,
                primed=True,
            )
            parts = decompose(g, cs13)
            expected = perm_power(cs13.sigma, -big_j)[r]
            for idx, part in enumerate(parts):
                if idx == expected:
                    assert part.norm() == pytest.approx(f.norm(), abs=1e-10)
                else:
                    assert part.norm() <= 1e-10


class TestSerialization:
    def test_round_trip(self, cs13):
        g = random_supervector(cs13, 42)
        blob = json.dumps(supervector_to_json(g, cs13))
        h = supervector_from_json(json.loads(blob), cs13)
        assert super_sup_distance(g, h) == 0

    def test_fingerprint_guards_mixing(self, cs13, cs32):
        g = random_supervector(cs13, 42)
        blob = supervector_to_json(g, cs13)
        with pytest.raises(ShapeMismatch):
            supervector_from_json(blob, cs32)
