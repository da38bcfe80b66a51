import math
import random
from fractions import Fraction

import numpy as np
import pytest

from oscgeo.algebra import FrequencyList
from oscgeo.exact import ExactScalar, PI
from oscgeo.group import GroupElement, conjugate, invert, multiply
from oscgeo.isometries import (
    Composite,
    Inner,
    Inversion,
    IsotropyElement,
    LeftTranslation,
    ShapeMismatch,
    Theta,
    apply_isometry,
    aut_intersection_check,
    check_local_isometry,
    is_fiber_preserving,
    isotropy_matrix,
    psi_decompose,
    semidirect_product,
    structure_relations_check,
    theta_B,
    theta_differential_at_identity,
    validate_theta,
)
from oscgeo.lattices import Dim4Family, Twisted
from oscgeo.normalizers import in_normalizer

F1 = FrequencyList([1])
TWO_PI = 2 * PI
HALF_PI = PI / 2


def rand_orth(rng, m):
    q, r = np.linalg.qr(rng.normal(size=(m, m)))
    return q * np.sign(np.diag(r))


def rand_isotropy(rng, freqs):
    blocks = [rand_orth(rng, 2 * m) for _, m in freqs.runs()]
    cs = [rng.normal(size=2 * m) for _, m in freqs.runs()]
    eps = 1 if rng.random() < 0.5 else -1
    return IsotropyElement(eps, blocks, cs)


class TestIsotropyMatrix:
    def test_identity_element(self):
        el = IsotropyElement(1, [np.eye(2)], [np.zeros(2)])
        assert np.allclose(isotropy_matrix(el, F1), np.eye(4))

    def test_global_sign(self):
        el = IsotropyElement(-1, [np.eye(2)], [np.zeros(2)])
        assert np.allclose(isotropy_matrix(el, F1), -np.eye(4))

    def test_translation_structure(self):
        el = IsotropyElement(1, [np.eye(2)], [np.array([1.0, 0.0])])
        a = isotropy_matrix(el, F1)
        assert np.allclose(a[0], [1.0, 1.0, 0.0, -0.5])
        assert np.allclose(a[:, 3], [-0.5, -1.0, 0.0, 1.0])

    def test_shape_mismatch(self):
        el = IsotropyElement(1, [np.eye(2)], [np.zeros(2)])
        with pytest.raises(ShapeMismatch):
            isotropy_matrix(el, FrequencyList([1, 2]))

    def test_rejects_nonorthogonal_blocks(self):
        with pytest.raises(ValueError):
            IsotropyElement(1, [2 * np.eye(2)], [np.zeros(2)])


class TestLocalIsometry:
    def test_identity_passes(self):
        assert check_local_isometry(np.eye(4), F1)

    def test_scaling_fails(self):
        assert not check_local_isometry(2 * np.eye(4), F1)

    def test_isotropy_matrices_pass(self):
        rng = np.random.default_rng(1)
        for lams in ([1], [2, 2], [Fraction(1, 2), Fraction(1, 2), 3]):
            fl = FrequencyList(lams)
            for _ in range(10):
                a = isotropy_matrix(rand_isotropy(rng, fl), fl)
                assert check_local_isometry(a, fl)

    def test_generic_orthogonal_fails(self):
        # preserving the form is not enough; the bracket condition bites
        fl = F1
        a = np.eye(4)
        a[1, 1], a[1, 2], a[2, 1], a[2, 2] = 1, 1, 0, 1  # shear in the v-plane
        assert not check_local_isometry(a, fl)


class TestPsiDecompose:
    def test_identity(self):
        eps, blocks, c = psi_decompose(np.eye(4), F1)
        assert eps == 1
        assert np.allclose(blocks[0], np.eye(2))
        assert np.allclose(c, 0.0)

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        fl = FrequencyList([3, 3, Fraction(1, 2)])
        for _ in range(10):
            el = rand_isotropy(rng, fl)
            a = isotropy_matrix(el, fl)
            eps, blocks, c = psi_decompose(a, fl)
            assert eps == el.eps
            for b1, b2 in zip(blocks, el.blocks):
                assert np.allclose(b1, b2, atol=1e-10)
            assert np.allclose(c, np.concatenate(el.c), atol=1e-10)

    def test_product_law_matches_matrix_composition(self):
        rng = np.random.default_rng(3)
        fl = FrequencyList([1, 1])
        for _ in range(10):
            e1 = rand_isotropy(rng, fl)
            e2 = rand_isotropy(rng, fl)
            a1, a2 = isotropy_matrix(e1, fl), isotropy_matrix(e2, fl)
            eps, blocks, c = psi_decompose(a1 @ a2, fl)
            peps, pblocks, pc = semidirect_product(
                (e1.eps, e1.blocks, np.concatenate(e1.c)),
                (e2.eps, e2.blocks, np.concatenate(e2.c)),
                fl,
            )
            assert eps == peps
            for b1, b2 in zip(blocks, pblocks):
                assert np.allclose(b1, b2, atol=1e-10)
            assert np.allclose(c, pc, atol=1e-10)

    def test_rejects_non_isotropy_shape(self):
        bad = np.eye(4)
        bad[3, 0] = 1.0
        with pytest.raises(ShapeMismatch):
            psi_decompose(bad, F1)


class TestTheta:
    def test_identity_blocks_at_zero_angle(self):
        g = GroupElement(0.3, (1.5, -2.0), 0.0)
        out = theta_B([np.eye(2)], g, F1)
        assert np.allclose(out.coords(), g.coords())

    def test_zero_angle_applies_block_directly(self):
        b = np.diag([1.0, -1.0])
        g = GroupElement(Fraction(1, 2), (3, 4), ExactScalar(0))
        out = theta_B([b], g, F1)
        assert out == GroupElement(Fraction(1, 2), (3, -4), ExactScalar(0))

    def test_quarter_turn_exact_value(self):
        # P(pi/2) = [[1, 1], [-1, 1]], so P^T B P = [[0, 2], [2, 0]] for
        # B = diag(1, -1)
        b = np.diag([1.0, -1.0])
        g = GroupElement(0, (1, 0), HALF_PI)
        out = theta_B([b], g, F1)
        assert out == GroupElement(0, (0, 2), HALF_PI)
        normalized = theta_B([b], g, F1, normalized=True)
        assert normalized == GroupElement(0, (0, 1), HALF_PI)

    def test_special_angle_branch_is_identity_block(self):
        b = np.diag([1.0, -1.0])
        g = GroupElement(0, (2, 5), TWO_PI)
        out = theta_B([b], g, F1)
        assert out == GroupElement(0, (2, -5), TWO_PI)

    def test_exact_matches_float(self):
        b = np.diag([1.0, -1.0])
        fl = FrequencyList([1, 2])
        g = GroupElement(Fraction(1, 3), (1, 2, 3, 4), HALF_PI)
        exact = theta_B([b, np.eye(2)], g, fl)
        floated = theta_B([b, np.eye(2)], g.to_floats(), fl)
        assert max(
            abs(float(a) - b) for a, b in zip(exact.coords(), floated.coords())
        ) < 1e-12

    def test_differential_is_block_diagonal(self):
        for b in (np.diag([1.0, -1.0]), np.array([[0.6, -0.8], [0.8, 0.6]])):
            for normalized in (False, True):
                d = theta_differential_at_identity([b], F1, normalized)
                expected = np.eye(4)
                expected[1:3, 1:3] = b
                assert np.max(np.abs(d - expected)) < 1e-6

    def test_validation_mode_reports_both_variants(self):
        b = np.array([[0.6, -0.8], [0.8, 0.6]])
        raw = validate_theta([b], F1, normalized=False, samples=10, seed=2)
        fixed = validate_theta([b], F1, normalized=True, samples=10, seed=2)
        assert raw["differential_ok"] and fixed["differential_ok"]
        assert not raw["isometry_ok"]
        assert raw["witness"] is not None
        assert fixed["isometry_ok"]


class TestStructureRelations:
    def test_rotation_blocks_satisfy_all(self):
        rng = random.Random(0)
        for _ in range(5):
            phi = rng.uniform(0, 2 * math.pi)
            b = np.array(
                [[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]]
            )
            rep = structure_relations_check(
                [b], (rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.uniform(-3, 3), F1
            )
            assert rep["all_hold"], rep

    def test_reflection_blocks_fail_first_relation_with_witness(self):
        b = np.diag([1.0, -1.0])
        rep = structure_relations_check([b], (0.7, -0.3), 1.234, F1)
        assert not rep["i"]["holds"]
        assert rep["i"]["witness"] is not None
        assert rep["ii"]["holds"] and rep["iii"]["holds"]
        # the orientation-adjusted variant restores the identity
        assert rep["i_orientation_adjusted"]["holds"]

    def test_identity_block_reduces_to_inner_identity(self):
        rep = structure_relations_check([np.eye(2)], (1.0, 2.0), 0.5, F1)
        assert rep["all_hold"]

    def test_verbatim_variant_reports_failures(self):
        b = np.array([[0.6, -0.8], [0.8, 0.6]])
        rep = structure_relations_check([b], (1.0, 0.0), 0.8, F1, normalized=False)
        assert not rep["i"]["holds"]  # the unnormalized map is not an isometry
        assert rep["ii"]["holds"] and rep["iii"]["holds"]


class TestFiberPreservation:
    def test_left_translation_preserves(self):
        spec = Dim4Family(1, TWO_PI)
        h = GroupElement(Fraction(2, 7), (Fraction(1, 5), 3), HALF_PI)
        verdict = is_fiber_preserving(LeftTranslation(h), spec, samples=25)
        assert verdict.preserving

    def test_inversion_counterexample(self):
        spec = Dim4Family(1, TWO_PI)
        verdict = is_fiber_preserving(Inversion(), spec)
        assert not verdict.preserving
        g, lam = verdict.counterexample
        # replay: g lam^{-1} g^{-1} must leave the lattice
        moved = multiply(
            multiply(g, invert(lam, spec.freqs), spec.freqs),
            invert(g, spec.freqs),
            spec.freqs,
        )
        assert not spec.contains(moved)

    def test_theta_counterexample(self):
        spec = Dim4Family(1, TWO_PI)
        verdict = is_fiber_preserving(
            Theta([np.diag([1, -1])]), spec
        )
        assert not verdict.preserving
        g, lam = verdict.counterexample
        f = lambda x: theta_B([np.diag([1, -1])], x, spec.freqs)
        moved = multiply(
            invert(f(g), spec.freqs), f(multiply(g, lam, spec.freqs)), spec.freqs
        )
        assert not spec.contains(moved)

    def test_inner_matches_normalizer(self):
        spec = Dim4Family(1, TWO_PI)
        inside = GroupElement(Fraction(1, 3), (Fraction(1, 2), 0), HALF_PI)
        outside = GroupElement(0, (Fraction(1, 5), 0), HALF_PI)
        assert in_normalizer(inside, spec)
        assert is_fiber_preserving(Inner(inside), spec).preserving
        assert not in_normalizer(outside, spec)
        assert not is_fiber_preserving(Inner(outside), spec).preserving

    def test_composite_of_translations(self):
        spec = Dim4Family(1, TWO_PI)
        h1 = GroupElement(Fraction(1, 2), (1, 0), 0)
        h2 = GroupElement(0, (0, 1), HALF_PI)
        comp = Composite([LeftTranslation(h1), LeftTranslation(h2)])
        assert is_fiber_preserving(comp, spec, samples=20).preserving

    def test_twisted_lattice_grid(self):
        spec = Twisted(Dim4Family(1, TWO_PI), 1)
        h = GroupElement(Fraction(1, 4), (2, -1), 0)
        assert is_fiber_preserving(LeftTranslation(h), spec, samples=20).preserving


class TestApplyIsometry:
    def test_unknown_descriptor(self):
        with pytest.raises(TypeError):
            apply_isometry(object(), GroupElement.identity(1), F1)

    def test_inner_is_conjugation(self):
        h = GroupElement(0, (1, 0), HALF_PI)
        g = GroupElement(Fraction(1, 2), (0, 1), PI)
        assert apply_isometry(Inner(h), g, F1) == conjugate(h, g, F1)


class TestAutIntersection:
    def test_identity_blocks(self):
        el = IsotropyElement(1, [np.eye(2)], [np.zeros(2)])
        assert aut_intersection_check(el)

    def test_rotation_blocks_are_symplectic(self):
        b = np.array([[0.6, -0.8], [0.8, 0.6]])
        el = IsotropyElement(1, [b], [np.zeros(2)])
        assert aut_intersection_check(el)

    def test_reflection_not_symplectic(self):
        el = IsotropyElement(1, [np.diag([1.0, -1.0])], [np.zeros(2)])
        assert not aut_intersection_check(el)

    def test_mirror_coset_flips_the_test(self):
        # composed with the inversion, the mirror block diag(1,-1) passes
        el = IsotropyElement(
            1, [np.diag([1.0, -1.0])], [np.zeros(2)], invert_flag=True
        )
        assert aut_intersection_check(el)
        el2 = IsotropyElement(1, [np.eye(2)], [np.zeros(2)], invert_flag=True)
        assert not aut_intersection_check(el2)

    def test_inner_part_is_irrelevant(self):
        b = np.array([[0.0, -1.0], [1.0, 0.0]])
        el = IsotropyElement(1, [b], [np.ones(2)], inner=((1.0, 0.0), 0.5))
        assert aut_intersection_check(el)
