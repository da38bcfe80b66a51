import random
from fractions import Fraction

import pytest

from oscgeo.algebra import AlgebraVector, CausalClass, causal_class
from oscgeo.exact import ExactScalar, PI
from oscgeo.geodesics import Geodesic, eval_geodesic, eval_geodesic_exact
from oscgeo.group import GroupElement, max_coord_dist, multiply
from oscgeo.lattices import (
    Dim4Family,
    Dim6Family,
    ProductWithLine,
    Twisted,
    UnsupportedSpec,
)
from oscgeo.quotient import (
    ClosedGeodesicCertificate,
    CertificateVerificationFailed,
    classify_lightlike,
    closed_timelike_and_spacelike,
    product_line_lightlike,
    search_closed,
)

TWO_PI = 2 * PI
HALF_PI = PI / 2


def rand_lightlike(rng, n, lams):
    """Rational lightlike velocity with a != 0."""
    a = Fraction(rng.randint(1, 3), rng.randint(1, 2)) * rng.choice((1, -1))
    bc = [
        (Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3)))
        for _ in range(n)
    ]
    q = sum((b * b + c * c) / lam for (b, c), lam in zip(bc, lams))
    d = -q / (2 * a)
    return AlgebraVector(d, bc, a)


class TestClassifyLightlike:
    @pytest.mark.parametrize("angle", [TWO_PI, PI, HALF_PI])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_product_families_all_closed(self, angle, n):
        verdict = classify_lightlike(Dim4Family(n, angle))
        assert verdict.all_closed
        assert verdict.witness is not None
        assert Dim4Family(n, angle).contains(verdict.witness)
        assert not verdict.witness.t.is_zero()

    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_twisted_families_only_central(self, p, n):
        verdict = classify_lightlike(Twisted(Dim4Family(n, TWO_PI), p))
        assert verdict.kind == "only_central_direction"
        assert verdict.witness is None

    @pytest.mark.parametrize("m_div", [1, 2, 4])
    def test_dim6_all_closed(self, m_div):
        spec = Dim6Family(1, 2, 3, m_div)
        verdict = classify_lightlike(spec)
        assert verdict.all_closed
        # the witness and the full period 2 pi q are both members
        assert spec.contains(verdict.witness)
        assert spec.contains(GroupElement(0, (0,) * 4, TWO_PI * 3))


class TestSearchClosed:
    def test_central_direction_hits_central_element(self):
        spec = Dim4Family(3, TWO_PI)  # z-lattice step 1/6
        cert = search_closed(AlgebraVector.Z(1), spec)
        assert cert is not None
        assert cert.s_star == Fraction(1, 6)
        assert cert.lattice_point == GroupElement(Fraction(1, 6), (0, 0), 0)
        assert cert.causal == CausalClass.LIGHTLIKE

    def test_t_direction(self):
        spec = Dim4Family(1, TWO_PI)
        cert = search_closed(AlgebraVector.T(1), spec)
        assert cert is not None
        assert cert.s_star == TWO_PI
        assert cert.lattice_point == GroupElement(0, (0, 0), TWO_PI)

    def test_lightlike_closes_at_k0_t0_over_a(self):
        spec = Dim4Family(1, TWO_PI)
        x = AlgebraVector(Fraction(-1, 4), [(1, 0)], 2)  # lightlike, a = 2
        cert = search_closed(x, spec)
        assert cert is not None
        assert cert.s_star == PI  # K0 t0 / a = 2 pi / 2
        assert cert.lattice_point == GroupElement(0, (0, 0), TWO_PI)
        assert cert.causal == CausalClass.LIGHTLIKE

    def test_negative_a_still_finds_positive_time(self):
        spec = Dim4Family(1, TWO_PI)
        x = AlgebraVector(Fraction(1, 4), [(1, 0)], -2)
        cert = search_closed(x, spec)
        assert cert is not None
        assert float(cert.s_star) > 0

    def test_randomized_lightlike_certificates(self):
        rng = random.Random(12)
        for spec in (Dim4Family(1, HALF_PI), Dim6Family(2, 1, 3, 2)):
            prof = spec.profile()
            lams = spec.freqs.lambdas
            for _ in range(25):
                x = rand_lightlike(rng, spec.freqs.n, lams)
                cert = search_closed(x, spec, r_max=prof.k0 * 8)
                assert cert is not None, f"no certificate for {x}"
                cert.verify(spec)

    def test_periodicity_of_certified_hits(self):
        # powers of the certified point are hits of the same curve
        spec = Dim4Family(1, TWO_PI)
        x = AlgebraVector(Fraction(-1, 4), [(1, 0)], 2)
        cert = search_closed(x, spec)
        fl = spec.freqs
        gamma_k = cert.lattice_point
        for k in range(2, 5):
            gamma_k = multiply(gamma_k, cert.lattice_point, fl)
            s_k = cert.s_star * k
            assert eval_geodesic_exact(x, s_k, fl) == gamma_k
            assert spec.contains(gamma_k)

    def test_open_direction_reports_none(self):
        # twisted lattice: a generic lightlike direction never closes
        spec = Twisted(Dim4Family(1, TWO_PI), 1)
        x = AlgebraVector(Fraction(-1, 4), [(1, 0)], 2)
        assert search_closed(x, spec, r_max=100) is None

    def test_float_input_falls_back_to_snapping(self):
        spec = Dim4Family(1, TWO_PI)
        x = AlgebraVector(-0.25, [(1.0, 0.0)], 2.0)
        cert = search_closed(x, spec)
        assert cert is not None
        assert cert.lattice_point.is_exact()
        assert spec.contains(cert.lattice_point)

    def test_spacelike_line_closes(self):
        spec = Dim4Family(2, TWO_PI)
        x = AlgebraVector(Fraction(1, 3), [(Fraction(2), Fraction(-1, 2))], 0)
        cert = search_closed(x, spec)
        assert cert is not None
        assert cert.causal == CausalClass.SPACELIKE
        cert.verify(spec)


class TestClosedCausalCertificates:
    @pytest.mark.parametrize(
        "spec",
        [
            Dim4Family(1, TWO_PI),     # K0 = 1
            Dim4Family(2, TWO_PI),
            Dim4Family(1, PI),         # K0 = 2
            Dim4Family(1, HALF_PI),    # K0 = 4
            Dim4Family(3, HALF_PI),
            Dim6Family(1, 1, 1, 1),    # K0 = 1
            Dim6Family(2, 2, 1, 2),    # K0 = 2, singular second block
            Dim6Family(1, 1, 3, 2),    # K0 = 2
            Dim6Family(2, 2, 3, 4),    # K0 = 4
            Dim6Family(3, 4, 1, 4),
            Twisted(Dim4Family(1, TWO_PI), 2),
            Twisted(Dim4Family(1, HALF_PI), 1),
        ],
    )
    def test_both_causal_signs_produced(self, spec):
        time_cert, space_cert = closed_timelike_and_spacelike(spec)
        assert time_cert.causal == CausalClass.TIMELIKE
        assert space_cert.causal == CausalClass.SPACELIKE
        for cert in (time_cert, space_cert):
            cert.verify(spec)
            assert spec.contains(cert.lattice_point)

    def test_k0_one_certificates_have_zero_oscillator_part(self):
        t_cert, s_cert = closed_timelike_and_spacelike(Dim4Family(1, TWO_PI))
        for cert in (t_cert, s_cert):
            assert all(b == 0 and c == 0 for b, c in cert.initial.bc)
        # timelike needs negative d/t ratio, spacelike positive
        assert t_cert.initial.d < 0 < s_cert.initial.d

    def test_k0_four_uses_nonsingular_solve(self):
        t_cert, s_cert = closed_timelike_and_spacelike(Dim4Family(1, HALF_PI))
        for cert in (t_cert, s_cert):
            assert cert.initial_exact is not None
            (b, c), = cert.initial_exact.bc
            assert b == ExactScalar(0, Fraction(-3, 4))
            assert c == ExactScalar(0, Fraction(-3, 4))
            assert cert.lattice_point.t == 3 * HALF_PI
            # float re-evaluation agrees to 1e-9 (checked in verify); replay
            # the float evaluation explicitly here
            approached = eval_geodesic(
                Geodesic(cert.initial, Dim4Family(1, HALF_PI).freqs),
                float(cert.s_star),
            )
            assert (
                max_coord_dist(approached, cert.lattice_point.to_floats()) < 1e-9
            )

    def test_certificate_causal_matches_float_classification(self):
        for spec in (Dim4Family(1, HALF_PI), Dim6Family(1, 2, 3, 4)):
            for cert in closed_timelike_and_spacelike(spec):
                assert causal_class(cert.initial, spec.freqs) == cert.causal

    def test_unsupported_spec(self):
        with pytest.raises(UnsupportedSpec):
            closed_timelike_and_spacelike(
                ProductWithLine(Dim4Family(1, TWO_PI), w=1)
            )


class TestCertificateVerification:
    def test_bad_certificate_raises(self):
        spec = Dim4Family(1, TWO_PI)
        bad = ClosedGeodesicCertificate(
            AlgebraVector(1.0, [(0.0, 0.0)], 1.0),
            1.0,
            GroupElement(Fraction(1, 2), (0, 0), TWO_PI),
            CausalClass.SPACELIKE,
        )
        with pytest.raises(CertificateVerificationFailed):
            bad.verify(spec)

    def test_nonmember_target_raises(self):
        spec = Dim4Family(1, TWO_PI)
        bad = ClosedGeodesicCertificate(
            AlgebraVector(1.0, [(0.0, 0.0)], 0.0),
            1.0,
            GroupElement(Fraction(1, 3), (0, 0), 0),
            CausalClass.LIGHTLIKE,
        )
        with pytest.raises(CertificateVerificationFailed):
            bad.verify(spec)


class TestProductLine:
    def base(self):
        return Dim4Family(1, TWO_PI)

    def test_rational_w2_never_closed(self):
        spec = ProductWithLine(self.base(), w_squared=ExactScalar(1))
        assert product_line_lightlike(spec).kind == "never_closed"

    def test_two_pi_w2_some_closed(self):
        spec = ProductWithLine(self.base(), w_squared=TWO_PI)
        verdict = product_line_lightlike(spec)
        assert verdict.kind == "some_closed_possible"
        k, m, z = verdict.residue["k"], verdict.residue["m"], verdict.residue["z"]
        # the reported residues satisfy w^2 = -2 pi k m / z^2
        assert Fraction(-2 * k * m, z * z) == spec.w_squared.coeffs[1]

    def test_flagged_irrational_never_closed(self):
        spec = ProductWithLine(self.base(), w_squared="irrational")
        assert product_line_lightlike(spec).kind == "never_closed"

    def test_pure_pi_step_never_closed(self):
        # w = pi has w^2 = pi^2, which is outside 2 pi Q
        spec = ProductWithLine(self.base(), w=PI)
        assert product_line_lightlike(spec).kind == "never_closed"

    def test_mixed_w2_never_closed(self):
        spec = ProductWithLine(self.base(), w_squared=ExactScalar(1, 2))
        assert product_line_lightlike(spec).kind == "never_closed"
