"""Root-classification index engine: examples, properties, certificates."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import fredholm as fh
from fredholm.laurent import (
    LaurentPolynomial,
    NonConvergenceError,
    Verdict,
    ZeroSymbolError,
)


def poly(mapping):
    return LaurentPolynomial.from_terms({e: complex(c) for e, c in mapping.items()})


# Magnitudes either zero or comfortably representable: the engine's
# conditioning contract covers desk-scale coefficient ratios.
coeff = st.one_of(
    st.just(0j),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1.0,
                       allow_nan=False, allow_infinity=False),
)


@st.composite
def laurents(draw, max_pole=3, max_deg=6):
    m = draw(st.integers(0, max_pole))
    n = draw(st.integers(0, max_deg))
    coeffs = draw(st.lists(coeff, min_size=m + n + 1, max_size=m + n + 1))
    return LaurentPolynomial(m, tuple(coeffs))


def comfortable_index(p):
    """Index result, skipping instances too close to the non-Fredholm set."""
    p = fh.normalize(p)
    assume(not p.is_zero)
    res = fh.index_shift_poly(p)
    assume(res.is_fredholm)
    assume(res.certificate.min_modulus_on_circle > 1e-6)
    return res


class TestNormalize:
    def test_strips_both_edges(self):
        p = LaurentPolynomial(1, (0, 1, 0))
        q = fh.normalize(p)
        assert q.pole_order == 0 and q.coeffs == (1 + 0j,)

    def test_pure_pole_unchanged(self):
        p = LaurentPolynomial(1, (1,))
        assert fh.normalize(p) == p

    def test_zero_polynomial(self):
        assert fh.normalize(LaurentPolynomial(0, (0, 0, 0))).is_zero

    def test_low_zeros_kept_at_exponent_zero(self):
        # p = z: the zero constant term is a genuine root of the
        # associated polynomial, not representation padding.
        q = fh.normalize(LaurentPolynomial(0, (0, 1)))
        assert q.pole_order == 0 and q.coeffs == (0j, 1 + 0j)


class TestFindRoots:
    def test_z2_minus_1(self):
        roots = fh.find_roots(poly({0: -1, 2: 1}))
        values = sorted((r for r, _ in roots), key=lambda z: z.real)
        assert len(roots) == 2
        assert abs(values[0] + 1) < 1e-12 and abs(values[1] - 1) < 1e-12

    def test_z2_plus_half(self):
        roots = fh.find_roots(poly({0: 0.5, 2: 1}))
        mags = sorted(abs(r) for r, _ in roots)
        target = 0.7071067811865476
        assert all(abs(m - target) < 1e-12 for m in mags)
        assert all(abs(r.real) < 1e-12 for r, _ in roots)

    def test_random_degree8_residual_bound(self):
        # Oracle: re-evaluate the polynomial at every returned root with an
        # independent Horner pass and check the stated residual bound.
        rng = np.random.default_rng(42)
        tol = 1e-12
        for _ in range(50):
            coeffs = rng.uniform(-1, 1, 9) + 1j * rng.uniform(-1, 1, 9)
            p = LaurentPolynomial(0, tuple(coeffs))
            scale = np.abs(coeffs).sum()
            for root, mult in fh.find_roots(p, tol=tol):
                residual = abs(np.polyval(coeffs[::-1], root))
                assert residual <= tol * scale * max(1.0, abs(root)) ** 8

    def test_multiplicities_cluster(self):
        # (z - 0.5)^3: one clustered root of multiplicity 3
        p = fh.multiply(fh.multiply(poly({0: -0.5, 1: 1}), poly({0: -0.5, 1: 1})),
                        poly({0: -0.5, 1: 1}))
        roots = fh.find_roots(p)
        assert sum(m for _, m in roots) == 3
        assert max(m for _, m in roots) == 3

    def test_zero_rejected(self):
        with pytest.raises(ZeroSymbolError):
            fh.find_roots(LaurentPolynomial.zero())


class TestClassifyRoots:
    def test_inside_and_outside(self):
        cls = fh.classify_roots([0.5, 2.0], band=1e-8)
        assert (cls.inside, cls.on_circle, cls.outside) == (1, 0, 1)

    def test_on_circle(self):
        cls = fh.classify_roots([1.0], band=1e-8)
        assert cls.on_circle == 1

    def test_within_band_counts_as_on_circle(self):
        cls = fh.classify_roots([1.0 + 5e-9], band=1e-8)
        assert cls.on_circle == 1

    def test_band_must_be_positive(self):
        with pytest.raises(ValueError):
            fh.classify_roots([0.5], band=0.0)


class TestIndexShiftPoly:
    @pytest.mark.parametrize(
        "mapping,expected",
        [
            ({1: 1}, 1),            # the shift itself
            ({-1: 1}, -1),          # its adjoint
            ({0: 1, 1: 2}, 1),      # |c1| > |c0|
            ({0: 2, 1: 1}, 0),      # |c1| < |c0|
            ({0: 0.25, 2: 1}, 2),   # both roots at modulus 0.5
        ],
    )
    def test_examples(self, mapping, expected):
        res = fh.index_shift_poly(poly(mapping))
        assert res.is_fredholm and res.index == expected

    def test_marginal_on_circle(self):
        res = fh.index_shift_poly(poly({0: 1, 1: 1}))
        assert res.status is Verdict.NUMERICALLY_MARGINAL and res.index is None

    def test_zero_symbol(self):
        with pytest.raises(ZeroSymbolError):
            fh.index_shift_poly(LaurentPolynomial.zero())

    def test_certificate_fields(self):
        res = fh.index_shift_poly(poly({0: 1, 1: 2}))
        cert = res.certificate
        assert cert.min_modulus_on_circle > 0
        assert cert.roots_inside == 1 and cert.pole_order == 0
        assert cert.winding is None

    def test_certificate_lower_bounds_circle_modulus(self):
        rng = np.random.default_rng(3)
        theta = 2 * np.pi * np.arange(512) / 512
        for _ in range(25):
            coeffs = rng.normal(size=5) + 1j * rng.normal(size=5)
            p = LaurentPolynomial(2, tuple(coeffs))
            res = fh.index_shift_poly(p)
            sampled = np.abs(fh.CircleSymbol.from_laurent(p).values_at(theta)).min()
            assert res.certificate.min_modulus_on_circle <= sampled + 1e-9


class TestAlgebra:
    def test_multiply_examples(self):
        one = fh.normalize(fh.multiply(poly({1: 1}), poly({-1: 1})))
        assert one.pole_order == 0 and one.coeffs == (1 + 0j,)
        prod = fh.multiply(poly({0: -0.5, 1: 1}), poly({0: -2, 1: 1}))
        assert prod.pole_order == 0
        assert prod.coeffs == (1 + 0j, -2.5 + 0j, 1 + 0j)

    def test_adjoint_examples(self):
        adj = fh.normalize(fh.adjoint_symbol(poly({1: 1})))
        assert adj.pole_order == 1 and adj.coeffs == (1 + 0j,)
        adj2 = fh.normalize(fh.adjoint_symbol(poly({0: 1, 1: 2})))
        assert adj2.pole_order == 1 and adj2.coeffs == (2 + 0j, 1 + 0j)

    def test_invert_argument_round_trip(self):
        p = poly({-2: 1j, 0: 2, 3: -1})
        back = fh.normalize(fh.invert_argument(fh.invert_argument(p)))
        assert back == fh.normalize(p)

    @settings(max_examples=60, deadline=None)
    @given(laurents(), laurents())
    def test_index_additivity(self, p, q):
        rp = comfortable_index(p)
        rq = comfortable_index(q)
        rpq = comfortable_index(fh.multiply(p, q))
        assert rpq.index == rp.index + rq.index

    @settings(max_examples=60, deadline=None)
    @given(laurents())
    def test_adjoint_antisymmetry(self, p):
        res = comfortable_index(p)
        adj = fh.index_shift_poly(fh.adjoint_symbol(p))
        assert adj.is_fredholm and adj.index == -res.index

    @settings(max_examples=60, deadline=None)
    @given(laurents(), st.complex_numbers(min_magnitude=0.1, max_magnitude=10,
                                          allow_nan=False, allow_infinity=False))
    def test_scale_invariance(self, p, lam):
        res = comfortable_index(p)
        scaled = fh.multiply(p, LaurentPolynomial(0, (lam,)))
        assert fh.index_shift_poly(scaled).index == res.index

    @settings(max_examples=80, deadline=None)
    @given(laurents())
    def test_root_count_conservation(self, p):
        p = fh.normalize(p)
        assume(not p.is_zero)
        cls = fh.classify_roots(fh.find_roots(p))
        assert cls.inside + cls.on_circle + cls.outside == len(p.coeffs) - 1


def test_stability_under_small_perturbations():
    rng = np.random.default_rng(11)
    done = 0
    while done < 40:
        m = int(rng.integers(0, 3))
        n = int(rng.integers(0, 5))
        coeffs = rng.normal(size=m + n + 1) + 1j * rng.normal(size=m + n + 1)
        p = fh.normalize(LaurentPolynomial(m, tuple(coeffs)))
        if p.is_zero:
            continue
        res = fh.index_shift_poly(p)
        if not res.is_fredholm or res.certificate.min_modulus_on_circle < 1e-3:
            continue
        budget = res.certificate.min_modulus_on_circle / len(p.coeffs)
        noise = 0.5 * budget * np.exp(1j * rng.uniform(0, 2 * np.pi, len(p.coeffs)))
        perturbed = LaurentPolynomial(p.pole_order, tuple(np.asarray(p.coeffs) + noise))
        assert fh.index_shift_poly(perturbed).index == res.index
        done += 1


def test_degree_cap_enforced():
    with pytest.raises(ValueError):
        LaurentPolynomial(0, (1.0,) * 300)


def test_json_round_trip():
    p = poly({-1: 1 + 2j, 0: -0.5, 2: 3})
    assert LaurentPolynomial.from_json(p.to_json()) == p
