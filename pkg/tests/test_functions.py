"""Tests for candidate Petz functions."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from petz_geometry.config import config
from petz_geometry.core.errors import DomainError, SpecParseError, UnsupportedVariantError
from petz_geometry.core.functions import (
    check_symmetry,
    derivative_at_zero_plus,
    eval_f,
    evaluate,
    matrix_monotonicity_witness,
    parse_spec,
    phi,
    phi_inverse,
    rational_decomposition,
    standard_log_grid,
)
from petz_geometry.core.models import MonotoneFunctionSpec, Variant


class TestParseSpec:
    """Test the CLI spelling of function specs."""

    @pytest.mark.parametrize(
        "text, variant, kappa",
        [
            ("gl:0.5", Variant.GL_FAMILY, 0.5),
            ("bh", Variant.GL_FAMILY, 1.0),
            ("wy", Variant.GL_FAMILY, 0.5),
            ("bkm", Variant.BKM, 1.0),
            ("test:square", Variant.TEST_SQUARE, 1.0),
        ],
    )
    def test_known_specs(self, text, variant, kappa):
        spec = parse_spec(text)
        assert spec.variant is variant
        assert spec.kappa == kappa

    def test_label_round_trip(self):
        for text in ("gl:0.3", "bkm", "wy", "bh", "gl:2", "bkm*0.5"):
            assert parse_spec(parse_spec(text).label) == parse_spec(text)

    def test_scale_suffix(self):
        spec = parse_spec("bkm*0.5")
        assert spec.scale == 0.5
        assert eval_f(spec, 1.0) == 0.5

    @pytest.mark.parametrize("text", ["gauss", "gl:", "gl:-1", "gl:abc", "bkm*0"])
    def test_rejected(self, text):
        with pytest.raises(SpecParseError):
            parse_spec(text)


class TestEvaluation:
    """Test closed forms and normalization."""

    @pytest.mark.parametrize("text", ["gl:0.25", "wy", "bh", "gl:1.5", "bkm"])
    def test_normalized_at_one(self, text):
        """f(1) = 1 exactly through the series branch."""
        assert eval_f(parse_spec(text), 1.0) == 1.0

    def test_bkm_at_one_prints_one(self):
        assert str(eval_f(parse_spec("bkm"), 1)) == "1.0"

    def test_bures_helstrom(self):
        """kappa = 1 gives (1 + x)/2."""
        x = standard_log_grid(points=50)
        assert_allclose(evaluate(parse_spec("bh"), x), (1 + x) / 2, rtol=1e-12)

    def test_wigner_yanase(self):
        """kappa = 1/2 gives (sqrt(x) + 1)^2 / 4."""
        x = standard_log_grid(points=50)
        assert_allclose(evaluate(parse_spec("wy"), x), (np.sqrt(x) + 1) ** 2 / 4, rtol=1e-12)

    def test_bkm_closed_form(self):
        x = np.array([0.1, 0.5, 2.0, 10.0])
        assert_allclose(evaluate(parse_spec("bkm"), x), (x - 1) / np.log(x), rtol=1e-12)

    @pytest.mark.parametrize("text", ["gl:0.3", "bkm", "gl:2", "wy"])
    @pytest.mark.parametrize("side", [1.0, -1.0])
    def test_continuous_across_series_radius(self, text, side):
        """Series and closed form meet at the edge of the series radius."""
        spec = parse_spec(text)
        edge = 1.0 + side * config.SERIES_RADIUS
        inside = eval_f(spec, edge * (1.0 - side * 1e-14))
        outside = eval_f(spec, edge * (1.0 + side * 1e-14))
        assert inside == pytest.approx(outside, abs=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            eval_f(parse_spec("wy"), x)

    def test_phi_inverse(self):
        x = np.array([0.2, 1.0, 3.0])
        assert_allclose(phi_inverse(phi(x, 0.3), 0.3), x)


class TestSymmetry:
    """Test f(t) = t f(1/t)."""

    @pytest.mark.parametrize("text", ["gl:0.3", "wy", "bh", "gl:2", "bkm"])
    def test_petz_functions_symmetric(self, text):
        report = check_symmetry(parse_spec(text), standard_log_grid())
        assert report.ok
        assert report.max_residual < 1e-12

    def test_square_is_not_symmetric(self):
        """t^2 != t (1/t)^2 away from 1."""
        report = check_symmetry(parse_spec("test:square"), [0.5, 1.0, 2.0])
        assert not report.ok
        assert 0.5 in report.violations


class TestRationalDecomposition:
    """Test the sum-of-monotone-pieces form for rational kappa."""

    @pytest.mark.parametrize("k, n", [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)])
    def test_matches_closed_form(self, k, n):
        x = standard_log_grid()
        spec = MonotoneFunctionSpec.gl(k / n)
        assert_allclose(rational_decomposition(k, n, x), evaluate(spec, x), rtol=1e-10)

    def test_requires_proper_fraction(self):
        with pytest.raises(DomainError):
            rational_decomposition(2, 2, [1.0])


class TestMonotonicityWitness:
    """Test the falsification search for operator monotonicity."""

    def test_square_fails_on_classic_pair(self):
        """x^2 is not operator monotone: trial 0 already fails."""
        witness = matrix_monotonicity_witness(parse_spec("test:square"), 2, 1, seed=0)
        assert witness is not None
        assert witness.trial == 0
        assert witness.min_eigenvalue < -1e-8

    def test_identity_has_no_witness(self):
        assert matrix_monotonicity_witness(parse_spec("test:identity"), 3, 50, seed=0) is None

    @pytest.mark.parametrize("kappa", [0.25, 0.5, 1.0])
    def test_monotone_range(self, kappa):
        spec = MonotoneFunctionSpec.gl(kappa)
        assert matrix_monotonicity_witness(spec, 2, 200, seed=1) is None

    @pytest.mark.parametrize("kappa", [1.5, 2.0])
    def test_beyond_monotone_range(self, kappa):
        """Guided trials find a witness for kappa > 1."""
        witness = matrix_monotonicity_witness(MonotoneFunctionSpec.gl(kappa), 2, 200, seed=1)
        assert witness is not None
        assert witness.min_eigenvalue < -1e-8
        b_minus_a = witness.b - witness.a
        assert np.linalg.eigvalsh(b_minus_a).min() >= -1e-12

    @pytest.mark.parametrize("kappa", [1.1, 1.25, 1.5, 2.0])
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_witness_just_above_one(self, kappa, n):
        witness = matrix_monotonicity_witness(MonotoneFunctionSpec.gl(kappa), n, 2000, seed=7)
        assert witness is not None
        assert witness.min_eigenvalue < -1e-8

    @pytest.mark.parametrize("kappa", [0.1, 0.25, 0.5, 0.75, 1.0])
    @pytest.mark.parametrize("n", [3, 4])
    def test_no_witness_in_monotone_range(self, kappa, n):
        """Full 2000-trial budget without a violation."""
        assert matrix_monotonicity_witness(MonotoneFunctionSpec.gl(kappa), n, 2000, seed=7) is None

    def test_reported_trial_does_not_depend_on_budget(self):
        """The lowest-index witness is reported whatever the trial budget."""
        spec = MonotoneFunctionSpec.gl(1.1)
        full = matrix_monotonicity_witness(spec, 3, 2000, seed=7)
        short = matrix_monotonicity_witness(spec, 3, full.trial + 1, seed=7)
        assert short.trial == full.trial
        assert short.min_eigenvalue == full.min_eigenvalue

    def test_needs_two_dimensions(self):
        with pytest.raises(DomainError):
            matrix_monotonicity_witness(parse_spec("bh"), 1, 10, seed=0)


class TestDerivativeAtZero:
    """Test the numerical limit of f'(0+)."""

    @pytest.mark.parametrize("kappa", [1.1, 1.25, 1.5, 2.0])
    def test_limit_is_minus_half_kappa(self, kappa):
        result = derivative_at_zero_plus(MonotoneFunctionSpec.gl(kappa))
        assert not result.diverges
        assert result.value == pytest.approx(-kappa / 2, abs=1e-3)

    def test_bures_helstrom(self):
        result = derivative_at_zero_plus(MonotoneFunctionSpec.gl(1.0))
        assert not result.diverges
        assert result.value == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("kappa", [0.25, 0.5])
    def test_diverges_below_one(self, kappa):
        result = derivative_at_zero_plus(MonotoneFunctionSpec.gl(kappa))
        assert result.diverges
        assert result.value == float("inf")

    def test_bkm_unsupported(self):
        with pytest.raises(UnsupportedVariantError):
            derivative_at_zero_plus(parse_spec("bkm"))
