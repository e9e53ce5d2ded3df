"""Matrix primitives: trivial values, brute-force oracles, and the
inner-product geometry every other module leans on."""

import numpy as np
import pytest

from cmop import adjoint_product, cmatrix, frob_norm, re_frob_inner, row_sq_norms
from cmop.errors import DimensionError, InputError


def brute_re_inner(x, y):
    """Element-wise double loop over real/imaginary parts."""
    total = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            total += x[i, j].real * y[i, j].real + x[i, j].imag * y[i, j].imag
    return total


def brute_adjoint_product(x, y):
    """Naive triple loop for x^H y."""
    out = np.zeros((x.shape[1], y.shape[1]), dtype=complex)
    for i in range(x.shape[1]):
        for j in range(y.shape[1]):
            for r in range(x.shape[0]):
                out[i, j] += np.conj(x[r, i]) * y[r, j]
    return out


class TestConstruction:
    def test_accepts_nested_lists(self):
        m = cmatrix([[1.0, 2.0], [3.0, 4.0]])
        assert m.shape == (2, 2)
        assert m.dtype == np.complex128
        assert m.flags.c_contiguous

    def test_rejects_nan_and_inf(self):
        with pytest.raises(InputError):
            cmatrix([[np.nan, 0.0]])
        with pytest.raises(InputError):
            cmatrix([[1.0, np.inf * 1j]])

    def test_rejects_wrong_ndim(self):
        with pytest.raises(DimensionError):
            cmatrix([1.0, 2.0])
        with pytest.raises(DimensionError):
            cmatrix(np.zeros((2, 2, 2)))


class TestReFrobInner:
    def test_real_and_imaginary_units_are_orthogonal(self):
        assert re_frob_inner(cmatrix([[1.0]]), cmatrix([[1j]])) == 0.0

    def test_equals_squared_modulus_on_itself(self):
        x = cmatrix([[1.0 + 1j]])
        assert re_frob_inner(x, x) == 2.0

    def test_matches_brute_force_loop(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        y = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        assert re_frob_inner(x, y) == pytest.approx(brute_re_inner(x, y), rel=1e-13)

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionError):
            re_frob_inner(np.zeros((2, 2), dtype=complex), np.zeros((2, 3), dtype=complex))

    def test_symmetry(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            x = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
            y = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
            assert re_frob_inner(x, y) == pytest.approx(re_frob_inner(y, x), rel=1e-12)

    def test_real_bilinearity(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            x, z, y = (
                rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
                for _ in range(3)
            )
            a, b = rng.standard_normal(2)
            lhs = re_frob_inner(a * x + b * z, y)
            rhs = a * re_frob_inner(x, y) + b * re_frob_inner(z, y)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            x = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
            y = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
            assert abs(re_frob_inner(x, y)) <= frob_norm(x) * frob_norm(y) + 1e-12


class TestFrobNorm:
    def test_single_entry_modulus(self):
        assert frob_norm(cmatrix([[3.0 + 4.0j]])) == 5.0

    def test_zero_matrix(self):
        assert frob_norm(np.zeros((2, 2), dtype=complex)) == 0.0

    def test_matches_element_loop(self):
        rng = np.random.default_rng(15)
        x = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        expected = np.sqrt(brute_re_inner(x, x))
        assert frob_norm(x) == pytest.approx(expected, rel=1e-13)

    def test_zero_iff_zero(self):
        rng = np.random.default_rng(16)
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert frob_norm(x) > 0.0


class TestRowSqNorms:
    def test_two_entry_row(self):
        assert row_sq_norms(cmatrix([[1 + 1j, 1 - 1j]])) == pytest.approx([4.0])

    def test_identity(self):
        assert row_sq_norms(np.eye(2, dtype=complex)) == pytest.approx([1.0, 1.0])

    def test_matches_full_product_diagonal(self):
        rng = np.random.default_rng(17)
        w = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
        expected = np.real(np.diag(w @ w.conj().T))
        assert row_sq_norms(w) == pytest.approx(expected, rel=1e-12)

    def test_sums_to_squared_frobenius_norm(self):
        rng = np.random.default_rng(18)
        for _ in range(20):
            w = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
            assert frob_norm(w) ** 2 == pytest.approx(
                float(np.sum(row_sq_norms(w))), rel=1e-12
            )


class TestAdjointProduct:
    def test_identity(self):
        eye = np.eye(2, dtype=complex)
        assert np.array_equal(adjoint_product(eye, eye), eye)

    def test_conjugates_first_argument(self):
        out = adjoint_product(cmatrix([[1j]]), cmatrix([[1.0]]))
        assert out[0, 0] == -1j

    def test_matches_triple_loop(self):
        rng = np.random.default_rng(19)
        x = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        y = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        expected = brute_adjoint_product(x, y)
        out = adjoint_product(x, y)
        assert out.shape == (2, 3)
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_inner_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            adjoint_product(np.zeros((3, 2), dtype=complex), np.zeros((4, 2), dtype=complex))

    def test_gram_is_hermitian(self):
        rng = np.random.default_rng(20)
        for _ in range(10):
            x = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
            g = adjoint_product(x, x)
            assert np.max(np.abs(g - g.conj().T)) < 1e-12
