"""Tests for row contractions, defects, the c.n.c. test and the
characteristic symbol with its Fock oracle."""

import numpy as np
import pytest

from charfock.colligation import is_coisometric, transfer_symbol, unobservable_subspace
from charfock.errors import NotContraction
from charfock.fockseries import multianalytic_norm, series_max_dev
from charfock.numlin import spectral_norm
from charfock.proptests import cnc_scan_subspace
from charfock.randomgen import (
    case_rng,
    random_noncnc_row_contraction,
    random_row_contraction,
    random_strict_row_contraction,
)
from charfock.rowcon import (
    RowContraction,
    char_symbol,
    char_symbol_oracle,
    cnc_subspace,
    defects,
    is_cnc,
    popescu_colligation,
    validate,
)


def scalar_row(*values) -> RowContraction:
    return RowContraction(tuple(np.array([[v]], dtype=complex) for v in values))


class TestValidate:
    def test_scalar_half(self):
        assert validate(scalar_row(0.5)).is_contraction

    def test_pair_of_ones_fails(self):
        report = validate(scalar_row(1.0, 1.0))
        assert not report.is_contraction
        np.testing.assert_allclose(report.norm, 2.0)

    def test_coisometric_pair(self):
        report = validate(scalar_row(1 / np.sqrt(2), 1 / np.sqrt(2)))
        assert report.is_contraction
        np.testing.assert_allclose(report.norm, 1.0)


class TestDefects:
    def test_scalar_half(self):
        pair = defects(scalar_row(0.5))
        np.testing.assert_allclose(pair.D, [[np.sqrt(3.0) / 2.0]])
        assert pair.basis_D.dim == 1

    def test_coisometric_row_has_no_adjoint_defect(self):
        pair = defects(scalar_row(1 / np.sqrt(2), 1 / np.sqrt(2)))
        np.testing.assert_allclose(pair.Dstar, np.zeros((1, 1)), atol=1e-12)
        assert pair.basis_Dstar.dim == 0

    def test_lifted_example_defect(self):
        e = RowContraction((0.5 * np.array([[1.0, 0.0], [1.0, 1.0]]),))
        root5 = np.sqrt(5.0)
        expected = (1.0 / (2.0 * np.sqrt(root5 * (root5 + 2.0)))) * np.array(
            [[root5 + 2.0, -1.0], [-1.0, root5 + 3.0]]
        )
        assert spectral_norm(defects(e).D - expected) <= 1e-10

    def test_defect_identity(self):
        rng = case_rng(3, 0)
        for _ in range(10):
            t = random_row_contraction(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            pair = defects(t)
            row = t.row()
            resid = spectral_norm(pair.D @ pair.D + row.conj().T @ row - np.eye(row.shape[1]))
            assert resid <= 1e-10

    def test_rejects_expansive_row(self):
        with pytest.raises(NotContraction):
            defects(scalar_row(1.0, 1.0))


class TestCncSubspace:
    def test_identity_not_cnc(self):
        basis = cnc_subspace(RowContraction((np.eye(2),)))
        assert basis.dim == 2

    def test_strict_contraction_is_cnc(self):
        assert is_cnc(scalar_row(0.5))

    def test_mixed_block(self):
        t = RowContraction((np.diag([1.0, 0.5]),))
        basis = cnc_subspace(t)
        assert basis.dim == 1
        np.testing.assert_allclose(np.abs(basis.vectors[:, 0]), [1.0, 0.0], atol=1e-12)
        # brute-force oracle: norm equalities scanned over word depth
        scan = cnc_scan_subspace(t, depth=20)
        assert scan.shape[1] == 1
        np.testing.assert_allclose(np.abs(scan[:, 0]), [1.0, 0.0], atol=1e-10)

    def test_scan_agreement_random(self):
        for case in range(25):
            rng = case_rng(101, case)
            if case % 2 == 0:
                t = random_strict_row_contraction(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            else:
                t = random_noncnc_row_contraction(
                    rng, int(rng.integers(1, 3)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
                )
            exact = cnc_subspace(t).vectors
            scan = cnc_scan_subspace(t)
            dev = spectral_norm(exact @ exact.conj().T - scan @ scan.conj().T)
            assert dev <= 1e-8


class TestCharSymbol:
    def test_zero_operator_gives_shift(self):
        s = char_symbol(scalar_row(0.0), 5)
        np.testing.assert_allclose(s.coeff(()), [[0.0]])
        np.testing.assert_allclose(s.coeff((1,)), [[1.0]])
        for m in range(2, 6):
            np.testing.assert_allclose(s.coeff((1,) * m), [[0.0]], atol=1e-15)

    def test_scalar_half_taylor(self):
        # Taylor oracle for (z - 1/2) / (1 - z/2)
        s = char_symbol(scalar_row(0.5), 10)
        np.testing.assert_allclose(s.coeff(()), [[-0.5]])
        for m in range(1, 11):
            np.testing.assert_allclose(
                s.coeff((1,) * m), [[0.75 * 0.5 ** (m - 1)]], atol=1e-14
            )

    def test_scalar_blaschke(self):
        alpha = 0.3 - 0.4j
        s = char_symbol(scalar_row(alpha), 8)
        np.testing.assert_allclose(s.coeff(()), [[-alpha]])
        for m in range(1, 9):
            np.testing.assert_allclose(
                s.coeff((1,) * m),
                [[(1 - abs(alpha) ** 2) * np.conj(alpha) ** (m - 1)]],
                atol=1e-14,
            )

    def test_two_letter_zero_row(self):
        s = char_symbol(scalar_row(0.0, 0.0), 3)
        np.testing.assert_allclose(s.coeff((1,)), [[1.0, 0.0]])
        np.testing.assert_allclose(s.coeff((2,)), [[0.0, 1.0]])
        for w in s.words():
            if len(w) not in (1,):
                np.testing.assert_allclose(s.coeff(w), 0.0, atol=1e-15)

    def test_warns_when_not_cnc(self):
        with pytest.warns(UserWarning):
            char_symbol(RowContraction((np.eye(2),)), 2)

    def test_oracle_agreement_random(self):
        worst = 0.0
        for case in range(30):
            rng = case_rng(202, case)
            n = int(rng.integers(1, 6))
            d = int(rng.integers(1, 4))
            t = random_row_contraction(rng, n, d)
            dev = series_max_dev(char_symbol(t, 5), char_symbol_oracle(t, 5))
            worst = max(worst, dev)
        assert worst <= 1e-10

    def test_schur_norm(self):
        rng = case_rng(203, 0)
        t = random_row_contraction(rng, 3, 2, 0.5, 0.98)
        assert multianalytic_norm(char_symbol(t, 4)) <= 1.0 + 1e-8


class TestPopescuColligation:
    def test_coisometric_for_any_row_contraction(self):
        for case in range(10):
            rng = case_rng(204, case)
            t = random_row_contraction(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)), 0.3, 0.999)
            _, resid = is_coisometric(popescu_colligation(t))
            assert resid <= 1e-10

    def test_coisometric_even_with_isometric_part(self):
        t = random_noncnc_row_contraction(case_rng(205, 0), 2, 2, 2)
        _, resid = is_coisometric(popescu_colligation(t))
        assert resid <= 1e-10

    def test_observable_for_cnc(self):
        for case in range(10):
            rng = case_rng(206, case)
            t = random_strict_row_contraction(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            assert unobservable_subspace(popescu_colligation(t)).dim == 0

    def test_transfer_equals_char_symbol(self):
        for case in range(10):
            rng = case_rng(207, case)
            t = random_strict_row_contraction(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
            dev = series_max_dev(
                transfer_symbol(popescu_colligation(t), 5), char_symbol(t, 5)
            )
            assert dev <= 1e-10
