"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criterion 2 carries one strict-xfail companion test: the published
added-column component of worked example 5.3 (leading factor 2) is
inconsistent with the same example's split map, colligation matrix and the
dual-formula identity of criterion 6, all of which force sqrt(3); the
criterion asserts the consistent value and the xfail documents the
published variant.
"""

import time

import numpy as np
import pytest

from charfock.colligation import is_coisometric, transfer_symbol, unobservable_subspace
from charfock.equiv import coincidence_solve, equivalence_solve
from charfock.examples import blaschke_series, build_example_lifting
from charfock.fockseries import series_max_dev
from charfock.lifting import (
    extract_gamma,
    lifting_char_decomposed,
    lifting_char_direct,
    lifting_colligation,
    norm_bound_check,
)
from charfock.numlin import spectral_norm
from charfock.proptests import (
    case_char_oracle,
    case_cnc_scan,
    case_defect_bounds,
    case_defect_constructor,
    case_lifting_equiv_blocks,
    case_mobius_lifting_identities,
    case_structure_recovery,
    case_transfer_oracle,
)
from charfock.randomgen import (
    case_rng,
    haar_unitary,
    random_minimal_lifting,
    random_strict_row_contraction,
)
from charfock.rowcon import RowContraction, char_symbol, defects

SEED = 20260810


def _taylor_geometric(half_pole: float, degree: int) -> np.ndarray:
    """Coefficients of 1 / (1 - half_pole z) up to the given degree."""
    return half_pole ** np.arange(degree + 1)


def _truncated_product(poly, geo, degree):
    full = np.convolve(poly, geo)
    return full[: degree + 1]


class TestCriterion1:
    def test_example_52_exact_values(self):
        t0 = time.perf_counter()
        lifted = build_example_lifting("5.2")
        gd = extract_gamma(lifted)
        assert abs(gd.gamma[0, 0] - 1.0 / np.sqrt(3.0)) <= 1e-12
        theta = lifting_char_decomposed(lifted, 12)
        pe, pc = defects(lifted.E()), defects(lifted.C)
        expected = {
            (): np.array([[np.sqrt(2.0 / 3.0), 0.0]]),
            (1,): np.array([[0.0, 1.0 / np.sqrt(3.0)]]),
        }
        worst = 0.0
        for w, coeff in theta.coeffs.items():
            ambient = pc.basis_D.vectors @ coeff @ pe.basis_D.vectors.conj().T
            target = expected.get(w, np.zeros((1, 2)))
            worst = max(worst, float(np.max(np.abs(ambient - target))))
        elapsed = time.perf_counter() - t0
        assert worst <= 1e-12
        assert elapsed < 1.0
        print(f"[criterion 1] PASS worst deviation {worst:.2e}, {elapsed * 1e3:.0f} ms")


class TestCriterion2:
    DEGREE = 12

    def _applied_components(self):
        lifted = build_example_lifting("5.3")
        theta = lifting_char_decomposed(lifted, self.DEGREE)
        pe, pc = defects(lifted.E()), defects(lifted.C)
        rows = []
        for m in range(self.DEGREE + 1):
            coeff = theta.coeff((1,) * m)
            rows.append(
                (pc.basis_D.vectors @ coeff @ pe.basis_D.vectors.conj().T @ pe.D)[0]
            )
        return lifted, np.array(rows)

    def test_example_53_exact_values(self):
        t0 = time.perf_counter()
        lifted, rows = self._applied_components()
        gd = extract_gamma(lifted)
        assert abs(gd.gamma[0, 0] - 2.0 / 3.0) <= 1e-12
        assert abs(gd.Dstar_gamma[0, 0] - np.sqrt(5.0) / 3.0) <= 1e-12
        root5 = np.sqrt(5.0)
        de_expected = (1.0 / (2.0 * np.sqrt(root5 * (root5 + 2.0)))) * np.array(
            [[root5 + 2.0, -1.0], [-1.0, root5 + 3.0]]
        )
        assert spectral_norm(defects(lifted.E()).D - de_expected) <= 1e-10

        geo = _taylor_geometric(0.5, self.DEGREE)
        base_oracle = _truncated_product(
            np.array([4.0, -3.0]) / (4.0 * np.sqrt(3.0)), geo, self.DEGREE
        )
        added_oracle = _truncated_product(
            np.array([-0.5, 1.0]) * (np.sqrt(3.0) / 3.0), geo, self.DEGREE
        )
        base_dev = float(np.max(np.abs(rows[:, 0] - base_oracle)))
        added_dev = float(np.max(np.abs(rows[:, 1] - added_oracle)))
        elapsed = time.perf_counter() - t0
        assert base_dev <= 1e-10
        assert added_dev <= 1e-10
        assert elapsed < 1.0
        print(
            f"[criterion 2] PASS base dev {base_dev:.2e}, added dev "
            f"{added_dev:.2e}, {elapsed * 1e3:.0f} ms"
        )

    @pytest.mark.xfail(
        strict=True,
        reason="published added-column factor 2 contradicts the same "
        "example's split map, colligation matrix and the dual-formula "
        "identity (criterion 6); the consistent factor is sqrt(3)",
    )
    def test_example_53_published_added_column(self):
        _, rows = self._applied_components()
        geo = _taylor_geometric(0.5, self.DEGREE)
        published = _truncated_product(
            np.array([-0.5, 1.0]) * (2.0 / 3.0), geo, self.DEGREE
        )
        assert float(np.max(np.abs(rows[:, 1] - published))) <= 1e-10


class TestCriterion3:
    def test_example_51_blaschke_equivalence(self):
        for alpha in (0.3, 0.5j):
            lifted = build_example_lifting("5.1", alpha)
            b_expected = np.sqrt(3.0) / 2.0 * np.sqrt(1.0 - abs(alpha) ** 2)
            assert abs(lifted.Bblocks[0][0, 0] - b_expected) <= 1e-12
            gd = extract_gamma(lifted)
            assert spectral_norm(gd.Dstar_gamma) <= 1e-12
            theta = lifting_char_decomposed(lifted, 20)
            verdict = equivalence_solve(theta, blaschke_series(alpha, 20))
            assert verdict.confirmed and verdict.residual < 1e-8
        print("[criterion 3] PASS both parameters, residual < 1e-8 at degree 20")


class TestCriterion4:
    def test_oracle_equivalence_200_cases(self):
        t0 = time.perf_counter()
        worst = 0.0
        for i in range(200):
            out = case_char_oracle(case_rng(SEED, i), n_max=5, d_max=3, degree=6)
            assert out["ok"]
            worst = max(worst, out["residual"])
        for i in range(200):
            out = case_transfer_oracle(
                case_rng(SEED + 1, i), n_max=5, d_max=3, degree=6
            )
            assert out["ok"]
            worst = max(worst, out["residual"])
        elapsed = time.perf_counter() - t0
        assert worst < 1e-10
        assert elapsed < 60.0
        print(f"[criterion 4] PASS worst deviation {worst:.2e}, {elapsed:.1f} s")


class TestCriterion5:
    def test_coisometry_and_observability_200_cases_each(self):
        from charfock.rowcon import popescu_colligation

        worst = 0.0
        for i in range(200):
            rng = case_rng(SEED + 2, i)
            t = random_strict_row_contraction(
                rng, int(rng.integers(1, 5)), int(rng.integers(1, 4))
            )
            w = popescu_colligation(t)
            _, resid = is_coisometric(w)
            worst = max(worst, resid)
            assert unobservable_subspace(w).dim == 0
        for i in range(200):
            rng = case_rng(SEED + 3, i)
            lifted = random_minimal_lifting(
                rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
            )
            v = lifting_colligation(lifted)
            _, resid = is_coisometric(v)
            worst = max(worst, resid)
            assert unobservable_subspace(v).dim == 0
        assert worst < 1e-10
        print(f"[criterion 5] PASS worst co-isometry residual {worst:.2e}")


class TestCriterion6:
    def test_dual_formula_identity_200_cases(self):
        worst = 0.0
        for i in range(200):
            rng = case_rng(SEED + 4, i)
            lifted = random_minimal_lifting(
                rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(1, 4))
            )
            dec = lifting_char_decomposed(lifted, 6)
            dire = lifting_char_direct(lifted, 6)
            tr = transfer_symbol(lifting_colligation(lifted), 6)
            worst = max(
                worst,
                series_max_dev(dire, dec),
                series_max_dev(tr, dec),
                series_max_dev(tr, dire),
            )
        assert worst <= 1e-9
        print(f"[criterion 6] PASS worst coefficient deviation {worst:.2e}")


class TestCriterion7:
    def test_coincidence_round_trip_100_cases(self):
        confirmed = 0
        for i in range(100):
            rng = case_rng(SEED + 5, i)
            n = int(rng.integers(1, 5))
            d = int(rng.integers(1, 3))
            t = random_strict_row_contraction(rng, n, d)
            u0 = haar_unitary(rng, n)
            t2 = RowContraction(tuple(u0 @ b @ u0.conj().T for b in t.blocks))
            s1, s2 = char_symbol(t, 6), char_symbol(t2, 6)
            verdict = coincidence_solve(s1, s2, seed=int(rng.integers(2**63)), tol=1e-8)
            assert verdict.status != "refuted_by_invariant"
            if verdict.status == "unknown":
                verdict = coincidence_solve(
                    s1, s2, restarts=64, seed=int(rng.integers(2**63)), tol=1e-8
                )
            assert verdict.status != "refuted_by_invariant"
            if verdict.confirmed and verdict.residual < 1e-8:
                confirmed += 1
        assert confirmed >= 95
        print(f"[criterion 7] PASS {confirmed}/100 confirmed, zero refuted")


class TestCriterion8:
    def test_lifting_equivalence_block_equations_100_cases(self):
        worst = 0.0
        for i in range(100):
            out = case_lifting_equiv_blocks(case_rng(SEED + 6, i))
            assert out["ok"]
            worst = max(worst, out["residual"])
        assert worst <= 1e-8
        print(f"[criterion 8] PASS worst block-equation residual {worst:.2e}")


class TestCriterion9:
    def test_defect_dimension_bounds(self):
        for i in range(200):
            assert case_defect_bounds(case_rng(SEED + 7, i))["ok"]
        assert case_defect_constructor(case_rng(SEED + 8, 0))["ok"]
        print("[criterion 9] PASS bounds on 200 draws; constructor sweep exact")


class TestCriterion10:
    def test_structure_recovery_100_cases(self):
        worst = 0.0
        for i in range(100):
            out = case_structure_recovery(case_rng(SEED + 9, i))
            assert out["ok"]
            worst = max(worst, out["residual"])
        assert worst < 1e-8
        print(f"[criterion 10] PASS worst recovery residual {worst:.2e}")


class TestCriterion11:
    def test_norm_bound_100_cases(self):
        worst_slack = np.inf
        for i in range(100):
            rng = case_rng(SEED + 10, i)
            lifted = random_minimal_lifting(
                rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), 1
            )
            for lam in (0.0, 0.4, -0.4, 0.3j):
                rep = norm_bound_check(lifted, lam, 40)
                assert rep.ok
                worst_slack = min(worst_slack, rep.rhs + rep.tail - rep.lhs)
        assert worst_slack >= -1e-8
        print(f"[criterion 11] PASS minimal slack {worst_slack:.3e}")


class TestCriterion12:
    def test_mobius_identities_50_cases(self):
        t0 = time.perf_counter()
        worst = 0.0
        for i in range(50):
            out = case_mobius_lifting_identities(case_rng(SEED + 11, i), degree=40)
            assert out["ok"]
            worst = max(worst, out["residual"])
        elapsed = time.perf_counter() - t0
        assert elapsed < 60.0
        print(f"[criterion 12] PASS worst residual {worst:.2e}, {elapsed:.1f} s")


class TestCriterion13:
    def test_cnc_scan_agreement_100_cases(self):
        worst = 0.0
        for i in range(100):
            out = case_cnc_scan(case_rng(SEED + 12, i), depth=20)
            assert out["ok"]
            worst = max(worst, out["residual"])
        print(f"[criterion 13] PASS worst projector deviation {worst:.2e}")
