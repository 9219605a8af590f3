"""Seeded property suites for every module.

Each case function draws one instance from a per-case generator and
returns ``{"residual": float, "ok": bool, ...}``; the suite driver runs a
fixed number of cases per property and reports failure counts and worst
residuals.  Reports are deterministic functions of (suite, cases, seed).
"""

import numpy as np

from . import equiv as eq
from . import mobius as mb
from .colligation import (
    Colligation,
    is_coisometric,
    make_defect_constrained,
    structure_decompose,
    transfer_oracle,
    transfer_symbol,
    unobservable_subspace,
)
from .fockseries import multianalytic_norm, series_max_dev
from .lifting import (
    Lifting,
    build_lifting,
    extract_gamma,
    lifting_char_decomposed,
    lifting_char_direct,
    lifting_colligation,
    minimality_check,
    norm_bound_check,
    resolving_check,
)
from .numlin import spectral_norm
from .randomgen import (
    case_rng,
    haar_unitary,
    random_coisometric_colligation,
    random_colligation,
    random_contraction,
    random_minimal_lifting,
    random_noncnc_row_contraction,
    random_row_contraction,
    random_strict_row_contraction,
    random_structured_colligation,
)
from .rowcon import (
    RowContraction,
    char_symbol_oracle,
    cnc_subspace,
    defects,
    is_cnc,
    popescu_colligation,
    _char_symbol_noflag,
)

SUITE_NAMES = ("rowcon", "colligation", "lifting", "equiv", "mobius")

__all__ = ["SUITE_NAMES", "run_suite", "cnc_scan_subspace"]


# ---------------------------------------------------------------------------
# independent brute-force scan for the co-isometric subspace


def cnc_scan_subspace(T: RowContraction, depth: int = 20, kernel_tol: float = 1e-8):
    """Joint kernel of the norm-equality defects up to a word depth.

    Accumulates I minus the length-n block sums of T_w T_w* (whose
    quadratic form is the norm-equality defect at depth n) and returns an
    orthonormal basis of the numerical kernel of the accumulated sum.
    Independent of the invariant-subspace iteration used by
    :func:`charfock.rowcon.cnc_subspace`.
    """
    n = T.dim
    eye = np.eye(n, dtype=np.complex128)
    power = eye.copy()
    acc = np.zeros((n, n), dtype=np.complex128)
    for _ in range(depth):
        power = sum(b @ power @ b.conj().T for b in T.blocks)
        acc += eye - power
    w, v = np.linalg.eigh(0.5 * (acc + acc.conj().T))
    keep = w < kernel_tol
    return v[:, keep]


# ---------------------------------------------------------------------------
# case functions (each draws one instance and returns residual + verdict)


def case_char_oracle(rng, n_max=5, d_max=3, degree=6, bound=1e-10):
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    t = random_row_contraction(rng, n, d, 0.2, 0.95)
    dev = series_max_dev(
        _char_symbol_noflag(t, degree, 1e-10), char_symbol_oracle(t, degree)
    )
    return {"residual": dev, "ok": dev <= bound}


def case_transfer_oracle(rng, n_max=4, d_max=3, degree=5, bound=1e-10):
    n1 = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    n2 = int(rng.integers(1, 4))
    n3 = int(rng.integers(1, 4))
    w = random_colligation(rng, d, n1, n2, n3)
    dev = series_max_dev(transfer_symbol(w, degree), transfer_oracle(w, degree))
    return {"residual": dev, "ok": dev <= bound}


def _random_cnc(rng, n_max=4, d_max=3):
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    return random_strict_row_contraction(rng, n, d)


def case_wa_coisometric(rng, bound=1e-10):
    w = popescu_colligation(_random_cnc(rng))
    _, resid = is_coisometric(w)
    return {"residual": resid, "ok": resid <= bound}


def case_wa_observable(rng):
    dim = unobservable_subspace(popescu_colligation(_random_cnc(rng))).dim
    return {"residual": float(dim), "ok": dim == 0}


def case_cnc_scan(rng, depth=20, bound=1e-8):
    if rng.uniform() < 0.5:
        t = _random_cnc(rng)
    else:
        n_iso = int(rng.integers(1, 3))
        n_rest = int(rng.integers(1, 4))
        d = int(rng.integers(1, 4))
        t = random_noncnc_row_contraction(rng, n_iso, n_rest, d)
    exact = cnc_subspace(t).vectors
    scan = cnc_scan_subspace(t, depth)
    dev = spectral_norm(
        exact @ exact.conj().T - scan @ scan.conj().T
    )
    return {"residual": dev, "ok": dev <= bound}


def case_defect_bounds(rng):
    n = int(rng.integers(1, 5))
    d = int(rng.integers(1, 4))
    t = random_row_contraction(rng, n, d, 0.2, 0.999)
    k = defects(t).basis_D.dim
    violation = max(n * (d - 1) - k, k - n * d, 0)
    return {"residual": float(violation), "ok": violation == 0}


def case_char_schur_norm(rng, degree=4, bound=1e-8):
    n = int(rng.integers(1, 4))
    d = int(rng.integers(1, 4))
    t = random_row_contraction(rng, n, d, 0.2, 0.98)
    excess = max(
        multianalytic_norm(_char_symbol_noflag(t, degree, 1e-10)) - 1.0, 0.0
    )
    return {"residual": excess, "ok": excess <= bound}


def case_transfer_schur_norm(rng, degree=4, bound=1e-8):
    n1 = int(rng.integers(1, 4))
    d = int(rng.integers(1, 4))
    n2 = int(rng.integers(1, 3))
    n3 = int(rng.integers(1, 3))
    w = random_coisometric_colligation(rng, d, n1, n2, n3)
    excess = max(multianalytic_norm(transfer_symbol(w, degree)) - 1.0, 0.0)
    return {"residual": excess, "ok": excess <= bound}


def _structured_observable(rng, tries=25):
    for _ in range(tries):
        n = int(rng.integers(2, 5))
        d = int(rng.integers(1, 4))
        r_out = n  # strict row: adjoint defect has full rank
        out_dim = r_out if rng.uniform() < 0.5 else int(rng.integers(1, r_out + 1))
        built = random_structured_colligation(rng, d, n, out_dim)
        if unobservable_subspace(built[0]).dim == 0:
            return built
    raise RuntimeError("failed to draw an observable structured colligation")


def case_structure_recovery(rng, bound=1e-9):
    w, gamma0, sigma0, _ = _structured_observable(rng)
    dec = structure_decompose(w)
    dev = max(
        spectral_norm(dec.gamma - gamma0),
        spectral_norm(dec.sigma_tilde - sigma0),
        dec.d_residual,
        dec.reconstruction_residual,
    )
    return {"residual": dev, "ok": dev <= bound}


def _rotate_colligation(w: Colligation, u: np.ndarray) -> Colligation:
    big = np.kron(np.eye(w.arity), u)
    return Colligation(
        a_blocks=tuple(u @ blk @ u.conj().T for blk in w.a_blocks),
        b=big @ w.b,
        c=w.c @ u.conj().T,
        d=w.d.copy(),
    )


def case_state_unitary(rng, bound=1e-8):
    w, _, _, _ = _structured_observable(rng)
    u0 = haar_unitary(rng, w.state_dim)
    w2 = _rotate_colligation(w, u0)
    verdict = eq.colligation_state_unitary(
        w, w2, seed=int(rng.integers(2**63))
    )
    ok = verdict.confirmed and verdict.residual <= bound
    return {"residual": verdict.residual, "ok": ok}


def _random_lifting(rng, n_max=4, d_max=3):
    n_c = int(rng.integers(1, n_max + 1))
    n_a = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(1, d_max + 1))
    return random_minimal_lifting(rng, n_c, n_a, d)


def case_link_roundtrip(rng, bound=1e-9):
    n_c = int(rng.integers(1, 5))
    n_a = int(rng.integers(1, 5))
    d = int(rng.integers(1, 4))
    base = random_row_contraction(rng, n_c, d, 0.2, 0.9)
    added = random_strict_row_contraction(rng, n_a, d)
    gamma = random_contraction(
        rng, defects(base).basis_D.dim, defects(added).basis_Dstar.dim, 0.95
    )
    lifted = build_lifting(base, added, gamma)
    dev = spectral_norm(extract_gamma(lifted).gamma - gamma)
    return {"residual": dev, "ok": dev <= bound}


def case_dual_symbol(rng, degree=6, bound=1e-9):
    lifted = _random_lifting(rng)
    dev = series_max_dev(
        lifting_char_direct(lifted, degree), lifting_char_decomposed(lifted, degree)
    )
    return {"residual": dev, "ok": dev <= bound}


def case_colligation_symbol(rng, degree=6, bound=1e-9):
    lifted = _random_lifting(rng)
    dev = series_max_dev(
        transfer_symbol(lifting_colligation(lifted), degree),
        lifting_char_decomposed(lifted, degree),
    )
    return {"residual": dev, "ok": dev <= bound}


def case_v_coisometric(rng, bound=1e-10):
    _, resid = is_coisometric(lifting_colligation(_random_lifting(rng)))
    return {"residual": resid, "ok": resid <= bound}


def case_v_observable(rng):
    dim = unobservable_subspace(lifting_colligation(_random_lifting(rng))).dim
    return {"residual": float(dim), "ok": dim == 0}


def case_minimal_flags(rng):
    lifted = _random_lifting(rng)
    flags = (
        minimality_check(lifted),
        resolving_check(lifted).resolving,
        is_cnc(lifted.A),
    )
    bad = sum(1 for f in flags if not f)
    return {"residual": float(bad), "ok": bad == 0}


def case_norm_bound(rng, degree=40):
    lifted = _random_lifting(rng, n_max=3, d_max=1)
    worst = 0.0
    ok = True
    for lam in (0.0, 0.4, -0.4, 0.3j):
        rep = norm_bound_check(lifted, lam, degree)
        worst = max(worst, -min(rep.slack, 0.0))
        ok = ok and rep.ok
    return {"residual": worst, "ok": ok}


def case_equivalence_recover(rng, degree=5, bound=1e-10):
    n1 = int(rng.integers(1, 4))
    d = int(rng.integers(1, 3))
    p = int(rng.integers(1, 4))
    q = int(rng.integers(1, 4))
    base = transfer_symbol(random_colligation(rng, d, n1, p, q), degree)
    v0 = haar_unitary(rng, p)
    rotated = type(base)(
        base.d,
        base.in_dim,
        base.out_dim,
        base.degree,
        {w: c @ v0 for w, c in base.coeffs.items()},
    )
    verdict = eq.equivalence_solve(rotated, base, tol=bound)
    ok = verdict.confirmed and verdict.residual <= bound
    return {"residual": verdict.residual, "ok": ok}


def case_coincidence_recover(rng, degree=6, restarts=16, bound=1e-8):
    n = int(rng.integers(1, 5))
    d = int(rng.integers(1, 3))
    t = random_strict_row_contraction(rng, n, d)
    u0 = haar_unitary(rng, n)
    t2 = RowContraction(tuple(u0 @ b @ u0.conj().T for b in t.blocks))
    s1 = _char_symbol_noflag(t, degree, 1e-10)
    s2 = _char_symbol_noflag(t2, degree, 1e-10)
    verdict = eq.coincidence_solve(
        s1, s2, restarts=restarts, seed=int(rng.integers(2**63)), tol=bound
    )
    ok = verdict.status == "confirmed" and verdict.residual <= bound
    return {"residual": verdict.residual, "ok": ok, "status": verdict.status}


def case_rowcon_equiv_recover(rng, bound=1e-8):
    n = int(rng.integers(1, 5))
    d = int(rng.integers(1, 4))
    t = random_row_contraction(rng, n, d, 0.2, 0.95)
    u0 = haar_unitary(rng, n)
    t2 = RowContraction(tuple(u0 @ b @ u0.conj().T for b in t.blocks))
    verdict = eq.rowcon_unitary_equiv(t, t2, seed=int(rng.integers(2**63)), tol=bound)
    ok = verdict.confirmed and verdict.residual <= bound
    return {"residual": verdict.residual, "ok": ok}


def case_lifting_equiv_blocks(rng, degree=6, bound=1e-8):
    n_c = int(rng.integers(1, 4))
    n_a = int(rng.integers(1, 4))
    d = int(rng.integers(1, 3))
    lifted = random_minimal_lifting(rng, n_c, n_a, d)
    u0 = haar_unitary(rng, n_a)
    rotated = Lifting(
        lifted.C,
        RowContraction(tuple(u0 @ b @ u0.conj().T for b in lifted.A.blocks)),
        tuple(u0 @ b for b in lifted.Bblocks),
    )
    s1 = lifting_char_decomposed(lifted, degree)
    s2 = lifting_char_decomposed(rotated, degree)
    verdict = eq.equivalence_solve(s1, s2)
    if not verdict.confirmed:
        return {"residual": np.inf, "ok": False}
    v = verdict.unitaries[0]

    v1 = lifting_colligation(lifted)
    v2 = lifting_colligation(rotated)
    v2v = Colligation(v2.a_blocks, v2.b @ v, v2.c, v2.d @ v)
    state = eq.colligation_state_unitary(v1, v2v, seed=int(rng.integers(2**63)))
    if not state.confirmed:
        return {"residual": np.inf, "ok": False}
    u = state.unitaries[0]
    eqs = [verdict.residual, state.residual]
    for i in range(d):
        eqs.append(spectral_norm(u @ v1.a_blocks[i] - v2v.a_blocks[i] @ u))
        eqs.append(spectral_norm(u @ v1.b_block(i + 1) - v2v.b_block(i + 1)))
    eqs.append(spectral_norm(v1.c - v2v.c @ u))
    eqs.append(spectral_norm(v1.d - v2v.d))
    dev = float(max(eqs))
    return {"residual": dev, "ok": dev <= bound}


def _random_disc_parameter(rng, r_max=0.5):
    radius = rng.uniform(0.1, r_max)
    if rng.uniform() < 0.5:
        return complex(radius if rng.uniform() < 0.5 else -radius)
    return radius * np.exp(2j * np.pi * rng.uniform())


def case_mobius_involution(rng, bound=1e-10):
    n = int(rng.integers(1, 5))
    t = random_contraction(rng, n, n, 0.95)
    a = _random_disc_parameter(rng, 0.6)
    back = mb.mobius_contraction(mb.mobius_contraction(t, a), -a)
    dev = spectral_norm(back - t) / (1.0 + spectral_norm(t))
    return {"residual": dev, "ok": dev <= bound}


def case_mobius_z(rng, bound=1e-9):
    n = int(rng.integers(1, 5))
    t = random_contraction(rng, n, n, 0.9)
    a = _random_disc_parameter(rng)
    data = mb.z_unitaries(t, a)
    dev = max(data.residuals.values())
    return {"residual": dev, "ok": dev <= bound}


MOBIUS_SAMPLES = (0.0, 0.3, -0.3, 0.2j, 0.25 + 0.25j)


def case_mobius_lifting_identities(rng, degree=40):
    n_c = int(rng.integers(1, 4))
    n_a = int(rng.integers(1, 4))
    lifted = random_minimal_lifting(rng, n_c, n_a, 1)
    a = _random_disc_parameter(rng)
    rep = mb.verify_lifting_cf(lifted, a, MOBIUS_SAMPLES, degree)
    worst = max(
        max(s["transform_residual"] for s in rep["samples"]),
        max(s["factored_residual"] for s in rep["samples"]),
        rep["block_identity_residual"],
        rep["involution_residual"],
        rep["link_relation_residual"],
    )
    return {"residual": worst, "ok": rep["ok"] and rep["link_relation_residual"] <= 1e-9}


def case_mobius_cf_relation(rng, degree=40):
    n = int(rng.integers(1, 4))
    t = random_contraction(rng, n, n, 0.9)
    a = _random_disc_parameter(rng)
    rep = mb.verify_cf_relation(t, a, MOBIUS_SAMPLES, degree)
    worst = max(s["residual"] for s in rep["samples"])
    return {"residual": worst, "ok": rep["ok"]}


def case_defect_constructor(rng):
    """Exhaustive sweep, independent of the drawn generator."""
    worst = 0
    for n in range(1, 5):
        for d in range(1, 4):
            for k in range(n * (d - 1), n * d + 1):
                built = make_defect_constrained(n, d, k)
                worst = max(worst, abs(defects(built).basis_D.dim - k))
    return {"residual": float(worst), "ok": worst == 0}


# ---------------------------------------------------------------------------
# suite driver

_SUITES = {
    "rowcon": (
        ("char-symbol-matches-fock-oracle", case_char_oracle),
        ("defect-colligation-coisometric", case_wa_coisometric),
        ("defect-colligation-observable", case_wa_observable),
        ("cnc-detector-matches-norm-scan", case_cnc_scan),
        ("defect-dimension-bounds", case_defect_bounds),
        ("char-symbol-schur-norm", case_char_schur_norm),
    ),
    "colligation": (
        ("transfer-matches-fock-oracle", case_transfer_oracle),
        ("coisometric-transfer-schur-norm", case_transfer_schur_norm),
        ("structure-factors-recovered", case_structure_recovery),
        ("same-transfer-state-unitary", case_state_unitary),
        ("defect-constructor-sweep", case_defect_constructor),
    ),
    "lifting": (
        ("link-roundtrip", case_link_roundtrip),
        ("direct-equals-factored-symbol", case_dual_symbol),
        ("colligation-transfer-equals-symbol", case_colligation_symbol),
        ("lifting-colligation-coisometric", case_v_coisometric),
        ("lifting-colligation-observable", case_v_observable),
        ("minimality-flags-consistent", case_minimal_flags),
        ("evaluation-norm-bound", case_norm_bound),
    ),
    "equiv": (
        ("equivalence-construct-recover", case_equivalence_recover),
        ("coincidence-construct-recover", case_coincidence_recover),
        ("rowcon-equivalence-construct-recover", case_rowcon_equiv_recover),
        ("lifting-equivalence-block-equations", case_lifting_equiv_blocks),
    ),
    "mobius": (
        ("transform-involution", case_mobius_involution),
        ("defect-unitary-relations", case_mobius_z),
        ("lifting-transform-identities", case_mobius_lifting_identities),
        ("contraction-transform-relation", case_mobius_cf_relation),
    ),
}


def run_suite(suite: str, cases: int, seed: int) -> dict:
    """Run a named property suite; deterministic given (suite, cases, seed)."""
    if suite == "all":
        reports = [run_suite(name, cases, seed) for name in SUITE_NAMES]
        return {
            "suite": "all",
            "cases": cases,
            "seed": seed,
            "suites": reports,
            "ok": all(r["ok"] for r in reports),
        }
    if suite not in _SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {SUITE_NAMES + ('all',)}")
    results = []
    for p_idx, (name, fn) in enumerate(_SUITES[suite]):
        worst = 0.0
        failures = 0
        for i in range(cases):
            rng = case_rng(seed, (p_idx << 24) + i)
            out = fn(rng)
            worst = max(worst, float(out["residual"]))
            if not out["ok"]:
                failures += 1
        results.append(
            {
                "name": name,
                "cases": cases,
                "failures": failures,
                "worst_residual": worst,
            }
        )
    return {
        "suite": suite,
        "cases": cases,
        "seed": seed,
        "properties": results,
        "ok": all(r["failures"] == 0 for r in results),
    }
