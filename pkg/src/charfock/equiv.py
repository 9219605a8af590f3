"""Deciders for equivalence of symbols (one input-side unitary),
coincidence of symbols (input and output unitaries), unitary equivalence
of row contractions, and state isomorphism of colligations.

All verdicts are three-valued: ``confirmed`` ships unitaries that
reproduce the claimed identity within the reported residual,
``refuted_by_invariant`` ships a dimension or singular-value certificate,
and ``unknown`` means the seeded multistart optimisation did not reach the
tolerance -- never evidence of non-equivalence.
"""

from dataclasses import dataclass, field

import numpy as np

from .colligation import Colligation
from .errors import ComputationError, ShapeMismatch
from .fockseries import NCSeries
from .numlin import polar_unitary, spectral_norm
from .randomgen import haar_unitary
from .rowcon import RowContraction

DEFAULT_RESTARTS = 16
DEFAULT_ITERS = 500

__all__ = [
    "EquivalenceResult",
    "equivalence_solve",
    "coincidence_solve",
    "rowcon_unitary_equiv",
    "colligation_state_unitary",
]


@dataclass(frozen=True)
class EquivalenceResult:
    """Verdict of an equivalence solver.

    ``unitaries`` is empty, ``(v,)`` or ``(U, U_out)`` depending on the
    notion decided; a ``confirmed`` verdict guarantees the residual is
    within tolerance and every returned matrix is unitary within 1e-9.
    """

    status: str
    unitaries: tuple = field(repr=False)
    residual: float
    certificate: dict | None = None

    @property
    def confirmed(self) -> bool:
        return self.status == "confirmed"


def _series_tol(series: NCSeries) -> float:
    return 1e-8 * (1.0 + series.coefficient_norm_sum())


def _svals(mat: np.ndarray) -> np.ndarray:
    if mat.size == 0:
        return np.zeros(0)
    return np.linalg.svd(mat, compute_uv=False)


def equivalence_solve(s1: NCSeries, s2: NCSeries, tol: float | None = None) -> EquivalenceResult:
    """Decide whether the first symbol is the second times an input unitary.

    The closed-form candidate aligns the coefficient families in one
    orthogonal-Procrustes step; refutation certificates come from the input
    dimensions or the singular values of the stacked coefficient matrices,
    which any input-side unitary preserves.
    """
    if (s1.d, s1.out_dim, s1.degree) != (s2.d, s2.out_dim, s2.degree):
        raise ShapeMismatch("series must share arity, output dimension, degree")
    if tol is None:
        tol = _series_tol(s1)
    if s1.in_dim != s2.in_dim:
        return EquivalenceResult(
            "refuted_by_invariant",
            (),
            np.inf,
            {"reason": "input_dimension", "dims": (s1.in_dim, s2.in_dim)},
        )
    if s1.in_dim == 0:
        return EquivalenceResult(
            "confirmed", (np.zeros((0, 0), dtype=np.complex128),), 0.0
        )
    c1, c2 = s1.stacked(), s2.stacked()
    sv1 = _svals(c1.reshape(-1, s1.in_dim))
    sv2 = _svals(c2.reshape(-1, s2.in_dim))
    if np.max(np.abs(sv1 - sv2), initial=0.0) > tol:
        return EquivalenceResult(
            "refuted_by_invariant",
            (),
            np.inf,
            {
                "reason": "stacked_singular_values",
                "deviation": float(np.max(np.abs(sv1 - sv2))),
            },
        )
    acc = np.einsum("wba,wbc->ac", c2.conj(), c1)
    v = polar_unitary(acc)
    residual = float(np.sqrt(np.sum(np.abs(c1 - np.einsum("wab,bc->wac", c2, v)) ** 2)))
    status = "confirmed" if residual <= tol else "unknown"
    return EquivalenceResult(status, (v,), residual)


def _spectral_align(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    from .numlin import hermitian_eig

    if g1.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    _, v1 = hermitian_eig(g1)
    _, v2 = hermitian_eig(g2)
    return v2 @ v1.conj().T


def _polar(mat: np.ndarray) -> np.ndarray:
    """Polar factor via plain SVD; falls back to the deterministic
    completion for (near-)singular accumulators."""
    u, s, vh = np.linalg.svd(mat)
    if s.size and s[-1] > 1e-13 * s[0]:
        return u @ vh
    return polar_unitary(mat)


def _superoperator_init(c1: np.ndarray, c2: np.ndarray):
    """Top singular pair of X -> sum_w c2_w X c1_w*, projected to unitaries.

    The joint alignment objective is the inner product of the output
    unitary with this map applied to the input unitary, so its leading
    singular vectors are the natural relaxation of the optimal pair.
    """
    q, p = c2.shape[1], c1.shape[2]
    k = np.einsum("wab,wdc->adbc", c2, c1.conj()).reshape(q * q, p * p)
    u, _, vh = np.linalg.svd(k, full_matrices=False)
    x = vh[0].conj().reshape(p, p)
    y = u[:, 0].reshape(q, q)
    return _polar(x), _polar(y)


def coincidence_solve(
    s1: NCSeries,
    s2: NCSeries,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    tol: float | None = None,
) -> EquivalenceResult:
    """Decide whether two symbols agree up to input and output unitaries.

    Alternating orthogonal-Procrustes steps on the joint objective: fixing
    the input unitary yields a closed-form optimal output unitary and vice
    versa, so the objective never increases per half-step.  Multistart with
    a spectral-alignment seed, the identity, and seeded random unitaries;
    selection is the lowest residual with ties broken by restart index.
    Non-convergence yields ``unknown``, never a refutation.
    """
    if (s1.d, s1.degree) != (s2.d, s2.degree):
        raise ShapeMismatch("series must share arity and degree")
    if s1.in_dim != s2.in_dim or s1.out_dim != s2.out_dim:
        raise ShapeMismatch("input/output dimensions must agree pairwise")
    if tol is None:
        tol = _series_tol(s1)
    p, q = s1.in_dim, s1.out_dim
    if p == 0 or q == 0:
        empty = np.zeros((p, p), dtype=np.complex128)
        empty_q = np.zeros((q, q), dtype=np.complex128)
        return EquivalenceResult("confirmed", (empty, empty_q), 0.0)
    c1, c2 = s1.stacked(), s2.stacked()

    for word in s1.words():
        dev = np.max(
            np.abs(_svals(s1.coeff(word)) - _svals(s2.coeff(word))), initial=0.0
        )
        if dev > tol:
            return EquivalenceResult(
                "refuted_by_invariant",
                (),
                np.inf,
                {
                    "reason": "word_singular_values",
                    "word": word,
                    "deviation": float(dev),
                },
            )

    def objective(u, u_out):
        diff = np.einsum("ab,wbc->wac", u_out, c1) - np.einsum("wab,bc->wac", c2, u)
        return float(np.sum(np.abs(diff) ** 2))

    rng = np.random.default_rng(seed)
    eye_p = np.eye(p, dtype=np.complex128)
    eye_q = np.eye(q, dtype=np.complex128)
    inits = []
    for r in range(restarts):
        if r == 0:
            g1 = np.einsum("wab,wcb->ac", c1, c1.conj())
            g2 = np.einsum("wab,wcb->ac", c2, c2.conj())
            h1 = np.einsum("wba,wbc->ac", c1.conj(), c1)
            h2 = np.einsum("wba,wbc->ac", c2.conj(), c2)
            inits.append((_spectral_align(h1, h2), _spectral_align(g1, g2)))
        elif r == 1:
            inits.append((eye_p, eye_q))
        elif r == 2:
            inits.append(_superoperator_init(c1, c2))
        elif r == 3:
            inits.append((_polar(np.einsum("wba,wbc->ac", c2.conj(), c1)), eye_q))
        else:
            inits.append((haar_unitary(rng, p), haar_unitary(rng, q)))

    success = (0.3 * tol) ** 2
    best = None
    for idx, (u, u_out) in enumerate(inits):
        j_prev = objective(u, u_out)
        for _ in range(iters):
            u_out = _polar(np.einsum("wab,bc,wdc->ad", c2, u, c1.conj()))
            j_half = objective(u, u_out)
            if j_half > j_prev + 1e-9 * (1.0 + j_prev):
                raise ComputationError("output half-step increased the objective")
            u = _polar(np.einsum("wba,bc,wcd->ad", c2.conj(), u_out, c1))
            j_full = objective(u, u_out)
            if j_full > j_half + 1e-9 * (1.0 + j_half):
                raise ComputationError("input half-step increased the objective")
            stalled = j_prev - j_full <= 1e-18 + 1e-12 * j_full
            j_prev = j_full
            if j_full <= success or stalled:
                break
        if best is None or j_prev < best[0]:
            best = (j_prev, idx, u, u_out)
        if best[0] <= success:
            break
    residual = float(np.sqrt(best[0]))
    status = "confirmed" if residual <= tol else "unknown"
    return EquivalenceResult(status, (best[2], best[3]), residual)


def rowcon_unitary_equiv(
    t1: RowContraction,
    t2: RowContraction,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    tol: float | None = None,
) -> EquivalenceResult:
    """Decide blockwise unitary equivalence of two row contractions.

    Fixed-point ascent through polar steps on the alignment functional;
    refutation only by unitary invariants (spectrum of the row gram, traces
    of short block words).
    """
    if t1.dim != t2.dim or t1.arity != t2.arity:
        raise ShapeMismatch("row contractions must share dimension and arity")
    if tol is None:
        tol = 1e-8 * (1.0 + sum(np.linalg.norm(b) for b in t1.blocks))
    n, d = t1.dim, t1.arity
    if n == 0:
        return EquivalenceResult("confirmed", (np.zeros((0, 0), dtype=np.complex128),), 0.0)

    from .numlin import hermitian_eig

    w1, _ = hermitian_eig(t1.gram())
    w2, _ = hermitian_eig(t2.gram())
    if np.max(np.abs(w1 - w2), initial=0.0) > tol:
        return EquivalenceResult(
            "refuted_by_invariant",
            (),
            np.inf,
            {"reason": "gram_spectrum", "deviation": float(np.max(np.abs(w1 - w2)))},
        )

    def word_traces(t: RowContraction) -> list:
        traces = []
        prods = {(): np.eye(n, dtype=np.complex128)}
        frontier = [()]
        for _ in range(3):
            nxt = []
            for w in frontier:
                for i in range(1, d + 1):
                    ww = w + (i,)
                    prods[ww] = t.blocks[i - 1] @ prods[w]
                    traces.append(np.trace(prods[ww]))
                    nxt.append(ww)
            frontier = nxt
        return traces

    tr_dev = np.max(
        np.abs(np.array(word_traces(t1)) - np.array(word_traces(t2))), initial=0.0
    )
    if tr_dev > tol:
        return EquivalenceResult(
            "refuted_by_invariant",
            (),
            np.inf,
            {"reason": "word_traces", "deviation": float(tr_dev)},
        )

    def residual_of(u):
        return float(
            np.sqrt(
                sum(
                    np.linalg.norm(u @ b1 - b2 @ u) ** 2
                    for b1, b2 in zip(t1.blocks, t2.blocks)
                )
            )
        )

    rng = np.random.default_rng(seed)
    inits = []
    for r in range(restarts):
        if r == 0:
            inits.append(np.eye(n, dtype=np.complex128))
        elif r == 1:
            inits.append(_spectral_align(t1.gram(), t2.gram()))
        else:
            inits.append(haar_unitary(rng, n))

    best = None
    for idx, u in enumerate(inits):
        res = residual_of(u)
        for _ in range(iters):
            acc = np.zeros((n, n), dtype=np.complex128)
            for b1, b2 in zip(t1.blocks, t2.blocks):
                acc += b2 @ u @ b1.conj().T
            u_new = _polar(acc)
            res_new = residual_of(u_new)
            step = spectral_norm(u_new - u)
            u = u_new
            res = res_new
            if res_new <= 0.1 * tol or step <= 1e-14:
                break
        if best is None or res < best[0]:
            best = (res, idx, u)
        if best[0] <= 0.1 * tol:
            break
    status = "confirmed" if best[0] <= tol else "unknown"
    return EquivalenceResult(status, (best[2],), float(best[0]))


def colligation_state_unitary(
    w1: Colligation,
    w2: Colligation,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = 0,
    tol: float | None = None,
) -> EquivalenceResult:
    """Find the state-space unitary relating two colligations.

    Solves for U with (stacked U) A1 = A2 U, (stacked U) B1 = B2,
    C1 = C2 U and D1 = D2 by polar fixed-point iteration with multistart.
    """
    if (w1.arity, w1.state_dim, w1.in_dim, w1.out_dim) != (
        w2.arity,
        w2.state_dim,
        w2.in_dim,
        w2.out_dim,
    ):
        raise ShapeMismatch("colligations must share all four dimensions")
    if tol is None:
        scale = sum(np.linalg.norm(b) for b in w1.a_blocks)
        tol = 1e-8 * (1.0 + scale + np.linalg.norm(w1.b) + np.linalg.norm(w1.c))
    n = w1.state_dim
    d_dev = spectral_norm(w1.d - w2.d)
    if n == 0:
        status = "confirmed" if d_dev <= tol else "unknown"
        return EquivalenceResult(status, (np.zeros((0, 0), dtype=np.complex128),), float(d_dev))

    def residual_of(u):
        acc = d_dev**2
        for i in range(1, w1.arity + 1):
            acc += np.linalg.norm(u @ w1.a_blocks[i - 1] - w2.a_blocks[i - 1] @ u) ** 2
            acc += np.linalg.norm(u @ w1.b_block(i) - w2.b_block(i)) ** 2
        acc += np.linalg.norm(w1.c - w2.c @ u) ** 2
        return float(np.sqrt(acc))

    const = w2.c.conj().T @ w1.c
    for i in range(1, w1.arity + 1):
        const = const + w2.b_block(i) @ w1.b_block(i).conj().T

    rng = np.random.default_rng(seed)
    inits = [np.eye(n, dtype=np.complex128)]
    inits.extend(haar_unitary(rng, n) for _ in range(max(restarts - 1, 0)))

    best = None
    for idx, u in enumerate(inits):
        res = residual_of(u)
        for _ in range(iters):
            acc = const.copy()
            for b1, b2 in zip(w1.a_blocks, w2.a_blocks):
                acc += b2 @ u @ b1.conj().T
            u_new = _polar(acc)
            res_new = residual_of(u_new)
            step = spectral_norm(u_new - u)
            u = u_new
            res = res_new
            if res_new <= 0.1 * tol or step <= 1e-14:
                break
        if best is None or res < best[0]:
            best = (res, idx, u)
        if best[0] <= 0.1 * tol:
            break
    status = "confirmed" if best[0] <= tol else "unknown"
    return EquivalenceResult(status, (best[2],), float(best[0]))
