"""Seeded random instances for verification suites.

Every generator takes a ``numpy.random.Generator`` and is deterministic
given its state; suite drivers derive the per-case generator from a master
seed and the case index.
"""

import numpy as np

from .colligation import Colligation
from .lifting import Lifting, build_lifting, minimality_check
from .numlin import spectral_norm
from .rowcon import RowContraction, defects

__all__ = [
    "case_rng",
    "complex_gaussian",
    "haar_unitary",
    "random_contraction",
    "random_row_contraction",
    "random_strict_row_contraction",
    "random_noncnc_row_contraction",
    "random_colligation",
    "random_coisometric_colligation",
    "random_structured_colligation",
    "random_minimal_lifting",
]


def case_rng(seed: int, case: int) -> np.random.Generator:
    """Deterministic per-case generator derived from a master seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(case),))
    )


def complex_gaussian(rng, rows: int, cols: int) -> np.ndarray:
    return (
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    ) / np.sqrt(2.0)


def haar_unitary(rng, n: int) -> np.ndarray:
    """Haar-distributed unitary via phase-normalised QR."""
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    q, r = np.linalg.qr(complex_gaussian(rng, n, n))
    diag = np.diag(r)
    phases = diag / np.abs(diag)
    return q * phases.conj()


def random_contraction(rng, rows: int, cols: int, max_norm: float = 0.95) -> np.ndarray:
    """Random matrix with operator norm drawn below max_norm."""
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    g = complex_gaussian(rng, rows, cols)
    target = rng.uniform(0.2, max_norm)
    return g * (target / max(spectral_norm(g), 1e-30))


def random_row_contraction(
    rng, n: int, d: int, min_norm: float = 0.2, max_norm: float = 0.95
) -> RowContraction:
    """Random row contraction with row norm drawn in [min_norm, max_norm]."""
    blocks = [complex_gaussian(rng, n, n) for _ in range(d)]
    row = np.hstack(blocks) if n else np.zeros((0, 0))
    scale = spectral_norm(row)
    target = rng.uniform(min_norm, max_norm)
    factor = target / max(scale, 1e-30)
    return RowContraction(tuple(b * factor for b in blocks))


def random_strict_row_contraction(rng, n: int, d: int, max_norm: float = 0.9) -> RowContraction:
    """Row norm strictly below one, hence completely non-co-isometric."""
    return random_row_contraction(rng, n, d, 0.2, max_norm)


def random_noncnc_row_contraction(rng, n_iso: int, n_rest: int, d: int) -> RowContraction:
    """Row contraction with a co-isometric block of dimension n_iso.

    The first letter carries a unitary on the co-isometric block and a
    strict contraction block elsewhere; the whole row is conjugated by a
    random unitary so the invariant block is hidden.
    """
    n = n_iso + n_rest
    rest = random_strict_row_contraction(rng, n_rest, d, 0.85)
    blocks = []
    for i in range(d):
        blk = np.zeros((n, n), dtype=np.complex128)
        if i == 0 and n_iso:
            blk[:n_iso, :n_iso] = haar_unitary(rng, n_iso)
        blk[n_iso:, n_iso:] = rest.blocks[i]
        blocks.append(blk)
    q = haar_unitary(rng, n)
    return RowContraction(tuple(q @ b @ q.conj().T for b in blocks))


def random_colligation(
    rng, d: int, n1: int, n2: int, n3: int, max_norm: float = 0.95
) -> Colligation:
    """Random contractive colligation (norm of the full block matrix < 1)."""
    full = complex_gaussian(rng, d * n1 + n3, n1 + n2)
    target = rng.uniform(0.3, max_norm)
    full *= target / max(spectral_norm(full), 1e-30)
    a_blocks = tuple(full[i * n1 : (i + 1) * n1, :n1] for i in range(d))
    return Colligation(
        a_blocks=a_blocks,
        b=full[: d * n1, n1:],
        c=full[d * n1 :, :n1],
        d=full[d * n1 :, n1:],
    )


def random_coisometric_colligation(rng, d: int, n1: int, n2: int, n3: int) -> Colligation:
    """Co-isometric colligation cut from a Haar unitary."""
    rows = d * n1 + n3
    cols = max(rows, n1 + n2)
    u = haar_unitary(rng, cols)[:rows, : n1 + n2]
    a_blocks = tuple(u[i * n1 : (i + 1) * n1, :n1] for i in range(d))
    return Colligation(
        a_blocks=a_blocks,
        b=u[: d * n1, n1:],
        c=u[d * n1 :, :n1],
        d=u[d * n1 :, n1:],
    )


def random_structured_colligation(rng, d: int, n: int, out_dim: int):
    """Colligation in the factored form of the structure theorem.

    Returns (colligation, gamma, sigma_tilde, row) where gamma is a random
    co-isometry from the adjoint-defect coordinates of the row onto the
    output space and sigma_tilde a random unitary from the input space onto
    the defect coordinates.
    """
    row = random_strict_row_contraction(rng, n, d, 0.9)
    pair = defects(row)
    r_in, r_out = pair.basis_D.dim, pair.basis_Dstar.dim
    if out_dim > r_out:
        raise ValueError("output dimension exceeds the adjoint defect rank")
    gamma = haar_unitary(rng, r_out)[:out_dim, :]
    sigma_tilde = haar_unitary(rng, r_in)
    q_in = pair.basis_D.vectors
    q_out = pair.basis_Dstar.vectors
    row_mat = row.row()
    colligation = Colligation(
        a_blocks=tuple(b.conj().T for b in row.blocks),
        b=pair.D @ q_in @ sigma_tilde,
        c=gamma @ q_out.conj().T @ pair.Dstar,
        d=-gamma @ q_out.conj().T @ row_mat @ q_in @ sigma_tilde,
    )
    return colligation, gamma, sigma_tilde, row


def random_minimal_lifting(
    rng,
    n_c: int,
    n_a: int,
    d: int,
    max_norm: float = 0.9,
    tries: int = 25,
) -> Lifting:
    """Random minimal contractive lifting.

    Draws a base row, a strict added row (hence completely
    non-co-isometric) and a strict link, and retries until the minimality
    check passes; with an injective link this succeeds immediately almost
    surely.
    """
    for _ in range(tries):
        base = random_row_contraction(rng, n_c, d, 0.2, max_norm)
        added = random_strict_row_contraction(rng, n_a, d, max_norm)
        r_c = defects(base).basis_D.dim
        r_star = defects(added).basis_Dstar.dim
        gamma = random_contraction(rng, r_c, r_star, 0.95)
        lifted = build_lifting(base, added, gamma)
        if minimality_check(lifted):
            return lifted
    raise RuntimeError("failed to draw a minimal lifting; widen the parameters")
