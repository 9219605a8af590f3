"""JSON file schemas for matrices, row contractions, series, colligations
and liftings.

Scalars are two-element arrays [re, im]; a matrix is
``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in row-major order.
Serialisation uses sorted keys and canonical word order so identical
objects produce identical bytes.
"""

import json

import numpy as np

from .colligation import Colligation
from .errors import SchemaError
from .fockseries import NCSeries, enumerate_words
from .lifting import Lifting
from .rowcon import RowContraction

__all__ = [
    "SchemaError",
    "matrix_to_json",
    "matrix_from_json",
    "rowcon_to_json",
    "rowcon_from_json",
    "series_to_json",
    "series_from_json",
    "colligation_to_json",
    "colligation_from_json",
    "lifting_to_json",
    "lifting_from_json",
    "load_json_file",
    "dump_json",
]


def _expect_dict(obj, what: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected an object, got {type(obj).__name__}")
    return obj


def _expect_int(obj, what: str) -> int:
    if not isinstance(obj, int) or isinstance(obj, bool):
        raise SchemaError(f"{what}: expected an integer")
    return obj


def _complex_from_json(obj, what: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise SchemaError(f"{what}: a complex scalar is a two-element [re, im] array")
    return complex(obj[0], obj[1])


def complex_to_json(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(mat) -> dict:
    arr = np.asarray(mat, dtype=np.complex128)
    rows, cols = arr.shape
    return {
        "rows": rows,
        "cols": cols,
        "data": [complex_to_json(z) for z in arr.reshape(-1)],
    }


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    obj = _expect_dict(obj, what)
    rows = _expect_int(obj.get("rows"), f"{what}.rows")
    cols = _expect_int(obj.get("cols"), f"{what}.cols")
    if rows < 0 or cols < 0:
        raise SchemaError(f"{what}: negative dimensions")
    data = obj.get("data")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise SchemaError(f"{what}.data: expected {rows * cols} scalars")
    flat = [_complex_from_json(z, f"{what}.data[{i}]") for i, z in enumerate(data)]
    return np.array(flat, dtype=np.complex128).reshape(rows, cols)


def rowcon_to_json(t: RowContraction) -> dict:
    return {
        "dim": t.dim,
        "arity": t.arity,
        "blocks": [matrix_to_json(b) for b in t.blocks],
    }


def rowcon_from_json(obj, what: str = "row contraction") -> RowContraction:
    obj = _expect_dict(obj, what)
    dim = _expect_int(obj.get("dim"), f"{what}.dim")
    arity = _expect_int(obj.get("arity"), f"{what}.arity")
    blocks = obj.get("blocks")
    if not isinstance(blocks, list) or len(blocks) != arity:
        raise SchemaError(f"{what}.blocks: expected {arity} matrices")
    mats = [matrix_from_json(b, f"{what}.blocks[{i}]") for i, b in enumerate(blocks)]
    for i, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise SchemaError(f"{what}.blocks[{i}]: expected shape ({dim}, {dim})")
    return RowContraction(tuple(mats))


def series_to_json(series: NCSeries) -> dict:
    return {
        "arity": series.d,
        "in_dim": series.in_dim,
        "out_dim": series.out_dim,
        "degree": series.degree,
        "coeffs": [
            {"word": list(w), "matrix": matrix_to_json(series.coeffs[w])}
            for w in series.words()
        ],
    }


def series_from_json(obj, what: str = "series") -> NCSeries:
    obj = _expect_dict(obj, what)
    arity = _expect_int(obj.get("arity"), f"{what}.arity")
    in_dim = _expect_int(obj.get("in_dim"), f"{what}.in_dim")
    out_dim = _expect_int(obj.get("out_dim"), f"{what}.out_dim")
    degree = _expect_int(obj.get("degree"), f"{what}.degree")
    entries = obj.get("coeffs")
    if not isinstance(entries, list):
        raise SchemaError(f"{what}.coeffs: expected a list")
    coeffs = {}
    for i, entry in enumerate(entries):
        entry = _expect_dict(entry, f"{what}.coeffs[{i}]")
        word = entry.get("word")
        if not isinstance(word, list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in word
        ):
            raise SchemaError(f"{what}.coeffs[{i}].word: expected a list of letters")
        key = tuple(word)
        if key in coeffs:
            raise SchemaError(f"{what}.coeffs[{i}]: duplicate word {key}")
        if len(key) > degree or any(not 1 <= x <= arity for x in key):
            raise SchemaError(f"{what}.coeffs[{i}]: word {key} out of range")
        mat = matrix_from_json(entry.get("matrix"), f"{what}.coeffs[{i}].matrix")
        if mat.shape != (out_dim, in_dim):
            raise SchemaError(
                f"{what}.coeffs[{i}].matrix: expected shape ({out_dim}, {in_dim})"
            )
        coeffs[key] = mat
    try:
        return NCSeries(arity, in_dim, out_dim, degree, coeffs)
    except Exception as exc:  # dimension guards inside the constructor
        raise SchemaError(f"{what}: {exc}") from exc


def colligation_to_json(w: Colligation) -> dict:
    return {
        "arity": w.arity,
        "state_dim": w.state_dim,
        "in_dim": w.in_dim,
        "out_dim": w.out_dim,
        "A": [matrix_to_json(b) for b in w.a_blocks],
        "B": matrix_to_json(w.b),
        "C": matrix_to_json(w.c),
        "D": matrix_to_json(w.d),
    }


def colligation_from_json(obj, what: str = "colligation") -> Colligation:
    obj = _expect_dict(obj, what)
    arity = _expect_int(obj.get("arity"), f"{what}.arity")
    blocks = obj.get("A")
    if not isinstance(blocks, list) or len(blocks) != arity:
        raise SchemaError(f"{what}.A: expected {arity} state blocks")
    a_blocks = tuple(
        matrix_from_json(b, f"{what}.A[{i}]") for i, b in enumerate(blocks)
    )
    try:
        built = Colligation(
            a_blocks=a_blocks,
            b=matrix_from_json(obj.get("B"), f"{what}.B"),
            c=matrix_from_json(obj.get("C"), f"{what}.C"),
            d=matrix_from_json(obj.get("D"), f"{what}.D"),
        )
    except Exception as exc:
        raise SchemaError(f"{what}: {exc}") from exc
    for key, value in (
        ("state_dim", built.state_dim),
        ("in_dim", built.in_dim),
        ("out_dim", built.out_dim),
    ):
        if key in obj and _expect_int(obj[key], f"{what}.{key}") != value:
            raise SchemaError(f"{what}.{key}: {obj[key]} does not match blocks")
    return built


def lifting_to_json(lifting: Lifting) -> dict:
    from .lifting import extract_gamma

    gamma = extract_gamma(lifting).gamma
    return {
        "C": rowcon_to_json(lifting.C),
        "A": rowcon_to_json(lifting.A),
        "gamma": matrix_to_json(gamma),
    }


def lifting_from_json(obj, what: str = "lifting") -> Lifting:
    from .lifting import build_lifting

    obj = _expect_dict(obj, what)
    if "E" in obj:
        e = rowcon_from_json(obj.get("E"), f"{what}.E")
        split = _expect_int(obj.get("split"), f"{what}.split")
        if not 0 <= split <= e.dim:
            raise SchemaError(f"{what}.split: must lie in [0, {e.dim}]")
        c_blocks, a_blocks, b_blocks = [], [], []
        for i, blk in enumerate(e.blocks):
            if np.any(blk[:split, split:] != 0):
                raise SchemaError(
                    f"{what}.E.blocks[{i}]: upper-right block must vanish exactly"
                )
            c_blocks.append(blk[:split, :split])
            a_blocks.append(blk[split:, split:])
            b_blocks.append(blk[split:, :split])
        return Lifting(
            RowContraction(tuple(c_blocks)),
            RowContraction(tuple(a_blocks)),
            tuple(b_blocks),
        )
    if "C" in obj and "A" in obj and "gamma" in obj:
        base = rowcon_from_json(obj.get("C"), f"{what}.C")
        added = rowcon_from_json(obj.get("A"), f"{what}.A")
        gamma = matrix_from_json(obj.get("gamma"), f"{what}.gamma")
        try:
            return build_lifting(base, added, gamma)
        except Exception as exc:
            raise SchemaError(f"{what}: {exc}") from exc
    raise SchemaError(f"{what}: expected keys (C, A, gamma) or (E, split)")


def load_json_file(path: str):
    """Parse a JSON file, mapping I/O and syntax failures to SchemaError."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from exc


def dump_json(obj) -> str:
    """Canonical JSON text (sorted keys, two-space indent)."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
