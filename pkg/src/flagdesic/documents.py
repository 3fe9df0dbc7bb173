"""File formats for tangent vectors and metrics, plus the built-in fixtures.

A vector document is a JSON object

    {"n": 4, "parts": [1, 1, 1, 1], "mode": "float",
     "blocks": {"1,2": [[[2.0, 0.0]]], "3,4": [[[3.0, 0.0]]]}}

holding only the upper block triangle; the lower half is forced to
a_ji = -a_ij^*, which removes a whole class of inconsistent inputs. Float
entries are [re, im] pairs; exact entries are strings like "1/2-3/4i".
Missing blocks are zero. Metric documents carry {"parts": [...],
"lambda": {"i,j": value}} with absent pairs defaulting to 1.
"""

from __future__ import annotations

import re
from typing import Optional

import numpy as np

from .flag import FlagPartition, TangentVector
from .linalg import CMatrix, GaussianRational, Mode
from .metric import InvariantMetric

#: Agreement required when a document redundantly supplies both block halves.
HALF_CONSISTENCY_TOL = 1e-12

_KEY_RE = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")


class DocumentError(ValueError):
    """Malformed document: carries a human-readable field context."""


def _parse_key(key: str, s: int):
    m = _KEY_RE.match(key)
    if not m:
        raise DocumentError(f"block key {key!r} is not of the form \"i,j\"")
    i, j = int(m.group(1)), int(m.group(2))
    if i == j:
        raise DocumentError(
            f"block key {key!r} addresses a diagonal block; diagonal blocks are zero in m"
        )
    if not (1 <= i <= s and 1 <= j <= s):
        raise DocumentError(f"block key {key!r} out of range 1..{s}")
    return i, j


def _parse_float_entry(value, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) for v in value)
    ):
        raise DocumentError(f"{where}: float entries must be [re, im] pairs, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _parse_exact_entry(value, where: str) -> GaussianRational:
    if isinstance(value, int):
        return GaussianRational(value)
    if not isinstance(value, str):
        raise DocumentError(f"{where}: exact entries must be strings like \"p/q+r/si\"")
    try:
        return GaussianRational.parse(value)
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _parse_block(raw, rows: int, cols: int, mode: Mode, where: str):
    if not isinstance(raw, list) or len(raw) != rows or any(
        not isinstance(r, list) or len(r) != cols for r in raw
    ):
        raise DocumentError(f"{where}: expected a {rows}x{cols} matrix of entries")
    if mode is Mode.FLOAT:
        grid = [[_parse_float_entry(v, where) for v in row] for row in raw]
        return CMatrix.from_complex(grid)
    grid = [[_parse_exact_entry(v, where) for v in row] for row in raw]
    return CMatrix(np.array(grid, dtype=object), Mode.EXACT)


def parse_vector_document(doc: dict) -> TangentVector:
    """Validate and assemble a tangent vector from its JSON form."""
    if not isinstance(doc, dict):
        raise DocumentError("vector document must be a JSON object")
    if "parts" not in doc:
        raise DocumentError("vector document is missing \"parts\"")
    try:
        partition = FlagPartition(tuple(doc["parts"]))
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"invalid \"parts\": {exc}") from None
    if "n" in doc and int(doc["n"]) != partition.total:
        raise DocumentError(
            f"\"n\" = {doc['n']} does not match the partition total {partition.total}"
        )
    mode_name = doc.get("mode", "float")
    try:
        mode = Mode(mode_name)
    except ValueError:
        raise DocumentError(f"unknown mode {mode_name!r} (use \"float\" or \"exact\")") from None

    raw_blocks = doc.get("blocks", {})
    if not isinstance(raw_blocks, dict):
        raise DocumentError("\"blocks\" must be an object keyed by \"i,j\"")

    upper = {}
    lower = {}
    for key, raw in raw_blocks.items():
        i, j = _parse_key(key, partition.s)
        rows = partition.parts[i - 1]
        cols = partition.parts[j - 1]
        block = _parse_block(raw, rows, cols, mode, f"block {key!r}")
        if i < j:
            if (i, j) in upper:
                raise DocumentError(f"block ({i},{j}) supplied twice")
            upper[(i, j)] = block
        else:
            if (j, i) in lower:
                raise DocumentError(f"block ({i},{j}) supplied twice")
            lower[(j, i)] = block

    for pair, low in lower.items():
        implied = -low.H
        if pair in upper:
            if mode is Mode.EXACT:
                if not (upper[pair] - implied).is_zero():
                    raise DocumentError(
                        f"blocks {pair} and {pair[::-1]} are inconsistent with a_ji = -a_ij^*"
                    )
            else:
                diff = (upper[pair] - implied).fro()
                scale = max(upper[pair].fro(), implied.fro(), 1.0)
                if diff > HALF_CONSISTENCY_TOL * scale:
                    raise DocumentError(
                        f"blocks {pair} and {pair[::-1]} disagree by {diff:.3e}; "
                        f"supply one half or make them consistent"
                    )
        else:
            upper[pair] = implied

    try:
        return TangentVector.from_blocks(partition, upper, mode)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def serialize_vector(x: TangentVector) -> dict:
    """Upper-triangle document for a tangent vector; zero blocks are omitted."""
    blocks = {}
    for i, j in x.partition.positive_pairs():
        blk = x.block(i, j)
        if blk.is_zero():
            continue
        if x.mode is Mode.FLOAT:
            data = [
                [[float(v.real), float(v.imag)] for v in row] for row in blk.data
            ]
        else:
            data = [[str(v) for v in row] for row in blk.data]
        blocks[f"{i},{j}"] = data
    return {
        "n": x.partition.total,
        "parts": list(x.partition.parts),
        "mode": x.mode.value,
        "blocks": blocks,
    }


def parse_metric_document(doc: dict, partition: Optional[FlagPartition] = None) -> InvariantMetric:
    """Metric from {"parts": [...], "lambda": {"i,j": value}}; absent pairs get 1."""
    if not isinstance(doc, dict):
        raise DocumentError("metric document must be a JSON object")
    if "parts" not in doc:
        raise DocumentError("metric document is missing \"parts\"")
    try:
        own = FlagPartition(tuple(doc["parts"]))
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"invalid \"parts\": {exc}") from None
    if partition is not None and own != partition:
        raise DocumentError(
            f"metric partition {own.parts} does not match the vector partition {partition.parts}"
        )
    raw = doc.get("lambda", {})
    if not isinstance(raw, dict):
        raise DocumentError("\"lambda\" must be an object keyed by \"i,j\"")
    values = {}
    for key, v in raw.items():
        i, j = _parse_key(key, own.s)
        pair = (i, j) if i < j else (j, i)
        if not isinstance(v, (int, float)) or v <= 0:
            raise DocumentError(f"lambda[{key!r}] must be a positive number, got {v!r}")
        if pair in values and float(values[pair]) != float(v):
            raise DocumentError(f"lambda for pair {pair} supplied twice with different values")
        values[pair] = float(v)
    try:
        return InvariantMetric.from_pairs(own, values)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def serialize_metric(g: InvariantMetric) -> dict:
    return {
        "parts": list(g.partition.parts),
        "lambda": {f"{i},{j}": g.value(i, j) for i, j in g.partition.positive_pairs()},
    }


# ---------------------------------------------------------------------------
# built-in fixtures
# ---------------------------------------------------------------------------


def _fixture_f3_u12(mode: str) -> dict:
    entry = [[1.0, 0.0]] if mode == "float" else ["1"]
    return {
        "n": 3,
        "parts": [1, 1, 1],
        "mode": mode,
        "blocks": {"1,2": [entry]},
    }


def _fixture_fn_211(mode: str) -> dict:
    # partition (3,1,1): two orthogonal column blocks, not block-diagonal,
    # already essentially diagonal with values a=1, b=2
    if mode == "float":
        a12 = [[[1.0, 0.0]], [[0.0, 0.0]], [[0.0, 0.0]]]
        a13 = [[[0.0, 0.0]], [[2.0, 0.0]], [[0.0, 0.0]]]
    else:
        a12 = [["1"], ["0"], ["0"]]
        a13 = [["0"], ["2"], ["0"]]
    return {
        "n": 5,
        "parts": [3, 1, 1],
        "mode": mode,
        "blocks": {"1,2": a12, "1,3": a13},
    }


def _fixture_f9_333(mode: str) -> dict:
    # partition (3,3,3) with sigma = (1,2,3,4): sigma1, sigma2 on the (1,2)
    # block diagonal, sigma3 at the bottom-left of (1,3), sigma4 at the
    # bottom-right of (2,3)
    def num(v):
        return [float(v), 0.0] if mode == "float" else str(v)

    z = num(0)
    a12 = [[num(1), z, z], [z, num(2), z], [z, z, z]]
    a13 = [[z, z, z], [z, z, z], [num(3), z, z]]
    a23 = [[z, z, z], [z, z, z], [z, z, num(4)]]
    return {
        "n": 9,
        "parts": [3, 3, 3],
        "mode": mode,
        "blocks": {"1,2": a12, "1,3": a13, "2,3": a23},
    }


def _fixture_f4_x2y3(mode: str) -> dict:
    def num(v):
        return [[[float(v), 0.0]]] if mode == "float" else [[str(v)]]

    return {
        "n": 4,
        "parts": [1, 1, 1, 1],
        "mode": mode,
        "blocks": {"1,2": num(2), "3,4": num(3)},
    }


_FIXTURES = {
    "f3-u12": _fixture_f3_u12,
    "fn-211": _fixture_fn_211,
    "f9-333": _fixture_f9_333,
    "f4-x2y3": _fixture_f4_x2y3,
}


def fixture_names() -> list:
    return sorted(_FIXTURES)


def fixture_document(name: str, mode: str = "float") -> dict:
    """One of the built-in example documents, in float or exact form."""
    if name not in _FIXTURES:
        raise KeyError(name)
    if mode not in ("float", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    return _FIXTURES[name](mode)


def fixture_vector(name: str, mode: str = "float") -> TangentVector:
    return parse_vector_document(fixture_document(name, mode))
