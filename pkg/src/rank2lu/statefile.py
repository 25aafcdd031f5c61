"""JSON state files: split re/im matrix arrays, exact double round trip.

Two layouts: the decomposition form {"m", "n", "lambda", "A", "B"} and the
raw form {"m", "n", "rho"}.  Matrices are {"re": [[...]], "im": [[...]]}.
Python's shortest-round-trip float repr is used for serialization, so a
write/read cycle reproduces every double bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError, ShapeMismatch
from .numerics import DEFAULT_TOL, ToleranceConfig
from .states import BipartiteShape, DensityMatrix, RankTwoState, decompose

__all__ = [
    "matrix_to_obj",
    "obj_to_matrix",
    "state_to_obj",
    "density_to_obj",
    "write_document",
    "load_document",
    "as_rank_two",
]


def matrix_to_obj(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


def _rectangular(rows, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(
        isinstance(r, list) for r in rows
    ):
        raise ParseError(f"{name} must be a non-empty list of rows")
    width = len(rows[0])
    if width == 0 or any(len(r) != width for r in rows):
        raise ParseError(f"{name} rows must all have the same positive length")
    try:
        return np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name} entries must be numbers: {exc}") from None


def obj_to_matrix(obj, name: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise ParseError(f'{name} must be an object with "re" and "im" arrays')
    re = _rectangular(obj["re"], f"{name}.re")
    im = _rectangular(obj["im"], f"{name}.im")
    if re.shape != im.shape:
        raise ParseError(f"{name}.re and {name}.im have different shapes")
    return re + 1j * im


def state_to_obj(state: RankTwoState) -> dict:
    return {
        "m": state.shape.m,
        "n": state.shape.n,
        "lambda": float(state.lambda1),
        "A": matrix_to_obj(state.A),
        "B": matrix_to_obj(state.B),
    }


def density_to_obj(dm: DensityMatrix) -> dict:
    return {"m": dm.shape.m, "n": dm.shape.n, "rho": matrix_to_obj(dm.rho)}


def write_document(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def _read_int(doc: dict, key: str) -> int:
    if key not in doc:
        raise ParseError(f'missing required key "{key}"')
    value = doc[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ParseError(f'"{key}" must be an integer, got {value!r}')
    return value


def load_document(
    path, cfg: ToleranceConfig = DEFAULT_TOL
) -> RankTwoState | DensityMatrix:
    """Parse and validate a state file in either layout."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    m = _read_int(doc, "m")
    n = _read_int(doc, "n")
    shape = BipartiteShape(m=m, n=n)
    if "rho" in doc:
        rho = obj_to_matrix(doc["rho"], "rho")
        if rho.shape != (shape.total, shape.total):
            raise ShapeMismatch(
                f"rho must be {shape.total} x {shape.total} for m={m}, n={n}, "
                f"got {rho.shape}"
            )
        dm = DensityMatrix(shape=shape, rho=rho)
        dm.validate(cfg)
        return dm
    if "A" in doc and "B" in doc:
        if "lambda" not in doc:
            raise ParseError('decomposition form needs a "lambda" key')
        lam = doc["lambda"]
        if not isinstance(lam, (int, float)) or isinstance(lam, bool):
            raise ParseError('"lambda" must be a number')
        A = obj_to_matrix(doc["A"], "A")
        B = obj_to_matrix(doc["B"], "B")
        if A.shape != (m, n) or B.shape != (m, n):
            raise ShapeMismatch(
                f"A and B must be {m} x {n}, got {A.shape} and {B.shape}"
            )
        state = RankTwoState(shape=shape, lambda1=float(lam), A=A, B=B)
        state.validate(cfg)
        return state
    raise ParseError(
        f'{path}: expected either "rho" (raw form) or "A", "B", "lambda" '
        "(decomposition form)"
    )


def as_rank_two(
    loaded: RankTwoState | DensityMatrix, cfg: ToleranceConfig = DEFAULT_TOL
) -> RankTwoState:
    """Decompose raw input; pass decomposition-form input through."""
    if isinstance(loaded, RankTwoState):
        return loaded
    return decompose(loaded, cfg)
