"""JSON encodings shared by the CLI.

Matrices are ``{"rows", "cols", "re", "im"}`` with ``im`` optional on input;
plain nested lists of real numbers are accepted too.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .endo import NormalHom
from .generators import BlockGenerator, LocalProjectionPair
from .matcore import DEFAULT_TOL, BlockPartition, Tolerance, ValidationError


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    # +0.0 turns negative zeros into zeros so reports diff cleanly
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "re": (M.real + 0.0).tolist(),
        "im": (M.imag + 0.0).tolist(),
    }


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, list):
        M = np.asarray(obj, dtype=complex)
        return M.reshape(-1, 1) if M.ndim == 1 else M
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float).reshape(rows, cols)
        im = np.asarray(obj.get("im", np.zeros((rows, cols))), dtype=float).reshape(rows, cols)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    return re + 1j * im


def partition_to_json(p: BlockPartition) -> dict:
    return {"n": p.n, "blocks": [list(b) for b in p.blocks]}


def partition_from_json(obj) -> BlockPartition:
    try:
        return BlockPartition(int(obj["n"]), tuple(tuple(b) for b in obj["blocks"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed partition object: {exc}") from exc


def generator_to_json(F: BlockGenerator) -> dict:
    return {"n": F.n, "d": F.d, "A": matrix_to_json(F.A), "B": matrix_to_json(F.B),
            "C": matrix_to_json(F.C), "D": matrix_to_json(F.D)}


def generator_from_json(obj) -> BlockGenerator:
    """Blocks ``A, B, C, D`` or the whole block matrix under ``"matrix"``."""
    try:
        n, d = int(obj["n"]), int(obj["d"])
        if "matrix" in obj:
            return BlockGenerator.from_matrix(matrix_from_json(obj["matrix"]), n, d)
        blocks = [matrix_from_json(obj[k]) for k in "ABCD"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed generator object: {exc}") from exc
    shapes = [(n, n), (n, n * d), (n * d, n), (n * d, n * d)]
    blocks = [b.reshape(s) if b.size == s[0] * s[1] else b for b, s in zip(blocks, shapes)]
    return BlockGenerator(n, d, *blocks)


def pair_to_json(pair: LocalProjectionPair) -> dict:
    return {"P": matrix_to_json(pair.P), "u": matrix_to_json(pair.u.reshape(-1, 1))}


def pair_from_json(obj, tol: Tolerance = DEFAULT_TOL) -> LocalProjectionPair:
    try:
        P = matrix_from_json(obj["P"])
        u = matrix_from_json(obj["u"]).reshape(-1)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed local pair object: {exc}") from exc
    return LocalProjectionPair(P, u, tol)


def hom_to_json(h: NormalHom) -> dict:
    return {"m": h.m, "j": h.j, "n": h.n, "V": matrix_to_json(h.V)}


def hom_from_json(obj) -> NormalHom:
    try:
        return NormalHom(int(obj["m"]), int(obj["j"]), int(obj["n"]), matrix_from_json(obj["V"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed homomorphism object: {exc}") from exc


def load(path) -> object:
    return json.loads(Path(path).read_text())


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return matrix_to_json(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_plain)
