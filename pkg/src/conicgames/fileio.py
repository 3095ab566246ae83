"""Canonical text format for games and conic pairs.

One JSON object per file, keys in the order ``cones_C, cones_K, alpha, beta,
operator, b, c``. A game record carries ``alpha`` and ``beta``; a pair record
carries ``b`` and ``c``; a record may carry both. Numbers are written with
Python's shortest round-trip float repr, so serialize -> parse -> serialize
is byte-identical.
"""

import json

import numpy as np

from .cones import KINDS, ConeBlock, as_product
from .game import ConicGame
from .operators import LinOp
from .programs import ConicPair

KEY_ORDER = ("cones_C", "cones_K", "alpha", "beta", "operator", "b", "c")


class FormatError(ValueError):
    """Raised for malformed instance files."""


def _floats(v):
    return [float(t) for t in np.asarray(v, dtype=float).ravel()]


def _cones(K):
    return [{"kind": b.kind, "size": int(b.size)} for b in as_product(K).blocks]


def to_record(C, K, A, alpha=None, beta=None, b=None, c=None):
    A = A if isinstance(A, LinOp) else LinOp(A)
    rec = {"cones_C": _cones(C), "cones_K": _cones(K)}
    if alpha is not None:
        rec["alpha"] = _floats(alpha)
    if beta is not None:
        rec["beta"] = _floats(beta)
    rec["operator"] = {"rows": A.rows, "cols": A.cols, "data": _floats(A.data)}
    if b is not None:
        rec["b"] = _floats(b)
    if c is not None:
        rec["c"] = _floats(c)
    return rec


def game_record(G, pair=None):
    if pair is None:
        return to_record(G.C, G.K, G.A, G.alpha, G.beta)
    return to_record(G.C, G.K, G.A, G.alpha, G.beta, pair.b, pair.c)


def pair_record(pair):
    return to_record(pair.C, pair.K, pair.A, b=pair.b, c=pair.c)


def dumps(rec):
    extra = set(rec) - set(KEY_ORDER)
    if extra:
        raise FormatError(f"unknown keys {sorted(extra)}")
    ordered = {k: rec[k] for k in KEY_ORDER if k in rec}
    return json.dumps(ordered, separators=(",", ":"), allow_nan=False) + "\n"


def _parse_cones(items, name):
    if not isinstance(items, list) or not items:
        raise FormatError(f"{name} must be a non-empty list")
    blocks = []
    for it in items:
        if not isinstance(it, dict) or set(it) != {"kind", "size"}:
            raise FormatError(f"{name} entries need exactly 'kind' and 'size'")
        if it["kind"] not in KINDS or not isinstance(it["size"], int) or isinstance(it["size"], bool):
            raise FormatError(f"bad cone entry {it!r} in {name}")
        try:
            blocks.append(ConeBlock(it["kind"], it["size"]))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    return blocks


def _vector(rec, key):
    v = rec[key]
    if not isinstance(v, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        raise FormatError(f"{key} must be a list of numbers")
    return np.array(v, dtype=float)


def _reject_constant(token):
    raise FormatError(f"non-finite number {token} is not allowed")


def loads(text):
    """Parse a record into a dict with numpy arrays and cone block lists."""
    try:
        rec = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(rec, dict):
        raise FormatError("record must be a JSON object")
    extra = set(rec) - set(KEY_ORDER)
    if extra:
        raise FormatError(f"unknown keys {sorted(extra)}")
    for key in ("cones_C", "cones_K", "operator"):
        if key not in rec:
            raise FormatError(f"missing key {key!r}")
    op = rec["operator"]
    if not isinstance(op, dict) or set(op) != {"rows", "cols", "data"}:
        raise FormatError("operator needs exactly 'rows', 'cols' and 'data'")
    out = {"cones_C": _parse_cones(rec["cones_C"], "cones_C"), "cones_K": _parse_cones(rec["cones_K"], "cones_K")}
    if not all(isinstance(op[k], int) and not isinstance(op[k], bool) and op[k] >= 0 for k in ("rows", "cols")):
        raise FormatError("operator rows and cols must be non-negative integers")
    try:
        out["operator"] = LinOp.from_flat(op["rows"], op["cols"], _vector(op, "data"))
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad operator: {exc}") from None
    for key in ("alpha", "beta", "b", "c"):
        if key in rec:
            out[key] = _vector(rec, key)
    return out


def parse_game(text):
    rec = loads(text)
    if "alpha" not in rec or "beta" not in rec:
        raise FormatError("a game record needs 'alpha' and 'beta'")
    return ConicGame(rec["cones_C"], rec["cones_K"], rec["alpha"], rec["beta"], rec["operator"])


def parse_pair(text):
    rec = loads(text)
    if "b" not in rec or "c" not in rec:
        raise FormatError("a pair record needs 'b' and 'c'")
    return ConicPair(rec["cones_C"], rec["cones_K"], rec["operator"], rec["b"], rec["c"])


def parse_vector(text):
    """A bare JSON list of numbers (strategies, alpha/beta overrides)."""
    try:
        v = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    return _vector({"v": v}, "v")


def read_text(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
