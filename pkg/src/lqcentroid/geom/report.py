"""JSON verification records ``{check, inputs_hash, lhs, rhs, gap, se, pass}``."""
import hashlib
import json

import numpy as np

__all__ = ["inputs_hash", "record"]


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def inputs_hash(inputs):
    """First 16 hex digits of the SHA-256 of the canonical JSON of ``inputs``."""
    text = json.dumps(_plain(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def record(check, inputs, lhs, rhs, se, passed, **extra):
    """One verification record; ``se`` may be the string ``"exact"``."""
    gap = None if lhs is None or rhs is None else abs(float(lhs) - float(rhs))
    out = {
        "check": check,
        "inputs_hash": inputs_hash(inputs),
        "lhs": _plain(lhs),
        "rhs": _plain(rhs),
        "gap": gap,
        "se": _plain(se),
        "pass": bool(passed),
    }
    out.update({k: _plain(v) for k, v in extra.items()})
    return out
