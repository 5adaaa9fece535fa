"""Labeled seed derivation.

Every stochastic component (fold planner, ADASYN, each forest tree, repeats)
gets its own 64-bit seed derived from one master seed plus a label path, so
results never depend on execution order or parallel scheduling.
"""

import hashlib


def derive_seed(master: int, *labels) -> int:
    """Derive a stable 64-bit seed from ``master`` and a label path.

    Uses blake2b rather than ``hash()`` so the derivation is identical
    across processes and Python versions.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "big")
