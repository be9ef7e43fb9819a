"""Stable seed derivation shared by every randomised step."""

import hashlib


def derive_seed(*parts) -> int:
    """63-bit seed from BLAKE2b-64 over the ``:``-joined ``str`` of the parts.

    Independent of PYTHONHASHSEED and platform, so any single job can be
    reproduced from its coordinates alone.
    """
    key = ":".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big") >> 1
