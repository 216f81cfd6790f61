"""
Second keystream simulators, written independently of ``ciphers`` and vectorised over many states.

Bivium and Grain are expressed as sequence recurrences (each register is one growing bit
sequence); A5/1 keeps each register packed in a uint64 with cell j at bit j.
"""
import numpy as np

from satpart.encoders.ciphers import Cipher, spec_for
from satpart.utils.exceptions import EncodingError


def _as_batch(states, width: int) -> np.ndarray:
    batch = np.atleast_2d(np.asarray(states, dtype=np.uint8)) & 1
    if batch.shape[1] != width:
        raise EncodingError(f"expected states of width {width}, got {batch.shape[1]}")
    return batch


def a51_reference(keys, length: int) -> np.ndarray:
    keys = _as_batch(keys, 64).astype(np.uint64)
    one = np.uint64(1)

    def pack(columns):
        weights = np.left_shift(one, np.arange(columns.shape[1], dtype=np.uint64))
        return (columns * weights).sum(axis=1).astype(np.uint64)

    def bit(reg, i):
        return (reg >> np.uint64(i)) & one

    r1, r2, r3 = pack(keys[:, 0:19]), pack(keys[:, 19:41]), pack(keys[:, 41:64])
    m1, m2, m3 = np.uint64((1 << 19) - 1), np.uint64((1 << 22) - 1), np.uint64((1 << 23) - 1)
    out = np.zeros((keys.shape[0], length), dtype=np.uint8)
    for t in range(length):
        c1, c2, c3 = bit(r1, 8), bit(r2, 10), bit(r3, 10)
        maj = (c1 & c2) | (c1 & c3) | (c2 & c3)
        f1 = bit(r1, 13) ^ bit(r1, 16) ^ bit(r1, 17) ^ bit(r1, 18)
        f2 = bit(r2, 20) ^ bit(r2, 21)
        f3 = bit(r3, 7) ^ bit(r3, 20) ^ bit(r3, 21) ^ bit(r3, 22)
        r1 = np.where(c1 == maj, ((r1 << one) | f1) & m1, r1)
        r2 = np.where(c2 == maj, ((r2 << one) | f2) & m2, r2)
        r3 = np.where(c3 == maj, ((r3 << one) | f3) & m3, r3)
        out[:, t] = (bit(r1, 18) ^ bit(r2, 21) ^ bit(r3, 22)).astype(np.uint8)
    return out


def bivium_reference(states, length: int) -> np.ndarray:
    states = _as_batch(states, 177)
    n = states.shape[0]
    a = np.zeros((n, 93 + length), dtype=np.uint8)
    b = np.zeros((n, 84 + length), dtype=np.uint8)
    a[:, :93] = states[:, 92::-1]
    b[:, :84] = states[:, 176:92:-1]
    z = np.zeros((n, length), dtype=np.uint8)
    for t in range(length):
        z[:, t] = a[:, t + 27] ^ a[:, t] ^ b[:, t + 15] ^ b[:, t]
        b[:, t + 84] = a[:, t + 27] ^ a[:, t] ^ (a[:, t + 1] & a[:, t + 2]) ^ b[:, t + 6]
        a[:, t + 93] = b[:, t + 15] ^ b[:, t] ^ (b[:, t + 1] & b[:, t + 2]) ^ a[:, t + 24]
    return z


def grain_reference(states, length: int) -> np.ndarray:
    states = _as_batch(states, 160)
    n = states.shape[0]
    nb = np.zeros((n, 80 + length), dtype=np.uint8)
    ls = np.zeros((n, 80 + length), dtype=np.uint8)
    nb[:, :80] = states[:, :80]
    ls[:, :80] = states[:, 80:]
    z = np.zeros((n, length), dtype=np.uint8)
    for t in range(length):
        B = nb[:, t:t + 80]
        S = ls[:, t:t + 80]
        x0, x1, x2, x3, x4 = S[:, 3], S[:, 25], S[:, 46], S[:, 64], B[:, 63]
        h = (x1 ^ x4 ^ (x0 & x3) ^ (x2 & x3) ^ (x3 & x4) ^ (x0 & x1 & x2)
             ^ (x0 & x2 & x3) ^ (x0 & x2 & x4) ^ (x1 & x2 & x4) ^ (x2 & x3 & x4))
        z[:, t] = B[:, 1] ^ B[:, 2] ^ B[:, 4] ^ B[:, 10] ^ B[:, 31] ^ B[:, 43] ^ B[:, 56] ^ h
        ls[:, t + 80] = S[:, 62] ^ S[:, 51] ^ S[:, 38] ^ S[:, 23] ^ S[:, 13] ^ S[:, 0]
        nb[:, t + 80] = (
            S[:, 0] ^ B[:, 62] ^ B[:, 60] ^ B[:, 52] ^ B[:, 45] ^ B[:, 37] ^ B[:, 33] ^ B[:, 28]
            ^ B[:, 21] ^ B[:, 14] ^ B[:, 9] ^ B[:, 0]
            ^ (B[:, 63] & B[:, 60]) ^ (B[:, 37] & B[:, 33]) ^ (B[:, 15] & B[:, 9])
            ^ (B[:, 60] & B[:, 52] & B[:, 45]) ^ (B[:, 33] & B[:, 28] & B[:, 21])
            ^ (B[:, 63] & B[:, 45] & B[:, 28] & B[:, 9]) ^ (B[:, 60] & B[:, 52] & B[:, 37] & B[:, 33])
            ^ (B[:, 63] & B[:, 60] & B[:, 21] & B[:, 15])
            ^ (B[:, 63] & B[:, 60] & B[:, 52] & B[:, 45] & B[:, 37])
            ^ (B[:, 33] & B[:, 28] & B[:, 21] & B[:, 15] & B[:, 9])
            ^ (B[:, 52] & B[:, 45] & B[:, 37] & B[:, 33] & B[:, 28] & B[:, 21])
        )
    return z


_REFERENCES = {
    Cipher.A51: a51_reference,
    Cipher.BIVIUM: bivium_reference,
    Cipher.GRAIN: grain_reference,
}


def reference_keystream(cipher, states, length: int) -> np.ndarray:
    """Keystreams for a batch of states, shape (batch, length)."""
    spec = spec_for(cipher)
    if length < 0 or (spec.max_keystream_len is not None and length > spec.max_keystream_len):
        raise EncodingError(f"unsupported keystream length {length} for {spec.cipher.value}")
    return _REFERENCES[spec.cipher](states, length)
