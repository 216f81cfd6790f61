"""
Keystream generators simulated register by register.

State conventions (starting variable i holds position i - 1 of the state vector):

A5/1 (64-bit key loaded directly into the registers)
    1-19 = R1 cells 0..18, 20-41 = R2 cells 0..21, 42-64 = R3 cells 0..22.
    Feedback taps R1 {13,16,17,18}, R2 {20,21}, R3 {7,20,21,22}; clocking cells 8, 10, 10.
    Per keystream bit: registers whose clocking cell agrees with the majority shift towards the
    high cells with the feedback entering cell 0, then R1[18] ^ R2[21] ^ R3[22] is output.

Bivium-B (177-bit post-initialisation state)
    1-93 = s1..s93, 94-177 = s94..s177.
    t1 = s66 ^ s93, t2 = s162 ^ s177, z = t1 ^ t2,
    t1 ^= s91 s92 ^ s171, t2 ^= s175 s176 ^ s69, (s1..s93) <- (t2, s1..s92), (s94..s177) <- (t1, s94..s176).

Grain v1 (160-bit post-initialisation state)
    1-80 = NFSR b0..b79, 81-160 = LFSR s0..s79, with the standard Grain v1 feedback
    polynomials, filter h(s3, s25, s46, s64, b63) and output taps b1 b2 b4 b10 b31 b43 b56.
"""
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from satpart.utils.exceptions import EncodingError


class Cipher(str, Enum):
    A51 = "a51"
    BIVIUM = "bivium"
    GRAIN = "grain"

    @classmethod
    def parse(cls, name: str) -> "Cipher":
        try:
            return cls(str(name).lower().replace("/", "").replace("-", "").replace("_", ""))
        except ValueError:
            raise EncodingError(f"unknown cipher {name!r}; expected a51, bivium or grain") from None


@dataclass(frozen=True)
class CipherSpec:
    cipher: Cipher
    state_width: int
    first_register: int
    second_register: int
    default_keystream_len: int
    max_keystream_len: Optional[int] = None

    def check_state(self, state: Sequence[int]) -> None:
        if len(state) != self.state_width:
            raise EncodingError(f"{self.cipher.value} needs {self.state_width} state bits, got {len(state)}")

    def check_length(self, length: int) -> None:
        if length < 1:
            raise EncodingError(f"keystream length must be at least 1, got {length}")
        if self.max_keystream_len is not None and length > self.max_keystream_len:
            raise EncodingError(f"{self.cipher.value} supports at most {self.max_keystream_len} keystream bits")


SPECS = {
    Cipher.A51: CipherSpec(Cipher.A51, 64, 19, 22, 114, max_keystream_len=114),
    Cipher.BIVIUM: CipherSpec(Cipher.BIVIUM, 177, 93, 84, 200),
    Cipher.GRAIN: CipherSpec(Cipher.GRAIN, 160, 80, 80, 160),
}

# A5/1 register layout: (length, feedback taps, clocking cell)
A51_REGISTERS = ((19, (13, 16, 17, 18), 8), (22, (20, 21), 10), (23, (7, 20, 21, 22), 10))

# Grain v1 NFSR feedback monomials over b indices (linear part first), plus s0
GRAIN_NFSR_MONOMIALS = (
    (62,), (60,), (52,), (45,), (37,), (33,), (28,), (21,), (14,), (9,), (0,),
    (63, 60), (37, 33), (15, 9),
    (60, 52, 45), (33, 28, 21),
    (63, 45, 28, 9), (60, 52, 37, 33), (63, 60, 21, 15),
    (63, 60, 52, 45, 37), (33, 28, 21, 15, 9),
    (52, 45, 37, 33, 28, 21),
)
GRAIN_LFSR_TAPS = (62, 51, 38, 23, 13, 0)
# filter h over x0..x4 = s3, s25, s46, s64, b63
GRAIN_FILTER_MONOMIALS = (
    (1,), (4,), (0, 3), (2, 3), (3, 4), (0, 1, 2), (0, 2, 3), (0, 2, 4), (1, 2, 4), (2, 3, 4),
)
GRAIN_OUTPUT_TAPS = (1, 2, 4, 10, 31, 43, 56)


def spec_for(cipher) -> CipherSpec:
    return SPECS[Cipher.parse(cipher) if not isinstance(cipher, Cipher) else cipher]


def _a51_keystream(state: List[int], length: int) -> List[int]:
    registers = [state[0:19], state[19:41], state[41:64]]
    out = []
    for _ in range(length):
        clocks = [reg[clock] for reg, (_, _, clock) in zip(registers, A51_REGISTERS)]
        majority = 1 if sum(clocks) >= 2 else 0
        for index, (size, taps, clock) in enumerate(A51_REGISTERS):
            reg = registers[index]
            if reg[clock] == majority:
                feedback = 0
                for tap in taps:
                    feedback ^= reg[tap]
                registers[index] = [feedback] + reg[:size - 1]
        out.append(registers[0][18] ^ registers[1][21] ^ registers[2][22])
    return out


def _bivium_keystream(state: List[int], length: int) -> List[int]:
    s = [0] + state  # s[1..177]
    out = []
    for _ in range(length):
        t1 = s[66] ^ s[93]
        t2 = s[162] ^ s[177]
        out.append(t1 ^ t2)
        t1 ^= (s[91] & s[92]) ^ s[171]
        t2 ^= (s[175] & s[176]) ^ s[69]
        s = [0, t2] + s[1:93] + [t1] + s[94:177]
    return out


def _grain_keystream(state: List[int], length: int) -> List[int]:
    b = state[:80]
    s = state[80:]
    out = []
    for _ in range(length):
        x = (s[3], s[25], s[46], s[64], b[63])
        h = 0
        for monomial in GRAIN_FILTER_MONOMIALS:
            term = 1
            for i in monomial:
                term &= x[i]
            h ^= term
        z = h
        for k in GRAIN_OUTPUT_TAPS:
            z ^= b[k]
        out.append(z)

        s_new = 0
        for tap in GRAIN_LFSR_TAPS:
            s_new ^= s[tap]
        b_new = s[0]
        for monomial in GRAIN_NFSR_MONOMIALS:
            term = 1
            for i in monomial:
                term &= b[i]
            b_new ^= term
        s = s[1:] + [s_new]
        b = b[1:] + [b_new]
    return out


_GENERATORS = {
    Cipher.A51: _a51_keystream,
    Cipher.BIVIUM: _bivium_keystream,
    Cipher.GRAIN: _grain_keystream,
}


def keystream_oracle(cipher, state_or_key: Sequence[int], length: int) -> Tuple[int, ...]:
    """
    Reference keystream by direct register simulation.

    Args:
        cipher: Cipher or its name
        state_or_key: 64-bit A5/1 key, or the 177 / 160-bit post-initialisation state
        length: number of keystream bits

    Raises:
        EncodingError: state width or length not supported by the cipher
    """
    spec = spec_for(cipher)
    spec.check_state(state_or_key)
    if length < 0:
        raise EncodingError(f"negative keystream length {length}")
    if spec.max_keystream_len is not None and length > spec.max_keystream_len:
        raise EncodingError(f"{spec.cipher.value} supports at most {spec.max_keystream_len} keystream bits")
    bits = [int(bit) & 1 for bit in state_or_key]
    return tuple(_GENERATORS[spec.cipher](bits, length))
