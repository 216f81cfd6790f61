"""
Keystream circuits unrolled over the requested number of output bits.
"""
from typing import List

from satpart.encoders.ciphers import (
    A51_REGISTERS,
    GRAIN_FILTER_MONOMIALS,
    GRAIN_LFSR_TAPS,
    GRAIN_NFSR_MONOMIALS,
    GRAIN_OUTPUT_TAPS,
    Cipher,
    spec_for,
)
from satpart.encoders.circuit import Circuit


def _a51(circuit: Circuit, length: int) -> None:
    starts = (0, 19, 41)
    registers: List[List[int]] = [
        list(circuit.inputs[start:start + size]) for start, (size, _, _) in zip(starts, A51_REGISTERS)
    ]
    for t in range(length):
        majority = circuit.maj3(*(reg[clock] for reg, (_, _, clock) in zip(registers, A51_REGISTERS)))
        for index, (size, taps, clock) in enumerate(A51_REGISTERS):
            reg = registers[index]
            stall = circuit.xor(reg[clock], majority)
            feedback = circuit.xor_many([reg[tap] for tap in taps])
            shifted = [feedback] + reg[:size - 1]
            registers[index] = [circuit.mux(stall, shifted[j], reg[j]) for j in range(size)]
        circuit.add_output(circuit.xor_many([registers[0][18], registers[1][21], registers[2][22]]), f"z{t}")


def _bivium(circuit: Circuit, length: int) -> None:
    s = [0] + list(circuit.inputs)
    for t in range(length):
        t1 = circuit.xor(s[66], s[93])
        t2 = circuit.xor(s[162], s[177])
        circuit.add_output(circuit.xor(t1, t2), f"z{t}")
        if t == length - 1:
            break
        t1 = circuit.xor_many([t1, circuit.and_(s[91], s[92]), s[171]])
        t2 = circuit.xor_many([t2, circuit.and_(s[175], s[176]), s[69]])
        s = [0, t2] + s[1:93] + [t1] + s[94:177]


def _grain(circuit: Circuit, length: int) -> None:
    b = list(circuit.inputs[:80])
    s = list(circuit.inputs[80:])
    for t in range(length):
        x = (s[3], s[25], s[46], s[64], b[63])
        terms = [circuit.and_many([x[i] for i in monomial]) for monomial in GRAIN_FILTER_MONOMIALS]
        circuit.add_output(circuit.xor_many([b[k] for k in GRAIN_OUTPUT_TAPS] + terms), f"z{t}")
        if t == length - 1:
            break
        s_new = circuit.xor_many([s[tap] for tap in GRAIN_LFSR_TAPS])
        nfsr_terms = [circuit.and_many([b[i] for i in monomial]) for monomial in GRAIN_NFSR_MONOMIALS]
        b_new = circuit.xor_many([s[0]] + nfsr_terms)
        s = s[1:] + [s_new]
        b = b[1:] + [b_new]


_BUILDERS = {Cipher.A51: _a51, Cipher.BIVIUM: _bivium, Cipher.GRAIN: _grain}


def build_circuit(cipher, keystream_len: int) -> Circuit:
    """
    Circuit whose inputs are the starting variables and whose outputs are keystream_len bits.

    Raises:
        EncodingError: length below 1, or above 114 for A5/1
    """
    spec = spec_for(cipher)
    spec.check_length(keystream_len)
    circuit = Circuit(name=spec.cipher.value)
    circuit.add_inputs([f"x{i}" for i in range(1, spec.state_width + 1)])
    _BUILDERS[spec.cipher](circuit, keystream_len)
    return circuit
