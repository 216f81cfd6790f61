"""
Tseitin encoding of circuits with observed outputs.
"""
from typing import List, Optional, Sequence, Tuple

from monitoring import get_logger
from satpart.encoders.ciphers import Cipher
from satpart.encoders.circuit import Circuit, Gate, GateOp
from satpart.encoders.meta import InstanceMeta
from satpart.formula.cnf import Cnf
from satpart.utils.exceptions import EncodingError

logger = get_logger(__name__)


def gate_clauses(gate: Gate) -> List[Tuple[int, ...]]:
    """Clauses equivalent to output <-> op(inputs)."""
    z = gate.output
    if gate.op is GateOp.AND:
        a, b = gate.inputs
        return [(-z, a), (-z, b), (z, -a, -b)]
    if gate.op is GateOp.XOR:
        a, b = gate.inputs
        return [(-z, a, b), (-z, -a, -b), (z, -a, b), (z, a, -b)]
    if gate.op is GateOp.NOT:
        (a,) = gate.inputs
        return [(z, a), (-z, -a)]
    if gate.op is GateOp.MAJ3:
        a, b, c = gate.inputs
        return [(-z, a, b), (-z, a, c), (-z, b, c), (z, -a, -b), (z, -a, -c), (z, -b, -c)]
    s, x, y = gate.inputs
    # last two clauses are redundant: they force z whenever x and y agree
    return [(s, -x, z), (s, x, -z), (-s, -y, z), (-s, y, -z), (-x, -y, z), (x, y, -z)]


def tseitin_encode(
    circuit: Circuit,
    keystream_bits: Sequence[int],
    cipher: Optional[Cipher] = None,
) -> Tuple[Cnf, InstanceMeta]:
    """
    Encode a circuit with its outputs fixed to the observed keystream.

    Wire w becomes variable w, so the circuit inputs are variables 1..k. Output constraints are unit
    clauses. Assigning every input decides the formula by unit propagation alone.

    Raises:
        EncodingError: keystream length differs from the circuit's output count
    """
    if len(keystream_bits) != len(circuit.outputs):
        raise EncodingError(f"circuit has {len(circuit.outputs)} outputs, got {len(keystream_bits)} keystream bits")
    if cipher is None and circuit.name:
        try:
            cipher = Cipher.parse(circuit.name)
        except EncodingError:
            cipher = None

    clauses: List[Tuple[int, ...]] = []
    for gate in circuit.gates:
        clauses.extend(gate_clauses(gate))
    for wire, bit in zip(circuit.outputs, keystream_bits):
        clauses.append((wire,) if bit else (-wire,))

    meta = InstanceMeta(cipher, circuit.inputs, tuple(keystream_bits))
    cnf = Cnf(circuit.wire_count, tuple(clauses), tuple(meta.to_comments()))
    logger.debug(
        "Circuit encoded",
        cipher=cipher.value if cipher else None,
        gates=len(circuit.gates),
        variables=cnf.var_count,
        clauses=cnf.clause_count,
    )
    return cnf, meta
