"""
Boolean circuits over AND, XOR, NOT, MAJ3 and MUX gates.

Wires are positive integers allocated in creation order: inputs first (1..k), then one wire per
gate. Gates are therefore always in topological order, and a wire number doubles as the CNF
variable of its Tseitin encoding.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from satpart.utils.exceptions import EncodingError


class GateOp(str, Enum):
    AND = "AND"
    XOR = "XOR"
    NOT = "NOT"
    MAJ3 = "MAJ3"
    MUX = "MUX"  # inputs (select, if_zero, if_one)


ARITY = {GateOp.AND: 2, GateOp.XOR: 2, GateOp.NOT: 1, GateOp.MAJ3: 3, GateOp.MUX: 3}
_COMMUTATIVE = {GateOp.AND, GateOp.XOR, GateOp.MAJ3}


@dataclass(frozen=True)
class Gate:
    op: GateOp
    inputs: Tuple[int, ...]
    output: int


@dataclass
class Circuit:
    """Acyclic gate list with named inputs and outputs; builder methods hash structurally."""
    name: Optional[str] = None
    input_names: List[str] = field(default_factory=list)
    gates: List[Gate] = field(default_factory=list)
    outputs: List[int] = field(default_factory=list)
    output_names: List[str] = field(default_factory=list)
    _structure: Dict[Tuple, int] = field(default_factory=dict, repr=False)

    @property
    def input_count(self) -> int:
        return len(self.input_names)

    @property
    def inputs(self) -> Tuple[int, ...]:
        return tuple(range(1, self.input_count + 1))

    @property
    def wire_count(self) -> int:
        return self.input_count + len(self.gates)

    def add_input(self, name: str) -> int:
        if self.gates:
            raise EncodingError("inputs must be declared before any gate")
        self.input_names.append(name)
        return self.input_count

    def add_inputs(self, names: Sequence[str]) -> List[int]:
        return [self.add_input(name) for name in names]

    def _check_wire(self, wire: int) -> None:
        if not 1 <= wire <= self.wire_count:
            raise EncodingError(f"wire {wire} is used before it is defined")

    def gate(self, op: GateOp, *inputs: int) -> int:
        if len(inputs) != ARITY[op]:
            raise EncodingError(f"{op.value} takes {ARITY[op]} inputs, got {len(inputs)}")
        for wire in inputs:
            self._check_wire(wire)
        if len(set(inputs)) != len(inputs):
            raise EncodingError(f"{op.value} gate with repeated input wires {inputs}")
        key = (op, tuple(sorted(inputs)) if op in _COMMUTATIVE else inputs)
        existing = self._structure.get(key)
        if existing is not None:
            return existing
        wire = self.wire_count + 1
        self.gates.append(Gate(op, tuple(inputs), wire))
        self._structure[key] = wire
        return wire

    def and_(self, a: int, b: int) -> int:
        return self.gate(GateOp.AND, a, b)

    def xor(self, a: int, b: int) -> int:
        return self.gate(GateOp.XOR, a, b)

    def not_(self, a: int) -> int:
        return self.gate(GateOp.NOT, a)

    def maj3(self, a: int, b: int, c: int) -> int:
        return self.gate(GateOp.MAJ3, a, b, c)

    def mux(self, select: int, if_zero: int, if_one: int) -> int:
        return self.gate(GateOp.MUX, select, if_zero, if_one)

    def and_many(self, wires: Sequence[int]) -> int:
        if not wires:
            raise EncodingError("empty conjunction")
        result = wires[0]
        for wire in wires[1:]:
            result = self.and_(result, wire)
        return result

    def xor_many(self, wires: Sequence[int]) -> int:
        if not wires:
            raise EncodingError("empty parity")
        result = wires[0]
        for wire in wires[1:]:
            result = self.xor(result, wire)
        return result

    def add_output(self, wire: int, name: Optional[str] = None) -> None:
        self._check_wire(wire)
        self.outputs.append(wire)
        self.output_names.append(name or f"out{len(self.outputs) - 1}")


def simulate(circuit: Circuit, inputs: np.ndarray) -> np.ndarray:
    """
    Evaluate a circuit on a batch of input vectors.

    Args:
        circuit: circuit to evaluate
        inputs: array of shape (batch, input_count) with 0/1 entries

    Returns:
        uint8 array of shape (batch, len(outputs))
    """
    batch = np.atleast_2d(np.asarray(inputs, dtype=np.uint8))
    if batch.shape[1] != circuit.input_count:
        raise EncodingError(f"circuit has {circuit.input_count} inputs, got vectors of width {batch.shape[1]}")
    values = np.zeros((batch.shape[0], circuit.wire_count + 1), dtype=np.uint8)
    values[:, 1:circuit.input_count + 1] = batch & 1
    for gate in circuit.gates:
        args = [values[:, wire] for wire in gate.inputs]
        if gate.op is GateOp.AND:
            result = args[0] & args[1]
        elif gate.op is GateOp.XOR:
            result = args[0] ^ args[1]
        elif gate.op is GateOp.NOT:
            result = args[0] ^ 1
        elif gate.op is GateOp.MAJ3:
            result = (args[0] & args[1]) | (args[0] & args[2]) | (args[1] & args[2])
        else:
            result = np.where(args[0] == 1, args[2], args[1])
        values[:, gate.output] = result
    return values[:, circuit.outputs]
