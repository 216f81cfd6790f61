"""
Cipher keystream encoders: circuits, Tseitin CNF, instance generation and weakening.
"""

from .builders import build_circuit
from .ciphers import SPECS, Cipher, CipherSpec, keystream_oracle, spec_for
from .circuit import Circuit, Gate, GateOp, simulate
from .instances import (
    CrossCheckReport,
    cross_check,
    load_meta,
    make_instance,
    project_model,
    reproduces_keystream,
    weaken,
    witness_assignment,
)
from .meta import InstanceMeta
from .reference import reference_keystream
from .tseitin import gate_clauses, tseitin_encode

__all__ = [
    "build_circuit",
    "SPECS",
    "Cipher",
    "CipherSpec",
    "keystream_oracle",
    "spec_for",
    "Circuit",
    "Gate",
    "GateOp",
    "simulate",
    "CrossCheckReport",
    "cross_check",
    "load_meta",
    "make_instance",
    "project_model",
    "reproduces_keystream",
    "weaken",
    "witness_assignment",
    "InstanceMeta",
    "reference_keystream",
    "gate_clauses",
    "tseitin_encode",
]
