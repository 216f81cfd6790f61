"""
Cipher state-recovery instances: generation, weakening and encoder cross-checks.
"""
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from monitoring import get_logger
from satpart.encoders.builders import build_circuit
from satpart.encoders.ciphers import Cipher, keystream_oracle, spec_for
from satpart.encoders.circuit import simulate
from satpart.encoders.meta import InstanceMeta, strip_meta
from satpart.encoders.reference import reference_keystream
from satpart.encoders.tseitin import tseitin_encode
from satpart.formula.cnf import Cnf, PartialAssignment
from satpart.utils.exceptions import WeakeningError
from satpart.utils.seeding import STREAM_ORACLE, STREAM_SECRET, derive_seed, make_rng

logger = get_logger(__name__)


def make_instance(cipher, keystream_len: Optional[int], seed: int) -> Tuple[Cnf, InstanceMeta]:
    """
    Encode the keystream of a random secret drawn from seed.

    The returned meta carries the secret as witness; the CNF comments never do.
    """
    spec = spec_for(cipher)
    length = spec.default_keystream_len if keystream_len is None else keystream_len
    spec.check_length(length)
    secret = tuple(int(b) for b in make_rng(derive_seed(seed, STREAM_SECRET)).integers(0, 2, spec.state_width))
    keystream = keystream_oracle(spec.cipher, secret, length)
    cnf, meta = tseitin_encode(build_circuit(spec.cipher, length), keystream, spec.cipher)
    logger.info(
        "Instance generated",
        cipher=spec.cipher.value,
        keystream_len=length,
        variables=cnf.var_count,
        clauses=cnf.clause_count,
    )
    return cnf, replace(meta, secret_witness=secret)


def load_meta(cnf: Cnf) -> Optional[InstanceMeta]:
    return InstanceMeta.from_comments(cnf.comments)


def witness_assignment(meta: InstanceMeta) -> PartialAssignment:
    if meta.secret_witness is None:
        raise WeakeningError("instance meta carries no witness")
    return PartialAssignment.from_bits(meta.starting_vars, meta.secret_witness)


def weaken(cnf: Cnf, meta: InstanceMeta, k: int, extend: bool = False) -> Tuple[Cnf, InstanceMeta]:
    """
    Fix the last k starting variables (the end of the second register) to their witness values.

    With ``extend`` k may exceed the second register and continue into the end of the first.

    Raises:
        WeakeningError: A5/1 instance, missing witness, or k out of range
    """
    if meta.cipher is None or meta.cipher is Cipher.A51:
        raise WeakeningError("weakening is defined for Bivium and Grain instances only")
    if meta.secret_witness is None:
        raise WeakeningError("weakening needs the secret witness")
    spec = spec_for(meta.cipher)
    limit = spec.state_width if extend else spec.second_register
    if not 0 <= k <= limit:
        raise WeakeningError(f"K={k} outside 0..{limit} for {spec.cipher.value}")
    if k < meta.weakened_K:
        raise WeakeningError(f"instance already has {meta.weakened_K} fixed variables")
    if k == meta.weakened_K:
        return cnf, meta

    width = len(meta.starting_vars)
    units = [
        (var if meta.secret_witness[i] else -var,)
        for i, var in enumerate(meta.starting_vars)
        if width - k <= i < width - meta.weakened_K
    ]
    weakened = replace(meta, weakened_K=k, extended=meta.extended or k > spec.second_register)
    comments = strip_meta(cnf.comments) + weakened.to_comments()
    logger.debug("Instance weakened", cipher=spec.cipher.value, k=k, extended=weakened.extended)
    return cnf.add_clauses(units).with_comments(comments), weakened


def project_model(model: Sequence[bool], meta: InstanceMeta) -> Tuple[int, ...]:
    """Starting-variable values of a total model indexed by variable - 1."""
    return tuple(int(bool(model[var - 1])) for var in meta.starting_vars)


def reproduces_keystream(model: Sequence[bool], meta: InstanceMeta) -> bool:
    """True when the model's starting state regenerates the observed keystream."""
    if meta.cipher is None:
        return False
    state = project_model(model, meta)
    return keystream_oracle(meta.cipher, state, meta.keystream_len) == meta.keystream_bits


@dataclass(frozen=True)
class CrossCheckReport:
    cipher: Cipher
    trials: int
    keystream_len: int
    disagreements: int
    first_disagreement: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.disagreements == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cipher": self.cipher.value,
            "trials": self.trials,
            "keystream_len": self.keystream_len,
            "disagreements": self.disagreements,
            "first_disagreement": self.first_disagreement,
            "ok": self.ok,
        }


def cross_check(
    cipher,
    trials: int,
    seed: int,
    keystream_len: Optional[int] = None,
    oracle: Callable[..., Tuple[int, ...]] = keystream_oracle,
) -> CrossCheckReport:
    """Compare the register oracle, the reference simulator and the circuit on random states."""
    spec = spec_for(cipher)
    length = spec.default_keystream_len if keystream_len is None else keystream_len
    states = make_rng(derive_seed(seed, STREAM_ORACLE)).integers(0, 2, size=(trials, spec.state_width), dtype=np.uint8)
    reference = reference_keystream(spec.cipher, states, length)
    circuit = simulate(build_circuit(spec.cipher, length), states)

    disagreements = 0
    first = None
    for trial in range(trials):
        expected = np.asarray(oracle(spec.cipher, states[trial].tolist(), length), dtype=np.uint8)
        for source, produced in (("reference", reference[trial]), ("circuit", circuit[trial])):
            mismatch = np.flatnonzero(expected != produced)
            if mismatch.size:
                disagreements += 1
                if first is None:
                    first = {"trial": trial, "source": source, "bit": int(mismatch[0])}
    if disagreements:
        logger.warning("Encoder cross-check failed", cipher=spec.cipher.value, disagreements=disagreements, first=first)
    return CrossCheckReport(spec.cipher, trials, length, disagreements, first)
