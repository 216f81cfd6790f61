"""
Instance descriptors carried in DIMACS comment lines.

Each field is one comment line ``c meta: key=value``:

    cipher          a51 | bivium | grain | none
    keystream       observed keystream bits, hex
    keystream_len   number of keystream bits
    starting_vars   variable list, e.g. 1-177
    weakened_K      number of fixed trailing starting variables (0 = full problem)
    extended        1 when weakening reached past the second register
    unsafe_witness  secret state/key, hex; only written on explicit request
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Tuple

from satpart.encoders.ciphers import Cipher, spec_for
from satpart.utils.bits import bits_to_hex, hex_to_bits
from satpart.utils.exceptions import EncodingError, UsageError
from satpart.utils.ranges import format_ranges, parse_ranges

META_PREFIX = "meta:"


@dataclass(frozen=True)
class InstanceMeta:
    cipher: Optional[Cipher]
    starting_vars: Tuple[int, ...]
    keystream_bits: Tuple[int, ...]
    weakened_K: int = 0
    extended: bool = False
    secret_witness: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "starting_vars", tuple(int(v) for v in self.starting_vars))
        object.__setattr__(self, "keystream_bits", tuple(int(b) & 1 for b in self.keystream_bits))
        if self.secret_witness is not None:
            object.__setattr__(self, "secret_witness", tuple(int(b) & 1 for b in self.secret_witness))
        if self.cipher is not None:
            width = spec_for(self.cipher).state_width
            if len(self.starting_vars) != width:
                raise EncodingError(f"{self.cipher.value} instances have {width} starting variables")
        if self.secret_witness is not None and len(self.secret_witness) != len(self.starting_vars):
            raise EncodingError("witness width differs from the starting variable count")

    @property
    def keystream_len(self) -> int:
        return len(self.keystream_bits)

    @property
    def has_witness(self) -> bool:
        return self.secret_witness is not None

    def without_witness(self) -> "InstanceMeta":
        return replace(self, secret_witness=None)

    def to_comments(self, include_witness: bool = False) -> List[str]:
        lines = [
            f"cipher={self.cipher.value if self.cipher else 'none'}",
            f"keystream={bits_to_hex(self.keystream_bits)}",
            f"keystream_len={self.keystream_len}",
            f"starting_vars={format_ranges(self.starting_vars)}",
            f"weakened_K={self.weakened_K}",
            f"extended={int(self.extended)}",
        ]
        if include_witness and self.secret_witness is not None:
            lines.append(f"unsafe_witness={bits_to_hex(self.secret_witness)}")
        return [f"{META_PREFIX} {line}" for line in lines]

    @classmethod
    def from_comments(cls, comments: Iterable[str]) -> Optional["InstanceMeta"]:
        """Rebuild meta from comment lines; None when the formula carries no meta."""
        values: Dict[str, str] = {}
        for comment in comments:
            text = comment.strip()
            if not text.startswith(META_PREFIX):
                continue
            key, sep, value = text[len(META_PREFIX):].strip().partition("=")
            if not sep:
                raise EncodingError(f"malformed meta comment {comment!r}")
            values[key.strip()] = value.strip()
        if not values:
            return None
        try:
            cipher = None if values.get("cipher", "none") == "none" else Cipher.parse(values["cipher"])
            length = int(values["keystream_len"])
            starting = tuple(parse_ranges(values["starting_vars"]))
            witness = values.get("unsafe_witness")
            return cls(
                cipher=cipher,
                starting_vars=starting,
                keystream_bits=hex_to_bits(values["keystream"], length),
                weakened_K=int(values.get("weakened_K", "0")),
                extended=values.get("extended", "0") == "1",
                secret_witness=hex_to_bits(witness, len(starting)) if witness else None,
            )
        except (KeyError, ValueError, UsageError) as e:
            raise EncodingError(f"incomplete or invalid meta comments: {e}") from e


def strip_meta(comments: Iterable[str]) -> List[str]:
    return [c for c in comments if not c.strip().startswith(META_PREFIX)]
