"""
Variable list syntax: comma-separated indices and inclusive ranges, e.g. "1-12,20".
"""
from typing import Iterable, List

from satpart.utils.exceptions import UsageError


def parse_ranges(text: str) -> List[int]:
    """Parse "1-12,20" into a sorted list of distinct positive indices."""
    values = set()
    for chunk in text.replace(" ", ",").split(","):
        if not chunk:
            continue
        try:
            if "-" in chunk:
                low, high = (int(part) for part in chunk.split("-", 1))
                if low > high:
                    raise UsageError(f"descending range {chunk!r}")
                values.update(range(low, high + 1))
            else:
                values.add(int(chunk))
        except ValueError:
            raise UsageError(f"invalid variable list item {chunk!r}") from None
    if any(v <= 0 for v in values):
        raise UsageError("variable indices must be positive")
    return sorted(values)


def format_ranges(values: Iterable[int]) -> str:
    """Inverse of parse_ranges, collapsing consecutive runs."""
    ordered = sorted(set(values))
    parts = []
    start = prev = None
    for value in ordered:
        if start is None:
            start = prev = value
        elif value == prev + 1:
            prev = value
        else:
            parts.append(str(start) if start == prev else f"{start}-{prev}")
            start = prev = value
    if start is not None:
        parts.append(str(start) if start == prev else f"{start}-{prev}")
    return ",".join(parts)
