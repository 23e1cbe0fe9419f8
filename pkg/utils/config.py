import re
from typing import Dict, List, Tuple

from pydantic import BaseModel, Field

from utils.exceptions import UsageError

DIMENSION_FAMILIES = ["g0", "g0plus", "g0star", "g1", "g1plus", "g1star"]
RHO_FAMILIES = ["rho0", "rho1"]
GROUPS = ["gamma0", "gamma1"]
VERIFY_CHECKS = [
    "oracle",
    "convolution-identities",
    "bennett-bound",
    "power-of-two",
    "lemma-suite",
    "missing-values",
    "rho-floor",
    "bennett-residual",
]

_WEIGHT_RANGE = re.compile(r"^\s*(\d+)\s*:\s*(\d+)\s*(?::\s*(\d+)\s*)?$")
_LEVEL_RANGE = re.compile(r"^\s*(\d+)\s*\.\.\s*(\d+)\s*$")


class ScanConfig(BaseModel):
    """Tunables for sieves, batch evaluation and worker pools. Defaults are the CLI defaults."""

    sieve_limit: int = Field(10_000_000, ge=1)
    memory_cap_bytes: int = Field(2 * 1024 ** 3, ge=1)
    chunk_size: int = Field(50_000, ge=1)
    threads: int = Field(1, ge=1)
    euler_cutoff_prime: int = Field(10_000_000, ge=2)


def parse_weight_range(text: str) -> List[int]:
    """
    Parse a weight set written as ``start:end[:step]`` (end inclusive) or a single integer.

    Args:
        text: Range expression such as "2:24:2"

    Returns:
        Ascending list of weights
    """
    text = str(text).strip()
    if text.isdigit():
        return [int(text)]
    match = _WEIGHT_RANGE.match(text)
    if not match:
        raise UsageError(f"malformed weight range {text!r}, expected start:end[:step]")
    start, end = int(match.group(1)), int(match.group(2))
    step = int(match.group(3)) if match.group(3) else 1
    if step < 1 or end < start:
        raise UsageError(f"empty weight range {text!r}")
    return list(range(start, end + 1, step))


def parse_level_range(text: str) -> Tuple[int, int]:
    """Parse ``lo..hi`` (inclusive) into a pair with 1 <= lo <= hi."""
    match = _LEVEL_RANGE.match(str(text))
    if not match:
        raise UsageError(f"malformed level range {text!r}, expected lo..hi")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo < 1 or hi < lo:
        raise UsageError(f"empty level range {text!r}")
    return lo, hi


def get_family_options() -> Dict[str, List[str]]:
    """
    Get the names accepted by the CLI choices.

    Returns:
        Dictionary of option lists keyed by kind
    """
    return {
        "families": list(DIMENSION_FAMILIES),
        "rho_families": list(RHO_FAMILIES),
        "table_families": DIMENSION_FAMILIES + RHO_FAMILIES,
        "average_targets": DIMENSION_FAMILIES + RHO_FAMILIES,
        "groups": list(GROUPS),
        "checks": list(VERIFY_CHECKS),
    }
