import io
import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import BaseModel

from utils.exceptions import UsageError

logger = logging.getLogger("Records")

OUTPUT_FORMATS = ["text", "csv", "json"]


def format_fraction(value: Union[int, Fraction]) -> str:
    """Render an exact rational as ``num/den`` (or a bare integer)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def model_to_dict(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump()


def write_report(model: BaseModel, path: str) -> str:
    """
    Save a report model as a JSON artifact.

    Args:
        model: Any report model
        path: Destination file

    Returns:
        The path written
    """
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.info(f"Report saved to: {path}")
    return path


class OutputRecord(BaseModel):
    """One row of CLI output: a value of a family at level N and weight k."""

    family: str
    N: int
    k: int
    value: Union[int, str]
    extras: Dict[str, str] = {}

    def flat(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"family": self.family, "N": self.N, "k": self.k, "value": self.value}
        row.update(self.extras)
        return row


class BranchCertificate(BaseModel):
    """One lower-bound curve of a certificate together with its verified region."""

    name: str
    curve: str
    variable: str
    turning_point: int
    threshold: int
    value_at_threshold: float
    grid_start: int
    grid_ratio: float
    grid_points: int


class SearchCertificate(BaseModel):
    family: str
    k: int
    bound: int
    cutoff: int
    a0plus_lower: float
    omega_constant: float
    omega_exponent: float
    branches: List[BranchCertificate]


class EnumerationResult(BaseModel):
    family: str
    k: int
    bound: int
    cutoff: int
    certified: bool
    certificate: Optional[SearchCertificate] = None
    levels: List[Tuple[int, int]]

    def count_at(self, value: int) -> int:
        return sum(1 for _, dim in self.levels if dim == value)


class ConstantValue(BaseModel):
    name: str
    value: float
    radius: float
    digits: int
    cutoff_prime: int = 0

    def formatted(self) -> str:
        return f"{self.value:.{max(self.digits, 0)}f}"


class SummatoryReport(BaseModel):
    function: str
    limit: int
    beta: int = 0
    partial_sum: str


class ConsistencyMismatch(BaseModel):
    family: str
    N: int
    k: int
    closed_form: str
    oracle: int


class ConsistencyReport(BaseModel):
    group: str
    max_level: int
    weights: List[int]
    levels_checked: int
    mismatches: List[ConsistencyMismatch]


class IdentityReport(BaseModel):
    limit: int
    identities: List[str]
    failures: Dict[str, List[int]]


class BoundReport(BaseModel):
    max_level: int
    violations: List[int]
    equality_set: List[int]


class PowerOfTwoReport(BaseModel):
    max_odd_level: int
    alphas: List[int]
    weights: List[int]
    cases_checked: int
    failures: List[Dict[str, int]]


class ResidualReport(BaseModel):
    levels_checked: int
    violations: List[int]
    tight_levels: List[int]


class LemmaCheck(BaseModel):
    name: str
    statement: str
    checked: int
    violations: List[int]


class LemmaReport(BaseModel):
    max_level: int
    checks: List[LemmaCheck]

    @property
    def failed(self) -> List[str]:
        return [check.name for check in self.checks if check.violations]


class MissingValuesReport(BaseModel):
    family: str
    k: int
    value_limit: int
    cutoff: int
    required_cutoff: Optional[int] = None
    missing: List[int]
    attained: int


class CoverageReport(BaseModel):
    family: str
    k: int
    max_level: int
    value_limit: int
    histogram: List[int]
    min_multiplicity: int
    min_value: int
    max_multiplicity: int
    max_value: int
    attained: int
    initial_run: int
    odd_missing: List[int]


class AverageCheck(BaseModel):
    target: str
    k: int
    limit: int
    empirical_sum: str
    predicted: float
    ratio: float


class RhoFloorReport(BaseModel):
    k: int
    lo: int
    hi: int
    minimum: str
    minimum_decimal: float
    argmin: int
    asymptote: float


def render_records(records: Sequence[OutputRecord], fmt: str) -> str:
    """
    Render output records for stdout.

    Args:
        records: Rows in canonical order
        fmt: One of "text", "csv", "json"

    Returns:
        The rendered text, newline terminated when non-empty
    """
    rows = [record.flat() for record in records]
    if fmt == "json":
        return "".join(json.dumps(row, separators=(",", ":"), ensure_ascii=False) + "\n" for row in rows)
    if fmt == "csv":
        columns = ["family", "N", "k", "value"]
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        df = pd.DataFrame(rows, columns=columns)
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()
    if fmt == "text":
        return "".join(" ".join(str(value) for value in row.values()) + "\n" for row in rows)
    raise UsageError(f"unknown output format {fmt!r}")
