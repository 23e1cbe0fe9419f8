import json
from fractions import Fraction

import pytest

from utils.config import get_family_options, parse_level_range, parse_weight_range
from utils.exceptions import UsageError
from utils.records import OutputRecord, format_fraction, render_records, write_report


def test_weight_ranges():
    assert parse_weight_range("2:24:2") == list(range(2, 25, 2))
    assert parse_weight_range("2:5") == [2, 3, 4, 5]
    assert parse_weight_range("7") == [7]
    for bad in ("2-4", "5:2", "2:4:0", ""):
        with pytest.raises(UsageError):
            parse_weight_range(bad)


def test_level_ranges():
    assert parse_level_range("1..100") == (1, 100)
    for bad in ("0..5", "9..3", "1-5"):
        with pytest.raises(UsageError):
            parse_level_range(bad)


def test_family_options():
    options = get_family_options()
    assert options["families"] == ["g0", "g0plus", "g0star", "g1", "g1plus", "g1star"]
    assert "rho-floor" in options["checks"] and "bennett-residual" in options["checks"]


def test_format_fraction():
    assert format_fraction(Fraction(6, 4)) == "3/2"
    assert format_fraction(Fraction(4, 2)) == "2"


def test_csv_and_json_carry_the_same_values():
    records = [
        OutputRecord(family="g0", N=11, k=2, value=1),
        OutputRecord(family="rho0", N=22, k=2, value="0", extras={"decimal": "0.000000000000"}),
    ]
    csv_text = render_records(records, "csv")
    lines = csv_text.splitlines()
    assert lines[0] == "family,N,k,value,decimal"
    assert lines[1].startswith("g0,11,2,1")
    json_rows = [json.loads(line) for line in render_records(records, "json").splitlines()]
    assert json_rows[0] == {"family": "g0", "N": 11, "k": 2, "value": 1}
    assert json_rows[1]["decimal"] == "0.000000000000"
    with pytest.raises(UsageError):
        render_records(records, "xml")


def test_write_report(tmp_path):
    path = tmp_path / "record.json"
    write_report(OutputRecord(family="g0", N=11, k=2, value=1), str(path))
    assert json.loads(path.read_text())["N"] == 11
