"""
Unit tests for the records module.
"""

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from polyflow import __version__
from polyflow.coeff import Coeff
from polyflow.records import SCHEMA, dumps_csv, dumps_json, make_record, to_jsonable, write_output


class TestToJsonable:
    """Test cases for conversion to plain JSON data."""

    def test_rounding(self) -> None:
        """Test that floats keep twelve significant digits."""
        assert to_jsonable(1 / 3) == 0.333333333333
        assert to_jsonable(np.float64(2.0)) == 2.0

    def test_exact_values_as_strings(self) -> None:
        """Test fractions and coefficients."""
        assert to_jsonable(Fraction(1, 3)) == "1/3"
        assert to_jsonable(Coeff.rational(2)) == str(Coeff.rational(2))

    def test_complex_and_arrays(self) -> None:
        """Test complex pairs and numpy arrays."""
        assert to_jsonable(1 + 2j) == [1.0, 2.0]
        assert to_jsonable(np.array([1, 2])) == [1, 2]
        assert to_jsonable(np.bool_(True)) is True

    def test_sorted_keys(self) -> None:
        """Test that mapping keys are sorted."""
        assert list(to_jsonable({'b': 1, 'a': 2})) == ['a', 'b']


class TestRecords:
    """Test cases for JSON and CSV records."""

    def test_make_record(self) -> None:
        """Test the versioned envelope."""
        record = make_record({'family': 't, 2t'}, {'bound': 1})
        assert record['schema'] == SCHEMA
        assert record['version'] == __version__
        assert record['result'] == {'bound': 1}

    def test_json_is_stable(self) -> None:
        """Test that equal records serialise to equal text."""
        first = dumps_json(make_record({'b': 1, 'a': 0.1 + 0.2}, [1 / 3]))
        second = dumps_json(make_record({'a': 0.3, 'b': 1}, [1 / 3]))
        assert first == second
        assert json.loads(first)['config'] == {'a': 0.3, 'b': 1}

    def test_csv_header(self) -> None:
        """Test comment header lines and flattened rows."""
        text = dumps_csv({'family': 't', 'plan': {'R': 10}}, [{'s': 0, 'value': {'re': 1.0}}, {'s': 1, 'extra': 2}])
        lines = text.splitlines()
        assert lines[0] == f"# schema={SCHEMA}"
        assert "# plan.R=10" in lines
        table = [line for line in lines if not line.startswith('#')]
        assert table[0] == "s,value.re,extra"
        assert table[1] == "0,1.0,"
        assert table[2] == "1,,2"

    def test_write_output(self, temp_dir: str, capsys) -> None:
        """Test writing to a file and to stdout."""
        path = Path(temp_dir) / "out.json"
        write_output("{}\n", path)
        assert path.read_text() == "{}\n"
        write_output("hello\n")
        assert capsys.readouterr().out == "hello\n"
