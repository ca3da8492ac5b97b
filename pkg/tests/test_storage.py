"""
Unit tests for the record store, serialization and the Workbench facade
"""

import json
import os
import tempfile
from fractions import Fraction

import numpy as np
import pytest

from eulerboundary.boundary.extreme import extreme_solution
from eulerboundary.boundary.martin import KappaSchedule
from eulerboundary.core.arrays import LeftColumn, TriangularArray
from eulerboundary.core.config import Settings
from eulerboundary.core.errors import InputFormatError, ParameterError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.triangle import TriangleIndex
from eulerboundary.core.workbench import Workbench
from eulerboundary.reconstruct.decompose import EXACT, LIMIT, STABLE
from eulerboundary.storage.sqlite_backend import SQLiteRecordStore
from eulerboundary.utils.serialization import (
    OutputRecord,
    dumps_json,
    format_array_file,
    format_decimal,
    format_rational,
    parse_array_file,
    parse_rational,
    payload_to_csv,
    read_array_file,
    rows_to_csv,
    to_jsonable,
    write_array_file,
)


@pytest.fixture
def temp_db():
    """Create a temporary database path for testing"""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield os.path.join(tmpdir, "records.db")


@pytest.fixture
def store(temp_db):
    backend = SQLiteRecordStore(temp_db)
    yield backend
    backend.close()


@pytest.fixture
def bench():
    with Workbench(Settings()) as workbench:
        yield workbench


def make_record(command="triangle", seed=None, **parameters):
    return {
        "command": command,
        "version": "0.1.0",
        "seed": seed,
        "parameters": parameters,
        "payload": {"value": Fraction(1, 3)},
        "ok": True,
    }


class TestSQLiteRecordStore:
    """Test archiving of output records"""

    def test_store_and_retrieve(self, store):
        record_id = store.store(make_record(rows=6))
        stored = store.retrieve(record_id)
        assert stored["command"] == "triangle"
        assert stored["parameters"] == {"rows": 6}
        assert stored["payload"] == {"value": "1/3"}
        assert stored["ok"] is True
        assert store.retrieve(record_id + 1) is None

    def test_missing_fields(self, store):
        with pytest.raises(InputFormatError):
            store.store({"command": "triangle"})

    def test_query_filters(self, store):
        store.store(make_record("sample bucket", seed=7, kappa=1))
        store.store(make_record("sample bucket", seed=8, kappa=2))
        store.store(make_record("triangle", rows=4))
        assert len(store.query(command="sample bucket")) == 2
        assert [r["seed"] for r in store.query(command="sample bucket", kappa=2)] == [8]
        assert store.query(seed=7)[0]["parameters"]["kappa"] == 1
        assert store.count() == 3
        assert store.count(command="triangle") == 1

    def test_delete_and_clear(self, store):
        first = store.store(make_record())
        store.store(make_record("chain run"))
        assert store.delete(first)
        assert not store.delete(first)
        assert store.list_commands() == ["chain run"]
        store.clear()
        assert store.count() == 0

    def test_persists_across_connections(self, temp_db):
        with SQLiteRecordStore(temp_db) as first:
            record_id = first.store(make_record(rows=2))
        with SQLiteRecordStore(temp_db) as second:
            assert second.retrieve(record_id)["parameters"] == {"rows": 2}

    def test_in_memory(self):
        with SQLiteRecordStore(":memory:") as backend:
            backend.store(make_record())
            assert backend.list_commands() == ["triangle"]


class TestRationalCodec:
    def test_format_and_parse(self):
        assert format_rational(Fraction(3)) == "3/1"
        assert format_rational(Fraction(-2, 6)) == "-1/3"
        assert parse_rational("6/8") == Fraction(3, 4)
        assert parse_rational(" 5 ") == 5
        with pytest.raises(InputFormatError):
            parse_rational("1/0")
        with pytest.raises(InputFormatError):
            parse_rational("one half")

    def test_format_decimal(self):
        assert format_decimal(0.5) == "0.5"
        assert format_decimal(1 / 3, 4) == "0.3333"
        assert format_decimal(float("inf")) == "inf"
        assert format_decimal(float("nan")) == "nan"

    def test_to_jsonable(self):
        data = to_jsonable({
            "p": Fraction(1, 2),
            "x": 0.25,
            "n": np.int64(3),
            "flag": np.bool_(True),
            "theta": BoundaryParam.lower(2),
            "vertex": TriangleIndex(3, 1),
            "schedule": KappaSchedule.parse("mirrored:1"),
            "column": LeftColumn.of([1, "1/2"]),
            "set": {3, 1},
        })
        assert data == {
            "p": "1/2",
            "x": "0.25",
            "n": 3,
            "flag": True,
            "theta": "lower:2",
            "vertex": "(3,1)",
            "schedule": "mirrored:1",
            "column": ["1/1", "1/2"],
            "set": [1, 3],
        }
        with pytest.raises(TypeError):
            to_jsonable(object())

    def test_dumps_json_is_deterministic(self):
        text = dumps_json({"b": Fraction(1, 3), "a": [1, 2]})
        assert text == dumps_json({"a": [1, 2], "b": Fraction(1, 3)})
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["a", "b"]

    def test_csv_helpers(self):
        assert rows_to_csv([]) == ""
        text = rows_to_csv([{"k": 0, "p": Fraction(1, 2)}, {"k": 1, "p": Fraction(1, 2)}])
        assert text.splitlines() == ["k,p", "0,1/2", "1,1/2"]
        flat = payload_to_csv({"a": {"b": Fraction(1, 4)}, "c": [None, 2]})
        assert flat.splitlines() == ["key,value", "a.b,1/4", "c.0,", "c.1,2"]


class TestArrayFiles:
    """Test the `rows=N` array file format"""

    def test_left_column(self):
        parsed = parse_array_file("# comment\nrows=3\n\n1\n1/2\n1/6\n")
        assert isinstance(parsed, LeftColumn)
        assert parsed.values == (1, Fraction(1, 2), Fraction(1, 6))

    def test_full_array(self):
        w = extreme_solution(BoundaryParam.upper(1), 4)
        text = format_array_file(w)
        assert text.splitlines()[0] == "rows=4"
        assert text.splitlines()[2] == "3/4 1/4"
        assert parse_array_file(text) == w

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "column.txt"
        write_array_file(path, LeftColumn.of([1, "3/4", "1/2"]))
        assert read_array_file(path) == LeftColumn.of([1, "3/4", "1/2"])

    @pytest.mark.parametrize(
        "text,message",
        [
            ("", "empty"),
            ("1\n1/2\n", "first line"),
            ("rows=x\n1\n", "bad row count"),
            ("rows=3\n1\n1/2\n", "announces 3 rows"),
            ("rows=2\n1\n1/2 1/2 0\n", "row 2 must have 2 values"),
            ("rows=1\nabc\n", "cannot parse"),
        ],
    )
    def test_malformed(self, text, message):
        with pytest.raises(InputFormatError) as exc:
            parse_array_file(text)
        assert message in str(exc.value)

    def test_window_cannot_be_written(self):
        with pytest.raises(InputFormatError):
            format_array_file(extreme_solution(BoundaryParam.half(), 4).window(2, 4))


class TestOutputRecord:
    def test_json(self):
        record = OutputRecord("triangle", "0.1.0", {"rows": 2}, {"rows": [[1], [1, 1]]})
        data = json.loads(record.render("json"))
        assert data["command"] == "triangle"
        assert data["decimal_digits"] == 12
        assert "rng" not in data

    def test_csv_prefers_table(self):
        record = OutputRecord("x", "0.1.0", {}, {"a": 1}, table=[{"n": 1, "v": Fraction(1, 2)}])
        assert record.render("csv").splitlines() == ["n,v", "1,1/2"]
        assert OutputRecord("x", "0.1.0", {}, {"a": 1}).render("csv").splitlines() == ["key,value", "a,1"]

    def test_unknown_format(self):
        with pytest.raises(InputFormatError):
            OutputRecord("x", "0.1.0", {}, {}).render("xml")


class TestWorkbench:
    """Test the facade over the library"""

    def test_triangle_rows(self, bench):
        assert bench.triangle_rows(3) == [(1,), (1, 1), (1, 4, 1)]
        assert bench.triangle_rows(4, "explicit")[-1] == (1, 11, 11, 1)
        with pytest.raises(ParameterError):
            bench.triangle_rows(3, "closed-form")
        with pytest.raises(ParameterError):
            bench.triangle_rows(0)

    def test_verify_triangle(self, bench):
        assert all(bench.verify_triangle(12, 4).values())

    def test_check_extreme(self, bench):
        assert all(bench.check_extreme(BoundaryParam.upper(2), 8).values())
        with pytest.raises(ParameterError):
            bench.check_extreme(BoundaryParam.half(), 4, ["shape"])

    def test_reconstruct_and_decompose(self, bench):
        column = LeftColumn.of([1, Fraction(3, 4), Fraction(1, 2), Fraction(5, 16), Fraction(3, 16)])
        array, verdict = bench.reconstruct(column)
        assert verdict.member
        exact = bench.decompose(column)
        assert exact.mode == EXACT
        assert exact.get(BoundaryParam.upper(1)) == 1
        with pytest.raises(ParameterError):
            bench.decompose(column, mode="guess")

    def test_decompose_limit(self, bench):
        result = bench.decompose(bench.extreme(BoundaryParam.upper(0), 12), mode=LIMIT, kappa_cut=1)
        assert result.mode == LIMIT
        assert result.status == STABLE
        assert result.get(BoundaryParam.upper(0)) == 1

    def test_synthesize(self, bench):
        v = bench.synthesize({BoundaryParam.upper(0): Fraction(1, 2), BoundaryParam.half(): Fraction(1, 2)}, 2)
        assert v[2, 0] == Fraction(3, 4)

    def test_samplers_are_seeded(self, bench):
        first = bench.uniform_sum(3, 2000, seed=4)
        second = bench.uniform_sum(3, 2000, seed=4)
        assert [b.count for b in first.bins] == [b.count for b in second.bins]
        assert bench.run_chain(TriangleIndex(6, 3), seed=2) == bench.run_chain(TriangleIndex(6, 3), seed=2)

    def test_chain_helpers(self, bench):
        path = bench.path_of((3, 1, 2))
        assert bench.perm_of(path) == (3, 1, 2)
        assert bench.monotonicity(6)
        assert bench.propagate(TriangleIndex(4, 1))[1] == (1,)
        assert bench.couple(6, 0, 3, 50, seed=1).ok

    def test_record_without_store(self, bench):
        assert bench.record(make_record()) is None

    def test_record_with_store(self, temp_db):
        with Workbench(Settings(), record_path=temp_db) as workbench:
            record_id = workbench.record(make_record())
            assert workbench.store.retrieve(record_id)["command"] == "triangle"


def test_array_equality_ignores_subclass():
    w = extreme_solution(BoundaryParam.half(), 3)
    assert TriangularArray(w.to_lists()) == w
