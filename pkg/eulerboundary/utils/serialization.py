"""
Lossless serialization of rationals, arrays and output records
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from eulerboundary.boundary.martin import KappaSchedule
from eulerboundary.core.arrays import LeftColumn, TriangularArray, as_fraction
from eulerboundary.core.errors import InputFormatError
from eulerboundary.core.params import BoundaryParam
from eulerboundary.core.triangle import TriangleIndex

ArrayLike = Union[TriangularArray, LeftColumn]


def format_rational(value: Fraction) -> str:
    """
    "numerator/denominator", denominator always present

    Example:
        >>> format_rational(Fraction(3))
        '3/1'
    """
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    return as_fraction(text, name="rational")


def format_decimal(value: float, digits: int = 12) -> str:
    """Decimal string with `digits` significant digits"""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{digits}g")


def to_jsonable(obj: Any, digits: int = 12) -> Any:
    """
    Convert reports and numbers to JSON values

    Rationals become "p/q" strings and floats become decimal strings, so no
    JSON number ever carries a rounded value.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (float, np.floating)):
        return format_decimal(obj, digits)
    if isinstance(obj, (BoundaryParam, TriangleIndex, KappaSchedule)):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, TriangularArray):
        return {"first_row": obj.first_row, "rows": [to_jsonable(list(r), digits) for _, r in obj.rows()]}
    if isinstance(obj, LeftColumn):
        return [format_rational(v) for v in obj.values]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict(), digits)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset, np.ndarray)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v, digits) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj: Any, digits: int = 12) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline"""
    return json.dumps(to_jsonable(obj, digits), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def serialize_data(data: Dict[str, Any]) -> str:
    """Compact JSON for storage columns"""
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(",", ":"))


def deserialize_data(data_str: str) -> Any:
    return json.loads(data_str)


def _flatten(prefix: str, value: Any, out: Dict[str, Any]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], out)
    elif isinstance(value, list):
        for i, item in enumerate(value):
            _flatten(f"{prefix}.{i}", item, out)
    else:
        out[prefix] = value


def rows_to_csv(rows: List[Dict[str, Any]], digits: int = 12) -> str:
    """CSV of a list of flat records; columns in the order of the first record"""
    converted = [to_jsonable(r, digits) for r in rows]
    buffer = io.StringIO()
    if not converted:
        return ""
    fields = list(converted[0])
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in converted:
        writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
    return buffer.getvalue()


def payload_to_csv(payload: Any, digits: int = 12) -> str:
    """key,value lines for every scalar leaf of a JSON payload"""
    flat: Dict[str, Any] = {}
    _flatten("", to_jsonable(payload, digits), flat)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in flat.items():
        writer.writerow([key, "" if value is None else value])
    return buffer.getvalue()


@dataclass
class OutputRecord:
    """
    Result of one CLI command

    Attributes:
        command: Command name, e.g. "sample bucket"
        version: Package version
        seed: Seed of randomized commands, None otherwise
        parameters: Parsed arguments
        payload: Report, table or verdict
        table: Optional list of flat rows; CSV output uses it when present
        rng: Random stream metadata for randomized commands
        ok: Whether every requested check passed
    """

    command: str
    version: str
    parameters: Dict[str, Any]
    payload: Any
    seed: Optional[int] = None
    table: Optional[List[Dict[str, Any]]] = None
    rng: Optional[Dict[str, Any]] = None
    ok: bool = True
    digits: int = 12
    extra: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        record = {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "parameters": self.parameters,
            "payload": self.payload,
            "ok": self.ok,
            "decimal_digits": self.digits,
        }
        if self.rng is not None:
            record["rng"] = self.rng
        record.update(self.extra)
        return record

    def to_json(self) -> str:
        return dumps_json(self.as_dict(), self.digits)

    def to_csv(self) -> str:
        if self.table is not None:
            return rows_to_csv(self.table, self.digits)
        return payload_to_csv(self.payload, self.digits)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise InputFormatError(f"unknown output format {fmt!r}")


def format_array_file(obj: ArrayLike) -> str:
    """
    Text form of an array or left column

    Header `rows=N`, then one line per row of whitespace-separated "p/q"
    values. A left column is written with one value per line.
    """
    if isinstance(obj, LeftColumn):
        lines = [format_rational(v) for v in obj.values]
        count = len(obj)
    else:
        if obj.first_row != 1:
            raise InputFormatError("array files hold arrays starting at row 1")
        lines = [" ".join(format_rational(v) for v in row) for _, row in obj.rows()]
        count = obj.max_row
    return "\n".join([f"rows={count}"] + lines) + "\n"


def parse_array_file(text: str) -> ArrayLike:
    """
    Parse the array file format

    Blank lines and lines starting with '#' are ignored. If every data line
    holds a single value the file is read as a left column.

    Example:
        >>> parse_array_file("rows=3\\n1\\n1/2\\n1/6\\n").values
        (Fraction(1, 1), Fraction(1, 2), Fraction(1, 6))
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise InputFormatError("array file is empty")
    header = lines[0].replace(" ", "")
    if not header.startswith("rows="):
        raise InputFormatError(f"first line must be 'rows=N', got {lines[0]!r}")
    try:
        count = int(header[len("rows="):])
    except ValueError:
        raise InputFormatError(f"bad row count in {lines[0]!r}") from None
    body = [line.split() for line in lines[1:]]
    if count < 1 or len(body) != count:
        raise InputFormatError(f"header announces {count} rows, file has {len(body)}")
    values = [[parse_rational(v) for v in fields] for fields in body]
    if all(len(row) == 1 for row in values):
        return LeftColumn(tuple(row[0] for row in values))
    for n, row in enumerate(values, start=1):
        if len(row) != n:
            raise InputFormatError(f"row {n} must have {n} values, got {len(row)}")
    return TriangularArray(values)


def read_array_file(path: Union[str, Path]) -> ArrayLike:
    return parse_array_file(Path(path).read_text(encoding="utf-8"))


def write_array_file(path: Union[str, Path], obj: ArrayLike) -> None:
    Path(path).write_text(format_array_file(obj), encoding="utf-8")
