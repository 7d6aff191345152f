"""Record formatting utilities"""

import csv
import io
import json
from typing import Any, Dict, List, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel

FORMATS = ("csv", "json")

Record = TypeVar("Record", bound=BaseModel)


class RecordFormatter:
    """CSV / JSON rendering of pydantic records with shared field names

    Floats are written with 17 significant digits (CSV) or the shortest
    round-trip repr (JSON), so parsing a file back gives the same binary64
    values. Missing values are empty CSV cells and JSON nulls.
    """

    @staticmethod
    def format_cell(value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return "%.17g" % value
        return str(value)

    @staticmethod
    def _columns(records: Sequence[BaseModel], columns: Optional[Sequence[str]]) -> List[str]:
        if columns is not None:
            return list(columns)
        if not records:
            return []
        return list(type(records[0]).model_fields)

    @classmethod
    def to_csv(cls, records: Sequence[BaseModel], columns: Optional[Sequence[str]] = None) -> str:
        columns = cls._columns(records, columns)
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for record in records:
            writer.writerow([cls.format_cell(getattr(record, name)) for name in columns])
        return buffer.getvalue()

    @classmethod
    def to_json(cls, records: Sequence[BaseModel], columns: Optional[Sequence[str]] = None) -> str:
        columns = cls._columns(records, columns)
        rows = [{name: getattr(record, name) for name in columns} for record in records]
        return json.dumps(rows, indent=2) + "\n"

    @classmethod
    def render(cls, records: Sequence[BaseModel], fmt: str, columns: Optional[Sequence[str]] = None) -> str:
        if fmt == "csv":
            return cls.to_csv(records, columns)
        if fmt == "json":
            return cls.to_json(records, columns)
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")

    @staticmethod
    def parse(text: str, fmt: str, model: Type[Record]) -> List[Record]:
        """Inverse of render; absent columns fall back to model defaults"""
        if fmt == "csv":
            rows: List[Dict[str, Any]] = [
                {key: (value if value != "" else None) for key, value in row.items()}
                for row in csv.DictReader(io.StringIO(text))
            ]
        elif fmt == "json":
            rows = json.loads(text)
        else:
            raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
        return [model.model_validate(row) for row in rows]
