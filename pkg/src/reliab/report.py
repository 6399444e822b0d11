"""Structured results with lossless JSON and clean CSV/table rendering.

A Report is scalars plus zero or more rectangular tables, with the
fully resolved configuration (seed included) echoed so any emitted
table can be replayed from its own output. Rendering is deterministic:
no timestamps, stable key order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReportTable:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass
class Report:
    command: str
    version: str
    config: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    tables: list[ReportTable] = field(default_factory=list)

    def add_table(self, name: str, columns: list[str], rows: list) -> None:
        self.tables.append(ReportTable(name=name, columns=tuple(columns),
                                       rows=tuple(tuple(r) for r in rows)))

    def to_dict(self) -> dict:
        results: dict = dict(self.scalars)
        for table in self.tables:
            results[table.name] = [dict(zip(table.columns, row))
                                   for row in table.rows]
        return {"command": self.command, "version": self.version,
                "config": self.config, "results": results}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)

    def to_csv(self) -> str:
        """One rectangular CSV: the first table, else key,value scalars."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.tables:
            table = self.tables[0]
            writer.writerow(table.columns)
            writer.writerows(table.rows)
        else:
            writer.writerow(("key", "value"))
            for key, value in self.scalars.items():
                writer.writerow((key, value))
        return buf.getvalue()

    def to_table(self) -> str:
        """Human-readable rendering of config, scalars, and tables."""
        lines: list[str] = [f"# reliab {self.command} (v{self.version})"]
        if self.config:
            pairs = ", ".join(f"{k}={_fmt(v)}" for k, v in self.config.items())
            lines.append(f"config: {pairs}")
        if self.scalars:
            lines.append("")
            width = max(len(str(k)) for k in self.scalars)
            for key, value in self.scalars.items():
                lines.append(f"  {key:<{width}}  {_fmt(value)}")
        for table in self.tables:
            lines.append("")
            lines.append(f"[{table.name}]")
            rendered = [[_fmt(cell) for cell in row] for row in table.rows]
            widths = [max(len(col), *(len(r[i]) for r in rendered)) if rendered
                      else len(col) for i, col in enumerate(table.columns)]
            lines.append("  " + "  ".join(c.ljust(w) for c, w
                                          in zip(table.columns, widths)))
            for row in rendered:
                lines.append("  " + "  ".join(c.rjust(w) for c, w
                                              in zip(row, widths)))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json() + "\n"
        if fmt == "csv":
            return self.to_csv()
        if fmt == "table":
            return self.to_table()
        raise ValueError(f"unknown format {fmt!r}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "not-applicable"
    return str(value)
