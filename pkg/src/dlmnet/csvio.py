"""CSV emission of experiment reports."""

from __future__ import annotations

import csv
import io
import math

from .experiments import FrequencyReport


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.6f}"
    return str(v)


def _suffix(label: str) -> str:
    return label if label.isdigit() else "_" + label


def emit_csv(reports: list[FrequencyReport]) -> str:
    """One header row plus one row per report; all reports must share a layout."""
    if not reports:
        raise ValueError("no reports to write")
    first = reports[0]
    keys = list(first.params)
    tags = [_suffix(lb) for lb in first.labels]
    header = keys + [f"N{t}" for t in tags] + [f"f{t}" for t in tags] \
        + [f"p{t}" for t in tags] + ["deviation"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in reports:
        if list(r.params) != keys or r.labels != first.labels:
            raise ValueError("reports have different column layouts")
        oracle = r.oracle if r.oracle is not None else (math.nan,) * len(r.counts)
        row = [_fmt(r.params[k]) for k in keys]
        row += [str(c) for c in r.counts]
        row += [_fmt(float(f)) for f in r.frequencies]
        row += [_fmt(float(p)) for p in oracle]
        row.append(_fmt(float(r.deviation)))
        writer.writerow(row)
    return buf.getvalue()
