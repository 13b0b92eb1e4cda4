"""File formats used by the command line.

* Dataset: CSV with a header row, comma separated, UTF-8, ``.`` decimals.
* Partition spec: JSON ``{"groups": {name: [feature, ...], ...}}``.
* Fit result: JSON document (see :func:`run_result`).
* Benchmark trace: CSV ``solver,restart_index,cumulative_seconds,best_objective``.

Floats are written with ``repr`` so that every value survives a round trip
exactly.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .model import Dataset, FitConfig, FitReport, Partition, to_homogeneous

INTERCEPT = "(intercept)"
TRACE_HEADER = ("solver", "restart_index", "cumulative_seconds", "best_objective")


def load_dataset(csv_path, target: str) -> tuple[Dataset, list[str]]:
    """Read a CSV file; every column except ``target`` becomes a feature.

    Returns the dataset and the feature names in header order.
    """
    path = Path(csv_path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: file is empty")
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise ValidationError(f"{path}: duplicate column names in header")
        if target not in header:
            raise ValidationError(f"{path}: target column {target!r} not found")
        t = header.index(target)
        features = [h for i, h in enumerate(header) if i != t]
        if not features:
            raise ValidationError(f"{path}: no feature columns besides {target!r}")

        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {len(header)}"
                )
            values = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {lineno}, column {name!r}: non-numeric cell {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise ValidationError(
                        f"{path}: line {lineno}, column {name!r}: non-finite value {cell!r}"
                    )
                values.append(v)
            rows.append(values)
    if not rows:
        raise ValidationError(f"{path}: no data rows")

    table = np.array(rows)
    y = table[:, t]
    X = np.delete(table, t, axis=1)
    return Dataset(X, y), features


def write_dataset(csv_path, data: Dataset, feature_names: Sequence[str], target: str = "y"):
    path = Path(csv_path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*feature_names, target])
        for xs, yv in zip(data.X, data.y):
            writer.writerow([repr(float(v)) for v in xs] + [repr(float(yv))])


def load_partition_spec(json_path) -> dict[str, list[str]]:
    path = Path(json_path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    groups = doc.get("groups") if isinstance(doc, dict) else None
    if not isinstance(groups, dict):
        raise ValidationError(f'{path}: expected an object with a "groups" mapping')
    for name, members in groups.items():
        if not isinstance(members, list) or not all(isinstance(f, str) for f in members):
            raise ValidationError(f"{path}: group {name!r} must be a list of column names")
    return groups


def write_partition_spec(json_path, partition: Partition, feature_names: Sequence[str]):
    groups = {
        name: [feature_names[m] for m in members]
        for name, members in zip(partition.group_names(), partition.members)
    }
    Path(json_path).write_text(json.dumps({"groups": groups}, indent=2) + "\n", encoding="utf-8")


def bind_partition(groups: dict[str, list[str]], feature_names: Sequence[str]) -> Partition:
    """Match a partition spec against dataset columns.

    Every feature must appear in exactly one group, and no group may be empty
    or name a column the dataset lacks.
    """
    index = {name: i for i, name in enumerate(feature_names)}
    owner: dict[str, str] = {}
    member_lists = []
    for gname, members in groups.items():
        if not members:
            raise ValidationError(f"group {gname!r} is empty")
        idx = []
        for f in members:
            if f not in index:
                raise ValidationError(f"group {gname!r} names unknown feature {f!r}")
            if f in owner:
                raise ValidationError(
                    f"feature {f!r} appears in both {owner[f]!r} and {gname!r}"
                )
            owner[f] = gname
            idx.append(index[f])
        member_lists.append(idx)
    missing = [f for f in feature_names if f not in owner]
    if missing:
        raise ValidationError(f"features not assigned to any group: {missing}")
    return Partition.from_groups(member_lists, names=list(groups))


def prepare(
    csv_path, target: str, partition_path, intercept: bool = False
) -> tuple[Dataset, Partition, list[str]]:
    """Load data and partition spec, appending the intercept group if asked."""
    data, features = load_dataset(csv_path, target)
    partition = bind_partition(load_partition_spec(partition_path), features)
    if intercept:
        if INTERCEPT in features or INTERCEPT in partition.group_names():
            raise ValidationError(f"name {INTERCEPT!r} is reserved for the intercept")
        data, partition = to_homogeneous(data, partition, INTERCEPT)
        features = [*features, INTERCEPT]
    return data, partition, features


def run_result(
    report: FitReport, partition: Partition, feature_names: Sequence[str], config: FitConfig
) -> dict:
    """JSON-ready fit result. Only ``seconds`` depends on timing."""
    names = partition.group_names()
    model = report.model
    return {
        "solver": report.solver,
        "objective": float(report.objective),
        "alpha": [
            {"feature": f, "group": names[k], "value": float(a)}
            for f, k, a in zip(feature_names, partition.assignments, model.alpha)
        ],
        "beta": {name: float(b) for name, b in zip(names, model.beta)},
        "seconds": report.seconds,
        "diagnostics": report.diagnostics(),
        "config": {
            "eta": config.eta,
            "iterations": config.iterations,
            "restarts": config.restarts,
            "seed": config.seed,
            "tolerance": config.tol,
            "node_limit": config.node_limit,
            "enum_cap": config.enum_cap,
            "early_stop": config.early_stop,
            "threads": config.threads,
        },
    }


def dumps_result(result: dict) -> str:
    return json.dumps(result, indent=2, allow_nan=False) + "\n"


def write_trace(fh, rows: Iterable[tuple]):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for solver, index, seconds, best in rows:
        writer.writerow([solver, int(index), repr(float(seconds)), repr(float(best))])


def read_trace(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValidationError(f"{path}: unexpected trace header {reader.fieldnames}")
        return [
            {
                "solver": row["solver"],
                "restart_index": int(row["restart_index"]),
                "cumulative_seconds": float(row["cumulative_seconds"]),
                "best_objective": float(row["best_objective"]),
            }
            for row in reader
        ]
