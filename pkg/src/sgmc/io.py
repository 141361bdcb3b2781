"""Sample collection and serialization.

One store per chain; samples append in collection order and serialize to an
in-memory mapping, JSON Lines, or CSV.  File formats round-trip at full
float64 precision (shortest-round-trip float formatting).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .core import Layout, ParameterVector, layout_slices
from .errors import StoreError


def flat_column_names(layout: Layout) -> list[str]:
    """Flattened column labels: ``name`` for scalars, ``name[i,j,...]`` otherwise."""
    names = []
    for name, shape in layout:
        if shape == ():
            names.append(name)
            continue
        for idx in np.ndindex(*shape):
            names.append(f"{name}[{','.join(str(i) for i in idx)}]")
    return names


@dataclass
class SampleStore:
    """Append-only store of flattened samples for a single chain."""

    layout: Layout
    chain_id: int = 0
    metadata: dict = field(default_factory=dict)
    _rows: list[np.ndarray] = field(default_factory=list)
    _iterations: list[int] = field(default_factory=list)

    @property
    def sample_count(self) -> int:
        return len(self._rows)

    def iterations(self) -> np.ndarray:
        return np.asarray(self._iterations, dtype=np.int64)

    def stacked(self) -> np.ndarray:
        if not self._rows:
            return np.empty((0, sum(int(np.prod(s)) for _, s in self.layout)))
        return np.stack(self._rows)

    def variables(self) -> dict[str, np.ndarray]:
        """Per-variable arrays with the sample axis leading."""
        flat = self.stacked()
        out = {}
        for name, (sl, shape) in layout_slices(self.layout).items():
            out[name] = flat[:, sl].reshape((flat.shape[0],) + shape)
        return out


def collect_sample(store: SampleStore, theta: ParameterVector, iteration: int) -> SampleStore:
    """Append one sample; the layout must match the store's."""
    if theta.layout != store.layout:
        raise StoreError(
            f"sample layout {theta.layout} does not match store layout {store.layout}"
        )
    store._rows.append(theta.values.copy())
    store._iterations.append(int(iteration))
    return store


def finalize_results(store: SampleStore, format: str = "memory", path=None):
    """Materialize the store: ``memory`` mapping, or a ``jsonl``/``csv`` file.

    memory: {"samples": {"variables": {...}}, "sample_count", ...}
    jsonl:  one object per sample {"iteration": t, "variables": {name: flat list}}
    csv:    header ``iteration`` + flattened variable columns.
    """
    if format == "memory":
        return {
            "samples": {
                "variables": store.variables(),
                "iterations": store.iterations(),
            },
            "sample_count": store.sample_count,
            "chain_id": store.chain_id,
            "metadata": dict(store.metadata),
        }
    if path is None:
        raise ValueError(f"format {format!r} requires a path")
    slices = layout_slices(store.layout)
    if format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for it, row in zip(store._iterations, store._rows):
                obj = {
                    "iteration": it,
                    "variables": {name: row[sl].tolist() for name, (sl, _) in slices.items()},
                }
                fh.write(json.dumps(obj) + "\n")
        return path
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration"] + flat_column_names(store.layout))
            for it, row in zip(store._iterations, store._rows):
                writer.writerow([it] + [repr(v) for v in row.tolist()])
        return path
    raise ValueError(f"unknown output format {format!r}")


def read_jsonl(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Parse a samples.jsonl file back into (iterations, {name: flat matrix})."""
    iterations, columns = [], {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            iterations.append(obj["iteration"])
            for name, vals in obj["variables"].items():
                columns.setdefault(name, []).append(vals)
    return (
        np.asarray(iterations, dtype=np.int64),
        {name: np.asarray(vals, dtype=np.float64) for name, vals in columns.items()},
    )


def read_csv_samples(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Parse a samples.csv file back into (iterations, {name: flat matrix})."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    table = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, len(header)))
    # group flattened columns "name[...]" back under "name", preserving order
    groups: dict[str, list[int]] = {}
    for j, col in enumerate(header[1:], start=1):
        base = col.split("[", 1)[0]
        groups.setdefault(base, []).append(j)
    iterations = table[:, 0].astype(np.int64) if rows else np.empty(0, dtype=np.int64)
    return iterations, {name: table[:, cols] for name, cols in groups.items()}
