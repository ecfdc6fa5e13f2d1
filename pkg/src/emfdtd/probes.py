"""Current (Ampere loop) and voltage (path integral) probes plus the CSV
record writer.

Current through an edge is the circulation of the four adjacent H
components times delta.  Voltage over a path is -sum(E . dl) along the
traversal.  Current probes read H at the half step nearest the reported
time (skew dt/2, noted in the CSV header comment rather than
interpolated)."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import FieldSet, X, Z

PROBE_KINDS = ("current", "voltage")


@dataclass(frozen=True)
class Probe:
    """Measurement request in meter space; a single edge for current, an
    axis-aligned edge chain for voltage."""

    kind: str
    span: tuple[tuple[float, float, float], tuple[float, float, float]]
    name: str

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ParameterError(f"unknown probe kind {self.kind!r}")


@dataclass(frozen=True)
class EdgeRef:
    """A resolved grid edge: E component, lower-node index, traversal sign."""

    component: int
    index: tuple[int, int, int]
    sign: float


@dataclass(frozen=True)
class PathRef:
    """A resolved straight chain of edges along one axis."""

    component: int
    start: tuple[int, int, int]
    count: int
    sign: float

    def edges(self):
        i, j, k = self.start
        for s in range(self.count):
            idx = [i, j, k]
            idx[self.component] += s
            yield tuple(idx)


def measure_current(fields: FieldSet, edge: EdgeRef, delta: float) -> float:
    """Ampere-loop current through an edge, positive along the edge's
    traversal direction."""
    i, j, k = edge.index
    if edge.component == Z:
        total = (
            fields.hy[i, j, k] - fields.hy[i - 1, j, k]
            - fields.hx[i, j, k] + fields.hx[i, j - 1, k]
        )
    elif edge.component == X:
        total = (
            fields.hz[i, j, k] - fields.hz[i, j - 1, k]
            - fields.hy[i, j, k] + fields.hy[i, j, k - 1]
        )
    else:
        total = (
            fields.hx[i, j, k] - fields.hx[i, j, k - 1]
            - fields.hz[i, j, k] + fields.hz[i - 1, j, k]
        )
    return float(total) * delta * edge.sign


def measure_voltage(fields: FieldSet, path: PathRef, delta: float) -> float:
    """-sum(E . dl) from the path's start to its end."""
    e_arr = fields.e(path.component)
    total = 0.0
    for idx in path.edges():
        total += float(e_arr[idx])
    return -total * delta * path.sign


class CsvRecorder:
    """Streams probe records as CSV: one comment line documenting the
    half-step skew, a header ``time,<name>,...``, then one row per record.
    Rows are flushed as written so an interrupted run leaves a valid
    prefix."""

    def __init__(self, stream: io.TextIOBase, names: list[str], dt: float):
        self.stream = stream
        self.names = list(names)
        self.stream.write(
            f"# current columns sample H at t - dt/2 (dt = {dt:.9e} s)\n"
        )
        self.stream.write(",".join(["time"] + self.names) + "\n")
        self.stream.flush()

    def record(self, t: float, values) -> None:
        row = ",".join(f"{v:.9e}" for v in [t, *values])
        self.stream.write(row + "\n")
        self.stream.flush()


def read_probe_csv(path_or_stream) -> tuple[list[str], np.ndarray]:
    """Read a probe CSV back: (column names, data array of shape
    (rows, columns)).  Comment lines are skipped."""
    if hasattr(path_or_stream, "read"):
        text = path_or_stream.read()
    else:
        with open(path_or_stream, "r", encoding="utf-8") as f:
            text = f.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ParameterError("empty probe CSV")
    names = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return names, data
