"""Sub-cell conductors: grid-aligned corrected thin wires and staircase
approximations of inclined paths.

Both models force the axial E edges to zero (PEC core) and realize the
requested radius by scaling the surrounding material: the four radial E
edges at each touched node get eps * m and the four circumferential H
faces around each axial edge get mu / m, with

    m = ln(delta / r0) / ln(delta / r)

where r0 = 0.23 * delta is the intrinsic radius of the bare structured
grid (the radius an unmodified forced edge already presents).  A wire with
r = r0 therefore leaves the material untouched.  At the two end nodes of a
segment the radial scaling is applied with half weight in the log domain
(factor sqrt(m)), so two collinear touching segments embed exactly like
one long segment.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .errors import ParameterError
from .grid import MaterialMap, X, Y, Z

INTRINSIC_RADIUS_FACTOR = 0.23

WIRE_MODELS = ("thin", "staircase")


@dataclass(frozen=True)
class WireSegment:
    """One conductor segment.

    ``model``: "thin" (must be axis-aligned with on-grid endpoints) or
    "staircase" (any endpoints, rasterized to axis-aligned runs).
    ``terminal`` marks an end that deliberately stops one cell short so a
    source or lumped element can occupy the gap edge.
    """

    model: str
    start: tuple[float, float, float]
    end: tuple[float, float, float]
    radius: float
    terminal: bool = False

    def __post_init__(self):
        if self.model not in WIRE_MODELS:
            raise ParameterError(f"unknown wire model {self.model!r}")
        if not self.radius > 0.0:
            raise ParameterError("wire radius must be positive")


@dataclass
class ForcedEdges:
    """Per-component E-edge index sets that are clamped to 0 V/m."""

    edges: tuple[set, set, set]

    @classmethod
    def empty(cls) -> "ForcedEdges":
        return cls((set(), set(), set()))

    def add_run(self, axis: int, node: tuple[int, int, int], count: int) -> None:
        i, j, k = node
        for s in range(count):
            idx = [i, j, k]
            idx[axis] += s
            self.edges[axis].add(tuple(idx))

    def merge(self, other: "ForcedEdges") -> None:
        for c in (X, Y, Z):
            self.edges[c] |= other.edges[c]

    def index_arrays(self):
        """Per-component tuples of index arrays for vectorized clamping."""
        out = []
        for c in (X, Y, Z):
            if self.edges[c]:
                arr = np.array(sorted(self.edges[c]), dtype=np.intp)
                out.append((arr[:, 0], arr[:, 1], arr[:, 2]))
            else:
                out.append(None)
        return out

    def contains(self, axis: int, idx: tuple[int, int, int]) -> bool:
        return tuple(idx) in self.edges[axis]


def radius_scale(delta: float, radius: float) -> float:
    """Material scale factor m for a wire of the given radius.

    m(r0) is snapped to exactly 1 so an intrinsic-radius wire leaves the
    material map bit-untouched.
    """
    if not 0.0 < radius < 0.5 * delta:
        raise ParameterError(
            f"wire radius {radius:g} must lie in (0, {0.5 * delta:g}) for a "
            f"{delta:g} m grid"
        )
    r0 = INTRINSIC_RADIUS_FACTOR * delta
    m = log(delta / r0) / log(delta / radius)
    return 1.0 if abs(m - 1.0) < 1e-12 else m


def stability_derating(delta: float, segments) -> float:
    """Time-step derating factor required by the ring-scaled materials.

    An edge with eps scaled by m couples to unscaled faces with a local
    wave-speed ratio sqrt(max(m, 1/m)); the explicit scheme then needs
    dt <= sqrt(2 / (1 + max(m, 1/m))) of the plain Courant limit (measured
    envelope with >= 10% margin).  Returns 1.0 with no wires.
    """
    factor = 1.0
    for seg in segments:
        m = radius_scale(delta, seg.radius)
        q = max(m, 1.0 / m)
        factor = min(factor, sqrt(2.0 / (1.0 + q)))
    return factor


def _snap_node(point, delta: float, tol_cells: float = 0.01):
    idx = []
    for v in point:
        n = v / delta
        r = round(n)
        if abs(n - r) > tol_cells:
            return None
        idx.append(int(r))
    return tuple(idx)


def _check_inside(node, counts, what: str):
    for a in (X, Y, Z):
        if not 0 <= node[a] <= counts[a]:
            raise ParameterError(f"{what} endpoint lies outside the volume")


class _RingScaler:
    """Applies the radial-eps / circumferential-mu scalings with per-pass
    deduplication so corner cells of one segment are never double-scaled."""

    def __init__(self, mat: MaterialMap):
        self.mat = mat
        self.eps_seen: set = set()
        self.mu_seen: set = set()

    def scale_node_ring(self, axis: int, node, factor: float) -> None:
        """Scale eps on the four radial E edges at a wire node."""
        if factor == 1.0:
            return
        i, j, k = node
        for t in [a for a in (X, Y, Z) if a != axis]:
            for side in (-1, 0):
                idx = [i, j, k]
                idx[t] += side
                if idx[t] < 0 or idx[t] >= self.mat.eps[t].shape[t]:
                    continue
                key = (t, tuple(idx))
                if key in self.eps_seen:
                    continue
                self.eps_seen.add(key)
                self.mat.eps[t][tuple(idx)] *= factor

    def scale_level_mu(self, axis: int, edge_node, factor: float) -> None:
        """Scale mu on the four H faces circling one axial edge."""
        if factor == 1.0:
            return
        i, j, k = edge_node
        for t in [a for a in (X, Y, Z) if a != axis]:
            # the circumferential H component at this transverse axis is the
            # one aligned with the remaining axis
            h = [a for a in (X, Y, Z) if a != axis and a != t][0]
            for side in (-1, 0):
                idx = [i, j, k]
                idx[t] += side
                if idx[t] < 0 or idx[t] >= self.mat.mu[h].shape[t]:
                    continue
                key = (h, tuple(idx))
                if key in self.mu_seen:
                    continue
                self.mu_seen.add(key)
                self.mat.mu[h][tuple(idx)] /= factor


def _embed_run(
    mat: MaterialMap,
    scaler: _RingScaler,
    forced: ForcedEdges,
    axis: int,
    start_node,
    count: int,
    m: float,
    cap_start: bool,
    cap_end: bool,
) -> None:
    """Embed one axis-aligned run of ``count`` edges starting at a node."""
    forced.add_run(axis, start_node, count)
    m_end = sqrt(m)
    for s in range(count + 1):
        node = list(start_node)
        node[axis] += s
        is_cap = (s == 0 and cap_start) or (s == count and cap_end)
        scaler.scale_node_ring(axis, tuple(node), m_end if is_cap else m)
    for s in range(count):
        node = list(start_node)
        node[axis] += s
        scaler.scale_level_mu(axis, tuple(node), m)


def embed_wire_grid_aligned(
    mat: MaterialMap, seg: WireSegment, forced: ForcedEdges | None = None
) -> ForcedEdges:
    """Embed an axis-aligned thin wire (in place) and return the forced-edge
    set.  Endpoints must sit on grid lines within delta/100."""
    delta = mat.delta
    m = radius_scale(delta, seg.radius)
    a = _snap_node(seg.start, delta)
    b = _snap_node(seg.end, delta)
    if a is None or b is None:
        raise ParameterError("thin-wire endpoints must lie on grid lines")
    diff = [abs(b[i] - a[i]) for i in (X, Y, Z)]
    axes = [i for i in (X, Y, Z) if diff[i] != 0]
    if len(axes) != 1:
        raise ParameterError("thin wire must run along exactly one grid axis")
    axis = axes[0]
    _check_inside(a, mat.counts, "wire")
    _check_inside(b, mat.counts, "wire")
    lo = min(a[axis], b[axis])
    start = list(a)
    start[axis] = lo
    if forced is None:
        forced = ForcedEdges.empty()
    scaler = _RingScaler(mat)
    _embed_run(mat, scaler, forced, axis, tuple(start), diff[axis], m, True, True)
    return forced


def _staircase_nodes(a, b) -> list[tuple[int, int, int]]:
    """Monotone lattice walk from node a to node b, stepping one axis at a
    time, choosing the axis whose grid-plane crossing comes first along the
    ideal straight segment."""
    node = list(a)
    steps = [b[i] - a[i] for i in (X, Y, Z)]
    total = sum(abs(s) for s in steps)
    path = [tuple(node)]
    done = [0, 0, 0]
    for _ in range(total):
        best_axis, best_t = None, None
        for ax in (X, Y, Z):
            if done[ax] == abs(steps[ax]):
                continue
            # parameter along the segment at which the next plane is crossed
            t = (done[ax] + 0.5) / abs(steps[ax])
            if best_t is None or t < best_t - 1e-12 or (
                abs(t - best_t) <= 1e-12 and ax < best_axis
            ):
                best_axis, best_t = ax, t
        node[best_axis] += 1 if steps[best_axis] > 0 else -1
        done[best_axis] += 1
        path.append(tuple(node))
    return path


def embed_wire_staircase(
    mat: MaterialMap, seg: WireSegment, forced: ForcedEdges | None = None
) -> ForcedEdges:
    """Rasterize an arbitrary segment into axis-aligned edge runs and embed
    each run with the staircase intrinsic radius 0.23*delta.  Endpoints snap
    to the nearest grid node."""
    delta = mat.delta
    m = radius_scale(delta, seg.radius)
    a = _snap_node(seg.start, delta, tol_cells=0.5 + 1e-9)
    b = _snap_node(seg.end, delta, tol_cells=0.5 + 1e-9)
    _check_inside(a, mat.counts, "wire")
    _check_inside(b, mat.counts, "wire")
    if a == b:
        raise ParameterError("staircase wire has zero length after snapping")
    path = _staircase_nodes(a, b)
    if forced is None:
        forced = ForcedEdges.empty()
    scaler = _RingScaler(mat)
    # merge consecutive same-axis steps into runs
    runs = []
    s = 0
    while s < len(path) - 1:
        axis = [ax for ax in (X, Y, Z) if path[s + 1][ax] != path[s][ax]][0]
        e = s + 1
        while e < len(path) - 1 and [
            ax for ax in (X, Y, Z) if path[e + 1][ax] != path[e][ax]
        ][0] == axis:
            e += 1
        runs.append((axis, path[s], path[e]))
        s = e
    for ri, (axis, p, q) in enumerate(runs):
        lo_node = list(p)
        lo_node[axis] = min(p[axis], q[axis])
        count = abs(q[axis] - p[axis])
        cap_start = ri == 0 and p == path[0]
        cap_end = ri == len(runs) - 1 and q == path[-1]
        _embed_run(mat, scaler, forced, axis, tuple(lo_node), count, m,
                   cap_start, cap_end)
    return forced


def embed_wires(mat: MaterialMap, segments) -> ForcedEdges:
    """Embed a list of segments, skipping exact duplicates (idempotence)."""
    forced = ForcedEdges.empty()
    seen = set()
    for seg in segments:
        key = (seg.model, seg.start, seg.end, seg.radius)
        alt = (seg.model, seg.end, seg.start, seg.radius)
        if key in seen or alt in seen:
            continue
        seen.add(key)
        if seg.model == "thin":
            embed_wire_grid_aligned(mat, seg, forced)
        else:
            embed_wire_staircase(mat, seg, forced)
    return forced


def axial_edges(seg: WireSegment, delta: float) -> list[tuple[int, tuple[int, int, int]]]:
    """(component, edge-index) list a segment would force, without touching
    materials.  Used by model validation."""
    out = []
    if seg.model == "thin":
        a = _snap_node(seg.start, delta)
        b = _snap_node(seg.end, delta)
        if a is None or b is None:
            raise ParameterError("thin-wire endpoints must lie on grid lines")
        diff = [abs(b[i] - a[i]) for i in (X, Y, Z)]
        axes = [i for i in (X, Y, Z) if diff[i] != 0]
        if len(axes) != 1:
            raise ParameterError("thin wire must run along exactly one grid axis")
        axis = axes[0]
        lo = min(a[axis], b[axis])
        for s in range(diff[axis]):
            idx = list(a)
            idx[axis] = lo + s
            out.append((axis, tuple(idx)))
        return out
    a = _snap_node(seg.start, delta, tol_cells=0.5 + 1e-9)
    b = _snap_node(seg.end, delta, tol_cells=0.5 + 1e-9)
    path = _staircase_nodes(a, b)
    for p, q in zip(path[:-1], path[1:]):
        axis = [ax for ax in (X, Y, Z) if q[ax] != p[ax]][0]
        idx = list(p)
        idx[axis] = min(p[axis], q[axis])
        out.append((axis, tuple(idx)))
    return out
