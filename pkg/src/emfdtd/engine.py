"""Run assembly and the leapfrog time loop.

A :class:`Simulation` owns the field arrays, precomputed update factors,
absorbing layers, dispersive-pole state, forced wire edges, sources, and
probes.  One step is::

    record probes            (E at n dt, H at (n-1/2) dt)
    H sweep + psi            (H -> n+1/2)
    gather E on tagged edges
    E sweep + psi            (E -> n+1)
    sources                  (currents at (n+1/2) dt, assignments at (n+1) dt)
    force wire edges to 0
    polarization currents    (uses final E)

The curl sweeps may be split across worker threads along the x axis; every
edge sees identical arithmetic for any split, so results are bit-identical
for any worker count.  Everything else runs on the coordinating thread.
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import grid as _grid
from .cpml import ALL_FACES, CpmlParams, CpmlRegion
from .debye import AdeState, debye_a_extra
from .errors import ParameterError, RunAborted
from .grid import FieldSet, GridSpec, MaterialMap, X, Y, Z
from .probes import EdgeRef, PathRef, Probe, measure_current, measure_voltage
from .sources import BoundSource, LumpedElement, Source
from .wires import WireSegment, embed_wires

SNAP_TOL_CELLS = 0.01  # meter coordinates may be off-grid by delta/100


def snap_index(value: float, delta: float, what: str = "coordinate") -> int:
    n = value / delta
    r = round(n)
    if abs(n - r) > SNAP_TOL_CELLS:
        raise ParameterError(f"{what} {value:g} m is not on the {delta:g} m grid")
    return int(r)


def resolve_edge(span, delta: float, what: str = "edge") -> EdgeRef:
    """Two meter points one cell apart along a single axis -> EdgeRef."""
    a = tuple(snap_index(v, delta, what) for v in span[0])
    b = tuple(snap_index(v, delta, what) for v in span[1])
    diff = [b[i] - a[i] for i in (X, Y, Z)]
    axes = [i for i in (X, Y, Z) if diff[i] != 0]
    if len(axes) != 1 or abs(diff[axes[0]]) != 1:
        raise ParameterError(f"{what} span must cover exactly one grid edge")
    c = axes[0]
    idx = list(a)
    idx[c] = min(a[c], b[c])
    return EdgeRef(component=c, index=tuple(idx), sign=1.0 if diff[c] > 0 else -1.0)


def resolve_path(span, delta: float, what: str = "path") -> PathRef:
    """Two meter points along a single axis -> chain of edges."""
    a = tuple(snap_index(v, delta, what) for v in span[0])
    b = tuple(snap_index(v, delta, what) for v in span[1])
    diff = [b[i] - a[i] for i in (X, Y, Z)]
    axes = [i for i in (X, Y, Z) if diff[i] != 0]
    if len(axes) != 1:
        raise ParameterError(f"{what} must run along exactly one grid axis")
    c = axes[0]
    start = list(a)
    start[c] = min(a[c], b[c])
    return PathRef(
        component=c,
        start=tuple(start),
        count=abs(diff[c]),
        sign=1.0 if diff[c] > 0 else -1.0,
    )


@dataclass
class RunConfig:
    """CLI-facing run options."""

    model_path: str
    output_path: str
    threads: int = 1
    cfl_override: float | None = None
    seed: int = 0
    progress: bool = False

    def __post_init__(self):
        if not self.model_path or not self.output_path:
            raise ParameterError("model and output paths must be nonempty")
        if self.threads < 0:
            raise ParameterError("threads must be >= 0")
        if self.cfl_override is not None and not 0.0 < self.cfl_override <= 1.0:
            raise ParameterError("CFL override must be in (0, 1]")


class Simulation:
    """A fully assembled run (see module docstring for the step order)."""

    def __init__(
        self,
        spec: GridSpec,
        materials: MaterialMap,
        cpml: CpmlParams | None = None,
        faces: tuple[str, ...] = ALL_FACES,
        wire_segments: tuple[WireSegment, ...] = (),
        sources: tuple[Source, ...] = (),
        lumped: tuple[LumpedElement, ...] = (),
        probes: tuple[Probe, ...] = (),
        record_every: int = 0,
    ):
        if materials.counts != (spec.nx, spec.ny, spec.nz):
            raise ParameterError("material map does not match the grid")
        self.spec = spec
        self.materials = materials
        self.fields = FieldSet.zeros(spec)
        self.record_every = int(record_every)
        self.step_index = 0

        self.region = None
        npml = 0
        if cpml is not None:
            self.region = CpmlRegion(
                cpml, materials.counts, spec.delta, spec.dt, faces
            )
            npml = self.region.npml
            materials.continue_into_shell(npml, faces)
        self.npml = npml

        self.forced = embed_wires(materials, wire_segments)
        self._forced_idx = self.forced.index_arrays()

        # lumped elements and source conductances become edge materials
        self._bound_sources: list[BoundSource] = []
        pending_sources = []
        for s in sources:
            edge = resolve_edge(s.span, spec.delta, f"{s.kind} source")
            self._require_interior(edge, f"{s.kind} source")
            if self.forced.contains(edge.component, edge.index):
                raise ParameterError(
                    f"{s.kind} source sits on a wire-forced edge at {s.span[0]}"
                )
            if s.kind in ("current", "voltage") and s.r_internal > 0.0:
                materials.sigma[edge.component][edge.index] += 1.0 / (
                    s.r_internal * spec.delta
                )
            pending_sources.append((s, edge))
        for el in lumped:
            edge = resolve_edge(el.span, spec.delta, el.kind)
            if self.forced.contains(edge.component, edge.index):
                raise ParameterError(f"{el.kind} sits on a wire-forced edge")
            if el.kind == "resistor":
                materials.sigma[edge.component][edge.index] += 1.0 / (
                    el.value * spec.delta
                )
            else:
                materials.eps[edge.component][edge.index] += el.value / spec.delta

        # dispersive state, then final update factors
        self.ade = AdeState.build(materials, spec.dt)
        extra = debye_a_extra(materials, spec.dt)
        inv_de = self.region.inv_de if self.region else None
        inv_dh = self.region.inv_dh if self.region else None
        self.coef = _grid.build_coefficients(
            materials, spec.dt, debye_a_extra=extra, inv_de=inv_de, inv_dh=inv_dh
        )
        self.ade.bind_cb(self.coef.cb)
        if not self.ade.groups:
            self.ade = None

        for s, edge in pending_sources:
            shifted = tuple(
                v if ax == edge.component else v - 1
                for ax, v in enumerate(edge.index)
            )
            cb_edge = float(self.coef.cb[edge.component][shifted])
            self._bound_sources.append(
                BoundSource(
                    kind=s.kind,
                    component=edge.component,
                    index=edge.index,
                    sign=edge.sign,
                    waveform=s.waveform,
                    r_internal=s.r_internal,
                    cb_edge=cb_edge,
                    delta=spec.delta,
                )
            )

        self._probes: list[tuple[Probe, object]] = []
        for p in probes:
            if p.kind == "current":
                ref = resolve_edge(p.span, spec.delta, "current probe")
                self._require_interior(ref, "current probe")
            else:
                ref = resolve_path(p.span, spec.delta, "voltage probe")
                self._require_interior(ref, "voltage probe")
            self._probes.append((p, ref))

    # -- geometry guards ----------------------------------------------------

    def _require_interior(self, ref, what: str) -> None:
        """Sources and probes must stay out of the absorbing shell."""
        npml = self.npml
        if npml == 0:
            return
        nodes = []
        if isinstance(ref, EdgeRef):
            nodes.append(ref.index)
            hi = list(ref.index)
            hi[ref.component] += 1
            nodes.append(tuple(hi))
        else:
            nodes.append(ref.start)
            hi = list(ref.start)
            hi[ref.component] += ref.count
            nodes.append(tuple(hi))
        faces = self.region.faces if self.region else ()
        for node in nodes:
            for ax, n in enumerate(self.materials.counts):
                lo = npml if f"{'xyz'[ax]}-" in faces else 0
                hi = n - npml if f"{'xyz'[ax]}+" in faces else n
                if not lo <= node[ax] <= hi:
                    raise ParameterError(f"{what} lies inside the absorbing layer")

    # -- measurements --------------------------------------------------------

    @property
    def probe_names(self) -> list[str]:
        return [p.name for p, _ in self._probes]

    def probe_values(self) -> list[float]:
        out = []
        for p, ref in self._probes:
            if p.kind == "current":
                out.append(measure_current(self.fields, ref, self.spec.delta))
            else:
                out.append(measure_voltage(self.fields, ref, self.spec.delta))
        return out

    # -- stepping ------------------------------------------------------------

    def _run_phase(self, kernel_args, pool, threads: int) -> None:
        if pool is None:
            for kernel, args, lo, hi in kernel_args:
                kernel(*args, lo, hi)
            return
        tasks = []
        for kernel, args, lo, hi in kernel_args:
            span = hi - lo
            bounds = [lo + (span * t) // threads for t in range(threads + 1)]
            for t in range(threads):
                if bounds[t + 1] > bounds[t]:
                    tasks.append(pool.submit(kernel, *args, bounds[t], bounds[t + 1]))
        for t in tasks:
            t.result()

    def step(self, pool=None, threads: int = 1) -> None:
        fields, coef = self.fields, self.coef
        self._run_phase(_grid.h_kernel_args(fields, coef), pool, threads)
        if self.region is not None:
            self.region.apply_h(fields, coef)

        e_prev = self.ade.gather_e_prev(fields) if self.ade else None
        self._run_phase(_grid.e_kernel_args(fields, coef), pool, threads)
        if self.region is not None:
            self.region.apply_e(fields, coef)

        n = self.step_index
        dt = self.spec.dt
        if self._bound_sources:
            from .sources import apply_sources

            apply_sources(fields, self._bound_sources, (n + 0.5) * dt, (n + 1) * dt)
        for c, idx in enumerate(self._forced_idx):
            if idx is not None:
                fields.e(c)[idx] = 0.0
        if self.ade is not None:
            self.ade.finish_step(fields, e_prev)
        self.step_index += 1

    def run(
        self,
        threads: int = 1,
        on_record=None,
        progress: bool = False,
        nan_check: bool = True,
    ) -> np.ndarray:
        """Run the configured number of steps; returns the record table
        (time plus one column per probe)."""
        if threads == 0:
            threads = os.cpu_count() or 1
        n_steps = self.spec.n_steps
        every = self.record_every if self.record_every > 0 else max(n_steps, 1)
        records = []

        def emit(step: int) -> None:
            t = step * self.spec.dt
            values = self.probe_values()
            if nan_check and not all(np.isfinite(v) for v in values):
                raise RunAborted(step, f"non-finite probe value at step {step}")
            records.append([t, *values])
            if on_record is not None:
                on_record(t, values)

        pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
        try:
            next_progress = 0.05
            for n in range(n_steps + 1):
                if n % every == 0:
                    emit(n)
                if n == n_steps:
                    break
                self.step(pool, threads)
                if nan_check and n % 500 == 499 and not self.fields.all_finite():
                    raise RunAborted(n, f"non-finite field detected at step {n}")
                if progress and (n + 1) / n_steps >= next_progress:
                    pct = int(100 * (n + 1) / n_steps)
                    print(f"run: {pct}% (step {n + 1}/{n_steps})", file=sys.stderr)
                    next_progress += 0.05
        finally:
            if pool is not None:
                pool.shutdown(wait=False)
        return np.array(records)


def build_simulation(model, cfl_override: float | None = None) -> Simulation:
    """Assemble a Simulation from a validated model (see model module)."""
    spec = model.grid if cfl_override is None else model.grid_with_cfl(cfl_override)
    mat = MaterialMap(spec.nx, spec.ny, spec.nz, spec.delta)
    for medium in model.debye_media.values():
        mat.add_debye_medium(medium)
    for blk in model.blocks:
        mat.paint_block(blk.lo, blk.hi, blk.eps_r, blk.sigma, blk.debye_name)
    k = max(1, int(round(model.output_interval / spec.dt)))
    return Simulation(
        spec=spec,
        materials=mat,
        cpml=model.cpml,
        wire_segments=tuple(model.wires),
        sources=tuple(model.sources),
        probes=tuple(model.probes),
        record_every=k,
    )
