"""The plain-text model language: parsing, validation, serialization.

One command per line::

    keyword (arg, arg, ...)

Blank lines and ``#`` comments are skipped.  Arguments are numbers
(scientific notation accepted), identifiers, or bracketed sample lists
``[v0, v1, ...]`` (commas or spaces).  Keywords:

    volume (lx, ly, lz, delta)
    calctime (seconds)
    output (record interval, seconds)
    abc (cpml, depth_m, kappa_max, sigma_factor, alpha_max, poly_order, alpha_order)
    block (x1, y1, z1, x2, y2, z2, eps_r, sigma[, debye_name])
    debye (name, d_eps1, tau1[, d_eps2, tau2[, ...]])            up to 4 pairs
    wire (thin|staircase, x1, y1, z1, x2, y2, z2, radius[, t])
    source (current|voltage|hard_e|soft_e, x1,y1,z1, x2,y2,z2, r_internal, fn_name)
    calculate (current|voltage, x1, y1, z1, x2, y2, z2)
    function (name, heidler, i0, tau1, tau2, n[, i0, tau1, tau2, n ...])
    function (name, custom, sample_dt, [v0 v1 ...])

Coordinates are meters; they snap to the grid within delta/100.  Parsing
collects every problem instead of stopping at the first; validation then
cross-checks the whole model and reports each violation with its line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .cpml import CpmlParams
from .debye import DebyeMedium
from .errors import Diagnostic, ParameterError, ValidationError
from .grid import GridSpec, courant_dt
from .probes import Probe
from .sources import HeidlerTerm, Source, Waveform
from .wires import WireSegment, axial_edges, stability_derating

KEYWORDS = (
    "volume", "calctime", "output", "abc", "block",
    "debye", "wire", "source", "calculate", "function",
)

_ARITY = {
    "volume": (4, 4),
    "calctime": (1, 1),
    "output": (1, 1),
    "abc": (7, 7),
    "block": (8, 9),
    "debye": (3, 9),
    "wire": (8, 9),
    "source": (9, 9),
    "calculate": (7, 7),
    "function": (3, None),
}

DEFAULT_CFL = 0.99

_LINE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*$")
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Command:
    keyword: str
    args: tuple
    line: int


@dataclass(frozen=True)
class Block:
    lo: tuple[float, float, float]
    hi: tuple[float, float, float]
    eps_r: float
    sigma: float
    debye_name: str | None
    line: int = 0


@dataclass
class Model:
    """Validated, runnable form of a model file."""

    extent: tuple[float, float, float]
    delta: float
    calctime: float
    output_interval: float
    cpml: CpmlParams
    blocks: list[Block]
    debye_media: dict[str, DebyeMedium]
    waveforms: dict[str, Waveform]
    wires: list[WireSegment]
    sources: list[Source]
    probes: list[Probe]
    grid: GridSpec = None

    def grid_with_cfl(self, cfl: float) -> GridSpec:
        derate = stability_derating(self.delta, self.wires)
        dt, n_steps, _ = run_timing(
            self.delta, self.calctime, self.output_interval, cfl * derate
        )
        return GridSpec(self.grid.nx, self.grid.ny, self.grid.nz, self.delta, dt, n_steps)


def run_timing(delta: float, calctime: float, output_interval: float, cfl: float = DEFAULT_CFL):
    """(dt, n_steps, steps_per_record): dt is the Courant-limited step
    snapped down so the record interval is a whole number of steps and
    calctime is covered by whole steps."""
    dt0 = courant_dt(delta, cfl)
    k = max(1, math.ceil(output_interval / dt0 * (1.0 - 1e-12)))
    dt = output_interval / k
    n_steps = max(1, math.ceil(calctime / dt * (1.0 - 1e-9)))
    return dt, n_steps, k


# ---------------------------------------------------------------------------
# Parsing


def _split_args(body: str):
    """Split a command body on top-level commas; bracket groups stay whole."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _parse_token(tok: str):
    """number | identifier | list of numbers/identifiers | None on error."""
    if tok.startswith("[") and tok.endswith("]"):
        inner = tok[1:-1].replace(",", " ").split()
        out = []
        for item in inner:
            out.append(float(item) if _NUMBER_RE.match(item) else item)
        return tuple(out)
    if _NUMBER_RE.match(tok):
        return float(tok)
    if _IDENT_RE.match(tok):
        return tok
    return None


def parse(text: str) -> tuple[list[Command], list[Diagnostic]]:
    """Parse model text into commands, collecting all syntax problems."""
    commands: list[Command] = []
    diagnostics: list[Diagnostic] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE_RE.match(raw)
        if not m:
            diagnostics.append(
                Diagnostic(lineno, 1, "expected 'keyword (arg, arg, ...)'")
            )
            continue
        keyword = m.group(1)
        if keyword not in KEYWORDS:
            diagnostics.append(
                Diagnostic(lineno, raw.index(keyword) + 1, f"unknown keyword {keyword!r}")
            )
            continue
        body = m.group(2).strip()
        args = []
        ok = True
        if body:
            for tok in _split_args(body):
                if not tok:
                    diagnostics.append(Diagnostic(lineno, 1, "empty argument"))
                    ok = False
                    continue
                parsed = _parse_token(tok)
                if parsed is None:
                    col = raw.index(tok) + 1 if tok in raw else 1
                    diagnostics.append(
                        Diagnostic(lineno, col, f"cannot parse argument {tok!r}")
                    )
                    ok = False
                else:
                    args.append(parsed)
        lo, hi = _ARITY[keyword]
        if ok and (len(args) < lo or (hi is not None and len(args) > hi)):
            expect = f"{lo}" if hi == lo else (f"{lo}..{hi}" if hi else f">= {lo}")
            diagnostics.append(
                Diagnostic(
                    lineno, 1,
                    f"{keyword} takes {expect} arguments, got {len(args)}",
                )
            )
            ok = False
        if ok:
            commands.append(Command(keyword, tuple(args), lineno))
    return commands, diagnostics


# ---------------------------------------------------------------------------
# Validation


class _Checker:
    def __init__(self):
        self.diags: list[Diagnostic] = []

    def error(self, line: int, message: str) -> None:
        self.diags.append(Diagnostic(line, 1, message))

    def numbers(self, cmd: Command, idx, what: str):
        out = []
        for i in idx:
            v = cmd.args[i]
            if not isinstance(v, float):
                self.error(cmd.line, f"{what}: argument {i + 1} must be a number")
                return None
            out.append(v)
        return out


def validate(commands: list[Command]) -> Model:
    """Cross-check commands and build a Model; raises ValidationError with
    every violated rule."""
    ck = _Checker()
    by_kw: dict[str, list[Command]] = {k: [] for k in KEYWORDS}
    for cmd in commands:
        by_kw[cmd.keyword].append(cmd)

    for kw in ("volume", "calctime", "output", "abc"):
        if len(by_kw[kw]) == 0:
            ck.error(0, f"model needs exactly one {kw} command, found none")
        elif len(by_kw[kw]) > 1:
            dup = by_kw[kw][1]
            ck.error(dup.line, f"duplicate {kw} command (first on line {by_kw[kw][0].line})")

    if ck.diags and not (by_kw["volume"] and by_kw["calctime"] and by_kw["output"] and by_kw["abc"]):
        raise ValidationError(ck.diags)

    vol = by_kw["volume"][0]
    extent_delta = ck.numbers(vol, range(4), "volume")
    counts = None
    delta = None
    if extent_delta:
        lx, ly, lz, delta = extent_delta
        if delta <= 0 or min(lx, ly, lz) <= 0:
            ck.error(vol.line, "volume dimensions and cell size must be positive")
            delta = None
        else:
            counts = []
            for L, name in ((lx, "x"), (ly, "y"), (lz, "z")):
                n = L / delta
                if abs(n - round(n)) > 0.01:
                    ck.error(
                        vol.line,
                        f"extent {L:g} m along {name} is not a whole number of {delta:g} m cells",
                    )
                counts.append(int(round(n)))
            if counts and min(counts) < 4:
                ck.error(vol.line, "volume must span at least 4 cells per axis")

    calccmd = by_kw["calctime"][0]
    calctime_v = ck.numbers(calccmd, [0], "calctime")
    calctime = calctime_v[0] if calctime_v else None
    if calctime is not None and calctime <= 0:
        ck.error(calccmd.line, "calctime must be positive")
        calctime = None

    outcmd = by_kw["output"][0]
    out_v = ck.numbers(outcmd, [0], "output")
    output_interval = out_v[0] if out_v else None
    if output_interval is not None and output_interval <= 0:
        ck.error(outcmd.line, "output interval must be positive")
        output_interval = None

    abccmd = by_kw["abc"][0]
    cpml = None
    if not isinstance(abccmd.args[0], str) or abccmd.args[0] != "cpml":
        ck.error(abccmd.line, "abc type must be 'cpml'")
    else:
        nums = ck.numbers(abccmd, range(1, 7), "abc")
        if nums:
            try:
                cpml = CpmlParams(
                    depth_m=nums[0], kappa_max=nums[1], sigma_factor=nums[2],
                    alpha_max=nums[3], poly_order=nums[4], alpha_order=nums[5],
                )
                cpml.validate()
                if delta is not None:
                    npml = cpml.cells(delta)
                    if counts and 2 * npml >= min(counts):
                        ck.error(abccmd.line, "absorbing layers leave no interior")
            except ParameterError as exc:
                ck.error(abccmd.line, str(exc))
                cpml = None

    debye_media: dict[str, DebyeMedium] = {}
    debye_lines: dict[str, int] = {}
    for cmd in by_kw["debye"]:
        if not isinstance(cmd.args[0], str):
            ck.error(cmd.line, "debye: first argument must be a name")
            continue
        name = cmd.args[0]
        rest = cmd.args[1:]
        if len(rest) % 2 != 0 or not rest:
            ck.error(cmd.line, f"debye {name}: pole arguments must be (d_eps, tau) pairs")
            continue
        if name in debye_media:
            ck.error(cmd.line, f"debye {name} already defined on line {debye_lines[name]}")
            continue
        nums = ck.numbers(cmd, range(1, len(cmd.args)), f"debye {name}")
        if nums is None:
            continue
        poles = tuple((nums[i], nums[i + 1]) for i in range(0, len(nums), 2))
        try:
            # eps_inf/sigma0 come from the block that references this medium;
            # placeholder values here only validate the poles
            debye_media[name] = DebyeMedium(name=name, eps_inf=1.0, sigma0=0.0, poles=poles)
            debye_lines[name] = cmd.line
        except ParameterError as exc:
            ck.error(cmd.line, str(exc))

    blocks: list[Block] = []
    for cmd in by_kw["block"]:
        nums = ck.numbers(cmd, range(8), "block")
        if nums is None:
            continue
        x1, y1, z1, x2, y2, z2, eps_r, sigma = nums
        debye_name = None
        if len(cmd.args) == 9:
            if not isinstance(cmd.args[8], str):
                ck.error(cmd.line, "block: dispersive medium reference must be a name")
                continue
            debye_name = cmd.args[8]
        lo = (min(x1, x2), min(y1, y2), min(z1, z2))
        hi = (max(x1, x2), max(y1, y2), max(z1, z2))
        if eps_r < 1.0:
            ck.error(cmd.line, "block: relative permittivity must be >= 1")
            continue
        if sigma < 0.0:
            ck.error(cmd.line, "block: conductivity must be >= 0")
            continue
        if extent_delta:
            for a, name in ((0, "x"), (1, "y"), (2, "z")):
                if lo[a] < -1e-9 or hi[a] > extent_delta[a] + 1e-9:
                    ck.error(cmd.line, f"block leaves the volume along {name}")
        blocks.append(Block(lo, hi, eps_r, sigma, debye_name, cmd.line))

    for blk in blocks:
        if blk.debye_name is not None and blk.debye_name not in debye_media:
            ck.error(blk.line, f"block references undefined debye medium {blk.debye_name!r}")

    # attach eps_inf / sigma0 from the first referencing block to each medium
    for name in list(debye_media):
        for blk in blocks:
            if blk.debye_name == name:
                try:
                    debye_media[name] = DebyeMedium(
                        name=name, eps_inf=blk.eps_r, sigma0=blk.sigma,
                        poles=debye_media[name].poles,
                    )
                except ParameterError as exc:
                    ck.error(blk.line, str(exc))
                break

    waveforms: dict[str, Waveform] = {}
    fn_lines: dict[str, int] = {}
    for cmd in by_kw["function"]:
        if not isinstance(cmd.args[0], str) or not isinstance(cmd.args[1], str):
            ck.error(cmd.line, "function: expected (name, kind, ...)")
            continue
        name, kind = cmd.args[0], cmd.args[1]
        if name in waveforms:
            ck.error(cmd.line, f"function {name} already defined on line {fn_lines[name]}")
            continue
        if kind == "heidler":
            rest = cmd.args[2:]
            if len(rest) % 4 != 0 or not rest:
                ck.error(
                    cmd.line,
                    f"function {name}: heidler takes (i0, tau1, tau2, n) groups",
                )
                continue
            if not all(isinstance(v, float) for v in rest):
                ck.error(cmd.line, f"function {name}: heidler arguments must be numbers")
                continue
            try:
                terms = tuple(
                    HeidlerTerm(rest[i], rest[i + 1], rest[i + 2], rest[i + 3])
                    for i in range(0, len(rest), 4)
                )
                waveforms[name] = Waveform(kind="heidler_sum", terms=terms)
                fn_lines[name] = cmd.line
            except ParameterError as exc:
                ck.error(cmd.line, str(exc))
        elif kind == "custom":
            if len(cmd.args) != 4 or not isinstance(cmd.args[2], float) or not isinstance(cmd.args[3], tuple):
                ck.error(cmd.line, f"function {name}: custom takes (sample_dt, [samples])")
                continue
            samples = cmd.args[3]
            if not samples or not all(isinstance(v, float) for v in samples):
                ck.error(cmd.line, f"function {name}: sample list must be nonempty numbers")
                continue
            try:
                waveforms[name] = Waveform(
                    kind="sampled", sample_dt=cmd.args[2], samples=tuple(samples)
                )
                fn_lines[name] = cmd.line
            except ParameterError as exc:
                ck.error(cmd.line, str(exc))
        else:
            ck.error(cmd.line, f"function {name}: unknown kind {kind!r}")

    wires_list: list[WireSegment] = []
    wire_lines: list[int] = []
    for cmd in by_kw["wire"]:
        if not isinstance(cmd.args[0], str):
            ck.error(cmd.line, "wire: first argument must be the model name")
            continue
        model_name = cmd.args[0]
        nums = ck.numbers(cmd, range(1, 8), "wire")
        if nums is None:
            continue
        terminal = False
        if len(cmd.args) == 9:
            if cmd.args[8] != "t":
                ck.error(cmd.line, "wire: trailing flag must be 't'")
                continue
            terminal = True
        try:
            seg = WireSegment(
                model=model_name,
                start=tuple(nums[0:3]),
                end=tuple(nums[3:6]),
                radius=nums[6],
                terminal=terminal,
            )
            wires_list.append(seg)
            wire_lines.append(cmd.line)
        except ParameterError as exc:
            ck.error(cmd.line, str(exc))

    sources_list: list[Source] = []
    source_lines: list[int] = []
    for cmd in by_kw["source"]:
        if not isinstance(cmd.args[0], str):
            ck.error(cmd.line, "source: first argument must be the source kind")
            continue
        kind = cmd.args[0]
        nums = ck.numbers(cmd, range(1, 8), "source")
        if nums is None:
            continue
        if not isinstance(cmd.args[8], str):
            ck.error(cmd.line, "source: last argument must be a function name")
            continue
        fn_name = cmd.args[8]
        try:
            src = Source(
                kind=kind,
                span=(tuple(nums[0:3]), tuple(nums[3:6])),
                r_internal=nums[6],
                waveform=Waveform(kind="sampled", sample_dt=1.0, samples=(0.0,)),
            )
        except ParameterError as exc:
            ck.error(cmd.line, str(exc))
            continue
        sources_list.append((src, fn_name))
        source_lines.append(cmd.line)

    probes_list: list[Probe] = []
    probe_lines: list[int] = []
    counters = {"current": 0, "voltage": 0}
    for cmd in by_kw["calculate"]:
        if not isinstance(cmd.args[0], str) or cmd.args[0] not in ("current", "voltage"):
            ck.error(cmd.line, "calculate: kind must be 'current' or 'voltage'")
            continue
        kind = cmd.args[0]
        nums = ck.numbers(cmd, range(1, 7), "calculate")
        if nums is None:
            continue
        name = f"{kind}{counters[kind]}"
        counters[kind] += 1
        probes_list.append(Probe(kind=kind, span=(tuple(nums[0:3]), tuple(nums[3:6])), name=name))
        probe_lines.append(cmd.line)

    # resolve function references
    resolved_sources: list[Source] = []
    for (src, fn_name), line in zip(sources_list, source_lines):
        if fn_name not in waveforms:
            ck.error(line, f"source references undefined function {fn_name!r}")
            continue
        resolved_sources.append(
            Source(kind=src.kind, span=src.span, r_internal=src.r_internal,
                   waveform=waveforms[fn_name])
        )

    if delta is None or calctime is None or output_interval is None or cpml is None or counts is None or ck.diags:
        if ck.diags:
            raise ValidationError(ck.diags)
        raise ValidationError([Diagnostic(0, 1, "model incomplete")])

    extent = (counts[0] * delta, counts[1] * delta, counts[2] * delta)
    npml = cpml.cells(delta)

    # geometric cross checks (grid snapping, interior placement, wire gaps)
    def snapped(p, line, what):
        out = []
        for v in p:
            n = v / delta
            r = round(n)
            if abs(n - r) > 0.01:
                ck.error(line, f"{what}: coordinate {v:g} m is off-grid (> delta/100)")
                return None
            out.append(int(r))
        return tuple(out)

    forced_edges = set()
    wire_end_nodes = set()
    terminal_nodes = set()
    for seg, line in zip(wires_list, wire_lines):
        for a, p in ((0, seg.start), (1, seg.end)):
            node = snapped(p, line, "wire") if seg.model == "thin" else tuple(
                int(round(v / delta)) for v in p
            )
            if node is None:
                break
            for ax in range(3):
                if not 0 <= node[ax] <= counts[ax]:
                    ck.error(line, "wire leaves the volume")
                    break
            wire_end_nodes.add(node)
            if seg.terminal:
                terminal_nodes.add(node)
        try:
            for comp, idx in axial_edges(seg, delta):
                forced_edges.add((comp, idx))
        except ParameterError as exc:
            ck.error(line, str(exc))

    def on_boundary(node):
        return any(node[ax] in (0, counts[ax]) for ax in range(3))

    def in_interior(node):
        return all(npml <= node[ax] <= counts[ax] - npml for ax in range(3))

    for (src), line in zip(resolved_sources, source_lines):
        a = snapped(src.span[0], line, "source")
        b = snapped(src.span[1], line, "source")
        if a is None or b is None:
            continue
        diff = [abs(b[i] - a[i]) for i in range(3)]
        if sorted(diff) != [0, 0, 1]:
            ck.error(line, "source span must cover exactly one grid edge")
            continue
        comp = diff.index(1)
        lower = tuple(min(a[i], b[i]) if i == comp else a[i] for i in range(3))
        if (comp, lower) in forced_edges:
            ck.error(line, "source sits on a wire-forced edge")
        if not (in_interior(a) and in_interior(b)):
            ck.error(line, "source lies inside the absorbing layer")
        if wires_list and src.kind in ("current", "voltage"):
            if not (a in terminal_nodes or b in terminal_nodes
                    or on_boundary(a) or on_boundary(b)):
                ck.error(
                    line,
                    "current/voltage source gap must adjoin a terminal-flagged "
                    "wire end (or the domain boundary)",
                )

    for probe, line in zip(probes_list, probe_lines):
        a = snapped(probe.span[0], line, "calculate")
        b = snapped(probe.span[1], line, "calculate")
        if a is None or b is None:
            continue
        diff = [abs(b[i] - a[i]) for i in range(3)]
        nz = [i for i in range(3) if diff[i] != 0]
        if probe.kind == "current" and sorted(diff) != [0, 0, 1]:
            ck.error(line, "current probe must cover exactly one grid edge")
            continue
        if probe.kind == "voltage" and len(nz) != 1:
            ck.error(line, "voltage probe path must follow one grid axis")
            continue
        if not (in_interior(a) and in_interior(b)):
            ck.error(line, "probe lies inside the absorbing layer")
        if wires_list and sum(diff) == 1:
            comp = diff.index(1)
            lower = tuple(min(a[i], b[i]) if i == comp else a[i] for i in range(3))
            touches_wire = (comp, lower) in forced_edges
            if not (touches_wire or a in wire_end_nodes or b in wire_end_nodes
                    or on_boundary(a) or on_boundary(b)):
                ck.error(line, "probe gap must adjoin a wire end (or the domain boundary)")

    if ck.diags:
        raise ValidationError(ck.diags)

    derate = stability_derating(delta, wires_list)
    dt, n_steps, _ = run_timing(delta, calctime, output_interval,
                                cfl=DEFAULT_CFL * derate)
    spec = GridSpec(counts[0], counts[1], counts[2], delta, dt, n_steps)
    return Model(
        extent=extent,
        delta=delta,
        calctime=calctime,
        output_interval=output_interval,
        cpml=cpml,
        blocks=blocks,
        debye_media=debye_media,
        waveforms=waveforms,
        wires=wires_list,
        sources=resolved_sources,
        probes=probes_list,
        grid=spec,
    )


def load_model(path: str) -> Model:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    return parse_and_validate(text)


def parse_and_validate(text: str) -> Model:
    commands, diags = parse(text)
    if diags:
        raise ValidationError(diags)
    return validate(commands)


# ---------------------------------------------------------------------------
# Serialization (round-trips through parse/validate)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def format_model(model: Model) -> str:
    """Serialize a Model back to command text."""
    lines = []
    lines.append(f"volume ({_fmt(model.extent[0])}, {_fmt(model.extent[1])}, "
                 f"{_fmt(model.extent[2])}, {_fmt(model.delta)})")
    lines.append(f"calctime ({_fmt(model.calctime)})")
    lines.append(f"output ({_fmt(model.output_interval)})")
    c = model.cpml
    lines.append(
        f"abc (cpml, {_fmt(c.depth_m)}, {_fmt(c.kappa_max)}, {_fmt(c.sigma_factor)}, "
        f"{_fmt(c.alpha_max)}, {_fmt(c.poly_order)}, {_fmt(c.alpha_order)})"
    )
    for name, med in model.debye_media.items():
        pairs = ", ".join(f"{_fmt(de)}, {_fmt(tau)}" for de, tau in med.poles)
        lines.append(f"debye ({name}, {pairs})")
    for b in model.blocks:
        parts = [*b.lo, *b.hi, b.eps_r, b.sigma]
        text = ", ".join(_fmt(v) for v in parts)
        if b.debye_name:
            text += f", {b.debye_name}"
        lines.append(f"block ({text})")
    for w in model.wires:
        coords = ", ".join(_fmt(v) for v in (*w.start, *w.end, w.radius))
        suffix = ", t" if w.terminal else ""
        lines.append(f"wire ({w.model}, {coords}{suffix})")
    fn_by_waveform = {}
    for i, s in enumerate(model.sources):
        fn_name = None
        for name, w in model.waveforms.items():
            if w == s.waveform:
                fn_name = name
                break
        coords = ", ".join(_fmt(v) for v in (*s.span[0], *s.span[1]))
        lines.append(f"source ({s.kind}, {coords}, {_fmt(s.r_internal)}, {fn_name})")
    for p in model.probes:
        coords = ", ".join(_fmt(v) for v in (*p.span[0], *p.span[1]))
        lines.append(f"calculate ({p.kind}, {coords})")
    for name, w in model.waveforms.items():
        if w.kind == "heidler_sum":
            parts = []
            for t in w.terms:
                parts += [_fmt(t.i0), _fmt(t.tau1), _fmt(t.tau2), _fmt(t.n)]
            lines.append(f"function ({name}, heidler, {', '.join(parts)})")
        else:
            samples = " ".join(_fmt(v) for v in w.samples)
            lines.append(f"function ({name}, custom, {_fmt(w.sample_dt)}, [{samples}])")
    return "\n".join(lines) + "\n"
