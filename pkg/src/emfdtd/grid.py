"""Yee lattice, material maps, and the leapfrog E/H update kernels.

Fields live on a staggered uniform cubic lattice: E components on cell
edges, H components on cell faces.  With ``(nx, ny, nz)`` cells of edge
length ``delta`` the array shapes are::

    ex: (nx,   ny+1, nz+1)   sampled at ((i+1/2)d, j d, k d)
    ey: (nx+1, ny,   nz+1)   sampled at (i d, (j+1/2)d, k d)
    ez: (nx+1, ny+1, nz  )   sampled at (i d, j d, (k+1/2)d)
    hx: (nx+1, ny,   nz  )   sampled at (i d, (j+1/2)d, (k+1/2)d)
    hy: (nx,   ny+1, nz  )
    hz: (nx,   ny,   nz+1)

Tangential E nodes on the outermost lattice planes are never updated, so
the boundary behaves as a perfect electric conductor unless absorbing
layers are placed in front of it.

The lossy E update uses the semi-implicit averaged-conductivity form

    E' = (eps/dt - sigma/2)/(eps/dt + sigma/2) * E
         + 1/(eps/dt + sigma/2) * (curl H)

which stays stable for arbitrarily large sigma (painted soil, lumped
resistors, near-PEC blocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .constants import C0, EPS0, MU0, SQRT3
from .errors import ParameterError

X, Y, Z = 0, 1, 2
E_COMPONENTS = ("ex", "ey", "ez")
H_COMPONENTS = ("hx", "hy", "hz")


def courant_dt(delta: float, cfl: float) -> float:
    """Largest stable time step for a cubic cell of size ``delta``.

    Returns ``cfl * delta / (c0 * sqrt(3))``.  ``cfl`` must lie in (0, 1].
    """
    if not delta > 0.0:
        raise ParameterError(f"cell size must be positive, got {delta}")
    if not 0.0 < cfl <= 1.0:
        raise ParameterError(f"CFL fraction must be in (0, 1], got {cfl}")
    return cfl * delta / (C0 * SQRT3)


@dataclass(frozen=True)
class GridSpec:
    """Lattice geometry and run length.

    nx, ny, nz: cell counts per axis; delta: cell edge (m); dt: time
    step (s); n_steps: number of leapfrog steps in the run.
    """

    nx: int
    ny: int
    nz: int
    delta: float
    dt: float
    n_steps: int

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 4:
            raise ParameterError("grid needs at least 4 cells per axis")
        if not self.delta > 0.0:
            raise ParameterError("cell size must be positive")
        limit = courant_dt(self.delta, 1.0)
        if not 0.0 < self.dt <= limit * (1.0 + 1e-12):
            raise ParameterError(
                f"dt={self.dt:g} violates the Courant bound {limit:g}"
            )
        if self.n_steps < 1:
            raise ParameterError("n_steps must be at least 1")

    @property
    def extent(self) -> tuple[float, float, float]:
        return (self.nx * self.delta, self.ny * self.delta, self.nz * self.delta)

    def e_shape(self, c: int) -> tuple[int, int, int]:
        n = [self.nx + 1, self.ny + 1, self.nz + 1]
        n[c] -= 1
        return tuple(n)

    def h_shape(self, c: int) -> tuple[int, int, int]:
        n = [self.nx, self.ny, self.nz]
        n[c] += 1
        return tuple(n)


def e_edge_centers(spec_or_counts, delta: float, c: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Midpoint coordinate vectors (x, y, z) of all E edges of component c."""
    nx, ny, nz = spec_or_counts
    axes = []
    for a, n in zip((X, Y, Z), (nx, ny, nz)):
        if a == c:
            axes.append((np.arange(n) + 0.5) * delta)
        else:
            axes.append(np.arange(n + 1) * delta)
    return tuple(axes)


@dataclass
class FieldSet:
    """The six staggered Yee field arrays (float64)."""

    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    hz: np.ndarray

    @classmethod
    def zeros(cls, spec: GridSpec) -> "FieldSet":
        return cls(
            ex=np.zeros(spec.e_shape(X)),
            ey=np.zeros(spec.e_shape(Y)),
            ez=np.zeros(spec.e_shape(Z)),
            hx=np.zeros(spec.h_shape(X)),
            hy=np.zeros(spec.h_shape(Y)),
            hz=np.zeros(spec.h_shape(Z)),
        )

    def e(self, c: int) -> np.ndarray:
        return (self.ex, self.ey, self.ez)[c]

    def h(self, c: int) -> np.ndarray:
        return (self.hx, self.hy, self.hz)[c]

    def copy(self) -> "FieldSet":
        return FieldSet(*(a.copy() for a in (self.ex, self.ey, self.ez, self.hx, self.hy, self.hz)))

    def all_finite(self) -> bool:
        return all(
            np.isfinite(a).all()
            for a in (self.ex, self.ey, self.ez, self.hx, self.hy, self.hz)
        )


class MaterialMap:
    """Per-E-edge permittivity/conductivity, per-H-face permeability, and
    optional dispersive-medium tags.

    The unpainted medium is vacuum.  ``debye`` arrays hold an index into
    ``debye_media`` (-1 where non-dispersive); for tagged edges ``eps``
    stores the instantaneous (high-frequency) permittivity and ``sigma``
    the static conductivity.
    """

    def __init__(self, nx: int, ny: int, nz: int, delta: float):
        self.counts = (nx, ny, nz)
        self.delta = float(delta)
        self.eps = [np.full(self._e_shape(c), EPS0) for c in (X, Y, Z)]
        self.sigma = [np.zeros(self._e_shape(c)) for c in (X, Y, Z)]
        self.mu = [np.full(self._h_shape(c), MU0) for c in (X, Y, Z)]
        self.debye = [np.full(self._e_shape(c), -1, dtype=np.int32) for c in (X, Y, Z)]
        self.debye_media: list = []
        self._debye_by_name: dict[str, int] = {}

    def _e_shape(self, c: int) -> tuple[int, int, int]:
        n = [self.counts[0] + 1, self.counts[1] + 1, self.counts[2] + 1]
        n[c] -= 1
        return tuple(n)

    def _h_shape(self, c: int) -> tuple[int, int, int]:
        n = list(self.counts)
        n[c] += 1
        return tuple(n)

    @property
    def extent(self) -> tuple[float, float, float]:
        return tuple(n * self.delta for n in self.counts)

    def add_debye_medium(self, medium) -> int:
        if medium.name in self._debye_by_name:
            raise ParameterError(f"dispersive medium {medium.name!r} defined twice")
        self.debye_media.append(medium)
        idx = len(self.debye_media) - 1
        self._debye_by_name[medium.name] = idx
        return idx

    def paint_block(
        self,
        lo: tuple[float, float, float],
        hi: tuple[float, float, float],
        eps_r: float,
        sigma: float,
        debye_name: str | None = None,
    ) -> None:
        """Assign material to every E edge whose midpoint falls in the box.

        The box is half-open per axis, [lo, hi): an edge centered exactly
        on the upper face is left to whatever lies above.  Later paints
        overwrite earlier ones on overlap.  For a dispersive block
        ``eps_r`` is the high-frequency permittivity and ``sigma`` the
        static conductivity.
        """
        if eps_r < 1.0:
            raise ParameterError(f"relative permittivity must be >= 1, got {eps_r}")
        if sigma < 0.0:
            raise ParameterError(f"conductivity must be >= 0, got {sigma}")
        ext = self.extent
        tol = self.delta * 1e-6
        for a in (X, Y, Z):
            if lo[a] < -tol or hi[a] > ext[a] + tol:
                raise ParameterError(
                    f"block [{lo[a]:g}, {hi[a]:g}] leaves the volume along axis {a}"
                )
        if debye_name is not None:
            if debye_name not in self._debye_by_name:
                raise ParameterError(f"unknown dispersive medium {debye_name!r}")
            tag = self._debye_by_name[debye_name]
        else:
            tag = -1
        for c in (X, Y, Z):
            ax = e_edge_centers(self.counts, self.delta, c)
            masks = [(ax[a] >= lo[a] - tol) & (ax[a] < hi[a] - tol) for a in (X, Y, Z)]
            sel = np.ix_(*(np.nonzero(m)[0] for m in masks))
            self.eps[c][sel] = eps_r * EPS0
            self.sigma[c][sel] = sigma
            self.debye[c][sel] = tag

    def continue_into_shell(self, npml: int, faces=None) -> None:
        """Copy each edge material in the outer ``npml``-cell shell from the
        nearest interior edge (index clamping per axis, only toward faces
        that carry an absorbing layer).

        Run after painting so that half-space soil continues into the
        absorbing layers on the sides and bottom.
        """
        if npml <= 0:
            return
        for c in (X, Y, Z):
            idx = []
            for a, size in enumerate(self.eps[c].shape):
                # cell-indexed along the component's own axis, node-indexed
                # along the others; interior = [npml, size-1-npml]
                lo = npml if faces is None or f"{'xyz'[a]}-" in faces else 0
                hi = size - 1 - npml if faces is None or f"{'xyz'[a]}+" in faces else size - 1
                idx.append(np.clip(np.arange(size), lo, hi))
            sel = np.ix_(*idx)
            self.eps[c][...] = self.eps[c][sel]
            self.sigma[c][...] = self.sigma[c][sel]
            self.debye[c][...] = self.debye[c][sel]


def paint_block(mat: MaterialMap, lo, hi, eps_r, sigma, debye_name=None) -> MaterialMap:
    """Functional wrapper over :meth:`MaterialMap.paint_block` (in place)."""
    mat.paint_block(lo, hi, eps_r, sigma, debye_name)
    return mat


@dataclass
class UpdateCoefficients:
    """Precomputed per-edge/per-face update factors.

    ``ca``/``cb`` are interior-shaped (update region only); ``ch`` covers
    every face.  ``inv_de``/``inv_dh`` are per-axis inverse step arrays,
    1/(kappa * delta), at integer and half positions respectively; they
    stay 1/delta outside absorbing layers.
    """

    ca: list[np.ndarray]
    cb: list[np.ndarray]
    ch: list[np.ndarray]
    inv_de: list[np.ndarray]
    inv_dh: list[np.ndarray]
    dt: float = 0.0


def _reshape_axis(v: np.ndarray, axis: int) -> np.ndarray:
    shape = [1, 1, 1]
    shape[axis] = v.size
    return v.reshape(shape)


def _interior(arr_shape: tuple[int, int, int], c: int) -> tuple[slice, slice, slice]:
    sl = [slice(1, -1)] * 3
    sl[c] = slice(None)
    return tuple(sl)


def build_coefficients(
    mat: MaterialMap,
    dt: float,
    debye_a_extra: list[np.ndarray] | None = None,
    inv_de: list[np.ndarray] | None = None,
    inv_dh: list[np.ndarray] | None = None,
) -> UpdateCoefficients:
    """Assemble E and H update factors for a given time step.

    ``debye_a_extra`` optionally adds the dispersive poles' instantaneous
    contribution to the E denominators (same interior shape as ``ca``).
    """
    nx, ny, nz = mat.counts
    counts = (nx, ny, nz)
    ca, cb, ch = [], [], []
    for c in (X, Y, Z):
        sl = _interior(mat.eps[c].shape, c)
        a_term = mat.eps[c][sl] / dt
        if debye_a_extra is not None:
            a_term = a_term + debye_a_extra[c]
        b_term = mat.sigma[c][sl] / 2.0
        denom = a_term + b_term
        ca.append((a_term - b_term) / denom)
        cb.append(1.0 / denom)
        ch.append(dt / mat.mu[c])
    if inv_de is None:
        inv_de = [np.full(counts[a] + 1, 1.0 / mat.delta) for a in (X, Y, Z)]
    if inv_dh is None:
        inv_dh = [np.full(counts[a], 1.0 / mat.delta) for a in (X, Y, Z)]
    return UpdateCoefficients(ca=ca, cb=cb, ch=ch, inv_de=inv_de, inv_dh=inv_dh, dt=dt)


# ---------------------------------------------------------------------------
# Update kernels, compiled with numba.  Each takes explicit first-axis
# bounds so the engine can split a sweep across workers; the arithmetic per
# edge/face is identical for any split, which keeps multi-worker runs
# bit-identical (no fastmath, no reductions).
#
# Index conventions: for E components whose first axis is node-indexed
# (ey, ez) the bounds (i0, i1) are absolute node indices in [1, nx);
# ca/cb are interior-shaped, so their first axis is offset by one.  The
# inv_* arrays are 1-D: interior-node length for transverse E axes,
# full-length along x, half-position length for H.

@njit(nogil=True, cache=True)
def update_ex(ex, hy, hz, ca, cb, inv_dy, inv_dz, i0, i1):
    n1, n2 = ca.shape[1], ca.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (hz[i, j + 1, k + 1] - hz[i, j, k + 1]) * inv_dy[j] - (
                    hy[i, j + 1, k + 1] - hy[i, j + 1, k]
                ) * inv_dz[k]
                ex[i, j + 1, k + 1] = (
                    ca[i, j, k] * ex[i, j + 1, k + 1] + cb[i, j, k] * curl
                )


@njit(nogil=True, cache=True)
def update_ey(ey, hz, hx, ca, cb, inv_dz, inv_dx, i0, i1):
    n1, n2 = ca.shape[1], ca.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (hx[i, j, k + 1] - hx[i, j, k]) * inv_dz[k] - (
                    hz[i, j, k + 1] - hz[i - 1, j, k + 1]
                ) * inv_dx[i]
                ey[i, j, k + 1] = (
                    ca[i - 1, j, k] * ey[i, j, k + 1] + cb[i - 1, j, k] * curl
                )


@njit(nogil=True, cache=True)
def update_ez(ez, hx, hy, ca, cb, inv_dx, inv_dy, i0, i1):
    n1, n2 = ca.shape[1], ca.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (hy[i, j + 1, k] - hy[i - 1, j + 1, k]) * inv_dx[i] - (
                    hx[i, j + 1, k] - hx[i, j, k]
                ) * inv_dy[j]
                ez[i, j + 1, k] = (
                    ca[i - 1, j, k] * ez[i, j + 1, k] + cb[i - 1, j, k] * curl
                )


@njit(nogil=True, cache=True)
def update_hx(hx, ey, ez, ch, inv_dy, inv_dz, i0, i1):
    n1, n2 = ch.shape[1], ch.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (ey[i, j, k + 1] - ey[i, j, k]) * inv_dz[k] - (
                    ez[i, j + 1, k] - ez[i, j, k]
                ) * inv_dy[j]
                hx[i, j, k] += ch[i, j, k] * curl


@njit(nogil=True, cache=True)
def update_hy(hy, ez, ex, ch, inv_dz, inv_dx, i0, i1):
    n1, n2 = ch.shape[1], ch.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (ez[i + 1, j, k] - ez[i, j, k]) * inv_dx[i] - (
                    ex[i, j, k + 1] - ex[i, j, k]
                ) * inv_dz[k]
                hy[i, j, k] += ch[i, j, k] * curl


@njit(nogil=True, cache=True)
def update_hz(hz, ex, ey, ch, inv_dx, inv_dy, i0, i1):
    n1, n2 = ch.shape[1], ch.shape[2]
    for i in range(i0, i1):
        for j in range(n1):
            for k in range(n2):
                curl = (ex[i, j + 1, k] - ex[i, j, k]) * inv_dy[j] - (
                    ey[i + 1, j, k] - ey[i, j, k]
                ) * inv_dx[i]
                hz[i, j, k] += ch[i, j, k] * curl


def e_kernel_args(fields: FieldSet, coef: UpdateCoefficients):
    """(kernel, args, x_lo, x_hi) for each E component sweep."""
    nx = fields.ex.shape[0]
    return [
        (
            update_ex,
            (fields.ex, fields.hy, fields.hz, coef.ca[X], coef.cb[X],
             coef.inv_de[Y][1:-1], coef.inv_de[Z][1:-1]),
            0, nx,
        ),
        (
            update_ey,
            (fields.ey, fields.hz, fields.hx, coef.ca[Y], coef.cb[Y],
             coef.inv_de[Z][1:-1], coef.inv_de[X]),
            1, nx,
        ),
        (
            update_ez,
            (fields.ez, fields.hx, fields.hy, coef.ca[Z], coef.cb[Z],
             coef.inv_de[X], coef.inv_de[Y][1:-1]),
            1, nx,
        ),
    ]


def h_kernel_args(fields: FieldSet, coef: UpdateCoefficients):
    nx = fields.ex.shape[0]
    return [
        (
            update_hx,
            (fields.hx, fields.ey, fields.ez, coef.ch[X],
             coef.inv_dh[Y], coef.inv_dh[Z]),
            0, nx + 1,
        ),
        (
            update_hy,
            (fields.hy, fields.ez, fields.ex, coef.ch[Y],
             coef.inv_dh[Z], coef.inv_dh[X]),
            0, nx,
        ),
        (
            update_hz,
            (fields.hz, fields.ex, fields.ey, coef.ch[Z],
             coef.inv_dh[X], coef.inv_dh[Y]),
            0, nx,
        ),
    ]


def sweep_e(fields: FieldSet, coef: UpdateCoefficients) -> None:
    """Advance all interior E edges one step (curl part only)."""
    for kernel, args, lo, hi in e_kernel_args(fields, coef):
        kernel(*args, lo, hi)


def sweep_h(fields: FieldSet, coef: UpdateCoefficients) -> None:
    """Advance all H faces one half-step."""
    for kernel, args, lo, hi in h_kernel_args(fields, coef):
        kernel(*args, lo, hi)


def step_e(fields: FieldSet, mat: MaterialMap, dt: float) -> FieldSet:
    """One lossy semi-implicit E advance over the whole interior (in place).

    H fields are taken at the half step; tangential boundary E stays 0.
    """
    coef = _cached_coefficients(mat, dt)
    sweep_e(fields, coef)
    return fields


def step_h(fields: FieldSet, mat: MaterialMap, dt: float) -> FieldSet:
    """One H advance over all faces (in place)."""
    coef = _cached_coefficients(mat, dt)
    sweep_h(fields, coef)
    return fields


def _cached_coefficients(mat: MaterialMap, dt: float) -> UpdateCoefficients:
    cache = getattr(mat, "_coef_cache", None)
    if cache is not None and cache.dt == dt:
        return cache
    coef = build_coefficients(mat, dt)
    mat._coef_cache = coef
    return coef


def divergence_h(fields: FieldSet, delta: float) -> np.ndarray:
    """Discrete per-cell divergence of H (face-flux sum over delta)."""
    hx, hy, hz = fields.hx, fields.hy, fields.hz
    return (
        (hx[1:, :, :] - hx[:-1, :, :])
        + (hy[:, 1:, :] - hy[:, :-1, :])
        + (hz[:, :, 1:] - hz[:, :, :-1])
    ) / delta


def field_energy(e_now: FieldSet, h_prev: FieldSet, h_now: FieldSet, mat: MaterialMap) -> float:
    """Discrete EM energy with the staggered product form for H.

    ``sum(eps/2 E^2) + sum(mu/2 H(n-1/2) H(n+1/2))`` is conserved exactly
    by the lossless leapfrog, so it is the right quantity for long-run
    stability checks.
    """
    total = 0.0
    for c in (X, Y, Z):
        total += 0.5 * float(np.sum(mat.eps[c] * e_now.e(c) ** 2))
        total += 0.5 * float(np.sum(mat.mu[c] * h_prev.h(c) * h_now.h(c)))
    return total * mat.delta ** 3
