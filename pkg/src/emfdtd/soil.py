"""Frequency-dependent soil models, Debye-parameter fitting, layered-earth
apparent resistivity, electrode arrays, and depth of investigation.

Soil models (closed forms, constants from the original publications):

* Messier: the causal pair sigma(w) = sigma0 + sqrt(2 w sigma0 eps_i),
  eps(w) = eps_i + sqrt(2 sigma0 eps_i / w), i.e. the complex conductivity
  (sqrt(sigma0) + sqrt(j w eps_i))^2, with eps_i = 8 eps0 by default
  (Messier's suggested high-frequency soil permittivity).
* Alipio-Visacro (2014 mean-value recommendation): sigma(f) =
  sigma0 (1 + h (f/1MHz)^0.54) with h = 1.26 (sigma0 in mS/m)^-0.73, and
  the Kramers-Kronig partner permittivity with eps_inf = 12.
* Portela (1999, median parameters): complex conductivity sigma0 +
  d_i (cot(0.353 pi) + j) (f/1MHz)^0.706 with d_i = 11.71 mS/m.

The Debye fit follows the hybrid swarm/linear strategy: particles carry
log10(tau) vectors; for a fixed tau vector the model is linear in
(eps_inf, d_eps_p, sigma0), solved by non-negative least squares with
per-point relative weighting.  The swarm result is polished with a
deterministic Nelder-Mead pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar, nnls

from .constants import EPS0
from .errors import ComputationError, FitError, ParameterError

SOIL_MODELS = ("messier", "alipio_visacro", "portela")


# ---------------------------------------------------------------------------
# Sample sets


@dataclass(frozen=True)
class SoilSampleSet:
    """Measured or synthesized complex relative permittivity (conduction
    term included) at strictly increasing positive frequencies."""

    freqs: tuple[float, ...]
    eps: tuple[complex, ...]

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float)
        if f.size < 2:
            raise FitError("need at least two sample points")
        if np.any(f <= 0.0) or np.any(np.diff(f) <= 0.0):
            raise FitError("frequencies must be positive and strictly increasing")
        if len(self.eps) != f.size:
            raise FitError("frequency and permittivity lists differ in length")
        if not np.all(np.isfinite(np.asarray(self.eps, dtype=complex))):
            raise FitError("sample values must be finite")


def soil_model_properties(model: str, rho0: float, freq: float, **constants):
    """(sigma S/m, eps_r) of the selected soil model at one frequency.

    Model-specific keyword constants: ``eps_inf_r`` (messier default 8,
    alipio_visacro 12, portela 1), alipio_visacro ``gamma`` (0.54) and
    ``h`` (default from sigma0), portela ``alpha`` (0.706), ``delta_i``
    (11.71e-3 S/m), ``f0`` (1e6 Hz).
    """
    if not rho0 > 0.0:
        raise ParameterError("rho0 must be positive")
    if not freq > 0.0:
        raise ParameterError("frequency must be positive")
    sigma0 = 1.0 / rho0
    w = 2.0 * math.pi * freq
    if model == "messier":
        eps_i = constants.get("eps_inf_r", 8.0) * EPS0
        sigma = sigma0 + math.sqrt(2.0 * w * sigma0 * eps_i)
        eps = eps_i + math.sqrt(2.0 * sigma0 * eps_i / w)
        return sigma, eps / EPS0
    if model == "alipio_visacro":
        gamma = constants.get("gamma", 0.54)
        eps_inf_r = constants.get("eps_inf_r", 12.0)
        sigma0_ms = sigma0 * 1e3
        h = constants.get("h", 1.26 * sigma0_ms ** (-0.73))
        d_sigma = sigma0 * h * (freq / 1e6) ** gamma
        sigma = sigma0 + d_sigma
        eps = eps_inf_r * EPS0 + math.tan(math.pi * gamma / 2.0) * d_sigma / w
        return sigma, eps / EPS0
    if model == "portela":
        alpha = constants.get("alpha", 0.706)
        delta_i = constants.get("delta_i", 11.71e-3)
        f0 = constants.get("f0", 1e6)
        eps_inf_r = constants.get("eps_inf_r", 1.0)
        scale = delta_i * (freq / f0) ** alpha
        sigma = sigma0 + scale * math.tan(math.pi / 2.0 * (1.0 - alpha))
        eps = eps_inf_r * EPS0 + scale / w
        return sigma, eps / EPS0
    raise ParameterError(f"unknown soil model {model!r}; choose from {SOIL_MODELS}")


def soil_model_sweep(model: str, rho0: float, freqs, **constants) -> SoilSampleSet:
    """Sample a soil model over a frequency grid as complex permittivity
    (conduction term included)."""
    freqs = np.asarray(freqs, dtype=float)
    eps = []
    for f in freqs:
        sigma, eps_r = soil_model_properties(model, rho0, float(f), **constants)
        w = 2.0 * math.pi * float(f)
        eps.append(eps_r - 1j * sigma / (w * EPS0))
    return SoilSampleSet(freqs=tuple(freqs.tolist()), eps=tuple(eps))


# ---------------------------------------------------------------------------
# Hybrid swarm / least-squares Debye fit


@dataclass(frozen=True)
class PsoSettings:
    particles: int = 40
    iterations: int = 200
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    tau_bounds: tuple[float, float] = (1e-9, 1e-3)
    polish: bool = True


@dataclass(frozen=True)
class DebyeFit:
    """Fit result in report order: sigma0, eps_inf, then (d_eps, tau) pairs
    sorted by descending tau; ``residual`` is the relative RMS misfit."""

    sigma0: float
    eps_inf: float
    poles: tuple[tuple[float, float], ...]
    residual: float
    warning: str | None = None


def _design_matrix(freqs: np.ndarray, taus: np.ndarray, include_sigma: bool):
    """Real-stacked, per-point relative-weighted basis for the linear
    subproblem: columns eps_inf, one per pole, optionally sigma0."""
    w = 2.0 * math.pi * freqs
    cols = [np.ones_like(freqs, dtype=complex)]
    for tau in taus:
        cols.append(1.0 / (1.0 + 1j * w * tau))
    if include_sigma:
        cols.append(-1j / (w * EPS0))
    return np.stack(cols, axis=1)


def _solve_linear(a_cplx, eps, weights):
    a = np.concatenate([ (a_cplx.real * weights[:, None]),
                         (a_cplx.imag * weights[:, None]) ])
    b = np.concatenate([eps.real * weights, eps.imag * weights])
    coef, _ = nnls(a, b)
    resid = a @ coef - b
    rel_rms = float(np.linalg.norm(resid) / math.sqrt(eps.size))
    return coef, rel_rms


def fit_debye(
    samples: SoilSampleSet,
    n_poles: int,
    seed: int = 0,
    settings: PsoSettings = PsoSettings(),
    sigma0: float | None = None,
    residual_ceiling: float = 0.02,
) -> DebyeFit:
    """Fit eps_inf, up to four (d_eps, tau) pairs, and the conduction term.

    ``sigma0``: pass the known static conductivity to fix the conduction
    term exactly (the usual case when the target spectrum came from a soil
    model with known rho0); leave None to solve it linearly alongside the
    pole amplitudes.  Deterministic for a fixed seed.
    """
    if not 1 <= n_poles <= 4:
        raise ParameterError("n_poles must be between 1 and 4")
    freqs = np.asarray(samples.freqs, dtype=float)
    eps = np.asarray(samples.eps, dtype=complex)
    if freqs.size < 2 * n_poles + 2:
        raise FitError(
            f"need at least {2 * n_poles + 2} samples to fit {n_poles} poles"
        )
    if sigma0 is not None:
        if sigma0 < 0.0:
            raise ParameterError("sigma0 must be >= 0")
        eps = eps + 1j * sigma0 / (2.0 * math.pi * freqs * EPS0)
    weights = 1.0 / np.abs(np.asarray(samples.eps, dtype=complex))
    include_sigma = sigma0 is None

    lo, hi = math.log10(settings.tau_bounds[0]), math.log10(settings.tau_bounds[1])

    def objective(log_tau: np.ndarray) -> float:
        taus = 10.0 ** np.clip(log_tau, lo, hi)
        a = _design_matrix(freqs, taus, include_sigma)
        _, rel = _solve_linear(a, eps, weights)
        return rel

    rng = np.random.default_rng(seed)
    dim = n_poles
    pos = rng.uniform(lo, hi, size=(settings.particles, dim))
    vel = rng.uniform(-(hi - lo), hi - lo, size=pos.shape) * 0.1
    pbest = pos.copy()
    pbest_val = np.array([objective(p) for p in pos])
    g_idx = int(np.argmin(pbest_val))
    gbest = pbest[g_idx].copy()
    gbest_val = float(pbest_val[g_idx])

    for _ in range(settings.iterations):
        r1 = rng.random(pos.shape)
        r2 = rng.random(pos.shape)
        vel = (
            settings.inertia * vel
            + settings.cognitive * r1 * (pbest - pos)
            + settings.social * r2 * (gbest[None, :] - pos)
        )
        pos = np.clip(pos + vel, lo, hi)
        for i in range(settings.particles):
            v = objective(pos[i])
            if v < pbest_val[i]:
                pbest_val[i] = v
                pbest[i] = pos[i]
                if v < gbest_val:
                    gbest_val = v
                    gbest = pos[i].copy()

    if settings.polish:
        res = minimize(objective, gbest, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
        if res.fun <= gbest_val:
            gbest = np.clip(res.x, lo, hi)
            gbest_val = float(res.fun)

    taus = 10.0 ** gbest
    a = _design_matrix(freqs, taus, include_sigma)
    coef, rel = _solve_linear(a, eps, weights)
    eps_inf = float(coef[0])
    d_eps = coef[1 : 1 + n_poles]
    fitted_sigma0 = float(coef[-1]) if include_sigma else float(sigma0)
    order = np.argsort(-taus)
    poles = tuple((float(d_eps[i]), float(taus[i])) for i in order)
    warning = None
    if rel > residual_ceiling:
        warning = (
            f"relative RMS residual {rel:.3g} exceeds the ceiling "
            f"{residual_ceiling:.3g}"
        )
    return DebyeFit(sigma0=fitted_sigma0, eps_inf=eps_inf, poles=poles,
                    residual=rel, warning=warning)


# ---------------------------------------------------------------------------
# Layered earth and electrode arrays


@dataclass(frozen=True)
class LayeredEarth:
    """Horizontally layered half-space: resistivities top-down; thicknesses
    for all but the bottom (infinite) layer."""

    rho: tuple[float, ...]
    thickness: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.rho:
            raise ParameterError("at least one layer required")
        if any(r <= 0.0 for r in self.rho):
            raise ParameterError("layer resistivities must be positive")
        if len(self.thickness) != len(self.rho) - 1:
            raise ParameterError("need one thickness per non-bottom layer")
        if any(h <= 0.0 for h in self.thickness):
            raise ParameterError("layer thicknesses must be positive")


@dataclass(frozen=True)
class ElectrodeArray:
    """Four surface electrodes: C1, C2 carry current; P1, P2 sense
    potential.  Built-in layouts: wenner(a), dipole_dipole(a, n); general4
    takes explicit (x, y) positions."""

    kind: str
    a: float = 1.0
    n: int = 1
    positions: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("wenner", "dipole_dipole", "general4"):
            raise ParameterError(f"unknown array kind {self.kind!r}")
        if self.kind in ("wenner", "dipole_dipole"):
            if not self.a > 0.0:
                raise ParameterError("electrode spacing must be positive")
            if self.kind == "dipole_dipole" and self.n < 1:
                raise ParameterError("dipole separation factor n must be >= 1")
        else:
            if self.positions is None or len(self.positions) != 4:
                raise ParameterError("general4 needs positions (C1, C2, P1, P2)")
            if len({tuple(p) for p in self.positions}) != 4:
                raise ParameterError("electrode positions must be distinct")

    def electrodes(self) -> tuple[tuple[float, float], ...]:
        """(C1, C2, P1, P2) coordinates on the surface plane."""
        if self.kind == "wenner":
            return ((0.0, 0.0), (3.0 * self.a, 0.0), (self.a, 0.0), (2.0 * self.a, 0.0))
        if self.kind == "dipole_dipole":
            return (
                (0.0, 0.0), (-self.a, 0.0),
                (self.n * self.a, 0.0), ((self.n + 1.0) * self.a, 0.0),
            )
        return tuple(tuple(p) for p in self.positions)

    @property
    def geometric_factor(self) -> float:
        """k with rho_a = k * V / I; Wenner: 2 pi a, dipole-dipole:
        pi n (n+1) (n+2) a, general4 from electrode distances."""
        c1, c2, p1, p2 = self.electrodes()

        def dist(u, v):
            return math.hypot(u[0] - v[0], u[1] - v[1])

        g = (1.0 / dist(c1, p1) - 1.0 / dist(c2, p1)
             - 1.0 / dist(c1, p2) + 1.0 / dist(c2, p2))
        if g == 0.0:
            raise ParameterError("degenerate electrode geometry (zero factor)")
        return 2.0 * math.pi / g


# -- image-series kernel -----------------------------------------------------


def _series_mul(a: dict, b: dict, caps) -> dict:
    out: dict = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            if any(x > c for x, c in zip(k, caps)):
                continue
            out[k] = out.get(k, 0.0) + va * vb
    return out


def _series_add(a: dict, b: dict, scale: float = 1.0) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + scale * v
    return out


def _series_reciprocal(denom: dict, caps) -> dict:
    """1 / (c0 + s) via the Neumann series, where every term of s carries a
    strictly positive depth (guarantees termination under the caps)."""
    zero = tuple(0 for _ in caps)
    c0 = denom.get(zero, 0.0)
    if c0 == 0.0:
        raise ComputationError("kernel series has singular leading term")
    neg_s = {k: -v / c0 for k, v in denom.items() if k != zero}
    out = {zero: 1.0}
    power = {zero: 1.0}
    for _ in range(sum(caps) + 1):
        power = _series_mul(power, neg_s, caps)
        if not power:
            break
        out = _series_add(out, power)
    return {k: v / c0 for k, v in out.items()}


def _kernel_image_series(earth: LayeredEarth, caps) -> dict:
    """Expand the surface kernel into image terms: returns {exponent vector:
    coefficient} with K(lambda) = 1 + sum a_D exp(-2 lambda D), D =
    sum(n_i h_i); for two layers a_{n h} = 2 k^n."""
    n_layers = len(earth.rho)
    n_ifaces = n_layers - 1
    if n_ifaces == 0:
        return {}
    k_refl = [
        (earth.rho[m + 1] - earth.rho[m]) / (earth.rho[m + 1] + earth.rho[m])
        for m in range(n_ifaces)
    ]

    def unit(i):
        v = [0] * n_ifaces
        v[i] = 1
        return tuple(v)

    zero = tuple([0] * n_ifaces)
    # reflection response at the deepest interface, then fold upward
    gamma = {zero: k_refl[-1]}
    for m in range(n_ifaces - 2, -1, -1):
        shifted = { tuple(x + y for x, y in zip(k, unit(m + 1))): v
                    for k, v in gamma.items() }
        shifted = {k: v for k, v in shifted.items()
                   if not any(x > c for x, c in zip(k, caps))}
        num = _series_add({zero: k_refl[m]}, shifted)
        den = _series_add({zero: 1.0}, {k: k_refl[m] * v for k, v in shifted.items()})
        gamma = _series_mul(num, _series_reciprocal(den, caps), caps)
    g1 = { tuple(x + y for x, y in zip(k, unit(0))): v for k, v in gamma.items() }
    g1 = {k: v for k, v in g1.items() if not any(x > c for x, c in zip(k, caps))}
    num = _series_add({zero: 1.0}, g1)
    den = _series_add({zero: 1.0}, {k: -v for k, v in g1.items()})
    kernel = _series_mul(num, _series_reciprocal(den, caps), caps)
    kernel.pop(zero, None)
    return kernel


def apparent_resistivity_layered(
    earth: LayeredEarth, array: ElectrodeArray, tol: float = 1e-9
) -> float:
    """Low-frequency apparent resistivity of a layered half-space via the
    classical image series, truncated when the remaining reflection terms
    fall below ``tol`` relative."""
    if len(earth.rho) == 1:
        return earth.rho[0]
    k_refl = [
        abs((earth.rho[m + 1] - earth.rho[m]) / (earth.rho[m + 1] + earth.rho[m]))
        for m in range(len(earth.rho) - 1)
    ]
    q = max(k_refl)
    if q > 0.9999:
        raise ComputationError(
            f"reflection coefficient {q:.6f} too close to 1; image series "
            "would need an impractical number of terms"
        )
    caps = []
    for km in k_refl:
        km = max(km, 1e-3)
        caps.append(max(8, int(math.ceil(math.log(tol * 1e-3) / math.log(km)))))
    caps = tuple(caps)
    images = _kernel_image_series(earth, caps)
    depths = {}
    for kvec, coeff in images.items():
        d = sum(n * h for n, h in zip(kvec, earth.thickness))
        depths[d] = depths.get(d, 0.0) + coeff

    c1, c2, p1, p2 = array.electrodes()

    def potential(src, obs) -> float:
        r = math.hypot(src[0] - obs[0], src[1] - obs[1])
        total = 1.0 / r
        for d, a_d in depths.items():
            total += a_d / math.sqrt(r * r + 4.0 * d * d)
        return total

    dv = (
        potential(c1, p1) - potential(c2, p1)
        - potential(c1, p2) + potential(c2, p2)
    )
    resistance = earth.rho[0] / (2.0 * math.pi) * dv
    return array.geometric_factor * resistance


# ---------------------------------------------------------------------------
# Apparent properties from simulated V/I records


@dataclass(frozen=True)
class ApparentTable:
    freqs: np.ndarray
    rho_a: np.ndarray
    eps_a: np.ndarray
    valid: np.ndarray


def apparent_from_vi(
    v: np.ndarray,
    i: np.ndarray,
    array: ElectrodeArray,
    dt: float,
    freqs: np.ndarray | None = None,
    current_floor: float = 1e-12,
) -> ApparentTable:
    """Apparent resistivity and relative permittivity versus frequency from
    probe records.

    V(f)/I(f) comes from direct discrete Fourier sums of the records; the
    apparent complex conductivity is (I/V)/k, whose real part gives
    1/rho_a and whose imaginary part over omega gives the apparent
    permittivity.  Rows where |I(f)| falls under ``current_floor`` times
    the record maximum are flagged invalid.
    """
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    if v.shape != i.shape or v.ndim != 1:
        raise ParameterError("v and i must be equal-length 1-D records")
    if not np.any(i != 0.0):
        raise ParameterError("current record is identically zero")
    n = v.size
    if freqs is None:
        freqs = np.fft.rfftfreq(n, dt)[1:]
    freqs = np.asarray(freqs, dtype=float)
    t = np.arange(n) * dt
    kernel = np.exp(-2j * math.pi * freqs[:, None] * t[None, :])
    v_f = kernel @ v * dt
    i_f = kernel @ i * dt
    floor = current_floor * float(np.max(np.abs(i_f)))
    valid = np.abs(i_f) > floor
    k = array.geometric_factor
    sigma_hat = np.full(freqs.shape, np.nan, dtype=complex)
    sigma_hat[valid] = i_f[valid] / (v_f[valid] * k)
    w = 2.0 * math.pi * freqs
    with np.errstate(divide="ignore", invalid="ignore"):
        rho_a = np.where(valid & (sigma_hat.real != 0.0), 1.0 / sigma_hat.real, np.nan)
        eps_a = np.where(valid, sigma_hat.imag / (w * EPS0), np.nan)
    return ApparentTable(freqs=freqs, rho_a=rho_a, eps_a=eps_a, valid=valid)


# ---------------------------------------------------------------------------
# Depth of investigation (dipole-dipole)


def _doi_sensitivity(z: np.ndarray, a: float, n: int) -> np.ndarray:
    """Thin-layer depth sensitivity of the dipole-dipole array: signed sum
    of pole-pole kernels z / ((R/2)^2 + z^2)^(3/2) over the four
    current-potential pairs."""

    def g(z, r):
        c = r / 2.0
        return z / (c * c + z * z) ** 1.5

    return g(z, n * a) - 2.0 * g(z, (n + 1) * a) + g(z, (n + 2) * a)


def depth_of_investigation(a: float, n: int, method: str = "roy_apparao") -> float:
    """Characteristic depth of a dipole-dipole array.

    ``roy_apparao``: depth at which the thin-layer sensitivity peaks
    (Roy & Apparao 1971).  ``barker``: median depth, above which half of
    the total signal contribution originates (Barker 1989).  Both scale
    linearly with the overall array size.
    """
    if not a > 0.0:
        raise ParameterError("spacing a must be positive")
    if n < 1:
        raise ParameterError("separation factor n must be >= 1")
    span = (n + 2) * a
    if method == "roy_apparao":
        res = minimize_scalar(
            lambda z: -_doi_sensitivity(np.asarray(z), a, n),
            bounds=(1e-6 * span, 3.0 * span),
            method="bounded",
            options={"xatol": 1e-12 * span},
        )
        return float(res.x)
    if method == "barker":
        def cumulative(z):
            # integral of g(z, R) dz from 0 to z = 2/R - 1/sqrt((R/2)^2+z^2)
            def gint(z, r):
                c = r / 2.0
                return 1.0 / c - 1.0 / math.sqrt(c * c + z * z)

            return (
                gint(z, n * a) - 2.0 * gint(z, (n + 1) * a) + gint(z, (n + 2) * a)
            )

        total = (
            2.0 / (n * a) - 4.0 / ((n + 1) * a) + 2.0 / ((n + 2) * a)
        )
        return float(brentq(lambda z: cumulative(z) - 0.5 * total,
                            1e-9 * span, 100.0 * span, xtol=1e-12 * span))
    raise ParameterError(f"unknown depth-of-investigation method {method!r}")
