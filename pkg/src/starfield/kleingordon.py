"""Klein-Gordon modes on a spatial circle and the pairings they induce.

A mode is ``psi(t, x) = S(k x) T(mu t)`` with ``S, T`` each ``cos`` or ``sin``,
``k = 2 pi k_index / L`` and ``mu = sqrt(k^2 + m^2)``, so that
``psi_tt - psi_xx + m^2 psi = 0``.  All hypersurface integrals are taken at
``t = 0`` over one period ``[0, L)``.

Spatial functions are represented by their Fourier coefficients
``f_hat[k] = L**-0.5 * int_0^L exp(-i k x) f(x) dx`` for
``k_index = -kmax..kmax`` (array position ``k_index + kmax``).  With this
normalization ``int f g = sum_k f_hat[-k] g_hat[k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .symalg import AlgebraElement, ModeSpace, PairingForm
from .symalg.element import monomial_factors

TRIG = ("cos", "sin")

# I(psi)(phi) = OBSERVABLE_SIGN * int (psi_t phi - psi phi_t)
OBSERVABLE_SIGN = 1


class ConfigurationError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class KGConfig:
    mass: float = 1.0
    L: float = 2 * math.pi
    kmax: int = 1
    quadrature_points: int | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ConfigurationError("mass must be positive")
        if not self.L > 0:
            raise ConfigurationError("L must be positive")
        if self.kmax < 0:
            raise ConfigurationError("kmax must be >= 0")
        minimum = 4 * (2 * self.kmax + 1)
        if self.quadrature_points is None:
            object.__setattr__(self, "quadrature_points", max(64, minimum))
        elif self.quadrature_points < minimum:
            raise ConfigurationError(f"quadrature_points must be >= {minimum}")

    @property
    def mode_count(self) -> int:
        return 2 * self.kmax + 1

    @property
    def k_indices(self) -> np.ndarray:
        return np.arange(-self.kmax, self.kmax + 1)

    def wavenumber(self, k_index: int) -> float:
        return 2 * math.pi * k_index / self.L

    def mu_vector(self) -> np.ndarray:
        return np.array([mu(k, self) for k in range(-self.kmax, self.kmax + 1)])


def mu(k_index: int, cfg: KGConfig) -> float:
    """Dispersion relation ``sqrt(k^2 + m^2)``."""
    if abs(k_index) > cfg.kmax:
        raise ConfigurationError(f"|k_index|={abs(k_index)} exceeds kmax={cfg.kmax}")
    return math.sqrt(cfg.wavenumber(k_index) ** 2 + cfg.mass ** 2)


@dataclass(frozen=True)
class KGMode:
    k_index: int
    spatial: str = "cos"
    temporal: str = "cos"
    label: str | None = None

    def __post_init__(self):
        if self.spatial not in TRIG or self.temporal not in TRIG:
            raise ValueError("spatial/temporal must be 'cos' or 'sin'")
        if self.spatial == "sin" and self.k_index == 0:
            raise ValueError("sin(0 x) is identically zero")
        if self.label is None:
            object.__setattr__(self, "label", default_label(self.k_index, self.spatial, self.temporal))

    def _check(self, cfg: KGConfig):
        if abs(self.k_index) > cfg.kmax:
            raise ConfigurationError(f"mode {self.label} lies outside kmax={cfg.kmax}")

    def _parts(self, t, x, cfg):
        k = cfg.wavenumber(self.k_index)
        w = mu(self.k_index, cfg)
        s = np.cos(k * x) if self.spatial == "cos" else np.sin(k * x)
        ds2 = -k * k * s
        if self.temporal == "cos":
            tt, dt = np.cos(w * t), -w * np.sin(w * t)
        else:
            tt, dt = np.sin(w * t), w * np.cos(w * t)
        return s, ds2, tt, dt, w

    def value(self, t, x, cfg: KGConfig):
        s, _, tt, _, _ = self._parts(t, x, cfg)
        return s * tt

    def dt(self, t, x, cfg: KGConfig):
        s, _, _, dt, _ = self._parts(t, x, cfg)
        return s * dt

    def dtt(self, t, x, cfg: KGConfig):
        s, _, tt, _, w = self._parts(t, x, cfg)
        return -w * w * s * tt

    def dxx(self, t, x, cfg: KGConfig):
        _, ds2, tt, _, _ = self._parts(t, x, cfg)
        return ds2 * tt

    def residual(self, t, x, cfg: KGConfig):
        """``psi_tt - psi_xx + m^2 psi`` from the analytic derivatives."""
        return self.dtt(t, x, cfg) - self.dxx(t, x, cfg) + cfg.mass ** 2 * self.value(t, x, cfg)


def default_label(k_index: int, spatial: str, temporal: str) -> str:
    if k_index == 0:
        return temporal[0] + "0"
    sign = "m" if k_index < 0 else ""
    return f"{spatial[0]}{temporal[0]}{sign}{abs(k_index)}"


def spatial_fourier(k_index: int, spatial: str, cfg: KGConfig) -> np.ndarray:
    """Fourier coefficients of ``cos(k x)`` or ``sin(k x)`` on the circle."""
    out = np.zeros(cfg.mode_count, dtype=complex)
    root = math.sqrt(cfg.L)
    pos, neg = k_index + cfg.kmax, -k_index + cfg.kmax
    if k_index == 0:
        if spatial == "cos":
            out[pos] = root
        return out
    if spatial == "cos":
        out[pos] += root / 2
        out[neg] += root / 2
    else:
        out[pos] += -0.5j * root
        out[neg] += 0.5j * root
    return out


@dataclass(frozen=True)
class CauchyData:
    """Fourier data of ``psi(0, .)`` and ``psi_t(0, .)``."""

    value_at_0: np.ndarray
    tderiv_at_0: np.ndarray

    def __add__(self, other):
        return CauchyData(self.value_at_0 + other.value_at_0, self.tderiv_at_0 + other.tderiv_at_0)

    def scale(self, c):
        return CauchyData(c * self.value_at_0, c * self.tderiv_at_0)

    def is_real(self, atol=1e-12) -> bool:
        return is_real_fourier(self.value_at_0, atol) and is_real_fourier(self.tderiv_at_0, atol)


def is_real_fourier(f: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.allclose(f[::-1].conj(), f, rtol=0, atol=atol))


def cauchy_data(psi: KGMode, cfg: KGConfig) -> CauchyData:
    psi._check(cfg)
    spatial = spatial_fourier(psi.k_index, psi.spatial, cfg)
    zero = np.zeros_like(spatial)
    if psi.temporal == "cos":
        return CauchyData(spatial, zero)
    return CauchyData(zero, mu(psi.k_index, cfg) * spatial)


def circle_integral(f: np.ndarray, g: np.ndarray) -> complex:
    """``int_0^L f g dx`` from Fourier data (bilinear, no conjugation)."""
    return complex(np.dot(f[::-1], g))


def sample_grid(cfg: KGConfig) -> np.ndarray:
    return np.arange(cfg.quadrature_points) * (cfg.L / cfg.quadrature_points)


def quadrature(values: np.ndarray, cfg: KGConfig) -> float:
    """Periodic trapezoid rule, exact for trigonometric polynomials below the grid Nyquist."""
    return math.fsum(values.tolist()) * (cfg.L / cfg.quadrature_points)


def sigma_pairing(psi: KGMode, phi: KGMode, cfg: KGConfig) -> float:
    """``int_0^L psi_t(0, x) phi(0, x) dx``, closed form cross-checked by quadrature."""
    analytic = circle_integral(cauchy_data(psi, cfg).tderiv_at_0, cauchy_data(phi, cfg).value_at_0)
    x = sample_grid(cfg)
    numeric = quadrature(psi.dt(0.0, x, cfg) * phi.value(0.0, x, cfg), cfg)
    scale = max(1.0, abs(analytic), cfg.L)
    if abs(analytic.imag) > 1e-12 * scale or abs(analytic.real - numeric) > 1e-10 * scale:
        raise ConfigurationError(
            f"pairing of {psi.label}, {phi.label}: closed form {analytic} vs quadrature {numeric}")
    return analytic.real


def poisson_pairing(psi: KGMode, phi: KGMode, cfg: KGConfig) -> float:
    """Generator bracket ``{psi, phi}``."""
    return sigma_pairing(psi, phi, cfg) - sigma_pairing(phi, psi, cfg)


def wick_coefficients(psi: KGMode, cfg: KGConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors ``(F psi, G psi)`` over ``k_index = -kmax..kmax``."""
    data = cauchy_data(psi, cfg)
    return wick_coefficients_from_data(data, cfg)


def wick_coefficients_from_data(data: CauchyData, cfg: KGConfig) -> Tuple[np.ndarray, np.ndarray]:
    m = cfg.mu_vector()
    vel = data.tderiv_at_0 / m
    F = (vel - 1j * data.value_at_0) / math.sqrt(2)
    G = (vel + 1j * data.value_at_0) / math.sqrt(2)
    return F, G


def wick_pairing(psi: KGMode, phi: KGMode, cfg: KGConfig) -> complex:
    """Contraction value ``sum_k mu(k) F(psi)[-k] G(phi)[k]``.

    For real modes this is ``sum_k mu(k) conj(G(psi)[k]) G(phi)[k]``; it is the
    scalar produced when an annihilation part ``a(F psi)`` is moved past a
    creation part ``a_dagger(G phi)``.
    """
    F, _ = wick_coefficients(psi, cfg)
    _, G = wick_coefficients(phi, cfg)
    return complex(np.dot(cfg.mu_vector() * F[::-1], G))


@dataclass(frozen=True)
class ModeTable:
    """Labelled KG modes; the generator set of the algebra."""

    cfg: KGConfig
    modes: Tuple[KGMode, ...]
    space: ModeSpace = field(init=False, compare=False)

    def __post_init__(self):
        for m in self.modes:
            m._check(self.cfg)
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "space", ModeSpace(tuple(m.label for m in self.modes)))

    @classmethod
    def default(cls, cfg: KGConfig, include_negative: bool = True) -> "ModeTable":
        """Every (k_index, spatial, temporal) combination up to kmax.

        Negative k_index duplicates a positive one up to sign but is kept as an
        independent generator.
        """
        modes = []
        lo = -cfg.kmax if include_negative else 0
        for k in sorted(range(lo, cfg.kmax + 1), key=lambda k: (abs(k), k < 0)):
            for sp in TRIG:
                if k == 0 and sp == "sin":
                    continue
                for tp in TRIG:
                    modes.append(KGMode(k, sp, tp))
        return cls(cfg, tuple(modes))

    def mode(self, label) -> KGMode:
        return self.modes[self.space.index(label)]

    def generator(self, label) -> AlgebraElement:
        return AlgebraElement.generator(self.space, label)

    def tsv(self) -> str:
        lines = ["label\tk_index\tspatial\ttemporal\tmu"]
        for m in self.modes:
            lines.append(f"{m.label}\t{m.k_index}\t{m.spatial}\t{m.temporal}\t{mu(m.k_index, self.cfg)!r}")
        return "\n".join(lines) + "\n"


def sigma_form(table: ModeTable) -> PairingForm:
    cfg = table.cfg
    mat = tuple(tuple(complex(sigma_pairing(p, q, cfg)) for q in table.modes) for p in table.modes)
    return PairingForm(table.space, mat, "sigma")


def wick_form(table: ModeTable) -> PairingForm:
    cfg = table.cfg
    mat = tuple(tuple(wick_pairing(p, q, cfg) for q in table.modes) for p in table.modes)
    return PairingForm(table.space, mat, "wick")


def observable_factor(psi: KGMode, phi: KGMode, cfg: KGConfig) -> float:
    return OBSERVABLE_SIGN * (sigma_pairing(psi, phi, cfg) - sigma_pairing(phi, psi, cfg))


def eval_observable(Psi: AlgebraElement, phi: KGMode, table: ModeTable) -> float:
    """Evaluate the observable functional of ``Psi`` on the classical field ``phi``.

    Each monomial ``psi_1 ... psi_k`` contributes the signed subset sum
    ``sum_I (-1)^|I| prod_{i in I} int psi_i phi_t * prod_{j not in I} int psi_j,t phi``.
    """
    if Psi.space != table.space:
        raise DomainError("element is not over this mode table")
    cfg = table.cfg
    vel = {}   # int psi_t phi
    pos = {}   # int psi phi_t
    total = 0.0
    for (mono, p), c in Psi.items():
        if p:
            raise DomainError("observables are defined on hbar-free elements")
        factors = [table.modes[i] for i in monomial_factors(mono)]
        for m in factors:
            if m.label not in vel:
                vel[m.label] = sigma_pairing(m, phi, cfg)
                pos[m.label] = sigma_pairing(phi, m, cfg)
        k = len(factors)
        acc = 0.0
        for mask in range(1 << k):
            term = 1.0
            for i, m in enumerate(factors):
                term *= -pos[m.label] if mask >> i & 1 else vel[m.label]
            acc += term
        total += complex(c) * acc * OBSERVABLE_SIGN ** k
    return complex(total).real if complex(total).imag == 0 else complex(total)
