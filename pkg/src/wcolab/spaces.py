"""Hardy and weighted Bergman space norms, reproducing kernels, and the
projection onto the model space of an inner symbol.

Conventions: the Hardy norm is the l2 norm of Taylor coefficients; the
Bergman A^2_alpha norm integrates |f|^2 against (1/pi)(1 - |z|^2)^alpha dA,
so monomials have norm-squared Beta(n+1, alpha+1).  Normalized kernels are
always divided by their true computed norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ParameterError, PreconditionError
from .functions import FunctionSpec, cached_circle_values, require_inner
from .series import PowerSeries, next_pow2

HARDY = "hardy"
BERGMAN = "bergman"

_KERNEL_KINDS = ("standard", "normalized", "derivative", "normalized_derivative")


@dataclass(frozen=True)
class SpaceSpec:
    """Selects Hardy H^2 (alpha ignored) or Bergman A^2_alpha, alpha > -1."""

    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in (HARDY, BERGMAN):
            raise ParameterError(f"unknown space kind {self.kind!r}")
        if self.kind == BERGMAN and not self.alpha > -1.0:
            raise ParameterError(f"Bergman weight needs alpha > -1, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def is_hardy(self) -> bool:
        return self.kind == HARDY


def hardy_space() -> SpaceSpec:
    return SpaceSpec(HARDY)


def bergman_space(alpha: float = 0.0) -> SpaceSpec:
    return SpaceSpec(BERGMAN, alpha)


def monomial_norms_sq(space: SpaceSpec, order: int) -> np.ndarray:
    """||z^n||^2 for n = 0..order, computed stably via log-gamma."""
    n = np.arange(order + 1, dtype=float)
    if space.is_hardy:
        return np.ones(order + 1)
    a = space.alpha
    return np.exp(gammaln(n + 1.0) + gammaln(a + 1.0) - gammaln(n + a + 2.0))


def monomial_norm_sq(space: SpaceSpec, n: int) -> float:
    if n < 0:
        raise ParameterError("monomial degree must be >= 0")
    return float(monomial_norms_sq(space, n)[n])


def _coeffs_of(f) -> np.ndarray:
    return f.coeffs if isinstance(f, PowerSeries) else np.asarray(f, dtype=complex)


def inner_product(space: SpaceSpec, f, g) -> complex:
    """<f, g> = sum a_n conj(b_n) ||z^n||^2 at the common truncation."""
    a, b = _coeffs_of(f), _coeffs_of(g)
    m = min(len(a), len(b))
    w = monomial_norms_sq(space, m - 1)
    return complex(np.sum(a[:m] * np.conj(b[:m]) * w))


def norm(space: SpaceSpec, f) -> float:
    a = _coeffs_of(f)
    w = monomial_norms_sq(space, len(a) - 1)
    return float(np.sqrt(np.sum(np.abs(a) ** 2 * w)))


@dataclass(frozen=True)
class KernelFamily:
    """A reproducing-kernel family member: which space, which kind, where."""

    space: SpaceSpec
    kind: str
    w: complex

    def __post_init__(self):
        if self.kind not in _KERNEL_KINDS:
            raise ParameterError(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "w", complex(self.w))
        if abs(self.w) >= 1:
            raise DomainError(f"kernel point must lie inside the disc, |w| = {abs(self.w):.6g}")


def kernel_norm_sq(space: SpaceSpec, kind: str, w: complex) -> float:
    """Exact closed-form norm-squared of the (unnormalized) kernel at w.

    Hardy: ||k_w||^2 = 1/(1-|w|^2) and ||kdot_w||^2 = (1+|w|^2)/(1-|w|^2)^3.
    Bergman: ||h_w||^2 = (alpha+1)/(1-|w|^2)^(alpha+2) and
    ||hdot_w||^2 = (alpha+1)(alpha+2)(1+(alpha+2)|w|^2)/(1-|w|^2)^(alpha+4).
    """
    x = abs(w) ** 2
    base = kind.replace("normalized_", "").replace("normalized", "standard")
    if space.is_hardy:
        if base == "standard":
            return 1.0 / (1.0 - x)
        return (1.0 + x) / (1.0 - x) ** 3
    a = space.alpha
    if base == "standard":
        return (a + 1.0) / (1.0 - x) ** (a + 2.0)
    return (a + 1.0) * (a + 2.0) * (1.0 + (a + 2.0) * x) / (1.0 - x) ** (a + 4.0)


def kernel_coeffs(family: KernelFamily, order: int) -> PowerSeries:
    """Taylor coefficients of the kernel through the given order.

    Standard Hardy kernel: conj(w)^n.  Hardy derivative kernel
    z/(1 - conj(w) z)^2: n conj(w)^(n-1).  Bergman standard:
    (alpha+1) binom(n+alpha+1, n) conj(w)^n; Bergman derivative the exact
    d/d(conj w) of that.  Normalized kinds divide by the true norm.
    """
    space, w = family.space, family.w
    n = np.arange(order + 1, dtype=float)
    wc = np.conj(w)
    if space.is_hardy:
        if family.kind in ("standard", "normalized"):
            coeffs = wc ** n
        else:
            coeffs = np.zeros(order + 1, dtype=complex)
            if order >= 1:
                coeffs[1:] = np.arange(1, order + 1) * wc ** np.arange(order)
    else:
        a = space.alpha
        if family.kind in ("standard", "normalized"):
            binom = np.exp(gammaln(n + a + 2.0) - gammaln(n + 1.0) - gammaln(a + 2.0))
            coeffs = (a + 1.0) * binom * wc ** n
        else:
            coeffs = np.zeros(order + 1, dtype=complex)
            if order >= 1:
                m = np.arange(1, order + 1, dtype=float)
                binom = np.exp(gammaln(m + a + 2.0) - gammaln(m) - gammaln(a + 3.0))
                coeffs[1:] = (a + 1.0) * (a + 2.0) * binom * wc ** (m - 1.0)
    if family.kind.startswith("normalized"):
        coeffs = coeffs / np.sqrt(kernel_norm_sq(space, family.kind, w))
    return PowerSeries(coeffs)


def model_space_project(h: PowerSeries, phi: FunctionSpec, order: int,
                        rho: float = 1.0 - 1e-8) -> PowerSeries:
    """Project h onto the model space H^2 minus phi H^2 of an inner symbol.

    Computed on near-boundary samples as phi * (strictly-negative-frequency
    part of conj(phi) * h), then read back as nonnegative Taylor
    coefficients.  The result P satisfies <P, phi z^k> ~ 0.
    """
    require_inner(phi)
    m = next_pow2(max(4 * (order + 1), 4 * len(h), 4096))
    padded = np.zeros(m, dtype=complex)
    padded[: len(h)] = h.coeffs * rho ** np.arange(len(h), dtype=float)
    h_s = np.fft.ifft(padded) * m
    phi_s = cached_circle_values(phi, rho, m)
    spec = np.fft.fft(h_s * np.conj(phi_s)) / m
    mask = np.zeros(m)
    mask[m // 2 + 1 :] = 1.0  # strictly negative frequencies
    negative_part = np.fft.ifft(spec * mask * m)
    out = np.fft.fft(phi_s * negative_part) / m
    n = np.arange(order + 1, dtype=float)
    return PowerSeries(out[: order + 1] * rho ** (-n))
