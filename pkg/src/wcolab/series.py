"""Truncated power-series engine for analytic functions on the unit disc.

A series is stored as its coefficient vector a_0..a_N.  Arithmetic keeps a
common truncation order; coefficient extraction of a general function goes
through equispaced sampling on a circle of radius rho < 1 followed by a DFT,
with the output descaled by rho**n.  Functions that carry an exact
coefficient recurrence (geometric, binomial, finite Blaschke, atomic
singular factors) bypass sampling entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import fftconvolve

from .errors import AliasingError, DomainError, ParameterError, SamplingError

#: Default truncation order used when callers do not specify one.
DEFAULT_TRUNCATION = 1024

#: Convolutions above this length switch to the FFT path.
_FFT_CONV_CUTOFF = 384


def _as_coeff_array(coeffs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("coefficient vector must be one-dimensional and nonempty")
    if not np.all(np.isfinite(arr)):
        raise DomainError("coefficient vector contains NaN or Inf entries")
    return arr


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series a_0 + a_1 z + ... + a_N z**N."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _as_coeff_array(self.coeffs)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def trunc_order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def eval_at(self, z):
        """Evaluate the truncated polynomial at a point or array of points."""
        return npoly.polyval(z, self.coeffs)

    def pad(self, order: int) -> "PowerSeries":
        """Return the same series padded or truncated to the given order."""
        if order == self.trunc_order:
            return self
        out = np.zeros(order + 1, dtype=complex)
        keep = min(order, self.trunc_order) + 1
        out[:keep] = self.coeffs[:keep]
        return PowerSeries(out)

    def derivative(self) -> "PowerSeries":
        if len(self.coeffs) == 1:
            return PowerSeries(np.zeros(1, dtype=complex))
        n = np.arange(1, len(self.coeffs))
        return PowerSeries(self.coeffs[1:] * n)


def _full_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if max(len(a), len(b)) <= _FFT_CONV_CUTOFF:
        return np.convolve(a, b)
    return fftconvolve(a, b)


def truncated_product(a: np.ndarray, b: np.ndarray, order: int):
    """Cauchy product truncated at ``order``; also returns the dropped l2 mass."""
    full = _full_product(a, b)
    head = full[: order + 1]
    if len(head) < order + 1:
        head = np.pad(head, (0, order + 1 - len(head)))
    dropped = float(np.linalg.norm(full[order + 1 :])) if len(full) > order + 1 else 0.0
    return head, dropped


def multiply(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Cauchy product of two series at their common truncation order.

    Mismatched orders are resized down to the shorter one, so the result is
    the truncation of the true product.
    """
    order = min(f.trunc_order, g.trunc_order)
    head, _ = truncated_product(f.coeffs[: order + 1], g.coeffs[: order + 1], order)
    return PowerSeries(head)


def compose(f: PowerSeries, phi: PowerSeries) -> PowerSeries:
    """Truncation of f(phi(z)) at the common order, via Horner's scheme.

    Requires |phi(0)| < 1 so the substituted series converges on the disc.
    When phi(0) = 0 the result is the exact truncation of the composition;
    otherwise the tail of f beyond the stored order contributes an error of
    the order |a_N| * |phi(0)|**N.
    """
    if abs(phi.coeffs[0]) >= 1:
        raise DomainError(
            f"composition requires |phi(0)| < 1, got {abs(phi.coeffs[0]):.6g}"
        )
    order = min(f.trunc_order, phi.trunc_order)
    fc = f.coeffs[: order + 1]
    pc = phi.coeffs[: order + 1]
    acc = np.zeros(order + 1, dtype=complex)
    acc[0] = fc[-1]
    for k in range(order - 1, -1, -1):
        acc, _ = truncated_product(acc, pc, order)
        acc[0] += fc[k]
    return PowerSeries(acc)


@dataclass(frozen=True)
class BoundarySamples:
    """Values of a function on M equispaced points of the circle |z| = rho.

    M must be a power of two; coefficient extraction additionally requires
    M >= 4 * (requested truncation order) to keep aliasing below the tail
    bound.
    """

    radius: float
    values: np.ndarray

    def __post_init__(self):
        m = len(self.values)
        if m < 4 or (m & (m - 1)) != 0:
            raise AliasingError(f"sample count must be a power of two >= 4, got {m}")
        if not (0.0 < self.radius <= 1.0):
            raise DomainError(f"sampling radius must lie in (0, 1], got {self.radius}")
        arr = np.asarray(self.values, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)


def circle_points(rho: float, m: int) -> np.ndarray:
    """The M equispaced sample points rho * exp(2 pi i k / M)."""
    return rho * np.exp(2j * np.pi * np.arange(m) / m)


def sample_circle(f, rho: float, m: int) -> BoundarySamples:
    """Sample a callable (or FunctionSpec) on the circle of radius rho."""
    z = circle_points(rho, m)
    fn = getattr(f, "eval", f)
    return BoundarySamples(radius=rho, values=np.asarray(fn(z), dtype=complex))


def next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


def default_sampling_radius(order: int) -> float:
    # Balances rho**N tail decay against the rho**-n descaling amplification.
    return float(np.exp(-6.0 / max(order, 8)))


def coefficients_from_samples(samples: BoundarySamples, order: int) -> PowerSeries:
    """Extract Taylor coefficients a_0..a_order from circle samples.

    The DFT output is descaled by rho**n.  The sample count must be at least
    4 * order, otherwise aliased tail mass would pollute the head.
    """
    m = len(samples)
    if order >= 1 and m < 4 * order:
        raise AliasingError(
            f"DFT length {m} is shorter than 4x the requested order {order}"
        )
    spec = np.fft.fft(samples.values) / m
    n = np.arange(order + 1)
    descale = samples.radius ** (-n.astype(float)) if samples.radius < 1.0 else 1.0
    return PowerSeries(spec[: order + 1] * descale)


def taylor_coefficients(f, order: int, rho: float | None = None) -> PowerSeries:
    """Taylor coefficients of a function through the given order.

    Functions exposing ``exact_coefficients`` (the closed-form zoo) are
    expanded by their exact recurrences and ``rho`` is ignored.  Everything
    else is sampled on the circle of radius ``rho`` (default exp(-6/order))
    and transformed.
    """
    if order < 0:
        raise ParameterError(f"truncation order must be >= 0, got {order}")
    exact = getattr(f, "exact_coefficients", None)
    if exact is not None:
        coeffs = exact(order)
        if coeffs is not None:
            return PowerSeries(coeffs)
    if isinstance(f, PowerSeries):
        return f.pad(order)
    if rho is None:
        rho = default_sampling_radius(order)
    if not (0.0 < rho < 1.0):
        raise SamplingError(
            f"sampling radius must lie strictly inside (0, 1), got {rho}"
        )
    m = next_pow2(max(4 * order, 64))
    return coefficients_from_samples(sample_circle(f, rho, m), order)
