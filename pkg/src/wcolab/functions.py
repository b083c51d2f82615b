"""Function zoo: closed-form analytic functions on the unit disc.

Each variant knows how to evaluate itself (vectorized over numpy arrays),
how to differentiate itself, and, where a recurrence exists, how to produce
exact Taylor coefficients.  The JSON wire format understood by
``parse_spec`` / ``emit_spec`` is documented in the CLI module.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DomainError,
    PreconditionError,
    SelfMapError,
    SpecValidationError,
    UnsupportedOperation,
)
from .series import PowerSeries, compose, truncated_product

_BOUNDARY_SLACK = 1e-12

#: Composition expansions fall back to sampling above this order unless the
#: inner part vanishes at the origin (where Horner is exact at every order).
_EXACT_COMPOSE_LIMIT = 512


def _as_points(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


class FunctionSpec(ABC):
    """An analytic function on the open unit disc."""

    tag: str = ""
    #: False for variants whose boundary values are not directly computable.
    allows_boundary = True
    #: True for variants that must be evaluated strictly inside the disc.
    interior_only = False

    @abstractmethod
    def _eval(self, z: np.ndarray) -> np.ndarray:
        """Evaluate on points already checked to lie in the domain."""

    @abstractmethod
    def _derivative(self, z: np.ndarray) -> np.ndarray:
        """Derivative on checked points."""

    def exact_coefficients(self, order: int) -> np.ndarray | None:
        """Exact Taylor coefficients through ``order``, or None if there is
        no closed recurrence and sampling must be used."""
        return None

    @abstractmethod
    def payload(self) -> dict:
        """JSON-serializable fields of this variant (without the type tag)."""

    def eval(self, z):
        arr, scalar = _as_points(z)
        self._check_domain(arr)
        out = self._eval(arr)
        return complex(out) if scalar else out

    def derivative_at(self, z):
        arr, scalar = _as_points(z)
        self._check_domain(arr)
        out = self._derivative(arr)
        return complex(out) if scalar else out

    def __call__(self, z):
        return self.eval(z)

    def _check_domain(self, arr: np.ndarray) -> None:
        mod = np.abs(arr)
        if np.any(mod > 1.0 + _BOUNDARY_SLACK):
            raise DomainError(
                f"evaluation point outside the closed disc (|z| = {float(mod.max()):.6g})"
            )
        on_boundary = mod >= 1.0 - _BOUNDARY_SLACK
        if np.any(on_boundary):
            if self.interior_only:
                raise DomainError(
                    f"{self.tag} evaluation requires |z| < 1; "
                    "use boundary-sample machinery for radial limits"
                )
            if not self.allows_boundary:
                raise UnsupportedOperation(
                    f"boundary evaluation is not defined for a pure {self.tag} spec"
                )


def evaluate(f: FunctionSpec, z):
    """Evaluate a function spec at a point (or array) of the closed disc."""
    return f.eval(z)


def derivative_eval(f: FunctionSpec, z):
    """Evaluate the analytic derivative f'(z) by the variant's exact rule."""
    return f.derivative_at(z)


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class SeriesSpec(FunctionSpec):
    """Function given purely by its truncated Taylor coefficients."""

    coeffs: tuple

    tag = "series"
    allows_boundary = False

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size == 0:
            raise SpecValidationError("series spec needs a nonempty coefficient list")
        if not np.all(np.isfinite(arr)):
            raise SpecValidationError("series coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in arr))

    @classmethod
    def from_power_series(cls, ps: PowerSeries) -> "SeriesSpec":
        return cls(tuple(ps.coeffs))

    def _eval(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coeffs))

    def _derivative(self, z):
        return PowerSeries(np.asarray(self.coeffs)).derivative().eval_at(z)

    def exact_coefficients(self, order):
        return PowerSeries(np.asarray(self.coeffs)).pad(order).coeffs

    def payload(self):
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}


@dataclass(frozen=True)
class MonomialPower(FunctionSpec):
    """z**n."""

    n: int

    tag = "monomial_power"

    def __post_init__(self):
        if self.n < 0:
            raise SpecValidationError("monomial power must be >= 0")

    def _eval(self, z):
        return z ** self.n

    def _derivative(self, z):
        if self.n == 0:
            return np.zeros_like(z)
        return self.n * z ** (self.n - 1)

    def exact_coefficients(self, order):
        out = np.zeros(order + 1, dtype=complex)
        if self.n <= order:
            out[self.n] = 1.0
        return out

    def payload(self):
        return {"n": self.n}


def _binomial_coeffs(exponent: float, order: int) -> np.ndarray:
    """Coefficients of (1 - z)**(-exponent) via the rising-factorial recurrence."""
    out = np.empty(order + 1, dtype=complex)
    out[0] = 1.0
    for k in range(1, order + 1):
        out[k] = out[k - 1] * (exponent + k - 1) / k
    return out


@dataclass(frozen=True)
class FracPower(FunctionSpec):
    """(1 - z)**(-beta), principal branch.

    beta > 0 gives a weight singular at z = 1; beta < 0 gives a weight
    vanishing there.  1 - z maps the disc into the right half-plane, so the
    principal power is single-valued.
    """

    beta: float

    def __post_init__(self):
        if self.beta == 0:
            raise SpecValidationError("frac_power with beta = 0 is the constant 1; use a series spec")

    tag = "frac_power"

    def _eval(self, z):
        base = 1.0 - z
        if self.beta > 0 and np.any(np.abs(base) < _BOUNDARY_SLACK):
            raise DomainError("frac_power with beta > 0 is singular at z = 1")
        return base ** (-self.beta)

    def _derivative(self, z):
        base = 1.0 - z
        if np.any(np.abs(base) < _BOUNDARY_SLACK):
            raise DomainError("frac_power derivative is singular at z = 1")
        return self.beta * base ** (-self.beta - 1.0)

    def exact_coefficients(self, order):
        return _binomial_coeffs(self.beta, order)

    def payload(self):
        return {"beta": self.beta}


@dataclass(frozen=True)
class CuspMap(FunctionSpec):
    """1 - sqrt(1 - z): maps the disc onto a cusped region with vertex at 1."""

    tag = "icecream"

    def _eval(self, z):
        return 1.0 - np.sqrt(1.0 - z)

    def _derivative(self, z):
        base = 1.0 - z
        if np.any(np.abs(base) < _BOUNDARY_SLACK):
            raise DomainError("cusp map derivative is singular at z = 1")
        return 0.5 / np.sqrt(base)

    def exact_coefficients(self, order):
        # sqrt(1 - z) has the (1 - z)**gamma recurrence with gamma = 1/2
        sqrt_coeffs = np.empty(order + 1, dtype=complex)
        sqrt_coeffs[0] = 1.0
        for k in range(1, order + 1):
            sqrt_coeffs[k] = sqrt_coeffs[k - 1] * (k - 1 - 0.5) / k
        out = -sqrt_coeffs
        out[0] = 0.0
        return out

    def payload(self):
        return {}


@dataclass(frozen=True)
class DiscAutomorphism(FunctionSpec):
    """(a - z) / (1 - conj(a) z) with |a| < 1."""

    a: complex

    tag = "automorphism"

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        if abs(self.a) >= 1:
            raise SpecValidationError(f"automorphism parameter needs |a| < 1, got |a| = {abs(self.a):.6g}")

    def _eval(self, z):
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def _derivative(self, z):
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2

    def exact_coefficients(self, order):
        out = np.zeros(order + 1, dtype=complex)
        out[0] = self.a
        ac = np.conj(self.a)
        if order >= 1:
            out[1:] = (abs(self.a) ** 2 - 1.0) * ac ** np.arange(order)
        return out

    def payload(self):
        return {"a": {"re": self.a.real, "im": self.a.imag}}


def _exp_series(u: np.ndarray) -> np.ndarray:
    """exp of a power series, by the s' = u' s recurrence (s_0 = exp(u_0))."""
    n = len(u) - 1
    s = np.zeros(n + 1, dtype=complex)
    s[0] = np.exp(u[0])
    k = np.arange(n + 1)
    for m in range(1, n + 1):
        s[m] = np.dot(k[1 : m + 1] * u[1 : m + 1], s[m - 1 :: -1][:m]) / m
    return s


@dataclass(frozen=True)
class InnerFunctionData(FunctionSpec):
    """Canonical inner-function data: rotation, origin zero order, Blaschke
    zeros, and a finite atomic singular measure.

    Evaluates as
        exp(i rotation) * z**N * prod (|a|/a)(a - z)/(1 - conj(a) z)
                        * exp(-sum mass * (zeta + z)/(zeta - z))
    with the atoms zeta = exp(i angle) on the unit circle.  Atoms make
    boundary values delicate, so evaluation is restricted to |z| < 1.
    """

    rotation: float = 0.0
    vanishing_order: int = 0
    zeros: tuple = ()
    atoms: tuple = ()

    tag = "blaschke"
    interior_only = True

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        atoms = tuple((float(t), float(m)) for t, m in self.atoms)
        if self.vanishing_order < 0:
            raise SpecValidationError("vanishing order must be >= 0")
        for a in zeros:
            if a == 0:
                raise SpecValidationError("origin zeros belong in vanishing_order, not the zero list")
            if abs(a) >= 1:
                raise SpecValidationError(f"Blaschke zero needs |a| < 1, got |a| = {abs(a):.6g}")
        for _, mass in atoms:
            if mass <= 0:
                raise SpecValidationError("singular atom masses must be strictly positive")
        object.__setattr__(self, "rotation", float(self.rotation))
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "atoms", atoms)

    def atom_points(self) -> np.ndarray:
        return np.exp(1j * np.array([t for t, _ in self.atoms]))

    def _factors(self, z):
        """Product of all non-monomial factors (nonzero at the origin)."""
        out = np.full_like(z, np.exp(1j * self.rotation))
        for a in self.zeros:
            out = out * (abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z)
        for zeta, mass in zip(self.atom_points(), (m for _, m in self.atoms)):
            out = out * np.exp(-mass * (zeta + z) / (zeta - z))
        return out

    def _factors_logderiv(self, z):
        out = np.zeros_like(z)
        for a in self.zeros:
            # b'(z)/b(z) for b = (|a|/a)(a - z)/(1 - conj(a) z)
            out = out + (abs(a) ** 2 - 1.0) / ((a - z) * (1.0 - np.conj(a) * z))
        for zeta, mass in zip(self.atom_points(), (m for _, m in self.atoms)):
            out = out - 2.0 * mass * zeta / (zeta - z) ** 2
        return out

    def _eval(self, z):
        return z ** self.vanishing_order * self._factors(z)

    def _derivative(self, z):
        g = self._factors(z)
        gprime = g * self._factors_logderiv(z)
        n = self.vanishing_order
        if n == 0:
            return gprime
        return z ** (n - 1) * (n * g + z * gprime)

    def exact_coefficients(self, order):
        # Rational Blaschke part by polynomial division, atomic singular part
        # by the exp-of-series recurrence, combined by truncated products.
        num = np.array([np.exp(1j * self.rotation)], dtype=complex)
        den = np.array([1.0], dtype=complex)
        for a in self.zeros:
            num = np.convolve(num, np.array([(abs(a) / a) * a, -abs(a) / a]))
            den = np.convolve(den, np.array([1.0, -np.conj(a)]))
        coeffs = np.zeros(order + 1, dtype=complex)
        upto = min(order, len(num) - 1)
        coeffs[: upto + 1] = num[: upto + 1]
        for m in range(1, order + 1):
            hi = min(len(den) - 1, m)
            if hi >= 1:
                coeffs[m] -= np.dot(den[1 : hi + 1], coeffs[m - 1 :: -1][:hi])
        if self.atoms:
            u = np.zeros(order + 1, dtype=complex)
            for (theta, mass) in self.atoms:
                n = np.arange(order + 1)
                u -= 2.0 * mass * np.exp(-1j * theta * n)
                u[0] += mass  # the n = 0 term of the kernel is 1, not 2
            coeffs, _ = truncated_product(coeffs, _exp_series(u), order)
        if self.vanishing_order:
            shifted = np.zeros(order + 1, dtype=complex)
            keep = order + 1 - self.vanishing_order
            if keep > 0:
                shifted[self.vanishing_order :] = coeffs[:keep]
            coeffs = shifted
        return coeffs

    def payload(self):
        return {
            "rotation": self.rotation,
            "vanishing_order": self.vanishing_order,
            "zeros": [{"re": a.real, "im": a.imag} for a in self.zeros],
            "atoms": [{"angle": t, "mass": m} for t, m in self.atoms],
        }


@dataclass(frozen=True)
class Affine(FunctionSpec):
    """add + scale * g(z) for a wrapped spec g."""

    add: complex
    scale: complex
    fn: FunctionSpec

    tag = "affine"

    def __post_init__(self):
        object.__setattr__(self, "add", complex(self.add))
        object.__setattr__(self, "scale", complex(self.scale))

    def _eval(self, z):
        return self.add + self.scale * self.fn._eval(z)

    def _derivative(self, z):
        return self.scale * self.fn._derivative(z)

    def exact_coefficients(self, order):
        inner = self.fn.exact_coefficients(order)
        if inner is None:
            return None
        out = self.scale * inner
        out[0] += self.add
        return out

    def payload(self):
        return {
            "add": [self.add.real, self.add.imag],
            "scale": [self.scale.real, self.scale.imag],
            "inner": emit_spec(self.fn),
        }

    def _check_domain(self, arr):
        self.fn._check_domain(arr)


@dataclass(frozen=True)
class Product(FunctionSpec):
    """Pointwise product of the wrapped specs."""

    parts: tuple

    tag = "product"

    def __post_init__(self):
        if len(self.parts) < 1:
            raise SpecValidationError("product needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def _eval(self, z):
        out = self.parts[0]._eval(z)
        for p in self.parts[1:]:
            out = out * p._eval(z)
        return out

    def _derivative(self, z):
        vals = [p._eval(z) for p in self.parts]
        total = np.zeros_like(z)
        for i, p in enumerate(self.parts):
            term = p._derivative(z)
            for j, v in enumerate(vals):
                if j != i:
                    term = term * v
            total = total + term
        return total

    def exact_coefficients(self, order):
        acc = None
        for p in self.parts:
            c = p.exact_coefficients(order)
            if c is None:
                return None
            acc = c if acc is None else truncated_product(acc, c, order)[0]
        return acc

    def payload(self):
        return {"parts": [emit_spec(p) for p in self.parts]}

    def _check_domain(self, arr):
        for p in self.parts:
            p._check_domain(arr)


@dataclass(frozen=True)
class Composition(FunctionSpec):
    """Left-to-right fold: parts [f, g] evaluates as f(g(z))."""

    parts: tuple

    tag = "composition"

    def __post_init__(self):
        if len(self.parts) < 2:
            raise SpecValidationError("composition needs at least two parts")
        object.__setattr__(self, "parts", tuple(self.parts))

    def _eval(self, z):
        out = z
        for p in reversed(self.parts):
            out = p.eval(out)
        return out

    def _derivative(self, z):
        out = z
        deriv = np.ones_like(z)
        for p in reversed(self.parts):
            deriv = deriv * p.derivative_at(out)
            out = p.eval(out)
        return deriv

    def exact_coefficients(self, order):
        coeffs = None
        for p in reversed(self.parts):
            c = p.exact_coefficients(order)
            if c is None:
                return None
            if coeffs is None:
                coeffs = c
                continue
            if abs(coeffs[0]) >= 1:
                return None
            if abs(coeffs[0]) > 0 and order > _EXACT_COMPOSE_LIMIT:
                return None  # Horner tail error is not controlled; sample instead
            coeffs = compose(PowerSeries(c), PowerSeries(coeffs)).coeffs
        return coeffs

    def payload(self):
        return {"parts": [emit_spec(p) for p in self.parts]}

    def _check_domain(self, arr):
        # the outermost part sees transformed points; only check the input
        self.parts[-1]._check_domain(arr)


# ---------------------------------------------------------------------------
# spectrum and gates


@dataclass(frozen=True)
class SpectrumSet:
    """Spectrum of an inner function: its zeros plus the boundary support of
    the singular measure (finite data has no zero-accumulation points)."""

    zeros: tuple
    boundary_angles: tuple


def spectrum(d: InnerFunctionData) -> SpectrumSet:
    angles = tuple(sorted(t % (2 * np.pi) for t, _ in d.atoms))
    return SpectrumSet(zeros=d.zeros, boundary_angles=angles)


def validate_self_map(f: FunctionSpec, samples: int = 4096,
                      radius: float = 1.0 - 1e-8, tol: float = 1e-9) -> float:
    """Check |f| <= 1 on a near-boundary circle; returns the max modulus.

    Raises SelfMapError (carrying the max and its location) on failure.
    """
    z = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.abs(f.eval(z))
    idx = int(np.argmax(vals))
    top = float(vals[idx])
    if top > 1.0 + tol:
        raise SelfMapError(
            f"symbol is not a disc self-map: |phi| reaches {top:.9g}",
            max_modulus=top,
            argmax=complex(z[idx]),
        )
    return top


def require_inner(f: FunctionSpec, samples: int = 4096,
                  radius: float = 1.0 - 1e-8, tol: float = 1e-4) -> None:
    """Gate for operations that need an inner symbol (unimodular boundary
    values): the mean of 1 - |f|^2 near the boundary must be tiny."""
    validate_self_map(f, samples=samples, radius=radius)
    z = radius * np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    defect = float(np.mean(1.0 - np.abs(f.eval(z)) ** 2))
    if defect > tol:
        raise PreconditionError(
            f"symbol is not inner: mean boundary defect 1 - |phi|^2 = {defect:.3g}"
        )


def is_finite_blaschke(f: FunctionSpec) -> bool:
    """True when f is a finite Blaschke product (no singular part)."""
    if isinstance(f, MonomialPower):
        return f.n >= 1
    if isinstance(f, DiscAutomorphism):
        return True
    if isinstance(f, InnerFunctionData):
        return not f.atoms
    if isinstance(f, (Product, Composition)):
        return all(is_finite_blaschke(p) for p in f.parts)
    return False


# ---------------------------------------------------------------------------
# wire format

_VARIANTS = {
    cls.tag: cls
    for cls in (
        SeriesSpec,
        MonomialPower,
        FracPower,
        CuspMap,
        DiscAutomorphism,
        InnerFunctionData,
        Affine,
        Product,
        Composition,
    )
}


def _to_complex(value, field: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    if isinstance(value, dict) and set(value) == {"re", "im"}:
        return complex(value["re"], value["im"])
    raise SpecValidationError(f"cannot read complex value for {field!r}: {value!r}")


def parse_spec(document, role: str = "weight") -> FunctionSpec:
    """Parse a function-spec document (dict or JSON text).

    With role="symbol" the disc self-map gate is applied after parsing.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecValidationError(f"spec document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or "type" not in document:
        raise SpecValidationError("spec document must be an object with a 'type' field")
    kind = document["type"]
    fields = {k: v for k, v in document.items() if k != "type"}
    if kind == "exp_of_moebius":
        spec: FunctionSpec = InnerFunctionData(atoms=((0.0, 1.0),))
    elif kind == "singular_inner":
        spec = InnerFunctionData(
            rotation=float(fields.get("rotation", 0.0)),
            atoms=tuple((float(a["angle"]), float(a["mass"])) for a in fields.get("atoms", [])),
        )
    elif kind == "series":
        spec = SeriesSpec(tuple(_to_complex(c, "coeffs") for c in fields["coeffs"]))
    elif kind == "monomial_power":
        spec = MonomialPower(int(fields["n"]))
    elif kind == "frac_power":
        spec = FracPower(float(fields["beta"]))
    elif kind == "icecream":
        spec = CuspMap()
    elif kind == "automorphism":
        spec = DiscAutomorphism(_to_complex(fields["a"], "a"))
    elif kind == "blaschke":
        spec = InnerFunctionData(
            rotation=float(fields.get("rotation", 0.0)),
            vanishing_order=int(fields.get("vanishing_order", 0)),
            zeros=tuple(_to_complex(a, "zeros") for a in fields.get("zeros", [])),
            atoms=tuple((float(a["angle"]), float(a["mass"])) for a in fields.get("atoms", [])),
        )
    elif kind == "affine":
        spec = Affine(
            _to_complex(fields["add"], "add"),
            _to_complex(fields["scale"], "scale"),
            parse_spec(fields["inner"]),
        )
    elif kind in ("product", "composition"):
        parts = tuple(parse_spec(p) for p in fields["parts"])
        spec = Product(parts) if kind == "product" else Composition(parts)
    else:
        raise SpecValidationError(f"unknown function-spec variant {kind!r}")
    if role == "symbol":
        validate_self_map(spec)
    return spec


def emit_spec(f: FunctionSpec) -> dict:
    """Serialize a spec to its wire dict; parse_spec(emit_spec(f)) == f."""
    doc = {"type": f.tag}
    doc.update(f.payload())
    return doc


@lru_cache(maxsize=128)
def cached_circle_values(spec: FunctionSpec, rho: float, m: int) -> np.ndarray:
    """Samples of a spec on the rho-circle, cached per (spec, rho, M)."""
    z = rho * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.asarray(spec.eval(z), dtype=complex)
    vals.setflags(write=False)
    return vals
