"""Finite truncations of the weighted composition operator, their singular
values, Schatten norms, the adjoint kernel identity, and moment matrices.

The matrix is formed against normalized monomials e_n = z^n / ||z^n|| so
Hardy and Bergman share one code path: column n holds the coefficients of
h * phi^n rescaled entrywise by ||z^m|| / ||z^n||.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import svds

from .errors import ParameterError, PreconditionError
from .functions import FunctionSpec, validate_self_map
from .series import PowerSeries, taylor_coefficients, truncated_product
from .spaces import SpaceSpec, kernel_coeffs, KernelFamily, monomial_norms_sq

#: Dense decompositions refuse beyond this truncation order.
DENSE_LIMIT = 4096

#: Full SVD is cheap enough below this size; above it the top singular value
#: is found iteratively.
_FULL_SVD_LIMIT = 400

CONVERGED = "CONVERGED"
DIVERGENT = "DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class TruncationMatrix:
    """(N+1) x (N+1) matrix of W against normalized monomials."""

    space: SpaceSpec
    order: int
    entries: np.ndarray
    column_tail: np.ndarray = field(default=None, repr=False)
    _singular_values: np.ndarray = field(default=None, repr=False)

    @property
    def singular_values(self) -> np.ndarray:
        """Nonincreasing singular values (dense decomposition, computed lazily)."""
        if self._singular_values is None:
            if self.order > DENSE_LIMIT:
                raise ParameterError(
                    f"dense decomposition refused above order {DENSE_LIMIT}"
                )
            self._singular_values = np.linalg.svd(self.entries, compute_uv=False)
        return self._singular_values

    def submatrix(self, order: int) -> "TruncationMatrix":
        """The leading compression to a smaller truncation order."""
        if order > self.order:
            raise ParameterError("submatrix order exceeds the built truncation")
        tail = None if self.column_tail is None else self.column_tail[: order + 1]
        return TruncationMatrix(self.space, order, self.entries[: order + 1, : order + 1], tail)


def _weight_coefficients(h, order: int) -> np.ndarray:
    if isinstance(h, PowerSeries):
        return h.pad(order).coeffs
    return taylor_coefficients(h, order).coeffs


def _symbol_power_columns(h, phi, order: int):
    """Coefficients of h * phi^n for n = 0..order, with per-column dropped-tail mass."""
    h_c = _weight_coefficients(h, order)
    phi_c = taylor_coefficients(phi, order).coeffs
    cols = np.empty((order + 1, order + 1), dtype=complex)
    tails = np.empty(order + 1)
    power = np.zeros(order + 1, dtype=complex)
    power[0] = 1.0
    carried = 0.0
    for n in range(order + 1):
        col, dropped = truncated_product(h_c, power, order)
        cols[:, n] = col
        tails[n] = dropped + carried
        if n < order:
            power, power_dropped = truncated_product(power, phi_c, order)
            carried += power_dropped
    return cols, tails


def build_operator_matrix(h, phi: FunctionSpec, space: SpaceSpec, order: int) -> TruncationMatrix:
    """Matrix truncation of f -> h * (f o phi) in normalized monomial coordinates.

    phi must pass the disc self-map gate.  Columns are built by iterated
    truncated series multiplication; the dropped-mass indicator per column is
    kept on the result.
    """
    if order < 1:
        raise ParameterError(f"truncation order must be >= 1, got {order}")
    if isinstance(phi, FunctionSpec):
        validate_self_map(phi)
    cols, tails = _symbol_power_columns(h, phi, order)
    roots = np.sqrt(monomial_norms_sq(space, order))
    entries = cols * roots[:, None] / roots[None, :]
    return TruncationMatrix(space, order, entries, column_tail=tails)


def operator_norm_estimate(a: TruncationMatrix) -> float:
    """Largest singular value of the truncation (a lower bound for ||W||)."""
    if a._singular_values is not None:
        return float(a._singular_values[0])
    n = a.entries.shape[0]
    if n <= _FULL_SVD_LIMIT:
        return float(a.singular_values[0])
    v0 = np.ones(min(a.entries.shape), dtype=complex)
    v0 /= np.linalg.norm(v0)
    top = svds(a.entries, k=1, v0=v0, return_singular_vectors=False, maxiter=5000)
    return float(top[0])


@dataclass(frozen=True)
class SchattenEstimate:
    """S_p norm of the truncation with its convergence-in-N trace."""

    p: float
    value: float
    truncation_trace: tuple
    flag: str

    @property
    def converged(self) -> bool:
        return self.flag == CONVERGED


def schatten_norm(a: TruncationMatrix, p: float,
                  cauchy_gap: float = 1e-6, growth_factor: float = 1.1) -> SchattenEstimate:
    """(sum sigma_i^p)^(1/p) with values at orders N/4, N/2, N.

    The flag is CONVERGED when the last Cauchy gap is below ``cauchy_gap``,
    DIVERGENT when the value still grows by ``growth_factor`` per doubling,
    and INCONCLUSIVE otherwise.
    """
    if p < 1:
        raise ParameterError(f"Schatten exponent must be >= 1, got {p}")
    orders = sorted({max(1, a.order // 4), max(1, a.order // 2), a.order})
    trace = []
    for n in orders:
        sigma = a.submatrix(n).singular_values
        trace.append((n, float(np.sum(sigma ** p) ** (1.0 / p))))
    value = trace[-1][1]
    flag = INCONCLUSIVE
    if len(trace) >= 2:
        prev = trace[-2][1]
        if abs(value - prev) < cauchy_gap:
            flag = CONVERGED
        elif prev > 0 and value >= growth_factor * prev:
            flag = DIVERGENT
    return SchattenEstimate(p=p, value=value, truncation_trace=tuple(trace), flag=flag)


def adjoint_kernel_check(a: TruncationMatrix, h, phi: FunctionSpec, w: complex) -> float:
    """Relative residual of the adjoint identity on reproducing kernels.

    Returns ||A* k_w - conj(h(w)) k_{phi(w)}|| / ||k_w|| with the kernels
    expressed in normalized monomial coordinates at the matrix truncation.
    """
    if abs(w) > 0.9:
        raise PreconditionError("adjoint check needs |w| <= 0.9 to keep kernel tails small")
    roots = np.sqrt(monomial_norms_sq(a.space, a.order))
    k_w = kernel_coeffs(KernelFamily(a.space, "standard", w), a.order).coeffs * roots
    phi_w = phi.eval(w) if isinstance(phi, FunctionSpec) else phi.eval_at(w)
    h_w = h.eval(w) if isinstance(h, FunctionSpec) else h.eval_at(w)
    k_phi_w = kernel_coeffs(KernelFamily(a.space, "standard", phi_w), a.order).coeffs * roots
    residual = a.entries.conj().T @ k_w - np.conj(h_w) * k_phi_w
    return float(np.linalg.norm(residual) / np.linalg.norm(k_w))


def gram_moments(h, phi: FunctionSpec, space: SpaceSpec, order: int,
                 coeff_order: int | None = None) -> np.ndarray:
    """Hermitian matrix G[m, n] = <h phi^m, h phi^n> of measure moments.

    Products are expanded to ``coeff_order`` (default 4x the moment order)
    so the high powers keep their full mass.  The result is checked to be
    positive semidefinite up to an eigenvalue floor of -1e-8 * trace.
    """
    if coeff_order is None:
        coeff_order = min(4 * order, 8192)
    coeff_order = max(coeff_order, order)
    cols, _ = _symbol_power_columns(h, phi, coeff_order)
    cols = cols[:, : order + 1]
    weights = monomial_norms_sq(space, coeff_order)
    gram = np.conj(cols.conj().T @ (weights[:, None] * cols))
    gram = 0.5 * (gram + gram.conj().T)
    eigs = np.linalg.eigvalsh(gram)
    floor = -1e-8 * max(float(np.trace(gram).real), 1e-300)
    if eigs[0] < floor:
        raise ArithmeticError(
            f"moment matrix lost positivity: min eigenvalue {eigs[0]:.3e}"
        )
    return gram
