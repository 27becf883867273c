"""Exact Fourier analysis of real functions on the r-ary cube {0, ..., r-1}^n.

Tables are stored in C order of an ``(r,) * n`` array, so the flat index of
a point is ``sum(x_i * r**(n - i))`` with ``x_1`` the most significant digit.
Coordinates passed to the public operations are 1-based (``1 <= i <= n``).

The transform uses the normalisation ``f_hat(S) = r**-n * sum_x f(x) *
conj(omega**<S, x>)`` with ``omega = exp(2*pi*i / r)``, so that the characters
form an orthonormal basis for the uniform probability measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from ._config import IDENTITY_RTOL, INEQUALITY_SLACK, check_capacity
from ._validation import check_int, check_real
from .exceptions import ArgumentError, NumericIntegrityError

__all__ = [
    "CubePoint",
    "TabulatedFunction",
    "FourierSpectrum",
    "HypercontractivityResult",
    "hypercontractive_constant",
    "cube_points",
    "degree_table",
    "neighbor",
    "shift",
    "delta_i",
    "fourier_transform",
    "naive_fourier_transform",
    "inverse_transform",
    "norm_q",
    "variance",
    "low_degree_projection",
    "hypercontractivity_check",
]


def hypercontractive_constant(r):
    """Constant ``(9/2) r^3`` of the r-ary hypercontractive inequality."""
    return 4.5 * r**3


@dataclass(frozen=True)
class CubePoint:
    """A point of {0, ..., r-1}^n."""

    r: int
    coords: tuple

    def __post_init__(self):
        check_int(self.r, "r", minimum=2)
        coords = tuple(int(c) for c in self.coords)
        if len(coords) < 1:
            raise ArgumentError("a cube point needs at least one coordinate")
        for c in coords:
            if not 0 <= c < self.r:
                raise ArgumentError(f"coordinate {c} outside 0..{self.r - 1}")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self):
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, item):
        return self.coords[item]

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def flat_index(self):
        return point_index(self.coords, self.r)

    @classmethod
    def from_index(cls, idx, r, n):
        digits = []
        for _ in range(n):
            idx, d = divmod(idx, r)
            digits.append(d)
        return cls(r, tuple(reversed(digits)))


def point_index(coords, r):
    idx = 0
    for c in coords:
        idx = idx * r + int(c)
    return idx


def cube_points(r, n):
    """All points of the cube as an ``(r**n, n)`` integer array, in index order."""
    check_capacity(r, n)
    return np.indices((r,) * n, dtype=np.int64).reshape(n, -1).T


def degree_table(r, n):
    """``|S|`` (number of nonzero coordinates) for every index S, shape ``(r,)*n``."""
    nonzero = (np.arange(r) != 0).astype(np.int64)
    deg = np.zeros((r,) * n, dtype=np.int64)
    for axis in range(n):
        shape = [1] * n
        shape[axis] = r
        deg = deg + nonzero.reshape(shape)
    return deg


class TabulatedFunction:
    """A function on the r-ary cube, stored as the full table of its values.

    ``values`` is kept as a read-only flat array of length ``r**n``.
    Complex tables are accepted only through :func:`low_degree_projection`;
    everything else in the package works with real tables.
    """

    __slots__ = ("r", "n", "values")

    def __init__(self, r, n, values, *, allow_complex=False):
        r = check_int(r, "r", minimum=2)
        n = check_int(n, "n", minimum=1)
        arr = np.asarray(values)
        if np.iscomplexobj(arr):
            if not allow_complex:
                raise ArgumentError("table values must be real")
            arr = arr.astype(np.complex128)
        else:
            arr = arr.astype(np.float64)
        arr = np.array(arr.reshape(-1), copy=True)
        if arr.size != r**n:
            raise ArgumentError(f"expected {r}^{n} = {r**n} values, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("table values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TabulatedFunction is immutable")

    def __repr__(self):
        return f"TabulatedFunction(r={self.r}, n={self.n}, size={self.values.size})"

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, TabulatedFunction):
            return NotImplemented
        return (self.r, self.n) == (other.r, other.n) and np.array_equal(
            self.values, other.values
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_complex(self):
        return np.iscomplexobj(self.values)

    def as_array(self):
        """View of the table as an ``(r,) * n`` array."""
        return self.values.reshape((self.r,) * self.n)

    def __call__(self, x):
        return self.values[point_index(x, self.r)]

    @classmethod
    def from_function(cls, func: Callable, r, n, *, vectorized=False):
        """Tabulate ``func`` over every point of the cube.

        With ``vectorized=True`` ``func`` receives the whole ``(r**n, n)``
        point array at once and must return one value per row.
        """
        pts = cube_points(r, n)
        if vectorized:
            vals = np.asarray(func(pts), dtype=np.float64)
        else:
            vals = np.fromiter((func(p) for p in pts), dtype=np.float64, count=len(pts))
        return cls(r, n, vals)

    @classmethod
    def constant(cls, r, n, c):
        check_capacity(r, n)
        return cls(r, n, np.full(r**n, float(c)))

    def mean(self):
        return float(np.mean(self.values))


class FourierSpectrum:
    """Fourier coefficients ``f_hat(S)`` indexed like a table."""

    __slots__ = ("r", "n", "coeffs")

    def __init__(self, r, n, coeffs):
        r = check_int(r, "r", minimum=2)
        n = check_int(n, "n", minimum=1)
        arr = np.array(np.asarray(coeffs, dtype=np.complex128).reshape(-1), copy=True)
        if arr.size != r**n:
            raise ArgumentError(f"expected {r}^{n} = {r**n} coefficients, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("FourierSpectrum is immutable")

    def __repr__(self):
        return f"FourierSpectrum(r={self.r}, n={self.n})"

    @property
    def omega(self):
        return np.exp(2j * np.pi / self.r)

    def as_array(self):
        return self.coeffs.reshape((self.r,) * self.n)

    def __getitem__(self, S):
        return self.coeffs[point_index(S, self.r)]

    def negated(self):
        """Spectrum re-indexed by ``-S mod r``."""
        arr = self.as_array()
        for axis in range(self.n):
            arr = np.take(arr, (-np.arange(self.r)) % self.r, axis=axis)
        return arr.reshape(-1)

    def conjugate_symmetry_error(self):
        """``max |f_hat(-S) - conj(f_hat(S))|``; zero for the spectrum of a real table."""
        return float(np.max(np.abs(self.negated() - np.conj(self.coeffs))))

    def degrees(self):
        return degree_table(self.r, self.n).reshape(-1)

    def energy(self, max_degree=None):
        """``sum |f_hat(S)|^2`` over ``|S| <= max_degree`` (all S when None)."""
        power = np.abs(self.coeffs) ** 2
        if max_degree is not None:
            power = power[self.degrees() <= max_degree]
        return float(np.sum(power))


def _coordinate_index(i, n):
    return check_int(i, "i", minimum=1, maximum=n) - 1


def neighbor(x, i, j):
    """``x`` with coordinate ``i`` (1-based) replaced by ``(x_i + j) mod r``."""
    if not isinstance(x, CubePoint):
        raise ArgumentError("neighbor expects a CubePoint")
    axis = _coordinate_index(i, x.n)
    j = check_int(j, "j", minimum=0, maximum=x.r - 1)
    coords = list(x.coords)
    coords[axis] = (coords[axis] + j) % x.r
    return CubePoint(x.r, tuple(coords))


def shift(f: TabulatedFunction, i, j):
    """Table of ``x -> f(x_{i,j})``."""
    axis = _coordinate_index(i, f.n)
    j = check_int(j, "j", minimum=0, maximum=f.r - 1)
    return TabulatedFunction(
        f.r, f.n, np.roll(f.as_array(), -j, axis=axis), allow_complex=f.is_complex
    )


def delta_i(f: TabulatedFunction, i):
    """Discrete derivative: ``f`` minus its mean over the r values of coordinate ``i``."""
    axis = _coordinate_index(i, f.n)
    arr = f.as_array()
    return TabulatedFunction(f.r, f.n, arr - arr.mean(axis=axis, keepdims=True))


def _apply_per_axis(arr, matrix):
    for axis in range(arr.ndim):
        arr = np.moveaxis(np.tensordot(matrix, arr, axes=([1], [axis])), 0, axis)
    return arr


def _character_matrix(r, sign):
    k = np.outer(np.arange(r), np.arange(r)) % r
    roots = np.exp(sign * 2j * np.pi * np.arange(r) / r)
    return roots[k]


def fourier_transform(f: TabulatedFunction):
    """Spectrum of ``f`` via n passes of r-point transforms, one per coordinate."""
    arr = f.as_array()
    if f.r == 2 and not f.is_complex:
        # Walsh-Hadamard butterfly; real arithmetic since omega = -1.
        out = _apply_per_axis(arr, np.array([[0.5, 0.5], [0.5, -0.5]]))
        return FourierSpectrum(f.r, f.n, out.astype(np.complex128))
    out = _apply_per_axis(arr.astype(np.complex128), _character_matrix(f.r, -1) / f.r)
    return FourierSpectrum(f.r, f.n, out)


def naive_fourier_transform(f: TabulatedFunction, chunk=256):
    """Direct O(r^{2n}) double sum; reference route for checking the fast path."""
    r, n = f.r, f.n
    pts = cube_points(r, n)
    roots = np.exp(-2j * np.pi * np.arange(r) / r)
    vals = f.values.astype(np.complex128)
    size = r**n
    out = np.empty(size, dtype=np.complex128)
    for start in range(0, size, chunk):
        S = pts[start : start + chunk]
        phase = (S @ pts.T) % r
        out[start : start + chunk] = roots[phase] @ vals
    return FourierSpectrum(r, n, out / size)


def inverse_transform(spectrum: FourierSpectrum, *, real=True):
    """Table ``f(x) = sum_S f_hat(S) omega**<S, x>``.

    With ``real=True`` an imaginary residue larger than ``1e-10`` (relative
    to the table scale) raises :class:`NumericIntegrityError`.
    """
    r, n = spectrum.r, spectrum.n
    arr = spectrum.as_array()
    if r == 2:
        out = _apply_per_axis(arr, np.array([[1.0, 1.0], [1.0, -1.0]]))
    else:
        out = _apply_per_axis(arr, _character_matrix(r, 1))
    if not real:
        return TabulatedFunction(r, n, out, allow_complex=True)
    scale = max(1.0, float(np.max(np.abs(out.real))))
    residue = float(np.max(np.abs(out.imag)))
    if residue > IDENTITY_RTOL * scale:
        raise NumericIntegrityError(
            f"imaginary residue {residue:.3e} exceeds tolerance; spectrum is not "
            "that of a real function"
        )
    return TabulatedFunction(r, n, out.real)


def norm_q(f: TabulatedFunction, q):
    """``(mean |f|^q)^(1/q)`` under the uniform measure."""
    q = check_real(q, "q", minimum=0.0, strict=True)
    a = np.abs(f.values)
    return float(np.mean(a**q) ** (1.0 / q))


def variance(f: TabulatedFunction):
    return float(np.var(f.values))


def low_degree_projection(spectrum: FourierSpectrum, k):
    """Table of ``sum_{|S| <= k} f_hat(S) u_S``.

    The result is real whenever the spectrum is conjugate symmetric (true
    for every real table) and complex otherwise.
    """
    k = check_int(k, "k", minimum=0, maximum=spectrum.n)
    mask = spectrum.degrees() <= k
    kept = FourierSpectrum(spectrum.r, spectrum.n, np.where(mask, spectrum.coeffs, 0))
    table = inverse_transform(kept, real=False)
    scale = max(1.0, float(np.max(np.abs(table.values.real))))
    if float(np.max(np.abs(table.values.imag))) <= IDENTITY_RTOL * scale:
        return TabulatedFunction(spectrum.r, spectrum.n, table.values.real)
    return table


@dataclass(frozen=True)
class HypercontractivityResult:
    lhs: float
    rhs: float
    ratio: float
    holds: bool
    saturated: bool = False


def hypercontractivity_check(f: TabulatedFunction, k):
    """Compare ``||P_k f||_4`` with ``C_r^k * (sum_{|S|<=k} |f_hat(S)|^2)^(1/2)``.

    ``P_k`` is the projection onto characters of degree at most ``k``.  If
    ``C_r^k`` overflows a double the right side is reported as infinite with
    ``saturated=True``.
    """
    k = check_int(k, "k", minimum=1, maximum=f.n)
    spectrum = fourier_transform(f)
    proj = low_degree_projection(spectrum, k)
    lhs = float(np.mean(np.abs(proj.values) ** 4) ** 0.25)
    mass = math.sqrt(spectrum.energy(max_degree=k))
    log_const = k * math.log(hypercontractive_constant(f.r))
    if log_const > 700.0:
        return HypercontractivityResult(lhs, math.inf, 0.0, True, saturated=True)
    rhs = math.exp(log_const) * mass
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return HypercontractivityResult(lhs, rhs, ratio, lhs <= rhs * (1 + INEQUALITY_SLACK))
