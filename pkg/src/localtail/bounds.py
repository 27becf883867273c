"""Closed-form variance, tail and quantile-gap bounds.

Every logarithm is natural.  Gap bounds accept ``v = 0`` (the degenerate
zero-energy case) even though the inequalities assume ``v > 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._config import INEQUALITY_SLACK
from ._validation import check_int, check_probability, check_real
from .cube import TabulatedFunction, hypercontractive_constant
from .exceptions import ArgumentError, DomainError, NumericIntegrityError, UndefinedBoundError

__all__ = [
    "PhiSpec",
    "BoundResult",
    "variance_upper_bound",
    "subgaussian_tail",
    "gap_bound_thm21",
    "gap_bound_thm22",
    "gap_bound_adjacent",
    "gap_bound_thm23",
    "gap_bound_thm31",
    "gap_bound_thm31_adjacent",
    "thm31_fixed_point",
    "gap_bound_cor41",
    "local_mass_lower_bound",
    "monotone_tail_threshold",
    "clamp",
    "mst_truncation_failure_bound",
    "VARIANCE_METHODS",
]

VARIANCE_METHODS = ("efron_stein", "talagrand_binary", "talagrand_rary")
GAP_CONSTANT = 72.0 / 5.0


@dataclass(frozen=True)
class PhiSpec:
    """Nonnegative nondecreasing function used by the self-bounding condition.

    ``kind`` is ``"identity"``, ``"affine"`` (``a*u + b``) or ``"power"``
    (``c * max(u, 0)**alpha``).  The affine form is clipped at zero so the
    function stays nonnegative for negative arguments.
    """

    kind: str = "identity"
    a: float = 1.0
    b: float = 0.0
    c: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind == "identity":
            return
        if self.kind == "affine":
            check_real(self.a, "a", minimum=0.0)
            check_real(self.b, "b", minimum=0.0)
        elif self.kind == "power":
            check_real(self.c, "c", minimum=0.0, strict=True)
            alpha = check_real(self.alpha, "alpha", minimum=0.0)
            if alpha > 2.0:
                raise ArgumentError(f"alpha must lie in [0, 2], got {alpha}")
        else:
            raise ArgumentError(f"unknown phi kind {self.kind!r}")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def affine(cls, a, b):
        return cls("affine", a=a, b=b)

    @classmethod
    def power(cls, c, alpha):
        return cls("power", c=c, alpha=alpha)

    def __call__(self, u):
        u = float(u)
        if self.kind == "identity":
            return u
        if self.kind == "affine":
            return max(self.a * u + self.b, 0.0)
        if self.alpha == 0.0:
            return self.c
        return self.c * max(u, 0.0) ** self.alpha

    def to_dict(self):
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "affine":
            return {"kind": "affine", "a": self.a, "b": self.b}
        return {"kind": "power", "c": self.c, "alpha": self.alpha}


@dataclass(frozen=True)
class BoundResult:
    value: float
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise NumericIntegrityError(f"{self.method} produced invalid value {self.value}")

    def __float__(self):
        return self.value

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "method": self.method, "params": dict(self.params)}


def _increment_moments(f: TabulatedFunction, method):
    """Per-coordinate ``(E D^2, E |D|)`` for the increments a method uses."""
    arr = f.as_array()
    out = []
    for axis in range(f.n):
        if method == "talagrand_rary":
            d = arr - arr.mean(axis=axis, keepdims=True)
            out.append((float(np.mean(d * d)), float(np.mean(np.abs(d)))))
        else:
            # Increments f(x) - f(x_{i,j}) averaged over the nonzero shifts j;
            # for r = 2 this is the single bit flip.
            sq = ab = 0.0
            for j in range(1, f.r):
                d = arr - np.roll(arr, -j, axis=axis)
                sq += float(np.mean(d * d))
                ab += float(np.mean(np.abs(d)))
            out.append((sq / (f.r - 1), ab / (f.r - 1)))
    return out


def _talagrand_sum(moments):
    total = 0.0
    for second, first in moments:
        if second == 0.0:
            continue
        ratio = math.sqrt(second) / first
        if ratio < 1.0 - 1e-12:
            raise NumericIntegrityError(f"Cauchy-Schwarz violated: ratio {ratio}")
        total += second / (1.0 + math.log(max(ratio, 1.0)))
    return total


def variance_upper_bound(f: TabulatedFunction, method="efron_stein"):
    """Upper bound on ``Var f(X)`` evaluated by exact enumeration.

    ``efron_stein``: ``(1/2) sum_i E(f(X) - f(X^(i)))^2``, where for r > 2 the
    squared increment is averaged over the r - 1 nonzero shifts of coordinate i.
    ``talagrand_binary`` (r = 2 only): ``(9/10) sum_i E D_i^2 / (1 + log(sqrt(E D_i^2) / E|D_i|))``.
    ``talagrand_rary``: ``10 log(C_r)`` times the same sum with ``D_i`` replaced
    by the discrete derivative, ``C_r = (9/2) r^3``.
    Coordinates whose increment vanishes identically contribute zero.
    """
    if method not in VARIANCE_METHODS:
        raise ArgumentError(f"unknown method {method!r}; expected one of {VARIANCE_METHODS}")
    if method == "talagrand_binary" and f.r != 2:
        raise ArgumentError("talagrand_binary requires r = 2")
    moments = _increment_moments(f, method)
    if method == "efron_stein":
        value = 0.5 * sum(second for second, _ in moments)
    elif method == "talagrand_binary":
        value = 0.9 * _talagrand_sum(moments)
    else:
        value = 10.0 * math.log(hypercontractive_constant(f.r)) * _talagrand_sum(moments)
    return BoundResult(value, method, {"r": f.r, "n": f.n})


def subgaussian_tail(v, t):
    """``exp(-t^2 / (4 v))``, the sub-Gaussian upper-tail bound."""
    v = check_real(v, "v", minimum=0.0, strict=True)
    t = check_real(t, "t", minimum=0.0)
    return math.exp(-t * t / (4.0 * v))


def _core(v, gamma, delta):
    return math.sqrt(GAP_CONSTANT * v * gamma / (delta * math.log(math.e**2 / (2.0 * gamma))))


def _check_levels(gamma, delta):
    gamma = check_probability(gamma, "gamma")
    delta = check_probability(delta, "delta")
    if not 0.0 < delta < gamma <= 0.5:
        raise ArgumentError(f"need 0 < delta < gamma <= 1/2, got gamma={gamma}, delta={delta}")
    return gamma, delta


def gap_bound_thm21(p_window, p_tail_b, v):
    """Bound on ``b - a`` from the window mass ``P{f in (a, b+B)}`` and ``P{f >= b}``."""
    p_window = check_probability(p_window, "p_window")
    p_tail_b = check_probability(p_tail_b, "p_tail_b")
    v = check_real(v, "v", minimum=0.0)
    if p_tail_b == 0.0:
        raise UndefinedBoundError("P{f >= b} = 0 leaves the bound undefined")
    if p_tail_b > p_window:
        raise ArgumentError(f"p_tail_b={p_tail_b} exceeds p_window={p_window}")
    value = _core(v, p_window, p_tail_b)
    return BoundResult(value, "thm21", {"p_window": p_window, "p_tail_b": p_tail_b, "v": v})


def gap_bound_thm22(gamma, delta, v):
    """``Q_{1-delta} - Q_{1-gamma}`` bound under the positive-increment condition."""
    gamma, delta = _check_levels(gamma, delta)
    v = check_real(v, "v", minimum=0.0)
    return BoundResult(_core(v, gamma, delta), "thm22", {"gamma": gamma, "delta": delta, "v": v})


def gap_bound_adjacent(v, k, form="simple"):
    """Adjacent-level gap ``a_{k+1} - a_k``: ``4 sqrt(v/k)`` or the tighter exact form."""
    v = check_real(v, "v", minimum=0.0)
    k = check_int(k, "k", minimum=1)
    if form == "simple":
        value = 4.0 * math.sqrt(v / k)
    elif form == "tight":
        value = 12.0 / math.sqrt(5.0) * math.sqrt(v / ((k - 1) * math.log(2.0) + 2.0))
    else:
        raise ArgumentError(f"form must be 'simple' or 'tight', got {form!r}")
    return BoundResult(value, f"adjacent_{form}", {"v": v, "k": k})


def gap_bound_thm23(gamma, delta, v, B):
    """Negative-increment analogue: ``B`` plus the positive-increment bound."""
    gamma, delta = _check_levels(gamma, delta)
    v = check_real(v, "v", minimum=0.0)
    B = check_real(B, "B", minimum=0.0)
    value = B + _core(v, gamma, delta)
    return BoundResult(value, "thm23", {"gamma": gamma, "delta": delta, "v": v, "B": B})


def gap_bound_thm31(gamma, delta, phi: PhiSpec, q_upper, B):
    """Self-bounding gap bound with ``phi`` evaluated at ``q_upper + B``.

    ``q_upper`` stands for ``Q_{1-delta}``, which appears on both sides of the
    inequality; callers pass a measured value or use :func:`thm31_fixed_point`.
    """
    gamma, delta = _check_levels(gamma, delta)
    q_upper = check_real(q_upper, "q_upper")
    B = check_real(B, "B", minimum=0.0)
    energy = phi(q_upper + B)
    value = _core(energy, gamma, delta)
    params = {"gamma": gamma, "delta": delta, "phi": phi.to_dict(), "q_upper": q_upper, "B": B}
    return BoundResult(value, "thm31", params)


def gap_bound_thm31_adjacent(phi: PhiSpec, a_next, B, k):
    """Simplified adjacent form ``4 sqrt(phi(a_{k+1} + B) / k)``."""
    k = check_int(k, "k", minimum=1)
    B = check_real(B, "B", minimum=0.0)
    value = 4.0 * math.sqrt(phi(float(a_next) + B) / k)
    return BoundResult(value, "thm31_adjacent", {"phi": phi.to_dict(), "a_next": float(a_next), "B": B, "k": k})


def thm31_fixed_point(a_k, phi: PhiSpec, B, k, tol=1e-9, max_iter=100):
    """A-priori bound on ``a_{k+1}``: iterate ``x -> a_k + 4 sqrt(phi(x + B)/k)`` from ``a_k``.

    Returns ``(x, converged)``.
    """
    k = check_int(k, "k", minimum=1)
    x = float(a_k)
    for _ in range(max_iter):
        nxt = a_k + 4.0 * math.sqrt(phi(x + B) / k)
        if abs(nxt - x) <= tol * max(1.0, abs(nxt)):
            return nxt, True
        x = nxt
    return x, False


def gap_bound_cor41(v, B, k, r):
    """r-ary adjacent gap bound ``B + 14 sqrt(log C_r) sqrt(v/k)``."""
    v = check_real(v, "v", minimum=0.0)
    B = check_real(B, "B", minimum=0.0)
    k = check_int(k, "k", minimum=1)
    r = check_int(r, "r", minimum=2)
    value = B + 14.0 * math.sqrt(math.log(hypercontractive_constant(r))) * math.sqrt(v / k)
    return BoundResult(value, "cor41", {"v": v, "B": B, "k": k, "r": r})


def local_mass_threshold(mean_f, v):
    return mean_f + math.sqrt(4.0 * v * math.log(2.0))


def local_mass_lower_bound(k, mean_f, v):
    """Lower bound on ``q_k / sum_{i>k} q_i + 1`` for integer bins above the mean.

    Evaluated exactly as stated, including the ``v**2`` in the first term.
    """
    k = check_real(k, "k")
    mean_f = check_real(mean_f, "mean_f")
    v = check_real(v, "v", minimum=0.0, strict=True)
    threshold = local_mass_threshold(mean_f, v)
    if k < threshold:
        raise DomainError(f"k={k} is below the threshold {threshold}", threshold=threshold)
    return (5.0 / 288.0) * (k - mean_f) ** 2 / v**2 + 5.0 / (72.0 * v) * math.log(math.e**2 / 2.0)


def monotone_tail_threshold(mean_f, v):
    """Point beyond which the integer-bin masses are nonincreasing: ``Ef + 5 sqrt(5) v``."""
    mean_f = check_real(mean_f, "mean_f")
    v = check_real(v, "v", minimum=0.0, strict=True)
    return mean_f + 25.0 / math.sqrt(5.0) * v


def clamp(f: TabulatedFunction, a, b):
    """The function equal to ``f`` clipped into ``[a, b]``."""
    a = check_real(a, "a")
    b = check_real(b, "b")
    if not a < b:
        raise ArgumentError(f"need a < b, got a={a}, b={b}")
    return TabulatedFunction(f.r, f.n, np.clip(f.values, a, b))


def mst_truncation_failure_bound(m, c):
    """``min(1, 4 m^(-c/4))`` bound on the chance truncation changes the MST cost."""
    m = check_int(m, "m", minimum=2)
    c = check_real(c, "c")
    if c < 2.0:
        raise ArgumentError(f"the failure bound is only asserted for c >= 2, got {c}")
    return min(1.0, 4.0 * m ** (-c / 4.0))


def bound_dominates(bound, value):
    """``value <= bound`` up to the package-wide multiplicative slack."""
    return value <= bound * (1.0 + INEQUALITY_SLACK) + 1e-15
