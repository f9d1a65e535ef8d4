"""Closed form of the two-Bell-pair / GHZ interpolation family.

The four-qubit family

    |Psi(gamma)> = alpha(gamma) |psi+>|psi+> + sqrt(1 - alpha^2) |GHZ>

lives on qubits (1,2,3,4) with |psi+> = (|HV> + |VH>)/sqrt(2) on pairs
(1,2) and (3,4) and |GHZ> = (|HHVV> + |VVHH>)/sqrt(2).  The generating
circuit fixes

    alpha(gamma) = 2 cos(4 gamma) / sqrt(48 p(gamma)) ,
    p(gamma)     = (5 - 4 cos(4 gamma) + 3 cos(8 gamma)) / 48 ,

where p is the four-fold coincidence probability.  alpha decreases
strictly from 1 at gamma = 0 (two Bell pairs) through 0 at pi/8 (GHZ)
to -sqrt(1/3) at pi/4; the sign flip matters for which superpositions
appear, even though most observable quantities depend on alpha^2 only.

This module is purely analytic.  The interferometric derivation of the
same states lives in :mod:`bellghz.circuit`; tests tie the two routes
together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

GAMMA_MIN = 0.0
GAMMA_MAX = math.pi / 4

#: Qubit labels in tensor order; basis index = sum of bit_k << (3 - k)
#: with H = 0 and V = 1.
QUBITS = ("1", "2", "3", "4")

#: Modulus classes of the correlation tensor, named by one representative
#: index string over {0, x, y, z} (0 = identity slot).
CLASS_NAMES = ("iiii", "0z0z", "00zz", "0x0x", "00xx")


def check_gamma(gamma: float) -> float:
    g = float(gamma)
    if not GAMMA_MIN <= g <= GAMMA_MAX:
        raise ValueError(
            f"gamma must lie in [0, pi/4] = [0, {GAMMA_MAX!r}] rad; got {g!r}"
        )
    return g


def probability(gamma: float) -> float:
    """Four-fold coincidence probability p(gamma)."""
    g = check_gamma(gamma)
    return (5.0 - 4.0 * math.cos(4 * g) + 3.0 * math.cos(8 * g)) / 48.0


def alpha(gamma: float) -> float:
    """Bell-pair amplitude alpha(gamma); signed, in [-sqrt(1/3), 1]."""
    g = check_gamma(gamma)
    return 2.0 * math.cos(4 * g) / math.sqrt(48.0 * probability(g))


@dataclass(frozen=True)
class QubitState4:
    """Pure four-qubit state as 16 amplitudes in the computational basis."""

    vec: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vec, dtype=complex).reshape(-1)
        if v.shape != (16,):
            raise ValueError(f"need 16 amplitudes, got shape {np.shape(self.vec)}")
        object.__setattr__(self, "vec", v)

    def norm_sq(self) -> float:
        return float(np.vdot(self.vec, self.vec).real)

    def normalized(self) -> "QubitState4":
        n = math.sqrt(self.norm_sq())
        if n == 0.0:
            raise ValueError("cannot normalize a zero state")
        return QubitState4(self.vec / n)

    def canonical(self) -> "QubitState4":
        """Fix the global phase: largest-modulus amplitude real positive."""
        i = int(np.argmax(np.abs(self.vec)))
        a = self.vec[i]
        if a == 0:
            raise ValueError("cannot fix the phase of a zero state")
        return QubitState4(self.vec * (abs(a) / a))

    def overlap(self, other: "QubitState4") -> complex:
        return complex(np.vdot(self.vec, other.vec))

    def density(self) -> np.ndarray:
        return np.outer(self.vec, self.vec.conj())


class FamilyPoint(NamedTuple):
    gamma: float
    alpha: float
    probability: float
    state: QubitState4


def state_at(gamma: float) -> FamilyPoint:
    """Family member at ``gamma``, built from the closed form."""
    g = check_gamma(gamma)
    a = alpha(g)
    b = math.sqrt(max(0.0, 1.0 - a * a))
    vec = np.zeros(16, dtype=complex)
    # |psi+>|psi+> spreads over the four single-V-per-pair terms
    for idx in (0b0101, 0b0110, 0b1001, 0b1010):
        vec[idx] = a / 2.0
    # |GHZ> = (|HHVV> + |VVHH>)/sqrt(2)
    for idx in (0b0011, 0b1100):
        vec[idx] = b / math.sqrt(2.0)
    return FamilyPoint(g, a, probability(g), QubitState4(vec))


_BRANCHES = {
    # branch name -> (gamma interval, alpha range on it)
    "first": (GAMMA_MIN, math.pi / 8, 0.0, 1.0),
    "second": (math.pi / 8, GAMMA_MAX, -math.sqrt(1.0 / 3.0), 0.0),
}


def gamma_for_alpha(target: float, branch: str = "first") -> float:
    """Invert alpha(gamma) on one of its two monotone branches.

    ``first`` covers gamma in [0, pi/8] where alpha runs 1 -> 0;
    ``second`` covers [pi/8, pi/4] where alpha runs 0 -> -sqrt(1/3).
    """
    if branch not in _BRANCHES:
        raise ValueError(f"branch must be 'first' or 'second', got {branch!r}")
    lo, hi, amin, amax = _BRANCHES[branch]
    t = float(target)
    if not amin - 1e-12 <= t <= amax + 1e-12:
        raise ValueError(
            f"alpha={t!r} has no solution on the {branch} branch "
            f"(range [{amin!r}, {amax!r}])"
        )

    def f(g: float) -> float:
        return alpha(g) - t

    flo, fhi = f(lo), f(hi)
    if abs(flo) < 1e-14:
        return lo
    if abs(fhi) < 1e-14:
        return hi
    return float(brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))


class CatalogEntry(NamedTuple):
    name: str
    gamma: float
    alpha: float


# Distinguished family members, in gamma order.  Every entry carries its
# exact closed-form alpha; entries without an exact gamma get it from the
# branch inversion.
_SQRT3 = math.sqrt(3.0)
_CATALOG_ROWS: tuple[tuple[str, float | None, float, str | None], ...] = (
    ("BellPair²", 0.0, 1.0, None),
    ("S^a", None, math.sqrt((3.0 + _SQRT3) / 6.0), "first"),
    ("D4(2)", math.pi / 12, math.sqrt(2.0 / 3.0), None),
    ("S^b", None, math.sqrt(0.5), "first"),
    ("Ψ4+", None, math.sqrt(1.0 / 3.0), "first"),
    ("S^c+", None, math.sqrt((3.0 - _SQRT3) / 6.0), "first"),
    ("GHZ", math.pi / 8, 0.0, None),
    ("S^c−", None, -math.sqrt((3.0 - _SQRT3) / 6.0), "second"),
    ("Ψ4−", math.pi / 4, -math.sqrt(1.0 / 3.0), None),
)


@cache
def catalog() -> tuple[CatalogEntry, ...]:
    """The nine distinguished states, sorted by gamma."""
    entries = []
    for name, g, a, branch in _CATALOG_ROWS:
        if g is None:
            g = gamma_for_alpha(a, branch)
        entries.append(CatalogEntry(name, g, a))
    entries.sort(key=lambda e: e.gamma)
    return tuple(entries)


def _class_iiii(gamma: float) -> float:
    return 1.0


def _class_0z0z(gamma: float) -> float:
    a = alpha(gamma)
    return 1.0 - a * a


def _class_00zz(gamma: float) -> float:
    a = alpha(gamma)
    return abs(1.0 - 2.0 * a * a)


def _class_0x0x(gamma: float) -> float:
    a = alpha(gamma)
    return math.sqrt(2.0) * abs(a) * math.sqrt(max(0.0, 1.0 - a * a))


def _class_00xx(gamma: float) -> float:
    a = alpha(gamma)
    return a * a


_CLASS_FUNCS: dict[str, Callable[[float], float]] = {
    "iiii": _class_iiii,
    "0z0z": _class_0z0z,
    "00zz": _class_00zz,
    "0x0x": _class_0x0x,
    "00xx": _class_00xx,
}


def class_moduli(gamma: float) -> dict[str, float]:
    """Closed-form |T| of one representative per correlation class.

    The numeric route (full tensor expectation) lives in
    :mod:`bellghz.analysis`; keeping both allows them to check each
    other.
    """
    g = check_gamma(gamma)
    return {name: _CLASS_FUNCS[name](g) for name in CLASS_NAMES}


class CrossingPoint(NamedTuple):
    gamma: float
    classes: tuple[str, str]


#: Any |difference| local minimum below this is treated as a candidate
#: tangential contact and refined; the closest non-crossing class pair
#: stays above 0.29 everywhere, so the margin is four orders.
_TOUCH_CANDIDATE = 1e-2
#: Refined |difference| must fall below this for a contact to count.
_TOUCH_ACCEPT = 1e-9


def _refine_stationary(diff: Callable[[float], float], lo: float, hi: float) -> float | None:
    """Locate a stationary point of ``diff`` inside (lo, hi) by bisecting
    on the sign of a central-difference slope.

    Works for smooth quadratic contacts and for the |alpha|-type kinks
    some class differences have; generic minimizers stall at sqrt(eps)
    relative accuracy, which is too coarse for the kinked case.  Returns
    None when the slope does not change sign (no stationary point,
    e.g. a transversal root already caught by bracketing).
    """
    h = 1e-9

    def rising(g: float) -> bool:
        return diff(g + h) >= diff(g - h)

    r_lo = rising(lo)
    if r_lo == rising(hi):
        return None
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if rising(mid) == r_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_crossings(step: float = 1e-4, dedupe: float = 1e-8) -> list[CrossingPoint]:
    """Locate every gamma in (0, pi/4) where two class moduli meet.

    Transversal crossings are bracketed by sign changes on a ``step``
    grid and polished by Brent root finding.  Tangential contacts (the
    GHZ point, where three classes touch 1 and two touch 0) produce no
    sign change; they appear as interior local minima of |difference|
    and are refined by bounded minimization instead.  Roots of the same
    class pair closer than ``dedupe`` are merged.
    """
    grid = np.arange(step, GAMMA_MAX, step)
    found: list[CrossingPoint] = []
    for i in range(len(CLASS_NAMES)):
        for j in range(i + 1, len(CLASS_NAMES)):
            fa = _CLASS_FUNCS[CLASS_NAMES[i]]
            fb = _CLASS_FUNCS[CLASS_NAMES[j]]

            def diff(g: float) -> float:
                return fa(g) - fb(g)

            vals = np.array([diff(g) for g in grid])
            roots: list[float] = []
            for k in np.flatnonzero(vals[:-1] * vals[1:] < 0.0):
                roots.append(
                    float(brentq(diff, grid[k], grid[k + 1], xtol=1e-12))
                )
            absvals = np.abs(vals)
            interior = np.flatnonzero(
                (absvals[1:-1] < absvals[:-2])
                & (absvals[1:-1] < absvals[2:])
                & (absvals[1:-1] < _TOUCH_CANDIDATE)
            )
            for k in interior + 1:
                g0 = _refine_stationary(diff, grid[k - 1], grid[k + 1])
                if g0 is not None and abs(diff(g0)) <= _TOUCH_ACCEPT:
                    roots.append(g0)
            roots.sort()
            merged: list[float] = []
            for r in roots:
                if not merged or r - merged[-1] > dedupe:
                    merged.append(r)
            pair = (CLASS_NAMES[i], CLASS_NAMES[j])
            found.extend(CrossingPoint(r, pair) for r in merged)
    found.sort(key=lambda c: (c.gamma, c.classes))
    return found
