"""Simply connected nilpotent Lie groups in exponential coordinates.

A point ``exp(X)`` is stored as its coordinate vector ``X``. The product
is the Baker-Campbell-Hausdorff series, which is a finite polynomial on a
nilpotent algebra: truncating at the nilpotency step is exact.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (InputError, NonConvergence, NotHyperbolic, NotNilpotent,
                     ParentMismatch, StepTooLarge)
from .lie_core import LieAlgebra, bracket, nilpotency_step
from .matrix_flow import LinearFlow, flow_linear
from .spectral import SpectralDecomposition, is_hyperbolic

MAX_BCH_DEPTH = 6


# ---------------------------------------------------------------------------
# BCH coefficients
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int):
    """Sequences of ``parts`` pairs ``(r, s)``, ``r + s >= 1``, summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for size in range(1, total - parts + 2):
        for r in range(size + 1):
            for rest in _compositions(total - size, parts - 1):
                yield ((r, size - r),) + rest


@lru_cache(maxsize=None)
def bch_coefficients(depth: int) -> tuple:
    """Dynkin's form of the BCH series up to bracket depth ``depth``.

    Returns ``(word, coefficient)`` pairs, where ``word`` is a string over
    ``"XY"`` standing for the right-nested bracket
    ``[w1, [w2, ... [w_{m-1}, w_m]]]`` and ``coefficient`` is an exact
    ``Fraction``. Words whose bracket vanishes identically are dropped.
    """
    if not 1 <= depth <= MAX_BCH_DEPTH:
        raise StepTooLarge("BCH depth out of supported range", depth=depth,
                           max_depth=MAX_BCH_DEPTH)
    acc: dict = defaultdict(Fraction)
    for length in range(1, depth + 1):
        for n in range(1, length + 1):
            sign = Fraction((-1) ** (n - 1), n)
            for comp in _compositions(length, n):
                word = "".join("X" * r + "Y" * s for r, s in comp)
                # [.., a, a] = 0 for the innermost pair
                if length > 1 and word[-1] == word[-2]:
                    continue
                denom = length
                for r, s in comp:
                    denom *= math.factorial(r) * math.factorial(s)
                acc[word] += sign / denom
    return tuple((w, c) for w, c in sorted(acc.items(), key=lambda kv: (len(kv[0]), kv[0]))
                 if c != 0)


@dataclass(frozen=True, eq=False)
class BchTable:
    """BCH evaluator for one nilpotent algebra, exact at its step."""

    algebra: LieAlgebra
    step: int
    terms: tuple

    @classmethod
    def build(cls, alg: LieAlgebra) -> "BchTable":
        cached = alg._cache.get("bch")
        if cached is not None:
            return cached
        step = nilpotency_step(alg)
        if step is None:
            raise NotNilpotent("group operations need a nilpotent algebra")
        if step > MAX_BCH_DEPTH:
            raise StepTooLarge("nilpotency step exceeds supported BCH depth", step=step,
                               max_depth=MAX_BCH_DEPTH)
        terms = tuple((w, float(c)) for w, c in bch_coefficients(step))
        table = cls(alg, step, terms)
        alg._cache["bch"] = table
        return table

    def __call__(self, X, Y) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        letters = {"X": X, "Y": Y}
        nested = {}

        def value(word):
            # right-nested brackets share suffixes
            if word in nested:
                return nested[word]
            if len(word) == 1:
                v = letters[word]
            else:
                v = bracket(letters[word[0]], value(word[1:]), self.algebra)
            nested[word] = v
            return v

        Z = np.zeros(np.broadcast_shapes(X.shape, Y.shape))
        for word, coef in self.terms:
            Z = Z + coef * value(word)
        return Z


def bch(X, Y, alg: LieAlgebra) -> np.ndarray:
    """Coordinates of ``exp(X) exp(Y)``."""
    alg._check(X)
    alg._check(Y)
    return BchTable.build(alg)(X, Y)


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupElement:
    coords: np.ndarray
    parent: LieAlgebra = field(repr=False)

    def __post_init__(self):
        c = np.array(self.parent._check(self.coords), dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def exp(cls, X, alg: LieAlgebra) -> "GroupElement":
        BchTable.build(alg)
        return cls(X, alg)

    @classmethod
    def identity(cls, alg: LieAlgebra) -> "GroupElement":
        return cls.exp(np.zeros(alg.dim), alg)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.parent is not h.parent:
        raise ParentMismatch("elements belong to different groups")
    return GroupElement(bch(g.coords, h.coords, g.parent), g.parent)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.coords, g.parent)


def flow_group(lf: LinearFlow, t: float, g: GroupElement) -> GroupElement:
    """``phi_t(exp X) = exp(e^{tD} X)``; each ``phi_t`` is an automorphism."""
    return GroupElement(flow_linear(LinearFlow.of(lf), t, g.coords), g.parent)


def gauge(g) -> float:
    """Euclidean norm of exponential coordinates; zero exactly at the identity."""
    coords = g.coords if isinstance(g, GroupElement) else np.asarray(g, dtype=float)
    return float(np.linalg.norm(coords))


def split_plus_minus(g: GroupElement, sd: SpectralDecomposition,
                     tol: float = 1e-10) -> tuple:
    """Factor ``g = g_plus g_minus`` with ``g_plus`` in the unstable and
    ``g_minus`` in the stable subgroup.

    Fixed-point iteration on the BCH remainder. Each sweep fixes one more
    term of the lower central series, so it is exact after ``step`` sweeps.
    """
    if not is_hyperbolic(sd):
        raise NotHyperbolic("splitting needs a hyperbolic derivation", dims=list(sd.dims))
    alg = g.parent
    table = BchTable.build(alg)
    X = g.coords
    Xp = sd.P_plus @ X
    Xm = sd.P_minus @ X
    for _ in range(table.step + 2):
        R = table(Xp, Xm) - Xp - Xm
        Xp_new = sd.P_plus @ (X - R)
        Xm_new = sd.P_minus @ (X - R)
        moved = max(np.abs(Xp_new - Xp).max(), np.abs(Xm_new - Xm).max())
        Xp, Xm = Xp_new, Xm_new
        if moved == 0.0:
            break
    residual = float(np.abs(table(Xp, Xm) - X).max())
    if residual > tol * (1.0 + float(np.abs(X).max()) ** table.step):
        raise NonConvergence("splitter did not reproduce the element", residual=residual)
    return GroupElement(Xp, alg), GroupElement(Xm, alg)


class Classification(str, enum.Enum):
    STABLE_POINT = "stable_point"
    UNSTABLE_COMPONENT = "unstable_component"
    INCONCLUSIVE = "inconclusive"


@dataclass
class AttractorReport:
    classification: Classification
    final_gauge: float
    plus_gauge: float
    times: list
    gauges: list

    def to_dict(self) -> dict:
        return {"classification": self.classification.value, "final_gauge": self.final_gauge,
                "plus_gauge": self.plus_gauge, "times": self.times, "gauges": self.gauges}


def attractor_test(lf, sd: SpectralDecomposition, g: GroupElement, t_max: float = 40.0,
                   tol: float = 1e-8, points: int = 81) -> AttractorReport:
    """Classify ``g`` by its forward orbit and cross-check with the splitter.

    ``stable_point`` needs both a forward gauge below ``tol`` and a trivial
    unstable factor; ``unstable_component`` needs a nontrivial unstable
    factor and a growing gauge. Disagreement gives ``inconclusive``.
    """
    lf = LinearFlow.of(lf)
    g_plus, _ = split_plus_minus(g, sd)
    plus_gauge = gauge(g_plus)
    times, gauges = [], []
    for t in np.linspace(0.0, t_max, points):
        try:
            val = gauge(flow_group(lf, t, g))
        except OverflowError:
            val = float("inf")
        times.append(float(t))
        gauges.append(val)
        if val == float("inf"):
            break
    final = gauges[-1]
    decays = final <= tol
    grows = final > max(gauges[0], tol) * 10.0
    if decays and plus_gauge <= tol:
        cls = Classification.STABLE_POINT
    elif grows and plus_gauge > tol:
        cls = Classification.UNSTABLE_COMPONENT
    else:
        cls = Classification.INCONCLUSIVE
    return AttractorReport(cls, final, plus_gauge, times, gauges)


def random_elements(alg: LieAlgebra, n: int, rng: np.random.Generator, scale: float = 1.0) -> list:
    if n < 0:
        raise InputError("n must be non-negative", n=n)
    return [GroupElement.exp(x, alg) for x in rng.uniform(-scale, scale, size=(n, alg.dim))]


__all__ = [
    "MAX_BCH_DEPTH", "bch_coefficients", "BchTable", "bch", "GroupElement", "multiply",
    "inverse", "flow_group", "gauge", "split_plus_minus", "Classification",
    "AttractorReport", "attractor_test", "random_elements",
]
