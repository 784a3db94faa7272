"""Information functionals on distributions and on partitions of unity.

Logarithms are base 2 throughout, with ``0 log 0 = 0``. Exact rational
probabilities are logged exactly (numerator and denominator separately), so
weights as small as ``2**-256`` do not underflow.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._validation import DEFAULT_TOL, as_fraction, check_same_dim
from .exceptions import (
    DivergentTerm,
    NegativeWeight,
    SchemaError,
    SumNotOne,
    ZeroAtom,
    ZeroConditioningEvent,
)
from .linalg import Projection, ProjectionPartition, SignedOperator, State

__all__ = [
    "Distribution",
    "SymmetricInformation",
    "Shannon",
    "Renyi",
    "Zero",
    "LinearCombination",
    "GeneralInformation",
    "StepCDF",
    "log2",
    "shannon",
    "renyi",
    "von_neumann_info",
    "general_info",
    "conditional_info",
    "conditional_mu",
    "cdf_of_distribution",
    "renyi_functional",
    "convolve",
    "mix",
    "point_mass",
    "sym_from_json",
]

PROB_TOL = 1e-12


def log2(x) -> float:
    """Base-2 logarithm, exact in the numerator/denominator for Fractions."""
    if isinstance(x, Fraction):
        if x <= 0:
            raise ValueError("log2 of a non-positive number")
        if Fraction(1, 2) < x < 2:
            return math.log1p(float(x - 1)) / math.log(2)
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def _logsumexp2(logs) -> float:
    """``log2(sum(2**l))`` without overflow or underflow."""
    top = max(logs)
    return top + math.log2(math.fsum(2.0 ** (l - top) for l in logs))


class Distribution(Sequence):
    """Finite probability vector.

    Rational inputs are checked exactly; float inputs must sum to one within
    ``1e-12``.
    """

    __slots__ = ("probs", "exact")

    def __init__(self, probs, *, tol: float = PROB_TOL):
        values = list(probs)
        if not values:
            raise SumNotOne("a distribution needs at least one outcome")
        exact = all(isinstance(v, (Fraction, int, str)) and not isinstance(v, bool) for v in values)
        if exact:
            values = [as_fraction(v) for v in values]
        else:
            values = [float(v) for v in values]
        for i, v in enumerate(values):
            if v < 0 and (exact or v < -tol):
                raise NegativeWeight(f"probability {i} is negative: {v}")
        total = sum(values) if exact else math.fsum(values)
        if (exact and total != 1) or (not exact and abs(total - 1) > tol):
            raise SumNotOne(f"probabilities sum to {total}")
        if not exact:
            values = [max(v, 0.0) for v in values]
        self.probs = tuple(values)
        self.exact = exact

    def __getitem__(self, idx):
        return self.probs[idx]

    def __len__(self):
        return len(self.probs)

    def positive(self) -> list:
        return [p for p in self.probs if p > 0]

    def as_floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def tensor(self, other: "Distribution") -> "Distribution":
        return Distribution([a * b for a in self.probs for b in other.probs])

    def __repr__(self):
        return f"Distribution({[str(p) if self.exact else p for p in self.probs]})"


def _as_distribution(p) -> Distribution:
    return p if isinstance(p, Distribution) else Distribution(p)


class SymmetricInformation:
    """Permutation-invariant functional of a distribution, additive on products."""

    kind = "abstract"

    def __call__(self, p) -> float:
        return self.evaluate(_as_distribution(p))

    def evaluate(self, p: Distribution) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, SymmetricInformation) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))


class Shannon(SymmetricInformation):
    kind = "shannon"

    def evaluate(self, p: Distribution) -> float:
        return math.fsum(-x * log2(x) for x in p.positive()) if p.exact else math.fsum(
            -float(x) * math.log2(x) for x in p.positive()
        )

    def to_json(self) -> dict:
        return {"kind": "shannon"}

    def __repr__(self):
        return "Shannon()"


class Zero(SymmetricInformation):
    kind = "zero"

    def evaluate(self, p: Distribution) -> float:
        return 0.0

    def to_json(self) -> dict:
        return {"kind": "zero"}

    def __repr__(self):
        return "Zero()"


class Renyi(SymmetricInformation):
    """Order-``alpha`` Renyi entropy ``log2(sum p**alpha) / (1 - alpha)``."""

    kind = "renyi"

    def __init__(self, alpha: float):
        alpha = float(alpha)
        if not alpha >= 0:
            raise SchemaError(f"alpha must be >= 0, got {alpha}")
        self.alpha = alpha

    def evaluate(self, p: Distribution) -> float:
        a = self.alpha
        support = p.positive()
        if a == 1:
            return Shannon().evaluate(p)
        if a == 0:
            return math.log2(len(support))
        if math.isinf(a):
            return -log2(max(support))
        t = 1 - a
        if abs(t) <= 0.5:
            # sum p**a = 1 + sum p (p**-t - 1); expm1/log1p keep orders near 1 accurate
            ln2 = math.log(2)
            s = math.fsum(float(x) * math.expm1(-t * ln2 * log2(x)) for x in support)
            return math.log1p(s) / (t * ln2)
        logs = [a * log2(x) for x in support]
        return _logsumexp2(logs) / t

    def to_json(self) -> dict:
        return {"kind": "renyi", "alpha": self.alpha}

    def __repr__(self):
        return f"Renyi({self.alpha!r})"


class LinearCombination(SymmetricInformation):
    """Real linear combination of symmetric informations."""

    kind = "lincomb"

    def __init__(self, terms: Sequence):
        self.terms = tuple((float(c), s) for c, s in terms)
        if not self.terms:
            raise SchemaError("linear combination needs at least one term")

    def evaluate(self, p: Distribution) -> float:
        return math.fsum(c * s.evaluate(p) for c, s in self.terms)

    def to_json(self) -> dict:
        return {"kind": "lincomb", "terms": [{"coef": c, "sym": s.to_json()} for c, s in self.terms]}

    def __repr__(self):
        return f"LinearCombination({list(self.terms)!r})"


def sym_from_json(data) -> SymmetricInformation:
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError(f"symmetric information JSON must be an object with 'kind': {data!r}")
    kind = data["kind"]
    if kind == "shannon":
        return Shannon()
    if kind == "zero":
        return Zero()
    if kind == "renyi":
        if "alpha" not in data:
            raise SchemaError("renyi needs 'alpha'")
        return Renyi(data["alpha"])
    if kind == "lincomb":
        try:
            return LinearCombination([(t["coef"], sym_from_json(t["sym"])) for t in data["terms"]])
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad lincomb terms: {exc}") from None
    raise SchemaError(f"unknown symmetric information kind {kind!r}")


def shannon(p) -> float:
    """``sum p log2(1/p)``.

    >>> shannon(["1/2", "1/4", "1/4"])
    1.5
    """
    return Shannon()(p)


def renyi(p, alpha: float) -> float:
    return Renyi(alpha)(p)


class GeneralInformation:
    """``I(P) = I_s(rho(P_1), ..., rho(P_m)) + sum tr(mu P_i) log2 rho(P_i)``."""

    __slots__ = ("rho", "mu", "sym", "tol")

    def __init__(self, rho: State, mu: SignedOperator | None, sym: SymmetricInformation,
                 tol: float = DEFAULT_TOL):
        if mu is None:
            mu = SignedOperator.zero(rho.dim)
        check_same_dim(rho.dim, mu.dim)
        self.rho, self.mu, self.sym, self.tol = rho, mu, sym, tol

    def nonsymmetric_part(self, P: ProjectionPartition, probs=None) -> float:
        probs = P.probabilities(self.rho) if probs is None else probs
        terms = []
        for i, (block, w) in enumerate(zip(P, probs)):
            m = self.mu.value(block)
            if w <= 0 or (not isinstance(w, Fraction) and w <= 1e-300):
                if abs(m) > self.tol:
                    raise DivergentTerm(f"block {i}: mu(P) = {m:.3e} while rho(P) = 0")
                continue
            terms.append(m * log2(w))
        return math.fsum(terms)

    def __call__(self, P: ProjectionPartition) -> float:
        check_same_dim(P.dim, self.rho.dim)
        probs = P.probabilities(self.rho)
        return self.sym(Distribution(probs)) + self.nonsymmetric_part(P, probs)

    def __repr__(self):
        return f"GeneralInformation(dim={self.rho.dim}, sym={self.sym!r})"


def von_neumann_info(rho: State, P: ProjectionPartition) -> float:
    """Shannon entropy of the outcome distribution of ``P`` under ``rho``."""
    return shannon(Distribution(P.probabilities(rho)))


def general_info(G: GeneralInformation, P: ProjectionPartition) -> float:
    return G(P)


def conditional_mu(rho: State, E: Projection) -> SignedOperator:
    """``rho - E rho E / rho(E)``, the operator turning Shannon into conditional information."""
    w = rho.prob(E)
    if w <= 0:
        raise ZeroConditioningEvent("rho(E) = 0")
    cond = E.matrix @ rho.matrix @ E.matrix / w
    mat = rho.matrix - cond
    return SignedOperator((mat + mat.conj().T) / 2, validate=False)


def conditional_info(rho: State, E: Projection, P: ProjectionPartition,
                     tol: float = DEFAULT_TOL) -> float:
    """``sum rho(E P_i E)/rho(E) * log2(1/rho(P_i))``."""
    check_same_dim(rho.dim, E.dim, P.dim)
    w = rho.prob(E)
    if w <= tol:
        raise ZeroConditioningEvent(f"rho(E) = {w!r}")
    cond = E.matrix @ rho.matrix @ E.matrix
    terms = []
    for i, (block, p) in enumerate(zip(P, P.probabilities(rho))):
        c = float(np.real(np.vdot(block.matrix, cond))) / w
        if p <= 0:
            if abs(c) > tol:
                raise DivergentTerm(f"block {i}: conditional weight {c:.3e} on a null block")
            continue
        terms.append(-c * log2(p))
    return math.fsum(terms)


class StepCDF:
    """Finite step distribution function: atoms ``(x, mass)`` with increasing ``x``."""

    __slots__ = ("atoms",)

    def __init__(self, atoms, *, tol: float = PROB_TOL):
        merged: dict = {}
        for x, m in atoms:
            x = float(x)
            if not math.isfinite(x):
                raise SchemaError(f"non-finite atom location {x!r}")
            merged[x] = merged.get(x, 0) + m
        items = sorted(merged.items())
        masses = [m for _, m in items]
        if not items:
            raise SumNotOne("a step cdf needs at least one atom")
        if any(m <= 0 for m in masses):
            raise NegativeWeight("atom masses must be positive")
        exact = all(isinstance(m, (Fraction, int)) for m in masses)
        total = sum(masses) if exact else math.fsum(float(m) for m in masses)
        if (exact and total != 1) or (not exact and abs(total - 1) > tol):
            raise SumNotOne(f"atom masses sum to {total}")
        self.atoms = tuple(items)

    def __call__(self, x: float):
        """``F(x) = mass of atoms strictly left of x``."""
        return sum((m for a, m in self.atoms if a < x), 0)

    def __eq__(self, other):
        return isinstance(other, StepCDF) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"StepCDF({[(x, str(m)) for x, m in self.atoms]})"


def point_mass(x: float) -> StepCDF:
    """``D_x``: unit atom at ``x``."""
    return StepCDF([(x, Fraction(1))])


def cdf_of_distribution(p) -> StepCDF:
    """Atoms at ``log2 p_i`` with masses ``p_i``."""
    p = _as_distribution(p)
    if any(x == 0 for x in p.probs):
        raise ZeroAtom("cdf of a distribution with a zero probability is undefined")
    return StepCDF([(log2(x), x) for x in p.probs])


def renyi_functional(F: StepCDF, alpha: float) -> float:
    """``J_1 = sum p x``; ``J_a = log2(sum p 2**((a-1) x)) / (a-1)``."""
    alpha = float(alpha)
    if alpha == 1:
        return math.fsum(float(m) * x for x, m in F.atoms)
    logs = [log2(m) + (alpha - 1) * x for x, m in F.atoms]
    return _logsumexp2(logs) / (alpha - 1)


def convolve(F: StepCDF, G: StepCDF) -> StepCDF:
    """Distribution of the sum of independent variables with laws ``F`` and ``G``."""
    return StepCDF([(x + y, m * n) for x, m in F.atoms for y, n in G.atoms])


def mix(F: StepCDF, G: StepCDF, t) -> StepCDF:
    """Mixture ``t F + (1 - t) G``."""
    if not 0 <= t <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    atoms = [(x, t * m) for x, m in F.atoms] + [(y, (1 - t) * n) for y, n in G.atoms]
    return StepCDF([(x, m) for x, m in atoms if m > 0])
