"""Axiom suites and counterexamples.

* :func:`check_khinchin` runs the four classical conditions that single out
  Shannon entropy; :func:`check_renyi_suite` checks the Renyi family and the
  cdf functional ``J``.
* :func:`unbounded_example` builds a continuous information whose values
  ``I(P_n, P_n^perp)`` run off to minus infinity along a decreasing chain.
* :func:`pi_class_oracle` is additive but is not of the standard form: it
  is 1 on one permutation class of partitions and 0 elsewhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._validation import DEFAULT_TOL, check_rng
from .borel import IntervalSet
from .exceptions import ChainNotMonotone, NotOrthogonal, ResolutionTooCoarse, WeightZero
from .decompose import ExtractionReport, decompose, reconstruct
from .functionals import (
    GeneralInformation,
    StepCDF,
    Zero,
    cdf_of_distribution,
    convolve,
    mix,
    point_mass,
    renyi,
    renyi_functional,
    shannon,
)
from .linalg import (
    Projection,
    ProjectionPartition,
    SignedOperator,
    State,
    haar_unitary,
    make_state,
)
from .oracle import InformationOracle
from .structure import BooleanStructure

__all__ = [
    "ConditionResult",
    "SuiteReport",
    "check_khinchin",
    "check_renyi_suite",
    "unbounded_structure",
    "unbounded_example",
    "unbounded_table",
    "epsilon_spread",
    "pi_class_oracle",
    "pi_additivity_exhaustive",
    "pi_reconstruction_gap",
    "monotone_continuity_probe",
    "ProbeReport",
]


@dataclass
class ConditionResult:
    passed: bool
    defect: float
    note: str = ""


@dataclass
class SuiteReport:
    name: str
    conditions: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def __getitem__(self, key) -> ConditionResult:
        return self.conditions[key]


def _random_distribution(rng, low: int = 2, high: int = 7) -> list:
    m = int(rng.integers(low, high + 1))
    return list(rng.dirichlet(np.ones(m)))


def check_khinchin(I_s, trials: int = 1000, seed=0, tol: float = 1e-10,
                   h: float = 1e-8, modulus_limit: float = 1e-2) -> SuiteReport:
    """Permutation invariance, ``I(1/2,1/2) = 1``, continuity, recursivity."""
    rng = check_rng(seed)
    report = SuiteReport("khinchin")

    perm = 0.0
    for _ in range(trials):
        p = _random_distribution(rng)
        q = [p[i] for i in rng.permutation(len(p))]
        perm = max(perm, abs(I_s(p) - I_s(q)))
    report.conditions["1_symmetric"] = ConditionResult(perm <= tol, perm)

    half = abs(I_s([Fraction(1, 2), Fraction(1, 2)]) - 1)
    report.conditions["2_normalized"] = ConditionResult(half <= tol, half)

    grid = np.linspace(0.0, 1.0 - h, 201)
    modulus = max(abs(I_s([p + h, 1 - p - h]) - I_s([p, 1 - p])) for p in grid)
    report.conditions["3_continuous"] = ConditionResult(
        modulus <= modulus_limit, modulus, f"sampled modulus at step {h:g}; diagnostic only"
    )

    def recursion_defect(p):
        s = p[0] + p[1]
        merged = [s] + list(p[2:])
        return abs(I_s(p) - I_s(merged) - s * I_s([p[0] / s, p[1] / s]))

    rec = recursion_defect([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    for _ in range(trials):
        rec = max(rec, recursion_defect(_random_distribution(rng, 3, 7)))
    report.conditions["4_recursive"] = ConditionResult(bool(rec <= tol), float(rec))
    return report


def _refine_distribution(q: list, rng) -> list:
    """Split one atom of ``q`` in two, so ``F_p >= F_q`` with ``F_p != F_q``."""
    i = int(rng.integers(len(q)))
    t = float(rng.uniform(0.1, 0.9))
    return q[:i] + [q[i] * t, q[i] * (1 - t)] + q[i + 1:]


def _random_cdf(rng) -> StepCDF:
    m = int(rng.integers(1, 5))
    xs = rng.uniform(-4, 4, size=m)
    ws = rng.dirichlet(np.ones(m))
    return StepCDF(zip(xs, ws))


def check_renyi_suite(trials: int = 100, seed=0, alphas: Sequence = (0.5, 2.0, 3.0),
                      tol: float = 1e-10) -> SuiteReport:
    """Renyi limit, monotonicity in ``alpha``, and the axioms of ``J_alpha``.

    The ordering postulate is checked in the direction Shannon satisfies
    (refining a distribution raises ``F`` and raises the entropy); the
    opposite inequality is counted and reported, not asserted.
    """
    rng = check_rng(seed)
    report = SuiteReport("renyi")

    limit = 0.0
    for _ in range(trials):
        p = _random_distribution(rng)
        h = shannon(p)
        limit = max(limit, abs(renyi(p, 1 + 1e-6) - h), abs(renyi(p, 1 - 1e-6) - h))
    report.conditions["limit_shannon"] = ConditionResult(limit <= 1e-4, limit)

    grid = (0.0, 0.5, 1.0, 2.0, 4.0, 64.0)
    mono = 0.0
    for _ in range(trials):
        p = _random_distribution(rng)
        vals = [renyi(p, a) for a in grid]
        mono = max(mono, max(b - a for a, b in zip(vals, vals[1:])))
    report.conditions["monotone_alpha"] = ConditionResult(mono <= tol, max(mono, 0.0))

    reversed_holds = printed_holds = 0
    for _ in range(trials):
        q = _random_distribution(rng)
        p = _refine_distribution(q, rng)
        reversed_holds += shannon(p) > shannon(q)
        printed_holds += shannon(p) < shannon(q)
    report.conditions["order_postulate"] = ConditionResult(
        reversed_holds == trials, float(trials - reversed_holds),
        f"F_p >= F_q gave I_s(p) > I_s(q) in {reversed_holds}/{trials} cases; "
        f"the opposite inequality held in {printed_holds}/{trials}",
    )

    for a in alphas:
        unit = abs(renyi_functional(point_mass(1.0), a) - 1)
        report.conditions[f"J{a:g}_unit"] = ConditionResult(unit == 0, unit)
        add = sub = mixing = 0.0
        for _ in range(trials):
            F, G = _random_cdf(rng), _random_cdf(rng)
            add = max(add, abs(renyi_functional(convolve(F, G), a)
                               - renyi_functional(F, a) - renyi_functional(G, a)))
            p = _random_distribution(rng)
            sub = max(sub, abs(renyi_functional(cdf_of_distribution(p), a)
                               - math.log2(sum(x ** a for x in p)) / (a - 1)))
            # two cdfs with equal J: shift G so that J matches J(F1)
            F1 = _random_cdf(rng)
            shift = renyi_functional(F1, a) - renyi_functional(G, a)
            F2 = convolve(G, point_mass(shift))
            t = float(rng.uniform(0, 1))
            mixing = max(mixing, abs(renyi_functional(mix(F, F1, t), a)
                                     - renyi_functional(mix(F, F2, t), a)))
        report.conditions[f"J{a:g}_additive"] = ConditionResult(add <= tol, add)
        report.conditions[f"J{a:g}_substitution"] = ConditionResult(sub <= tol, sub)
        report.conditions[f"J{a:g}_mixing"] = ConditionResult(mixing <= 1e-9, mixing)
    return report


# ---------------------------------------------------------------------------
# the unbounded continuous example

MAX_TERMS = 3


def _band(i: int) -> tuple:
    return Fraction(1, 2 ** (2 ** (2 * i + 2))), Fraction(1, 2 ** (2 ** (2 * i)))


def unbounded_structure(n_terms: int) -> BooleanStructure:
    """Diagonal structure whose cells contain the bands ``[2^-2^(2i+2), 2^-2^(2i))``.

    Cells, left to right: the tail below the last band, bands
    ``n_terms, ..., 0``, and ``[1/2, 1)``; each carries one coordinate.
    """
    if not 0 <= n_terms <= MAX_TERMS:
        raise ResolutionTooCoarse(f"n_terms must lie in 0..{MAX_TERMS}")
    cuts = [Fraction(0), _band(n_terms)[0]]
    for i in range(n_terms, -1, -1):
        cuts.append(_band(i)[1])
    cuts.append(Fraction(1))
    sets = [IntervalSet.interval(a, b) for a, b in zip(cuts, cuts[1:])]
    rho = make_state([s.measure for s in sets])
    return BooleanStructure(rho, [(s, Projection.from_support(len(sets), [j]))
                                  for j, s in enumerate(sets)])


def _band_vector(B: BooleanStructure, i: int) -> np.ndarray:
    lo, hi = _band(i)
    band = IntervalSet.interval(lo, hi)
    for s, p in B.cells:
        if s.issubset(band) and p.rank > 0:
            return p.range_basis()[:, 0]
    raise ResolutionTooCoarse(f"no cell of the structure lies inside band {i}")


def unbounded_example(B: BooleanStructure, n_terms: int) -> GeneralInformation:
    """``I_s = 0`` and ``mu = -f_0 + sum_{i=1}^{N} c_i f_i`` with ``c_i = 2^-i``.

    The remainder ``2^-N`` of the geometric series is added to the last
    coefficient, which keeps ``tr mu = 0`` and makes ``mu(P_n) = 2^(1-n)``
    for ``P_n = B([0, 2^-2^(2n)))``, ``1 <= n <= N``.
    """
    if not 0 <= n_terms <= MAX_TERMS:
        raise ResolutionTooCoarse(f"n_terms must lie in 0..{MAX_TERMS}")
    coefs = [Fraction(-1)] + [Fraction(1, 2 ** i) for i in range(1, n_terms + 1)]
    if n_terms:
        coefs[-1] += Fraction(1, 2 ** n_terms)
    else:
        coefs = [Fraction(0)]
    mu = np.zeros((B.dim, B.dim), dtype=complex)
    for i, c in enumerate(coefs):
        f = _band_vector(B, i)
        mu += float(c) * np.outer(f, f.conj())
    return GeneralInformation(B.rho, SignedOperator(mu), Zero())


def _head(B: BooleanStructure, n: int) -> ProjectionPartition:
    A = IntervalSet.interval(0, _band(n)[1])
    P = B.evaluate(A)
    return ProjectionPartition([P, P.complement()], validate=False)


def unbounded_table(n_terms: int = 2) -> list:
    """Rows ``(n, rho(P_n), mu(P_n), I(P_n, P_n^perp))`` for ``n = 0..n_terms``."""
    B = unbounded_structure(n_terms)
    G = unbounded_example(B, n_terms)
    rows = []
    for n in range(n_terms + 1):
        P = _head(B, n)
        rows.append((n, B.rho.probability(P[0]), G.mu.value(P[0]), G(P)))
    return rows


def epsilon_spread(G: GeneralInformation, eps: Fraction, samples: int = 100, seed=0) -> tuple:
    """Values of ``I(P, P^perp)`` over random rank-one ``P`` with ``rho(P) = eps``.

    Each ``P`` mixes two coordinates with weights on either side of ``eps``.
    Returns ``(min, max)``.
    """
    rng = check_rng(seed)
    w = [float(x) for x in G.rho.weights] if G.rho.weights else list(np.real(np.diag(G.rho.matrix)))
    e = float(eps)
    pairs = [(i, j) for i in range(len(w)) for j in range(len(w)) if i != j and w[i] > e > w[j]]
    if not pairs:
        raise ResolutionTooCoarse(f"no coordinate pair brackets eps = {e!r}")
    vals = []
    d = G.rho.dim
    for _ in range(samples):
        i, j = pairs[int(rng.integers(len(pairs)))]
        a2 = (e - w[j]) / (w[i] - w[j])
        v = np.zeros(d, dtype=complex)
        v[i] = math.sqrt(a2)
        v[j] = math.sqrt(1 - a2) * np.exp(2j * np.pi * rng.uniform())
        m = np.outer(v, v.conj())
        P = Projection((m + m.conj().T) / 2, validate=False)
        vals.append(G(ProjectionPartition([P, P.complement()], validate=False)))
    return min(vals), max(vals)


# ---------------------------------------------------------------------------
# the pi-class oracle


def pi_class_oracle(rho: State, e_hat: Projection, f_hat: Projection,
                    tol: float = DEFAULT_TOL) -> InformationOracle:
    """1 on partitions ``(e, f, P, P_1, ..., P_n)`` with ``rho(P_i) = 0`` (any order), else 0.

    Blocks are compared modulo rho-null projections: a block counts as ``e``
    when it contains ``e`` and has the same weight. Without this, splitting a
    null piece off a block could move a partition into the class and break
    additivity.
    """
    for name, p in (("e_hat", e_hat), ("f_hat", f_hat)):
        if p.rank != 1:
            raise ValueError(f"{name} must be rank one")
        if rho.prob(p) <= tol:
            raise WeightZero(f"rho({name}) = 0")
    if not e_hat.is_orthogonal_to(f_hat, tol):
        raise NotOrthogonal("e_hat and f_hat must be orthogonal")

    we, wf = rho.prob(e_hat), rho.prob(f_hat)
    ve, vf = e_hat.range_basis()[:, 0], f_hat.range_basis()[:, 0]

    def matches(block: Projection, v, w) -> bool:
        # equal to the target up to a rho-null summand
        return (float(np.linalg.norm(block.matrix @ v - v)) <= tol
                and abs(rho.prob(block) - w) <= tol)

    def value(P: ProjectionPartition) -> float:
        blocks = list(P)
        ie = next((i for i, b in enumerate(blocks) if matches(b, ve, we)), None)
        jf = next((i for i, b in enumerate(blocks) if matches(b, vf, wf)), None)
        if ie is None or jf is None:
            return 0.0
        rest = [b for i, b in enumerate(blocks) if i not in (ie, jf)]
        heavy = sum(1 for b in rest if rho.prob(b) > tol)
        return 1.0 if heavy <= 1 else 0.0

    return InformationOracle(value, name="pi-class")


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


@dataclass
class PiAdditivityReport:
    partitions: int
    independent_pairs: int
    violations: int
    max_defect: float
    pi_members: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def pi_additivity_exhaustive(weights: Sequence = ("1/4", "1/4", "1/4", "1/4", "0", "0"),
                             e_index: int = 0, f_index: int = 1) -> PiAdditivityReport:
    """Check ``I(P.Q) = I(P) + I(Q)`` on every independent pair of coordinate partitions."""
    rho = make_state(weights)
    d = rho.dim
    w = rho.weights
    e_hat = Projection.from_support(d, [e_index])
    f_hat = Projection.from_support(d, [f_index])
    oracle = pi_class_oracle(rho, e_hat, f_hat)
    parts = [[frozenset(b) for b in p] for p in _set_partitions(list(range(d)))]
    mass_cache: dict = {}

    def mass(s):
        if s not in mass_cache:
            mass_cache[s] = sum((w[i] for i in s), Fraction(0))
        return mass_cache[s]

    proj_cache: dict = {}

    def proj(s):
        if s not in proj_cache:
            proj_cache[s] = Projection.from_support(d, s)
        return proj_cache[s]

    cache: dict = {}

    def value(blocks):
        key = frozenset(blocks) if len(set(blocks)) == len(blocks) else tuple(sorted(map(sorted, blocks)))
        if key not in cache:
            P = ProjectionPartition([proj(b) for b in blocks], validate=False)
            cache[key] = oracle(P)
        return cache[key]

    indep = violations = members = 0
    worst = 0.0
    for P in parts:
        members += value(P) == 1.0
    for P, Q in itertools.product(parts, repeat=2):
        if any(mass(a & b) != mass(a) * mass(b) for a in P for b in Q):
            continue
        indep += 1
        prod = [a & b for a in P for b in Q]
        lhs = oracle(ProjectionPartition([proj(b) for b in prod], validate=False))
        defect = abs(lhs - value(P) - value(Q))
        worst = max(worst, defect)
        violations += defect > 0
    return PiAdditivityReport(len(parts), indep, violations, worst, members)


@dataclass
class PiGapReport:
    extraction: ExtractionReport
    partition_value: float
    reconstruction: float

    @property
    def gap(self) -> float:
        return abs(self.partition_value - self.reconstruction)


def pi_reconstruction_gap(seed=0, dim: int = 8, level: int = 3,
                          verify_trials: int = 100) -> PiGapReport:
    """Decompose the pi-class oracle, then evaluate it on ``(e, f, rest)``.

    Generic held-out partitions never hit the class, so the fit gives
    ``mu = 0`` and ``I_s = 0`` and verifies; the class member itself has value
    1 while the reconstruction gives 0.
    """
    rng = check_rng(seed)
    n = 2 ** level
    if dim % n:
        raise ResolutionTooCoarse(f"dimension {dim} is not a multiple of {n}")
    rho = make_state([Fraction(1, dim)] * dim)
    v = haar_unitary(dim, rng)
    e_hat = Projection.from_vectors(v[:, :1])
    f_hat = Projection.from_vectors(v[:, 1:2])
    oracle = pi_class_oracle(rho, e_hat, f_hat)
    report = decompose(oracle, rho, level=level, seed=rng, verify_trials=verify_trials)
    rest = Projection(np.eye(dim) - e_hat.matrix - f_hat.matrix, validate=False)
    P = ProjectionPartition([e_hat, f_hat, rest], validate=False)
    return PiGapReport(report, oracle(P), reconstruct(P, rho, report.fitted_mu,
                                                      report.sym_samples, level))


# ---------------------------------------------------------------------------
# continuity along increasing chains


@dataclass
class ProbeReport:
    values: list
    limit_value: float
    gap: float


def monotone_continuity_probe(oracle, chain: Sequence[Projection], P: Projection,
                              tol: float = DEFAULT_TOL) -> ProbeReport:
    """Tabulate ``I(P_n, P_n^perp)`` along ``P_1 <= P_2 <= ... <= P``."""
    seq = list(chain) + [P]
    for n, (a, b) in enumerate(zip(seq, seq[1:])):
        if float(np.max(np.abs(a.matrix @ b.matrix - a.matrix))) > tol:
            raise ChainNotMonotone(f"element {n} is not below element {n + 1}")

    def two_block(p):
        return oracle(ProjectionPartition([p, p.complement()], validate=False))

    values = [two_block(p) for p in chain]
    limit = two_block(P)
    gap = abs(values[-1] - limit) if values else 0.0
    return ProbeReport(values, limit, gap)
