"""Finite-dimensional states, projections and partitions of unity.

All objects are immutable after construction. Matrices are stored as
read-only complex ``numpy`` arrays; when a state is diagonal with exact
rational weights and a projection is a coordinate projection, outcome
probabilities are also available as exact :class:`~fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._validation import (
    DEFAULT_TOL,
    as_fraction,
    check_hermitian,
    check_same_dim,
    check_square,
)
from .exceptions import (
    DimensionMismatch,
    NegativeWeight,
    NonCommuting,
    NotComplete,
    NotOrthogonal,
    NotProjection,
    NotState,
    NotUnitVector,
    SumNotOne,
)

__all__ = [
    "State",
    "SignedOperator",
    "Projection",
    "ProjectionPartition",
    "IndependenceReport",
    "make_state",
    "projection_partition",
    "physically_independent",
    "tensor_independent_pair",
    "product_partition",
    "post_measurement_state",
    "coordinate_partition",
    "trivial_partition",
    "haar_unitary",
]


def _diagonal_support(arr: np.ndarray) -> frozenset | None:
    """Index set of a diagonal 0/1 matrix, else ``None``."""
    diag = np.diag(arr)
    if np.count_nonzero(arr - np.diag(diag)):
        return None
    ones = diag == 1
    if not np.all(ones | (diag == 0)):
        return None
    return frozenset(int(i) for i in np.flatnonzero(ones))


class State:
    """Density operator: Hermitian, positive semidefinite, unit trace.

    ``weights`` holds exact diagonal weights when the state is diagonal in
    the coordinate basis and they are known exactly.
    """

    __slots__ = ("matrix", "weights")

    def __init__(self, matrix, *, weights: Sequence | None = None, tol: float = DEFAULT_TOL,
                 validate: bool = True):
        arr = check_square(matrix, "state")
        if validate:
            check_hermitian(arr, tol, "state")
            herm = (arr + arr.conj().T) / 2
            lowest = float(np.linalg.eigvalsh(herm)[0])
            if lowest < -tol:
                raise NotState(f"state is not positive semidefinite (min eigenvalue {lowest:.3e})")
            trace = float(np.real(np.trace(arr)))
            if abs(trace - 1) > tol:
                raise NotState(f"state trace is {trace!r}, expected 1")
        if weights is not None:
            weights = tuple(as_fraction(w) for w in weights)
            if len(weights) != arr.shape[0]:
                raise DimensionMismatch("weights length differs from state dimension")
        elif not np.count_nonzero(arr - np.diag(np.diag(arr))):
            candidate = tuple(Fraction(float(np.real(x))) for x in np.diag(arr))
            if sum(candidate) == 1 and all(w >= 0 for w in candidate):
                weights = candidate
        self.matrix = arr
        self.weights = weights

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def exact_prob(self, projection: "Projection") -> Fraction | None:
        """Exact ``tr(rho P)`` when both sides are in the diagonal model."""
        if self.weights is None or projection.support is None:
            return None
        return sum((self.weights[i] for i in projection.support), Fraction(0))

    def probability(self, projection: "Projection"):
        """``tr(rho P)``: a Fraction when exact, a float otherwise."""
        exact = self.exact_prob(projection)
        if exact is not None:
            return exact
        return self.expectation(projection.matrix)

    def prob(self, projection: "Projection") -> float:
        return float(self.probability(projection))

    def expectation(self, operator) -> float:
        """Real part of ``tr(rho X)`` for Hermitian ``X``."""
        op = operator.matrix if hasattr(operator, "matrix") else np.asarray(operator)
        return float(np.real(np.vdot(op, self.matrix)))

    def commutes_with(self, projection: "Projection", tol: float = DEFAULT_TOL) -> bool:
        a, b = self.matrix, projection.matrix
        return float(np.max(np.abs(a @ b - b @ a))) <= tol

    def __repr__(self):
        if self.weights is not None:
            return f"State(diag={[str(w) for w in self.weights]})"
        return f"State(dim={self.dim})"


class SignedOperator:
    """Hermitian traceless operator; ``value(P) = tr(mu P)``."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, tol: float = DEFAULT_TOL, validate: bool = True):
        arr = check_square(matrix, "signed operator")
        if validate:
            check_hermitian(arr, tol, "signed operator")
            trace = abs(np.trace(arr))
            if trace > tol:
                raise NotState(f"signed operator must be traceless, |tr| = {trace:.3e}")
        self.matrix = arr

    @classmethod
    def zero(cls, dim: int) -> "SignedOperator":
        return cls(np.zeros((dim, dim)), validate=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def value(self, projection: "Projection") -> float:
        op = projection.matrix if hasattr(projection, "matrix") else np.asarray(projection)
        return float(np.real(np.vdot(op, self.matrix)))

    def __repr__(self):
        return f"SignedOperator(dim={self.dim})"


class Projection:
    """Orthogonal projection (Hermitian idempotent)."""

    __slots__ = ("matrix", "rank", "support")

    def __init__(self, matrix, *, tol: float = DEFAULT_TOL, validate: bool = True):
        arr = check_square(matrix, "projection")
        if validate:
            check_hermitian(arr, tol, "projection")
            defect = float(np.max(np.abs(arr @ arr - arr)))
            if defect > tol:
                raise NotProjection(f"matrix is not idempotent (max |M^2 - M| = {defect:.3e})")
        self.matrix = arr
        self.rank = int(round(float(np.real(np.trace(arr)))))
        self.support = _diagonal_support(arr)

    @classmethod
    def from_support(cls, dim: int, indices: Iterable[int]) -> "Projection":
        diag = np.zeros(dim)
        diag[list(indices)] = 1.0
        return cls(np.diag(diag).astype(complex), validate=False)

    @classmethod
    def from_vectors(cls, vectors) -> "Projection":
        """Projection onto the span of the columns of ``vectors``."""
        vecs = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if vecs.shape[1] == 0:
            raise NotProjection("no vectors given")
        q, r = np.linalg.qr(vecs)
        keep = np.abs(np.diag(r)) > 1e-12
        q = q[:, keep]
        mat = q @ q.conj().T
        return cls((mat + mat.conj().T) / 2, validate=False)

    @classmethod
    def zero(cls, dim: int) -> "Projection":
        return cls(np.zeros((dim, dim), dtype=complex), validate=False)

    @classmethod
    def identity(cls, dim: int) -> "Projection":
        return cls(np.eye(dim, dtype=complex), validate=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "Projection":
        return Projection(np.eye(self.dim) - self.matrix, validate=False)

    def range_basis(self) -> np.ndarray:
        """Orthonormal basis (columns) of the range, in a deterministic order."""
        if self.support is not None:
            eye = np.eye(self.dim, dtype=complex)
            return eye[:, sorted(self.support)]
        vals, vecs = np.linalg.eigh((self.matrix + self.matrix.conj().T) / 2)
        return vecs[:, vals > 0.5][:, ::-1]

    def is_orthogonal_to(self, other: "Projection", tol: float = DEFAULT_TOL) -> bool:
        return float(np.linalg.norm(self.matrix @ other.matrix, 2)) <= tol

    def __add__(self, other: "Projection") -> "Projection":
        check_same_dim(self.dim, other.dim)
        return Projection(self.matrix + other.matrix, validate=False)

    def __eq__(self, other):
        if not isinstance(other, Projection):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())

    def allclose(self, other: "Projection", tol: float = DEFAULT_TOL) -> bool:
        return self.dim == other.dim and float(np.max(np.abs(self.matrix - other.matrix))) <= tol

    def __repr__(self):
        if self.support is not None:
            return f"Projection(support={sorted(self.support)}, dim={self.dim})"
        return f"Projection(rank={self.rank}, dim={self.dim})"


class ProjectionPartition(Sequence):
    """Ordered tuple of mutually orthogonal projections summing to the identity."""

    __slots__ = ("projections",)

    def __init__(self, projections: Iterable, *, tol: float = DEFAULT_TOL, validate: bool = True):
        projs = []
        for idx, p in enumerate(projections):
            if isinstance(p, Projection):
                projs.append(p)
                continue
            try:
                projs.append(Projection(p, tol=tol, validate=validate))
            except NotProjection as exc:
                raise NotProjection(f"block {idx}: {exc}") from None
        if not projs:
            raise NotComplete("a partition needs at least one block")
        dim = check_same_dim(*(p.dim for p in projs))
        if validate:
            for i in range(len(projs)):
                for j in range(i + 1, len(projs)):
                    overlap = float(np.max(np.abs(projs[i].matrix @ projs[j].matrix)))
                    if overlap > tol:
                        raise NotOrthogonal(
                            f"blocks ({i}, {j}) are not orthogonal (max |P_i P_j| = {overlap:.3e})"
                        )
            total = sum(p.matrix for p in projs)
            defect = float(np.max(np.abs(total - np.eye(dim))))
            if defect > tol:
                raise NotComplete(f"blocks do not sum to the identity (defect {defect:.3e})")
        self.projections = tuple(projs)

    def __getitem__(self, idx):
        return self.projections[idx]

    def __len__(self):
        return len(self.projections)

    @property
    def dim(self) -> int:
        return self.projections[0].dim

    def probabilities(self, rho: State) -> list:
        """Outcome probabilities, exact Fractions where the model allows."""
        check_same_dim(self.dim, rho.dim)
        return [rho.probability(p) for p in self.projections]

    def __repr__(self):
        return f"ProjectionPartition({list(self.projections)!r})"


def make_state(weights: Sequence) -> State:
    """Diagonal state with exact rational ``weights``.

    >>> make_state(["1/2", "1/2"]).weights
    (Fraction(1, 2), Fraction(1, 2))
    """
    fr = [as_fraction(w) for w in weights]
    if not fr:
        raise SumNotOne("weights must be non-empty")
    for i, w in enumerate(fr):
        if w < 0:
            raise NegativeWeight(f"weight {i} is negative: {w}")
    if sum(fr) != 1:
        raise SumNotOne(f"weights sum to {sum(fr)}, expected exactly 1")
    mat = np.diag([float(w) for w in fr]).astype(complex)
    return State(mat, weights=fr, validate=False)


def projection_partition(mats, tol: float = DEFAULT_TOL) -> ProjectionPartition:
    """Validate a list of matrices as a partition of unity."""
    return ProjectionPartition(mats, tol=tol, validate=True)


def coordinate_partition(dim: int) -> ProjectionPartition:
    """Partition into the ``dim`` coordinate rank-one projections."""
    return ProjectionPartition([Projection.from_support(dim, [i]) for i in range(dim)], validate=False)


def trivial_partition(dim: int) -> ProjectionPartition:
    """The one-block partition ``(1_H)``."""
    return ProjectionPartition([Projection.identity(dim)], validate=False)


@dataclass(frozen=True)
class IndependenceReport:
    independent: bool
    max_commutator: float
    max_defect: float

    def __bool__(self):
        return self.independent


def physically_independent(P: ProjectionPartition, Q: ProjectionPartition, rho: State,
                           tol: float = DEFAULT_TOL) -> IndependenceReport:
    """Blockwise commutation plus factorisation of outcome probabilities."""
    check_same_dim(P.dim, Q.dim, rho.dim)
    max_comm = 0.0
    max_defect = 0.0
    p_probs = [rho.probability(p) for p in P]
    q_probs = [rho.probability(q) for q in Q]
    for p, pp in zip(P, p_probs):
        for q, qp in zip(Q, q_probs):
            pq = p.matrix @ q.matrix
            max_comm = max(max_comm, float(np.max(np.abs(pq - q.matrix @ p.matrix))))
            if p.support is not None and q.support is not None and rho.weights is not None:
                joint = sum((rho.weights[i] for i in p.support & q.support), Fraction(0))
                defect = abs(joint - pp * qp)
            else:
                defect = abs(rho.expectation((pq + pq.conj().T) / 2) - float(pp) * float(qp))
            max_defect = max(max_defect, float(defect))
    return IndependenceReport(max_comm <= tol and max_defect <= tol, max_comm, max_defect)


def tensor_independent_pair(rho1: State, rho2: State, p: ProjectionPartition,
                            q: ProjectionPartition):
    """Build ``rho1 (x) rho2`` with the independent pair ``(p_i (x) 1)``, ``(1 (x) q_j)``."""
    if p.dim != rho1.dim or q.dim != rho2.dim:
        raise DimensionMismatch("partitions must match their state dimensions")
    d1, d2 = rho1.dim, rho2.dim
    weights = None
    if rho1.weights is not None and rho2.weights is not None:
        weights = [a * b for a in rho1.weights for b in rho2.weights]
    rho = State(np.kron(rho1.matrix, rho2.matrix), weights=weights, validate=False)
    eye1, eye2 = np.eye(d1), np.eye(d2)
    big_p = ProjectionPartition([Projection(np.kron(b.matrix, eye2), validate=False) for b in p],
                                validate=False)
    big_q = ProjectionPartition([Projection(np.kron(eye1, b.matrix), validate=False) for b in q],
                                validate=False)
    return rho, big_p, big_q


def product_partition(P: ProjectionPartition, Q: ProjectionPartition,
                      tol: float = DEFAULT_TOL) -> ProjectionPartition:
    """Blocks ``P_i Q_j`` in row-major order; zero blocks are kept."""
    check_same_dim(P.dim, Q.dim)
    blocks = []
    for i, p in enumerate(P):
        for j, q in enumerate(Q):
            pq = p.matrix @ q.matrix
            comm = float(np.max(np.abs(pq - q.matrix @ p.matrix)))
            if comm > tol:
                raise NonCommuting(f"blocks P_{i} and Q_{j} do not commute ({comm:.3e})")
            blocks.append(Projection((pq + pq.conj().T) / 2, validate=False))
    return ProjectionPartition(blocks, validate=False)


def post_measurement_state(e, P: ProjectionPartition, tol: float = DEFAULT_TOL) -> State:
    """State after measuring ``P`` on the pure state ``e``.

    Blocks with ``P_i e = 0`` contribute nothing.
    """
    vec = np.asarray(e, dtype=complex).ravel()
    if vec.shape[0] != P.dim:
        raise DimensionMismatch("vector and partition dimensions differ")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1) > tol:
        raise NotUnitVector(f"|e| = {norm!r}")
    out = np.zeros((P.dim, P.dim), dtype=complex)
    for block in P:
        v = block.matrix @ vec
        if np.vdot(v, v).real > 0:
            out += np.outer(v, v.conj())
    out = (out + out.conj().T) / 2
    return State(out / np.real(np.trace(out)), tol=max(tol, 1e-10))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
