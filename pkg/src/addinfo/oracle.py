"""Black-box information oracles.

An oracle maps a :class:`~addinfo.linalg.ProjectionPartition` to a real
number. Queries are counted and optionally budgeted; they are issued one at
a time in the order the caller makes them.
"""

from __future__ import annotations

import hashlib
import json
import os
import subprocess
import sys
from typing import Callable

import numpy as np

from .exceptions import OracleProtocolError, QueryBudgetExceeded
from .functionals import GeneralInformation, conditional_info
from .linalg import Projection, ProjectionPartition, State

__all__ = [
    "InformationOracle",
    "from_information",
    "conditional_oracle",
    "noisy_oracle",
    "SubprocessOracle",
    "partition_digest",
    "partition_to_json",
]


class InformationOracle:
    """Callable wrapper that counts queries and enforces a budget."""

    def __init__(self, func: Callable[[ProjectionPartition], float], *, name: str = "oracle",
                 declared_pure: bool = True, query_budget: int | None = None):
        self.func = func
        self.name = name
        self.declared_pure = declared_pure
        self.query_budget = query_budget
        self.query_count = 0

    def query(self, P: ProjectionPartition) -> float:
        if self.query_budget is not None and self.query_count >= self.query_budget:
            raise QueryBudgetExceeded(f"{self.name}: budget of {self.query_budget} queries exhausted")
        self.query_count += 1
        return float(self.func(P))

    __call__ = query

    def reset(self) -> None:
        self.query_count = 0

    def __repr__(self):
        return f"InformationOracle({self.name!r}, queries={self.query_count})"


def from_information(G: GeneralInformation, name: str = "general", **kwargs) -> InformationOracle:
    return InformationOracle(G, name=name, **kwargs)


def conditional_oracle(rho: State, E: Projection, **kwargs) -> InformationOracle:
    return InformationOracle(lambda P: conditional_info(rho, E, P), name="conditional", **kwargs)


def partition_digest(P: ProjectionPartition, decimals: int = 9) -> bytes:
    """Order-independent digest of a partition (blocks rounded, then sorted)."""
    blocks = []
    for block in P:
        m = np.round(block.matrix, decimals) + 0.0  # folds -0.0 into 0.0
        blocks.append(hashlib.sha256(m.tobytes()).digest())
    return hashlib.sha256(b"".join(sorted(blocks))).digest()


def noisy_oracle(base: InformationOracle, scale: float = 1e-6, seed: int = 0) -> InformationOracle:
    """Perturb ``base`` by deterministic pseudo-noise of size ``scale``.

    The noise depends only on the (unordered) partition, so the result is
    still permutation invariant, but no longer additive.
    """
    salt = int(seed).to_bytes(8, "little", signed=True)

    def query(P):
        h = hashlib.sha256(salt + partition_digest(P)).digest()
        u = int.from_bytes(h[:8], "little") / 2**64
        return base.func(P) + scale * (2 * u - 1)

    return InformationOracle(query, name=f"noisy({base.name})", declared_pure=base.declared_pure)


def partition_to_json(P: ProjectionPartition) -> list:
    return [[[[float(z.real), float(z.imag)] for z in row] for row in block.matrix] for block in P]


class SubprocessOracle(InformationOracle):
    """Oracle served by an external program.

    Each request is one line of JSON (an array of matrices, each a row-major
    array of ``[re, im]`` pairs); the program answers with one decimal number
    per line. The program is started once and reused.
    """

    def __init__(self, path: str, *, query_budget: int | None = None, timeout: float = 30.0):
        self.path = path
        self.timeout = timeout
        self._proc = None
        super().__init__(self._ask, name=f"exec:{path}", declared_pure=False,
                         query_budget=query_budget)

    def _command(self) -> list:
        if self.path.endswith(".py"):
            return [sys.executable, self.path]
        return [self.path]

    def _start(self):
        if not os.path.exists(self.path):
            raise OracleProtocolError(f"oracle program not found: {self.path}")
        try:
            self._proc = subprocess.Popen(
                self._command(), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, encoding="utf-8", bufsize=1,
            )
        except OSError as exc:
            raise OracleProtocolError(f"cannot start oracle program: {exc}") from None

    def _ask(self, P: ProjectionPartition) -> float:
        if self._proc is None:
            self._start()
        line = json.dumps(partition_to_json(P), separators=(",", ":"))
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
            answer = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleProtocolError(f"oracle program died: {exc}") from None
        if not answer:
            raise OracleProtocolError("oracle program closed its output")
        try:
            value = float(answer.strip())
        except ValueError:
            raise OracleProtocolError(f"oracle answered {answer.strip()!r}, expected a decimal number") from None
        if not np.isfinite(value):
            raise OracleProtocolError(f"oracle answered a non-finite value {answer.strip()!r}")
        return value

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=self.timeout)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass
