"""``addinfo`` command-line interface.

Exit codes: 0 success, 1 verification failed, 2 bad input (schema or
arguments), 3 domain error, 4 oracle protocol failure, 5 oracle failed the
additivity screen.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .decompose import decompose
from .dilation import check_bound, dilate, dilation_audit
from .exceptions import (
    AddinfoError,
    OracleNotAdditive,
    OracleProtocolError,
    RankInfeasible,
    SchemaError,
)
from .families import grouped_state, random_mu
from .functionals import GeneralInformation, Shannon, conditional_mu
from .gallery import (
    check_khinchin,
    check_renyi_suite,
    epsilon_spread,
    pi_additivity_exhaustive,
    pi_class_oracle,
    pi_reconstruction_gap,
    unbounded_example,
    unbounded_structure,
    unbounded_table,
)
from .linalg import Projection, State, haar_unitary, make_state
from .oracle import SubprocessOracle, conditional_oracle, from_information, noisy_oracle
from .serialize import (
    dumps,
    format_number,
    matrix_to_json,
    parse_mu,
    parse_partition,
    parse_state,
    parse_sym,
    state_to_json,
)
from .structure import chain_supports, connect_chain, uniform_structure

EXIT_OK, EXIT_VERIFY, EXIT_SCHEMA, EXIT_DOMAIN, EXIT_PROTOCOL, EXIT_ADDITIVITY = range(6)


class Result:
    """Payload for JSON output plus a flat table for CSV output."""

    def __init__(self, payload: dict, rows: list, code: int = EXIT_OK):
        self.payload, self.rows, self.code = payload, rows, code


def _csv(rows: list) -> str:
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields.extend(k for k in r if k not in fields)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _cell(v) for k, v in r.items()})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return repr(format_number(v))
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    return v


# ---------------------------------------------------------------------------
# info


def cmd_info(args) -> Result:
    rho = parse_state(args.rho)
    P = parse_partition(args.partition, rho.dim)
    sym = parse_sym(args.sym, args.alpha)
    mu = parse_mu(args.mu, rho.dim)
    G = GeneralInformation(rho, mu, sym, tol=args.tol)
    probs = P.probabilities(rho)
    value = G(P)
    nonsym = G.nonsymmetric_part(P, probs)
    payload = {
        "command": "info",
        "value": value,
        "symmetric_part": value - nonsym,
        "nonsymmetric_part": nonsym,
        "probabilities": probs,
        "sym": sym.to_json(),
    }
    rows = [{"block": i, "probability": p, "mu": G.mu.value(b)} for i, (b, p) in enumerate(zip(P, probs))]
    rows.append({"block": "total", "probability": sum(probs), "mu": value})
    return Result(payload, rows)


# ---------------------------------------------------------------------------
# decompose


def _default_state(args) -> State:
    if args.rho:
        return parse_state(args.rho)
    return grouped_state(8, args.level if args.level >= 2 else 2, seed=args.seed)


def _build_oracle(args, rho: State):
    """Returns ``(oracle, true_mu or None)``."""
    source = args.oracle
    if source.startswith("exec:"):
        return SubprocessOracle(source[5:]), None
    if not source.startswith("builtin:"):
        raise SchemaError(f"oracle must be builtin:<name> or exec:<path>, got {source!r}")
    name = source[8:]
    sym = parse_sym(args.sym, args.alpha)
    rng = np.random.default_rng(args.seed)
    if name == "shannon":
        return from_information(GeneralInformation(rho, None, Shannon()), name="shannon"), None
    if name in ("general", "noisy"):
        mu = parse_mu(args.mu, rho.dim) if args.mu else random_mu(rho.dim, rng)
        base = from_information(GeneralInformation(rho, mu, sym), name="general")
        if name == "noisy":
            return noisy_oracle(base, args.noise, seed=args.seed), mu
        return base, mu
    if name == "conditional":
        v = haar_unitary(rho.dim, rng)[:, : max(1, rho.dim // 2)]
        E = Projection.from_vectors(v)
        return conditional_oracle(rho, E), conditional_mu(rho, E)
    if name == "pi-class":
        v = haar_unitary(rho.dim, rng)
        return pi_class_oracle(rho, Projection.from_vectors(v[:, :1]),
                               Projection.from_vectors(v[:, 1:2])), None
    raise SchemaError(f"unknown builtin oracle {name!r}")


def cmd_decompose(args) -> Result:
    rho = _default_state(args)
    oracle, true_mu = _build_oracle(args, rho)
    try:
        report = decompose(oracle, rho, level=args.level, seed=args.seed,
                           additivity_checks=args.additivity_checks,
                           additivity_tol=args.additivity_tol, verify_trials=args.trials)
    finally:
        if isinstance(oracle, SubprocessOracle):
            oracle.close()
    ver = report.verification
    passed = ver is None or ver.max_residual <= args.tol
    cells = []
    for s_idx, table in enumerate(report.cell_measures):
        for c_idx, (cell, m) in enumerate(table):
            cells.append({"structure": s_idx, "cell": c_idx, "set": cell.to_json(), "m_hat": m})
    payload = {
        "command": "decompose",
        "oracle": oracle.name,
        "level": report.level,
        "seed": args.seed,
        "state": state_to_json(rho),
        "query_count": report.query_count,
        "fitted_mu": matrix_to_json(report.fitted_mu.matrix),
        "cell_measures": cells,
        "sym_samples": [{"profile": [str(p) for p in k], "value": v}
                        for k, v in sorted(report.sym_samples.items())],
        "residuals": {
            "fit": report.fit_residual,
            "cell_fit": report.cell_fit_error,
            "antisymmetry": report.antisymmetry,
            "total_m": report.total_m,
            "verification_max": ver.max_residual if ver else None,
            "verification_mean": ver.mean_residual if ver else None,
        },
        "design_rank": report.design_rank,
        "additivity": {"checks": report.additivity.checks, "max_defect": report.additivity.max_defect,
                       "tol": report.additivity.tol},
        "verification": {"trials": ver.trials if ver else 0, "tol": args.tol, "passed": passed},
        "notes": report.notes,
    }
    if true_mu is not None:
        payload["mu_error"] = float(np.max(np.abs(report.fitted_mu.matrix - true_mu.matrix)))
    rows = [{"structure": c["structure"], "cell": c["cell"],
             "set": " ".join(f"[{a},{b})" for a, b in c["set"]), "m_hat": c["m_hat"]} for c in cells]
    return Result(payload, rows, EXIT_OK if passed else EXIT_VERIFY)


# ---------------------------------------------------------------------------
# dilation


def _dilation_setup(dim: int, rank_p: int, k: int, rng):
    need = k * rank_p
    if dim < need:
        raise RankInfeasible(f"dimension {dim} < k * rankP = {need}")
    v = haar_unitary(dim, rng)
    P = Projection.from_vectors(v[:, :rank_p])
    Q = Projection.from_vectors(v[:, rank_p:need]) if k > 1 else Projection.zero(dim)
    w = rng.dirichlet(np.ones(dim))
    m = (v * w) @ v.conj().T
    rho = State((m + m.conj().T) / 2, validate=False)
    return P, Q, rho


def _dilation_result(args, with_blocks: bool) -> Result:
    rng = np.random.default_rng(args.seed)
    dim = args.dim if args.dim else args.k * args.rankP
    P, Q, rho = _dilation_setup(dim, args.rankP, args.k, rng)
    blocks = dilate(P, Q, args.k, args.tol)
    audit = dilation_audit(P, Q, blocks)
    bound = check_bound(rho, P, Q, blocks, args.tol)
    rows = []
    for l, (c, b) in enumerate(zip(audit.compression, bound.rows)):
        rows.append({"l": l, "compression_defect": c, "rho_Pl": b[0], "bound": b[1], "slack": b[2]})
    payload = {
        "command": "dilate",
        "dim": dim, "rankP": args.rankP, "k": args.k, "seed": args.seed,
        "orthogonality": audit.orthogonality,
        "sum_defect": audit.sum_defect,
        "max_compression_defect": audit.max_compression,
        "min_slack": bound.min_slack,
        "passed": audit.passed(1e-10) and bound.passed(1e-12),
        "table": rows,
    }
    if with_blocks:
        payload["P"] = matrix_to_json(P.matrix)
        payload["Q"] = matrix_to_json(Q.matrix)
        payload["blocks"] = [matrix_to_json(b.matrix) for b in blocks]
    return Result(payload, rows, EXIT_OK if payload["passed"] else EXIT_VERIFY)


def cmd_dilate(args) -> Result:
    return _dilation_result(args, with_blocks=True)


# ---------------------------------------------------------------------------
# demos


def demo_connect(args) -> Result:
    dim = args.dim or 16
    level = int(math.log2(dim))
    if 2 ** level != dim:
        raise SchemaError("demo connect needs a power-of-two --dim")
    rho = make_state([Fraction(1, dim)] * dim)
    rng = np.random.default_rng(args.seed)
    B = uniform_structure(rho, level, rng)
    B1 = uniform_structure(rho, level, rng)
    chain = connect_chain(B, B1, args.k)
    supports = chain_supports(chain)
    limit = Fraction(1, args.k)
    rows = [{"step": i + 1, "support_measure": s.measure, "within_limit": s.measure <= limit}
            for i, s in enumerate(supports)]
    ok = all(r["within_limit"] for r in rows) and chain[0] == B and chain[-1] == B1
    payload = {"command": "demo", "demo": "connect", "dim": dim, "k": args.k, "seed": args.seed,
               "limit": limit, "steps": len(supports), "passed": ok,
               "table": [{**r, "support": s.to_json()} for r, s in zip(rows, supports)]}
    return Result(payload, rows, EXIT_OK if ok else EXIT_VERIFY)


def demo_unbounded(args) -> Result:
    n_terms = args.terms
    table = unbounded_table(n_terms)
    values = [r[3] for r in table]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    G = unbounded_example(unbounded_structure(n_terms), n_terms)
    spreads = []
    for n, eps, _, _ in table[1:]:
        lo, hi = epsilon_spread(G, eps, samples=100, seed=args.seed)
        spreads.append({"n": n, "eps": eps, "min": lo, "max": hi, "spread": hi - lo})
    rows = [{"n": n, "rho_Pn": w, "mu_Pn": m, "value": v} for n, w, m, v in table]
    payload = {"command": "demo", "demo": "unbounded", "terms": n_terms, "table": rows,
               "strictly_decreasing": decreasing, "epsilon_spreads": spreads}
    return Result(payload, rows, EXIT_OK if decreasing else EXIT_VERIFY)


def demo_pi_class(args) -> Result:
    add = pi_additivity_exhaustive()
    gap = pi_reconstruction_gap(seed=args.seed, verify_trials=args.trials)
    ver = gap.extraction.verification
    rows = [
        {"check": "additivity_violations", "value": add.violations},
        {"check": "independent_pairs", "value": add.independent_pairs},
        {"check": "heldout_residual", "value": ver.max_residual},
        {"check": "class_member_value", "value": gap.partition_value},
        {"check": "reconstruction", "value": gap.reconstruction},
        {"check": "gap", "value": gap.gap},
    ]
    ok = add.passed and ver.passed and gap.gap > 0.5
    payload = {"command": "demo", "demo": "pi-class", "seed": args.seed,
               "additivity": {"partitions": add.partitions, "independent_pairs": add.independent_pairs,
                              "violations": add.violations, "class_members": add.pi_members},
               "heldout_residual": ver.max_residual, "class_member_value": gap.partition_value,
               "reconstruction": gap.reconstruction, "gap": gap.gap,
               "fitted_mu_norm": float(np.max(np.abs(gap.extraction.fitted_mu.matrix))),
               "passed": ok}
    return Result(payload, rows, EXIT_OK if ok else EXIT_VERIFY)


def cmd_demo(args) -> Result:
    if args.name == "connect":
        return demo_connect(args)
    if args.name == "dilate":
        result = _dilation_result(args, with_blocks=False)
        result.payload["command"] = "demo"
        result.payload["demo"] = "dilate"
        return result
    if args.name == "unbounded":
        return demo_unbounded(args)
    return demo_pi_class(args)


# ---------------------------------------------------------------------------
# axioms


def _suite_rows(report) -> list:
    return [{"condition": k, "passed": c.passed, "defect": c.defect, "note": c.note}
            for k, c in report.conditions.items()]


def cmd_axioms(args) -> Result:
    if args.suite == "khinchin":
        sym = parse_sym(args.sym, args.alpha)
        report = check_khinchin(sym, trials=args.trials, seed=args.seed)
        rows = _suite_rows(report)
        payload = {"command": "axioms", "suite": "khinchin", "sym": sym.to_json(),
                   "passed": report.passed, "conditions": rows}
        return Result(payload, rows)
    if args.suite == "renyi":
        report = check_renyi_suite(trials=args.trials, seed=args.seed)
        rows = _suite_rows(report)
        return Result({"command": "axioms", "suite": "renyi", "passed": report.passed,
                       "conditions": rows}, rows)
    table = unbounded_table(2)
    values = [r[3] for r in table]
    add = pi_additivity_exhaustive()
    rows = [{"condition": "unbounded_decreasing", "passed": all(b < a for a, b in zip(values, values[1:])),
             "defect": 0.0, "note": "I(P_n, P_n^perp) for n = 0, 1, 2: " + ", ".join(f"{v:.6g}" for v in values)},
            {"condition": "pi_additive", "passed": add.passed, "defect": add.max_defect,
             "note": f"{add.independent_pairs} independent pairs of coordinate partitions"}]
    return Result({"command": "axioms", "suite": "counterexamples",
                   "passed": all(r["passed"] for r in rows), "conditions": rows}, rows)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="also write <out>.json and <out>.csv")

    parser = argparse.ArgumentParser(prog="addinfo", description="Additive quantum information toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="evaluate an information functional")
    p.add_argument("--rho", default="diag:1/2,1/2")
    p.add_argument("--partition", default="coords")
    p.add_argument("--sym", default="shannon")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mu", default=None)
    p.set_defaults(func=cmd_info, default_tol=1e-10)

    p = sub.add_parser("decompose", parents=[common], help="extract mu and I_s from an oracle")
    p.add_argument("--oracle", default="builtin:general",
                   help="builtin:<shannon|general|conditional|pi-class|noisy> or exec:<path>")
    p.add_argument("--rho", default=None, help="state (default: seeded grouped state in dimension 8)")
    p.add_argument("--mu", default=None)
    p.add_argument("--sym", default="shannon")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--trials", type=int, default=100, help="held-out verification partitions")
    p.add_argument("--noise", type=float, default=1e-6)
    p.add_argument("--additivity-checks", type=int, default=16)
    p.add_argument("--additivity-tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_decompose, default_tol=1e-8)

    p = sub.add_parser("dilate", parents=[common], help="dilate P + Q into k blocks")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--rankP", type=int, default=1)
    p.add_argument("--k", type=int, default=2)
    p.set_defaults(func=cmd_dilate, default_tol=1e-10)

    p = sub.add_parser("demo", parents=[common], help="run a demonstration")
    p.add_argument("name", choices=("connect", "dilate", "unbounded", "pi-class"))
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--rankP", type=int, default=1)
    p.add_argument("--terms", type=int, default=2)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_demo, default_tol=1e-10)

    p = sub.add_parser("axioms", parents=[common], help="run an axiom suite")
    p.add_argument("--suite", choices=("khinchin", "renyi", "counterexamples"), default="khinchin")
    p.add_argument("--sym", default="shannon")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_axioms, default_tol=1e-10)
    return parser


def _table(rows: list) -> str:
    """Aligned plain-text table of the CSV rows."""
    if not rows:
        return ""
    reader = list(csv.reader(io.StringIO(_csv(rows))))
    widths = [max(len(r[i]) if i < len(r) else 0 for r in reader) for i in range(len(reader[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n" for r in reader)


def _emit(result: Result, args, stdout, stderr) -> None:
    text_json = dumps(result.payload)
    text_csv = _csv(result.rows)
    stdout.write(text_json if args.format == "json" else text_csv)
    if args.command == "demo":
        stderr.write(_table(result.rows))
    if args.out:
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            fh.write(text_json)
        with open(args.out + ".csv", "w", encoding="utf-8") as fh:
            fh.write(text_csv)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.tol is None:
        args.tol = args.default_tol
    try:
        result = args.func(args)
    except OracleProtocolError as exc:
        return _fail(stderr, exc, EXIT_PROTOCOL)
    except OracleNotAdditive as exc:
        return _fail(stderr, exc, EXIT_ADDITIVITY)
    except SchemaError as exc:
        return _fail(stderr, exc, EXIT_SCHEMA)
    except AddinfoError as exc:
        return _fail(stderr, exc, EXIT_DOMAIN)
    except OSError as exc:
        return _fail(stderr, exc, EXIT_SCHEMA)
    _emit(result, args, stdout, stderr)
    return result.code


def _fail(stderr, exc, code: int) -> int:
    stderr.write(f"error: {type(exc).__name__}: {exc}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
