"""Command-line runner for the entanglement experiments.

Every subcommand prints one JSON run record with top-level keys
``experiment``, ``parameters``, ``results`` and ``tool_version``. Angles are
in radians.

Exit status: 0 on success, 1 on invalid arguments, 2 when an embedded audit
fails (no-signaling deviation above threshold, failed reversal).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import __version__
from .decoherence import (
    MAX_EXACT_QUBITS,
    EnvironmentSpec,
    branch_coherence,
    decoherence_factor,
    decohered_state,
    reverse_and_check,
)
from .interferometry import (
    CHSHSettings,
    PhaseSettings,
    STANDARD_CHSH,
    bell_pair,
    chsh,
    correlation_E,
    fringe_visibility,
    joint_distribution,
    joint_grid,
    marginal,
    mixture,
    no_signaling_audit,
    phase_grid,
)
from .qlinalg import DensityOperator, StateVector, ValidationError
from .sampler import SampleConfig, chsh_from_counts, estimate_E, sample_joint
from .states import (
    Amplitudes,
    EQUAL,
    HalfLifeClock,
    basis_ambiguity,
    cat_amplitudes,
    collapse_mixture,
    entanglement_report,
    premeasure,
    reduced_states,
)

EXIT_OK, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2
NOSIGNAL_THRESHOLD = 1e-9
CSV_COLUMNS = ("phi_s", "phi_a", "p_uu", "p_ud", "p_du", "p_dd", "E")


@dataclass
class RunRecord:
    experiment: str
    parameters: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    tool_version: str = __version__

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> RunRecord:
        d = json.loads(text)
        return cls(d["experiment"], d["parameters"], d["results"], d["tool_version"])


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return v


def _cnum(z: complex):
    z = complex(z)
    return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]


def _build_state(args) -> tuple[StateVector | DensityOperator, dict]:
    kind = args.state
    if kind == "bell":
        return bell_pair(), {"state": "bell"}
    if kind == "mixture":
        return mixture(), {"state": "mixture"}
    if kind == "amplitudes":
        if args.c1 is None or args.c2 is None:
            raise UsageError("--state amplitudes requires --c1 and --c2")
        a = Amplitudes(args.c1, args.c2)
        return premeasure(a).psi, {"state": "amplitudes", "c1": _cnum(a.c1), "c2": _cnum(a.c2)}
    if kind == "random":
        rng = np.random.default_rng(args.seed)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        return StateVector.from_unnormalized(v), {"state": "random", "seed": args.seed}
    raise UsageError(f"unknown state {kind!r}")


def _joint_dict(j) -> dict:
    return {"p_uu": j.p_uu, "p_ud": j.p_ud, "p_du": j.p_du, "p_dd": j.p_dd}


def cmd_rto(args) -> tuple[RunRecord, int]:
    state, sp = _build_state(args)
    j = joint_distribution(state, PhaseSettings(args.phi_s, args.phi_a))
    vis = fringe_visibility(state, args.phi_a, args.grid_n)
    rec = RunRecord(
        "rto",
        {"phi_s": args.phi_s, "phi_a": args.phi_a, "grid_n": args.grid_n, **sp},
        {
            "joint": _joint_dict(j),
            "marginal_s": list(marginal(j, "S")),
            "marginal_a": list(marginal(j, "A")),
            "E": correlation_E(j),
            "coincidence_visibility": vis.coincidence,
            "local_visibility": vis.local,
            "visibility_degenerate": vis.degenerate,
        },
    )
    return rec, EXIT_OK


def sweep_rows(state, grid_n: int) -> list[dict]:
    phases = phase_grid(grid_n)
    p = joint_grid(state, phases, phases)
    rows = []
    for i, phi_s in enumerate(phases):
        for k, phi_a in enumerate(phases):
            q = p[i, k]
            rows.append({
                "phi_s": float(phi_s), "phi_a": float(phi_a),
                "p_uu": float(q[0, 0]), "p_ud": float(q[0, 1]),
                "p_du": float(q[1, 0]), "p_dd": float(q[1, 1]),
                "E": float(q[0, 0] + q[1, 1] - q[0, 1] - q[1, 0]),
            })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(r[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def cmd_sweep(args) -> tuple[RunRecord, int]:
    state, sp = _build_state(args)
    rows = sweep_rows(state, args.grid_n)
    rec = RunRecord(
        "sweep",
        {"grid_n": args.grid_n, "format": args.format, "output": args.output, **sp},
        {"n_rows": len(rows), "columns": list(CSV_COLUMNS), "rows": rows},
    )
    if args.output:
        text = rows_to_csv(rows) if args.format == "csv" else rec.to_json() + "\n"
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return rec, EXIT_OK


def _angles(args) -> CHSHSettings:
    return STANDARD_CHSH if args.angles is None else CHSHSettings(*args.angles)


def cmd_chsh(args) -> tuple[RunRecord, int]:
    state, sp = _build_state(args)
    s = _angles(args)
    params = {"a": s.a, "a_prime": s.a_prime, "b": s.b, "b_prime": s.b_prime, **sp}
    value = chsh(state, s)
    results: dict[str, Any] = {"S": value, "violation": value > 2.0}
    if args.n_events is not None:
        cfg = SampleConfig(args.seed, args.n_events, args.shards)
        s_hat, se = chsh_from_counts(state, s, cfg)
        params.update(n_events=args.n_events, seed=args.seed, shards=args.shards)
        results.update(s_hat=s_hat, std_err=se, empirical_violation=s_hat > 2.0)
    return RunRecord("chsh", params, results), EXIT_OK


def cmd_nosignal(args) -> tuple[RunRecord, int]:
    state, sp = _build_state(args)
    audit = no_signaling_audit(state, args.grid_n)
    passed = audit.max_marginal_deviation <= NOSIGNAL_THRESHOLD
    rec = RunRecord(
        "nosignal",
        {"grid_n": args.grid_n, **sp},
        {
            "max_marginal_deviation": audit.max_marginal_deviation,
            "threshold": NOSIGNAL_THRESHOLD,
            "passed": passed,
            "table": audit.rows(),
        },
    )
    return rec, EXIT_OK if passed else EXIT_AUDIT


def cmd_decohere(args) -> tuple[RunRecord, int]:
    if args.reverse and args.env_n > MAX_EXACT_QUBITS:
        raise UsageError(f"--reverse needs the exact path, which supports at most {MAX_EXACT_QUBITS} qubits")
    env = EnvironmentSpec.uniform(args.env_n, args.theta)
    m = premeasure(Amplitudes(args.c1, args.c2))
    rho = m.density()
    out = decohered_state(rho, env)
    mix_residual = float(np.max(np.abs(out.matrix - collapse_mixture(m.amplitudes).matrix)))
    results: dict[str, Any] = {
        "r": decoherence_factor(env),
        "coherence_before": branch_coherence(rho),
        "coherence_after": branch_coherence(out),
        "diagonal": [float(x) for x in np.diag(out.matrix).real],
        "distance_to_mixture": mix_residual,
    }
    code = EXIT_OK
    if args.reverse:
        rep = reverse_and_check(m, env)
        results["reversal"] = asdict(rep)
        if not rep.reversible:
            code = EXIT_AUDIT
    params = {"env_n": args.env_n, "theta": args.theta, "reverse": args.reverse,
              "c1": _cnum(args.c1), "c2": _cnum(args.c2)}
    return RunRecord("decohere", params, results), code


def cmd_cat(args) -> tuple[RunRecord, int]:
    a = cat_amplitudes(HalfLifeClock(args.half_life, args.t))
    m = premeasure(a)
    rho_s, _ = reduced_states(m)
    ambiguous, gap = basis_ambiguity(rho_s)
    rank, ent = entanglement_report(m.psi)
    rec = RunRecord(
        "cat",
        {"half_life": args.half_life, "t": args.t},
        {
            "c1": _cnum(a.c1), "c2": _cnum(a.c2),
            "p_alive": a.weights[0], "p_dead": a.weights[1],
            "reduced_eigenvalues": sorted(np.diag(rho_s.matrix).real.tolist(), reverse=True),
            "basis_ambiguous": ambiguous, "eigenvalue_gap": gap,
            "schmidt_rank": rank, "entanglement_entropy": ent,
        },
    )
    return rec, EXIT_OK


def cmd_sample(args) -> tuple[RunRecord, int]:
    state, sp = _build_state(args)
    j = joint_distribution(state, PhaseSettings(args.phi_s, args.phi_a))
    counts = sample_joint(j, SampleConfig(args.seed, args.n_events, args.shards))
    e_hat, se = estimate_E(counts)
    rec = RunRecord(
        "sample",
        {"phi_s": args.phi_s, "phi_a": args.phi_a, "n_events": args.n_events,
         "seed": args.seed, "shards": args.shards, **sp},
        {
            "counts": {"n_uu": counts.n_uu, "n_ud": counts.n_ud, "n_du": counts.n_du, "n_dd": counts.n_dd},
            "e_hat": e_hat, "std_err": se, "E": correlation_E(j),
        },
    )
    return rec, EXIT_OK


def _grid(text: str) -> int:
    n = int(text)
    if n < 8:
        raise argparse.ArgumentTypeError(f"grid size must be at least 8, got {n}")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="entanglab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def state_flags(sp, choices=("bell", "mixture", "amplitudes")):
        sp.add_argument("--state", choices=choices, default="bell")
        sp.add_argument("--c1", type=_complex)
        sp.add_argument("--c2", type=_complex)

    sp = sub.add_parser("rto", help="joint statistics at one pair of phases")
    sp.add_argument("--phi-s", type=float, required=True)
    sp.add_argument("--phi-a", type=float, required=True)
    sp.add_argument("--grid-n", type=_grid, default=64)
    state_flags(sp)
    sp.set_defaults(func=cmd_rto)

    sp = sub.add_parser("sweep", help="joint statistics over a phase grid")
    sp.add_argument("--grid-n", type=_grid, default=32)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output")
    state_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("chsh", help="CHSH value, analytic or sampled")
    sp.add_argument("--angles", type=float, nargs=4, metavar=("A", "A_PRIME", "B", "B_PRIME"))
    sp.add_argument("--n-events", type=_positive)
    sp.add_argument("--seed", type=_u64, default=42)
    sp.add_argument("--shards", type=_positive, default=1)
    state_flags(sp)
    sp.set_defaults(func=cmd_chsh)

    sp = sub.add_parser("nosignal", help="remote-phase dependence of local statistics")
    sp.add_argument("--grid-n", type=_grid, default=32)
    sp.add_argument("--seed", type=_u64, default=0)
    state_flags(sp, ("bell", "mixture", "amplitudes", "random"))
    sp.set_defaults(func=cmd_nosignal)

    sp = sub.add_parser("decohere", help="environment-qubit decoherence")
    sp.add_argument("--env-n", type=_positive, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--reverse", action="store_true")
    sp.add_argument("--c1", type=_complex, default=EQUAL.c1)
    sp.add_argument("--c2", type=_complex, default=EQUAL.c2)
    sp.set_defaults(func=cmd_decohere)

    sp = sub.add_parser("cat", help="nucleus/cat amplitudes at time t")
    sp.add_argument("--half-life", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.set_defaults(func=cmd_cat)

    sp = sub.add_parser("sample", help="Monte Carlo detection counts")
    sp.add_argument("--phi-s", type=float, required=True)
    sp.add_argument("--phi-a", type=float, required=True)
    sp.add_argument("--n-events", type=_positive, required=True)
    sp.add_argument("--seed", type=_u64, default=42)
    sp.add_argument("--shards", type=_positive, default=1)
    state_flags(sp)
    sp.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rec, code = args.func(args)
    except (UsageError, ValidationError, OSError) as exc:
        print(f"entanglab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "sweep" and args.format == "csv" and not args.output:
        sys.stdout.write(rows_to_csv(rec.results["rows"]))
    else:
        print(rec.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
