"""Command-line entry point: ``dlmnet {bs,mzi,cnot-circuit,run,oracle}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import oracle
from .csvio import emit_csv
from .errors import DlmError
from .experiments import (
    BASIS_INPUTS,
    COARSE_SCHEDULE,
    FINE_SCHEDULE,
    ExperimentConfig,
    cnot_circuit_network,
    compare,
    default_seed,
    run_beam_splitter,
    run_cnot_circuit,
    run_cnot_schedule,
    run_mzi,
    run_netlist,
)
from .netlist import parse_netlist

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2
SCHEDULES = {"coarse": (0.99, COARSE_SCHEDULE), "fine": (0.999, FINE_SCHEDULE)}


def _common(p: argparse.ArgumentParser, events: int | None, discard: float | None) -> None:
    p.add_argument("--alpha", type=float, default=None, help="learning parameter (default 0.99)")
    p.add_argument("--events", type=int, default=events, help="events per point")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for all randomness (default $DLMNET_SEED or 0)")
    p.add_argument("--stochastic", action="store_true", help="stochastic output selection")
    p.add_argument("--discard", type=float, default=discard,
                   help="fraction of initial events per point left uncounted")
    p.add_argument("--reinit-per-point", action="store_true",
                   help="fresh DLM vectors for every sweep point")
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")
    p.add_argument("--check", type=float, metavar="TOL",
                   help="exit 1 unless every point is within TOL of the oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dlmnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bs", help="single beam splitter with random phase pairs")
    _common(p, 10000, 0.0)
    p.add_argument("--p0", type=float, default=1.0, help="probability of input channel 0")
    p.add_argument("--pairs", type=int, default=40, help="number of random (psi0, psi1) pairs")

    p = sub.add_parser("mzi", help="Mach-Zehnder interferometer phase sweep")
    _common(p, 10000, 0.0)
    p.add_argument("--phi1", type=float, default=0.0, help="rotation on arm 1 (degrees)")
    p.add_argument("--phi0-step", type=float, default=10.0, help="phi0 increment (degrees)")

    p = sub.add_parser("cnot-circuit", help="H-H-CNOT-H-H circuit on basis inputs")
    _common(p, 200, 0.5)
    p.add_argument("--qubit1", type=int, choices=(0, 1), help="input value of qubit 1")
    p.add_argument("--qubit2", type=int, choices=(0, 1), help="input value of qubit 2")
    p.add_argument("--schedule", choices=tuple(SCHEDULES),
                   help="run a reference schedule of rows on one network "
                        "(coarse: alpha 0.99, fine: alpha 0.999)")

    p = sub.add_parser("run", help="run a netlist file")
    _common(p, 10000, 0.0)
    p.add_argument("netlist", help="path to the netlist")

    p = sub.add_parser("oracle", help="print quantum-theory predictions only")
    p.add_argument("kind", choices=("bs", "mzi", "cnot"))
    p.add_argument("--p0", type=float, default=1.0)
    p.add_argument("--psi0", type=float, default=0.0)
    p.add_argument("--psi1", type=float, default=0.0)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--phi1", type=float, default=0.0)
    p.add_argument("--out", metavar="PATH")
    return parser


def _config(args, **fallback) -> ExperimentConfig:
    seed = args.seed if args.seed is not None else fallback.get("seed", default_seed())
    mode = "stochastic" if args.stochastic else fallback.get("mode", "deterministic")
    return ExperimentConfig(
        alpha=args.alpha if args.alpha is not None else fallback.get("alpha", 0.99),
        events_per_point=args.events,
        seed=seed,
        mode=mode,
        discard_fraction=args.discard,
        reinit_per_point=args.reinit_per_point,
    )


def _oracle_csv(args) -> str:
    if args.kind == "bs":
        q = oracle.beam_splitter_probability(args.p0, args.psi0, args.psi1)
        rows = [("p0", "psi0", "psi1", "p_0", "p_1"),
                (args.p0, args.psi0, args.psi1, q, 1.0 - q)]
    elif args.kind == "mzi":
        q = oracle.mzi_probability(args.phi0, args.phi1)
        rows = [("phi0", "phi1", "p_0", "p_1"), (args.phi0, args.phi1, q, 1.0 - q)]
    else:
        rows = [("qubit1", "qubit2", "p_0", "p_1", "p_2", "p_3")]
        for q1, q2 in BASIS_INPUTS:
            rows.append((q1, q2, *(float(v) for v in oracle.cnot_circuit_output(q1, q2))))
    return "".join(
        ",".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in row) + "\n"
        for row in rows
    )


def _reports(args):
    if args.command == "bs":
        cfg = _config(args)
        return [pt.report for pt in run_beam_splitter(cfg, args.p0, args.pairs)]
    if args.command == "mzi":
        cfg = _config(args)
        return [pt.report for pt in run_mzi(cfg, args.phi1, args.phi0_step)]
    if args.command == "cnot-circuit":
        if args.schedule:
            alpha, schedule = SCHEDULES[args.schedule]
            return run_cnot_schedule(_config(args, alpha=alpha), schedule)
        cfg = _config(args)
        if (args.qubit1 is None) != (args.qubit2 is None):
            raise DlmError("give both --qubit1 and --qubit2, or neither")
        inputs = BASIS_INPUTS if args.qubit1 is None else ((args.qubit1, args.qubit2),)
        net = cnot_circuit_network(cfg)
        return [run_cnot_circuit(cfg, q1, q2, network=net) for q1, q2 in inputs]
    with open(args.netlist, encoding="utf-8") as fh:
        doc = parse_netlist(fh.read())
    cfg = _config(args, **doc.params)
    if args.check is not None:
        raise DlmError("--check needs an oracle; netlist runs have none")
    return [run_netlist(doc, cfg)]


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle":
            _write(_oracle_csv(args), args.out)
            return EXIT_OK
        reports = _reports(args)
        _write(emit_csv(reports), args.out)
    except (DlmError, OSError) as exc:
        print(f"dlmnet: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.check is not None:
        failed = [r for r in reports if not compare(r, args.check)]
        if failed:
            worst = max(r.deviation for r in failed)
            print(f"dlmnet: {len(failed)} of {len(reports)} points outside tolerance "
                  f"{args.check} (worst deviation {worst:.6f})", file=sys.stderr)
            return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
