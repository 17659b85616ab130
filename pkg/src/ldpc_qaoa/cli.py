"""Command-line entry point: ``ldpc-qaoa <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import gf2
from .bp import BpConfig, bp_decode, write_message_dump
from .channel import make_rng, transmit_codeword
from .energy import DecodingHamiltonian, bits_to_spins, brute_force_min, channel_energy, parity_energy
from .errors import CapacityError, InputError, NumericFailure
from .harness import (
    ExperimentSpec,
    TraceSpec,
    emit_convergence_trace,
    emit_report,
    load_spec,
    minimizer_audit,
    run_experiment,
)
from .qaoa import GRADIENT_METHODS, SELECTION_POLICIES, QaoaConfig, qaoa_decode


class UsageError(Exception):
    pass


def _code(name):
    try:
        return gf2.resolve_code(name)
    except LookupError as exc:
        raise UsageError(str(exc)) from None


def _bits(text, n):
    try:
        return gf2.as_bits(text, n)
    except InputError as exc:
        raise UsageError(str(exc)) from None


def _qaoa_config(args) -> QaoaConfig:
    return QaoaConfig(
        depth=args.depth, shots=args.shots, steps=args.steps, learning_rate=args.lr,
        momentum=args.momentum, seed=args.seed, gradient_method=args.gradient, selection=args.selection,
        normalize=not args.raw_energy,
    )


def _read_llr(text: str) -> np.ndarray:
    p = Path(text)
    raw = p.read_text() if p.is_file() else text
    try:
        return np.array([float(t) for t in raw.replace(",", " ").split()])
    except ValueError:
        raise UsageError(f"cannot parse LLR vector from {text!r}") from None


def cmd_list_codes(args):
    for name in gf2.builtin_names():
        c = gf2.builtin_code(name)
        print(f"{name}\tn={c.n}\tk={c.k}\tm={c.m}")


def cmd_decode(args):
    code = _code(args.code)
    cw = _bits(args.codeword, code.n) if args.codeword else np.zeros(code.n, dtype=np.uint8)
    if not code.contains(cw):
        raise UsageError(f"{gf2.bits_to_str(cw)} is not a codeword of {args.code}")
    y, llr = transmit_codeword(cw, args.sigma, make_rng(args.seed))
    rec = {
        "code": args.code, "decoder": args.decoder, "sigma": args.sigma, "seed": args.seed,
        "transmitted": gf2.bits_to_str(cw), "llr": [round(float(v), 6) for v in llr],
    }
    if args.decoder == "bp":
        dump = [] if args.dump else None
        res = bp_decode(gf2.build_tanner_graph(code.h), llr, BpConfig(max_iterations=args.bp_iters), dump)
        if args.dump:
            write_message_dump(dump, args.dump)
        rec.update(
            decoded=gf2.bits_to_str(res.decoded), converged=res.converged,
            iterations=res.iterations_used, final_llrs=[round(float(v), 6) for v in res.final_llrs],
        )
    else:
        res = qaoa_decode(code, llr, _qaoa_config(args))
        rec.update(
            decoded=gf2.bits_to_str(res.decoded), energy=res.decoded_energy, valid=res.valid,
            initial_expected_energy=float(res.trace.energies[0]),
            final_expected_energy=float(res.trace.energies[-1]),
            top_samples=[{"bits": b, "count": c} for b, c in res.top(10)],
        )
    rec["success"] = rec["decoded"] == rec["transmitted"]
    print(json.dumps(rec, indent=2))


def cmd_experiment(args):
    spec = load_spec(args.spec)
    out = Path(args.out)
    stem = Path(args.spec).name.removesuffix(".spec")
    if isinstance(spec, TraceSpec):
        energies = emit_convergence_trace(
            spec.code_name, spec.codeword, spec.sigma, spec.qaoa_config, out / f"{stem}.csv", seed=spec.seed
        )
        print(f"wrote {out / f'{stem}.csv'} ({len(energies)} rows)")
        if args.plot:
            from .plotting import plot_convergence

            print(f"wrote {plot_convergence({spec.sigma: energies}, out / f'{stem}.png')}")
        return
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    progress = None
    if args.verbose:
        progress = lambda i, n: print(f"\r{i}/{n} trials", end="" if i < n else "\n", file=sys.stderr)
    report = run_experiment(spec, progress=progress)
    paths = emit_report(report, out, stem)
    for row in report.summary():
        print(f"{row['code']}\tsigma={row['sigma']:g}\t{row['decoder']}\t{row['successes']}/{row['trials']}\t{row['success_prob']:.4f}")
    for p in paths.values():
        print(f"wrote {p}")
    if args.plot:
        from .plotting import plot_success

        print(f"wrote {plot_success(report.summary(), out / f'{stem}_success.png', spec.code_name)}")


def cmd_trace(args):
    code = _code(args.code)
    cw = _bits(args.codeword, code.n)
    if not code.contains(cw):
        raise UsageError(f"{args.codeword} is not a codeword of {args.code}")
    sigmas = args.sigma
    traces = {}
    for sigma in sigmas:
        path = Path(args.out)
        if len(sigmas) > 1:
            path = path.with_name(f"{path.stem}_sigma{sigma:g}{path.suffix or '.csv'}")
        traces[sigma] = emit_convergence_trace(args.code, cw, sigma, _qaoa_config(args), path, seed=args.seed)
        print(f"wrote {path} ({len(traces[sigma])} rows)")
    if args.plot:
        from .plotting import plot_convergence

        print(f"wrote {plot_convergence(traces, args.plot)}")


def cmd_energy(args):
    code = _code(args.code)
    llr = _read_llr(args.llr)
    if llr.size != code.n:
        raise UsageError(f"LLR vector has {llr.size} entries, code length is {code.n}")
    ham = DecodingHamiltonian.from_matrix(code.h, llr)
    x = _bits(args.bits, code.n)
    z = bits_to_spins(x)
    p, c = parity_energy(ham, z), channel_energy(ham, z)
    print(f"bits\t{gf2.bits_to_str(x)}")
    print(f"parity\t{p:.6f}\nchannel\t{c:.6f}\ntotal\t{p + c:.6f}")
    if args.min:
        xm, em = brute_force_min(ham)
        print(f"minimizer\t{gf2.bits_to_str(xm)}\t{em:.6f}\tcodeword={code.contains(xm)}")


def cmd_audit(args):
    rows = minimizer_audit(args.code, args.sigma, draws=args.draws, seed=args.seed)
    print("code,sigma,draws,zero_syndrome,fraction")
    for r in rows:
        print(f"{r['code']},{r['sigma']:g},{r['draws']},{r['zero_syndrome']},{r['fraction']:.4f}")


def _add_qaoa_args(p):
    d = QaoaConfig()
    p.add_argument("--depth", type=int, default=d.depth)
    p.add_argument("--shots", type=int, default=d.shots)
    p.add_argument("--steps", type=int, default=d.steps)
    p.add_argument("--lr", type=float, default=d.learning_rate)
    p.add_argument("--momentum", type=float, default=d.momentum)
    p.add_argument("--gradient", choices=GRADIENT_METHODS, default=d.gradient_method)
    p.add_argument("--selection", choices=SELECTION_POLICIES, default=d.selection)
    p.add_argument("--raw-energy", action="store_true", help="optimize on the unscaled energy table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldpc-qaoa", description="BP and QAOA decoding of short LDPC codes")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-codes", help="list builtin codes").set_defaults(func=cmd_list_codes)

    p = sub.add_parser("decode", help="transmit one codeword and decode it")
    p.add_argument("--code", required=True)
    p.add_argument("--decoder", choices=("bp", "qaoa"), required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--codeword", help="bit string, default all-zero")
    p.add_argument("--bp-iters", type=int, default=50)
    p.add_argument("--dump", help="write BP messages per iteration to this CSV")
    _add_qaoa_args(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("experiment", help="run a spec file (path or bundled name)")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int)
    p.add_argument("--plot", action="store_true", help="also render a PNG figure")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("trace", help="energy-vs-step trace of one QAOA optimization")
    p.add_argument("--code", required=True)
    p.add_argument("--codeword", required=True)
    p.add_argument("--sigma", type=float, nargs="+", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", metavar="PNG", help="render the trace(s) to this image")
    _add_qaoa_args(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("energy", help="evaluate the decoding energy of a bit string")
    p.add_argument("--code", required=True)
    p.add_argument("--llr", required=True, help="file or inline comma/space separated values")
    p.add_argument("--bits", required=True)
    p.add_argument("--min", action="store_true", help="also print the brute-force minimizer")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("audit", help="fraction of channel draws whose energy minimizer is a codeword")
    p.add_argument("--code", required=True)
    p.add_argument("--sigma", type=float, nargs="+", default=[1.0, 1.5, 2.0])
    p.add_argument("--draws", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (UsageError, InputError) as exc:
        print(f"ldpc-qaoa: error: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, NumericFailure, OSError) as exc:
        print(f"ldpc-qaoa: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
