"""Seeded Monte-Carlo comparison of BP and QAOA decoding, plus energy traces.

Every trial is addressed by ``(sigma index, codeword index, realization
index)`` and gets its own seed ``derive_seed(master_seed, *address)``; a trial
is therefore reproducible in isolation and the aggregate does not depend on
execution order.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .bp import BpConfig, bp_decode
from .channel import derive_seed, make_rng, transmit_codeword
from .energy import DecodingHamiltonian, brute_force_min, build_energy_table
from .errors import InputError
from .gf2 import LinearCode, as_bits, bits_to_str, build_tanner_graph, is_codeword, resolve_code
from .qaoa import QaoaConfig, optimize, qaoa_decode

DECODERS = ("bp", "qaoa")
SUMMARY_HEADER = ["code", "sigma", "decoder", "trials", "successes", "success_prob", "wilson_low", "wilson_high"]


@dataclass(frozen=True)
class ExperimentSpec:
    code_name: str
    sigmas: tuple[float, ...]
    noise_realizations_per_codeword: int
    master_seed: int = 0
    bp_config: BpConfig = field(default_factory=BpConfig)
    qaoa_config: QaoaConfig = field(default_factory=QaoaConfig)
    decoders: tuple[str, ...] = DECODERS
    workers: int = 1

    def __post_init__(self):
        if not self.sigmas:
            raise InputError("at least one sigma is required")
        if any(not s > 0 for s in self.sigmas):
            raise InputError("sigmas must be positive")
        if self.noise_realizations_per_codeword < 1:
            raise InputError("realizations per codeword must be >= 1")
        bad = set(self.decoders) - set(DECODERS)
        if bad:
            raise InputError(f"unknown decoders: {sorted(bad)}")


@dataclass(frozen=True)
class TraceSpec:
    code_name: str
    codeword: np.ndarray
    sigma: float
    seed: int = 0
    qaoa_config: QaoaConfig = field(default_factory=QaoaConfig)


@dataclass(frozen=True)
class DecoderOutcome:
    decoded: np.ndarray | None
    success: bool
    valid: bool
    llr_hash: str
    iterations: int | None = None
    energy: float | None = None
    initial_energy: float | None = None
    error: str = ""


@dataclass(frozen=True)
class TrialRecord:
    codeword: np.ndarray
    codeword_index: int
    sigma: float
    sigma_index: int
    realization_index: int
    seed: int
    received: np.ndarray
    llr: np.ndarray
    outcomes: dict[str, DecoderOutcome]


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    records: list[TrialRecord]

    def summary(self) -> list[dict]:
        rows = []
        for si, sigma in enumerate(self.spec.sigmas):
            recs = [r for r in self.records if r.sigma_index == si]
            for dec in self.spec.decoders:
                succ = sum(r.outcomes[dec].success for r in recs)
                lo, hi = wilson_interval(succ, len(recs))
                rows.append(
                    dict(
                        code=self.spec.code_name,
                        sigma=sigma,
                        decoder=dec,
                        trials=len(recs),
                        successes=succ,
                        success_prob=succ / len(recs) if recs else 0.0,
                        wilson_low=lo,
                        wilson_high=hi,
                    )
                )
        return rows

    def success_probability(self, sigma: float, decoder: str) -> float:
        for row in self.summary():
            if row["decoder"] == decoder and math.isclose(row["sigma"], sigma):
                return row["success_prob"]
        raise KeyError((sigma, decoder))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def llr_digest(llr) -> str:
    return hashlib.sha256(np.ascontiguousarray(llr, dtype=np.float64).tobytes()).hexdigest()[:16]


def _run_bp(code, graph, codeword, llr, config):
    res = bp_decode(graph, llr, config)
    return DecoderOutcome(
        decoded=res.decoded,
        success=bool(np.array_equal(res.decoded, codeword)),
        valid=res.converged,
        llr_hash=llr_digest(llr),
        iterations=res.iterations_used,
    )


def _run_qaoa(code, graph, codeword, llr, config):
    res = qaoa_decode(code, llr, config)
    return DecoderOutcome(
        decoded=res.decoded,
        success=bool(np.array_equal(res.decoded, codeword)),
        valid=res.valid,
        llr_hash=llr_digest(llr),
        energy=res.decoded_energy,
        initial_energy=float(res.trace.energies[0]),
    )


def run_trial(
    code: LinearCode,
    codeword,
    sigma: float,
    seed: int,
    bp_config: BpConfig | None = None,
    qaoa_config: QaoaConfig | None = None,
    decoders=DECODERS,
    address: tuple[int, int, int] = (0, 0, 0),
) -> TrialRecord:
    """Transmit ``codeword`` once and hand the same LLRs to every decoder.

    The channel draws from ``seed``; QAOA is seeded with ``seed`` as well.  A
    decoder that raises is recorded as a failed outcome with its message.
    """
    codeword = as_bits(codeword, code.n)
    if not code.contains(codeword):
        raise InputError(f"{bits_to_str(codeword)} is not a codeword of {code.name or 'the code'}")
    bp_config = bp_config or BpConfig()
    qaoa_config = replace(qaoa_config or QaoaConfig(), seed=seed)
    y, llr = transmit_codeword(codeword, sigma, make_rng(seed))
    llr.setflags(write=False)
    graph = build_tanner_graph(code.h)
    runners = {"bp": (_run_bp, bp_config), "qaoa": (_run_qaoa, qaoa_config)}
    outcomes = {}
    for dec in decoders:
        fn, cfg = runners[dec]
        try:
            outcomes[dec] = fn(code, graph, codeword, llr, cfg)
        except Exception as exc:  # recorded per decoder, trial continues
            outcomes[dec] = DecoderOutcome(None, False, False, llr_digest(llr), error=f"{type(exc).__name__}: {exc}")
    si, ci, ri = address
    return TrialRecord(codeword, ci, float(sigma), si, ri, int(seed), y, llr, outcomes)


def _trial_job(args):
    spec, code, si, ci, ri = args
    seed = derive_seed(spec.master_seed, si, ci, ri)
    return run_trial(
        code, code.codewords[ci], spec.sigmas[si], seed,
        spec.bp_config, spec.qaoa_config, spec.decoders, (si, ci, ri),
    )


def run_experiment(spec: ExperimentSpec, workers: int | None = None, progress=None) -> ExperimentReport:
    code = resolve_code(spec.code_name)
    jobs = [
        (spec, code, si, ci, ri)
        for si in range(len(spec.sigmas))
        for ci in range(len(code.codewords))
        for ri in range(spec.noise_realizations_per_codeword)
    ]
    workers = spec.workers if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_trial_job, jobs, chunksize=4))
    else:
        records = []
        for i, job in enumerate(jobs):
            records.append(_trial_job(job))
            if progress:
                progress(i + 1, len(jobs))
    records.sort(key=lambda r: (r.sigma_index, r.codeword_index, r.realization_index))
    return ExperimentReport(spec, records)


def _fmt(x: float) -> str:
    return repr(float(x))


def _vec(v) -> str:
    return " ".join(_fmt(t) for t in v)


def summary_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for row in report.summary():
        w.writerow([
            row["code"], f"{row['sigma']:g}", row["decoder"], row["trials"], row["successes"],
            f"{row['success_prob']:.4f}", f"{row['wilson_low']:.4f}", f"{row['wilson_high']:.4f}",
        ])
    return buf.getvalue()


def trials_csv(report: ExperimentReport) -> str:
    decs = report.spec.decoders
    header = ["sigma", "sigma_index", "codeword_index", "realization", "seed", "codeword", "received", "llr"]
    for d in decs:
        header += [f"{d}_{c}" for c in ("decoded", "success", "valid", "llr_hash", "iterations", "energy", "error")]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in report.records:
        row = [f"{r.sigma:g}", r.sigma_index, r.codeword_index, r.realization_index, r.seed,
               bits_to_str(r.codeword), _vec(r.received), _vec(r.llr)]
        for d in decs:
            o = r.outcomes[d]
            row += [
                "" if o.decoded is None else bits_to_str(o.decoded),
                int(o.success), int(o.valid), o.llr_hash,
                "" if o.iterations is None else o.iterations,
                "" if o.energy is None else _fmt(o.energy),
                o.error,
            ]
        w.writerow(row)
    return buf.getvalue()


def emit_report(report: ExperimentReport, out_dir, stem: str | None = None) -> dict[str, Path]:
    """Write ``<stem>_summary.csv`` and ``<stem>_trials.csv`` under ``out_dir``."""
    out = Path(out_dir)
    stem = stem or report.spec.code_name
    paths = {"summary": out / f"{stem}_summary.csv", "trials": out / f"{stem}_trials.csv"}
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths["summary"].write_bytes(summary_csv(report).encode())
        paths["trials"].write_bytes(trials_csv(report).encode())
    except OSError as exc:
        raise OSError(f"cannot write report under {out}: {exc}") from exc
    return paths


def minimizer_audit(code_name: str, sigmas, draws: int = 1000, seed: int = 0) -> list[dict]:
    """How often the global minimizer of the decoding energy is a codeword.

    For each sigma, ``draws`` codewords are picked uniformly and sent
    through the channel; the brute-force minimizer of each resulting energy
    is checked for zero syndrome.
    """
    code = resolve_code(code_name)
    rng = make_rng(seed)
    rows = []
    for sigma in sigmas:
        valid = 0
        for _ in range(draws):
            cw = code.codewords[rng.integers(len(code.codewords))]
            _, llr = transmit_codeword(cw, sigma, rng)
            x, _ = brute_force_min(DecodingHamiltonian.from_matrix(code.h, llr))
            valid += is_codeword(code.h, x)
        rows.append({"code": code_name, "sigma": float(sigma), "draws": draws, "zero_syndrome": valid,
                     "fraction": valid / draws})
    return rows


def convergence_trace(code_name: str, codeword, sigma: float, qaoa_config: QaoaConfig | None = None, seed: int = 0) -> np.ndarray:
    """Expected energy per optimization step for one noisy transmission."""
    code = resolve_code(code_name)
    codeword = as_bits(codeword, code.n)
    if not code.contains(codeword):
        raise InputError(f"{bits_to_str(codeword)} is not a codeword of {code_name}")
    qaoa_config = replace(qaoa_config or QaoaConfig(), seed=seed)
    _, llr = transmit_codeword(codeword, sigma, make_rng(seed))
    table = build_energy_table(DecodingHamiltonian.from_matrix(code.h, llr))
    init_ss, _ = np.random.SeedSequence(seed).spawn(2)
    return optimize(table, qaoa_config, make_rng(init_ss)).energies


def trace_csv(energies) -> str:
    lines = ["step,expected_energy"]
    lines += [f"{i},{e:.10f}" for i, e in enumerate(energies)]
    return "\n".join(lines) + "\n"


def emit_convergence_trace(code_name, codeword, sigma, qaoa_config, path, seed: int = 0) -> np.ndarray:
    energies = convergence_trace(code_name, codeword, sigma, qaoa_config, seed)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(trace_csv(energies).encode())
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc
    return energies


# --- spec files -------------------------------------------------------------

_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _typed(dc_type, values: dict, prefix: str):
    kwargs = {}
    for f in fields(dc_type):
        key = f"{prefix}.{f.name}"
        if key not in values:
            continue
        raw = values.pop(key)
        default = getattr(dc_type(), f.name)
        try:
            if isinstance(default, bool):
                kwargs[f.name] = _BOOL[raw.lower()]
            elif isinstance(default, int):
                kwargs[f.name] = int(raw)
            elif isinstance(default, float):
                kwargs[f.name] = float(raw)
            else:
                kwargs[f.name] = raw
        except (KeyError, ValueError):
            raise InputError(f"bad value for {key}: {raw!r}") from None
    return dc_type(**kwargs)


def parse_spec_text(text: str, source: str = "<spec>"):
    """Parse the ``key = value`` spec format into an ExperimentSpec or TraceSpec."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}:{lineno}: expected 'key = value'")
        k, v = (t.strip() for t in line.split("=", 1))
        values[k] = v
    kind = values.pop("kind", "experiment")
    try:
        code = values.pop("code")
        if kind == "trace":
            spec = TraceSpec(
                code_name=code,
                codeword=as_bits(values.pop("codeword")),
                sigma=float(values.pop("sigma")),
                seed=int(values.pop("seed", "0")),
                qaoa_config=_typed(QaoaConfig, values, "qaoa"),
            )
        elif kind == "experiment":
            spec = ExperimentSpec(
                code_name=code,
                sigmas=tuple(float(s) for s in values.pop("sigmas").split(",")),
                noise_realizations_per_codeword=int(values.pop("realizations")),
                master_seed=int(values.pop("master_seed", "0")),
                decoders=tuple(d.strip() for d in values.pop("decoders", "bp,qaoa").split(",") if d.strip()),
                workers=int(values.pop("workers", "1")),
                bp_config=_typed(BpConfig, values, "bp"),
                qaoa_config=_typed(QaoaConfig, values, "qaoa"),
            )
        else:
            raise InputError(f"{source}: unknown kind {kind!r}")
    except KeyError as exc:
        raise InputError(f"{source}: missing key {exc}") from None
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None
    if values:
        raise InputError(f"{source}: unknown keys {sorted(values)}")
    return spec


def bundled_specs() -> list[str]:
    return sorted(p.name for p in resources.files("ldpc_qaoa.specs").iterdir() if p.name.endswith(".spec"))


def load_spec(path_or_name: str):
    p = Path(path_or_name)
    if p.is_file():
        return parse_spec_text(p.read_text(), str(p))
    name = path_or_name if path_or_name.endswith(".spec") else f"{path_or_name}.spec"
    res = resources.files("ldpc_qaoa.specs") / name
    if res.is_file():
        return parse_spec_text(res.read_text(), name)
    raise InputError(f"no spec file {path_or_name!r} (bundled: {', '.join(bundled_specs())})")
