"""Sum-product belief propagation on a Tanner graph (flooding schedule)."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .gf2 import TannerGraph

PRODUCT_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class BpConfig:
    max_iterations: int = 50
    message_clip: float = 30.0
    early_stop: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if not self.message_clip > 0:
            raise InputError("message_clip must be positive")


@dataclass(frozen=True)
class BpResult:
    decoded: np.ndarray
    final_llrs: np.ndarray
    iterations_used: int
    converged: bool


def _clip(value: float, bound: float) -> float:
    return min(bound, max(-bound, value))


def variable_to_check(llr_v: float, incoming, clip: float = 30.0) -> float:
    """Channel LLR plus the check messages from every other neighbouring check."""
    return _clip(llr_v + math.fsum(incoming), clip)


def check_to_variable(incoming, clip: float = 30.0) -> float:
    """Tanh-product rule over the messages from every other neighbouring variable.

    A check with no other neighbours has an empty product (= 1) and saturates
    to ``+clip``.
    """
    incoming = list(incoming)
    if not incoming:
        return clip
    prod = 1.0
    for m in incoming:
        prod *= math.tanh(m / 2.0)
    prod = min(PRODUCT_CLAMP, max(-PRODUCT_CLAMP, prod))
    return _clip(2.0 * math.atanh(prod), clip)


def hard_decision(llrs) -> np.ndarray:
    """Bit 1 where the LLR is negative; ties (LLR == 0) decide 0."""
    return (np.asarray(llrs) < 0).astype(np.uint8)


def bp_decode(graph: TannerGraph, llr, config: BpConfig | None = None, dump=None) -> BpResult:
    """Decode ``llr`` on ``graph``.

    Every iteration first recomputes all variable-to-check messages from the
    previous iteration's check-to-variable messages (initially zero), then all
    check-to-variable messages, then the posterior LLRs and hard decision.

    If ``dump`` is a list, one ``(iteration, check, variable, direction,
    value)`` tuple per message is appended to it.
    """
    config = config or BpConfig()
    llr = np.asarray(llr, dtype=np.float64)
    n = graph.n
    if llr.shape != (n,):
        raise InputError(f"LLR vector has length {llr.size}, code length is {n}")
    clip = config.message_clip
    edges = [(c, v) for c, vs in enumerate(graph.check_to_vars) for v in vs]
    c2v = {e: 0.0 for e in edges}
    v2c = {}
    decoded = hard_decision(llr)
    final = llr.copy()
    iterations = 0
    for it in range(1, config.max_iterations + 1):
        iterations = it
        for v, checks in enumerate(graph.var_to_checks):
            for c in checks:
                v2c[(c, v)] = variable_to_check(
                    llr[v], (c2v[(c2, v)] for c2 in checks if c2 != c), clip
                )
        for c, vs in enumerate(graph.check_to_vars):
            for v in vs:
                c2v[(c, v)] = check_to_variable((v2c[(c, v2)] for v2 in vs if v2 != v), clip)
        final = np.array(
            [llr[v] + math.fsum(c2v[(c, v)] for c in graph.var_to_checks[v]) for v in range(n)]
        )
        decoded = hard_decision(final)
        if dump is not None:
            dump.extend((it, c, v, "v2c", v2c[(c, v)]) for c, v in edges)
            dump.extend((it, c, v, "c2v", c2v[(c, v)]) for c, v in edges)
        if config.early_stop and _syndrome_zero(graph, decoded):
            break
    return BpResult(
        decoded=decoded,
        final_llrs=final,
        iterations_used=iterations,
        converged=_syndrome_zero(graph, decoded),
    )


def _syndrome_zero(graph: TannerGraph, x) -> bool:
    return all(sum(int(x[v]) for v in vs) % 2 == 0 for vs in graph.check_to_vars)


def write_message_dump(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "check", "variable", "direction", "value"])
        for it, c, v, d, val in rows:
            w.writerow([it, c, v, d, f"{val:.12g}"])
