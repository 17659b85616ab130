"""Statevector QAOA for diagonal cost Hamiltonians.

The cost operator is supplied as an energy table (one real per basis index,
see :mod:`ldpc_qaoa.energy` for the bit ordering), so ``exp(-i gamma H_P)`` is
an elementwise phase.  The mixer is ``sum_j X_j`` applied as independent
single-qubit rotations.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import make_rng
from .energy import MAX_TABLE_BITS, DecodingHamiltonian, build_energy_table, index_to_bits
from .errors import CapacityError, InputError, NumericFailure
from .gf2 import LinearCode, bits_to_str, is_codeword

GRADIENT_METHODS = ("adjoint", "shift", "finite-difference")
SELECTION_POLICIES = ("min-energy-valid", "min-energy", "most-frequent", "most-frequent-valid")


@dataclass(frozen=True)
class QaoaParams:
    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        g = np.array(self.gammas, dtype=np.float64).reshape(-1)
        b = np.array(self.betas, dtype=np.float64).reshape(-1)
        if g.size != b.size or g.size < 1:
            raise InputError("gammas and betas must have equal length >= 1")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def depth(self) -> int:
        return self.gammas.size

    def flat(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])

    @classmethod
    def from_flat(cls, theta) -> "QaoaParams":
        theta = np.asarray(theta, dtype=np.float64)
        half = theta.size // 2
        return cls(theta[:half], theta[half:])


@dataclass(frozen=True)
class QaoaConfig:
    depth: int = 10
    shots: int = 1000
    steps: int = 100
    learning_rate: float = 0.03
    momentum: float = 0.9
    seed: int = 0
    gradient_method: str = "adjoint"
    selection: str = "min-energy-valid"
    init_scale: float = 0.1
    normalize: bool = True

    def __post_init__(self):
        if self.depth < 1 or self.shots < 1 or self.steps < 0:
            raise InputError("need depth >= 1, shots >= 1, steps >= 0")
        if not self.learning_rate > 0:
            raise InputError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise InputError("momentum must lie in [0, 1)")
        if self.gradient_method not in GRADIENT_METHODS:
            raise InputError(f"gradient_method must be one of {GRADIENT_METHODS}")
        if self.selection not in SELECTION_POLICIES:
            raise InputError(f"selection must be one of {SELECTION_POLICIES}")


@dataclass(frozen=True)
class OptimizationTrace:
    energies: np.ndarray
    params_final: QaoaParams


@dataclass(frozen=True)
class DecodeResult:
    decoded: np.ndarray
    decoded_energy: float
    sampled_counts: dict[str, int]
    valid: bool
    trace: OptimizationTrace = field(repr=False)

    def top(self, k: int = 10) -> list[tuple[str, int]]:
        return sorted(self.sampled_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def _num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise InputError(f"dimension {dim} is not a power of two")
    return n


def initial_state(n: int) -> np.ndarray:
    """Uniform superposition |+>^n."""
    if not 1 <= n <= MAX_TABLE_BITS:
        raise CapacityError(f"n={n} outside supported range 1..{MAX_TABLE_BITS}")
    dim = 1 << n
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def apply_cost_unitary(state, gamma: float, table) -> np.ndarray:
    state = np.asarray(state, dtype=np.complex128)
    if state.shape != np.shape(table):
        raise InputError("state and energy table dimensions differ")
    return state * np.exp(-1j * gamma * np.asarray(table))


DENSE_MIXER_MAX_QUBITS = 10


@lru_cache(maxsize=None)
def _hadamard_basis(n: int) -> tuple[np.ndarray, np.ndarray]:
    # sum_j X_j = W diag(n - 2 popcount) W with W the normalized Walsh matrix.
    idx = np.arange(1 << n)
    parity = np.zeros((idx.size, idx.size), dtype=np.int64)
    for q in range(n):
        bit = (idx >> q) & 1
        parity ^= np.outer(bit, bit)
    w = (1.0 - 2.0 * parity) / np.sqrt(idx.size)
    eig = n - 2.0 * ((idx[:, None] >> np.arange(n)) & 1).sum(axis=1)
    w.setflags(write=False)
    eig.setflags(write=False)
    return w, eig


def _apply_mixer_per_qubit(state, beta: float) -> np.ndarray:
    psi = np.array(state, dtype=np.complex128)
    n = _num_qubits(psi.size)
    c, s = np.cos(beta), -1j * np.sin(beta)
    for q in range(n):
        v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = c * a0 + s * a1
        v[:, 1, :] = s * a0 + c * a1
    return psi


def apply_mixer(state, beta: float) -> np.ndarray:
    """exp(-i beta X) on every qubit.

    Up to ``DENSE_MIXER_MAX_QUBITS`` this is done in the Hadamard basis, where
    the mixer is diagonal; larger registers rotate one qubit at a time.
    """
    state = np.asarray(state, dtype=np.complex128)
    n = _num_qubits(state.size)
    if n > DENSE_MIXER_MAX_QUBITS:
        return _apply_mixer_per_qubit(state, beta)
    w, eig = _hadamard_basis(n)
    return w @ (np.exp(-1j * beta * eig) * (w @ state))


def _apply_mixer_generator(state) -> np.ndarray:
    """(sum_j X_j) |state>."""
    n = _num_qubits(state.size)
    if n <= DENSE_MIXER_MAX_QUBITS:
        w, eig = _hadamard_basis(n)
        return w @ (eig * (w @ state))
    out = np.zeros_like(state)
    for q in range(n):
        out += state.reshape(1 << (n - 1 - q), 2, 1 << q)[:, ::-1, :].reshape(-1)
    return out


def ansatz_state(params: QaoaParams, table) -> np.ndarray:
    table = np.asarray(table)
    psi = initial_state(_num_qubits(table.size))
    for g, b in zip(params.gammas, params.betas):
        psi = apply_mixer(apply_cost_unitary(psi, g, table), b)
    return psi


def expectation(state, table) -> float:
    probs = np.abs(np.asarray(state)) ** 2
    return float(probs @ np.asarray(table))


def _adjoint_value_and_gradient(params: QaoaParams, table) -> tuple[float, np.ndarray]:
    # Reverse sweep: for a gate exp(-i t G) sitting between the prepared state
    # phi and the rest of the circuit V, dP/dt = 2 Im <V^dag H psi | G phi>.
    l = params.depth
    psi = ansatz_state(params, table)
    value = expectation(psi, table)
    lam = table * psi
    grad = np.zeros(2 * l)
    for j in range(l - 1, -1, -1):
        grad[l + j] = 2.0 * np.imag(np.vdot(lam, _apply_mixer_generator(psi)))
        psi = apply_mixer(psi, -params.betas[j])
        lam = apply_mixer(lam, -params.betas[j])
        grad[j] = 2.0 * np.imag(np.vdot(lam, table * psi))
        psi = apply_cost_unitary(psi, -params.gammas[j], table)
        lam = apply_cost_unitary(lam, -params.gammas[j], table)
    return value, grad


def z_string_terms(table, tol: float = 1e-12) -> list[tuple[float, np.ndarray]]:
    """Expand a diagonal operator into Z-strings: E(z) = c_0 + sum_S c_S Z_S.

    Returns ``(c_S, Z_S)`` pairs for every non-identity string with a nonzero
    coefficient, where ``Z_S`` is the +-1 diagonal of the string.  Coefficients
    come from a fast Walsh-Hadamard transform of the table.
    """
    table = np.asarray(table, dtype=np.float64)
    dim = table.size
    n = _num_qubits(dim)
    coeffs = table.copy()
    h = 1
    while h < dim:
        v = coeffs.reshape(-1, 2, h)
        a, b = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :], v[:, 1, :] = a + b, a - b
        h *= 2
    coeffs /= dim
    idx = np.arange(dim)
    terms = []
    for mask in np.nonzero(np.abs(coeffs) > tol)[0]:
        if mask == 0:
            continue
        parity = np.zeros(dim, dtype=np.int64)
        for q in range(n):
            if mask >> q & 1:
                parity ^= (idx >> q) & 1
        terms.append((float(coeffs[mask]), 1.0 - 2.0 * parity))
    return terms


def _shift_gradient(params: QaoaParams, table) -> np.ndarray:
    # Each term c*P of the cost layer is the gate exp(-i (2 c gamma) P / 2) and
    # each mixer qubit is exp(-i (2 beta) X / 2); the two-point rule with
    # +-pi/2 shifts on the gate angle gives d/dgamma = sum_t c_t [f+ - f-] and
    # d/dbeta = sum_q [f+ - f-].  A shifted gate is the unshifted layer followed
    # by exp(-+ i pi/4 P).
    table = np.asarray(table, dtype=np.float64)
    n = _num_qubits(table.size)
    l = params.depth
    terms = z_string_terms(table)

    def shifted(layer: int, after_cost=None, after_mixer=None) -> float:
        psi = initial_state(n)
        for j in range(l):
            psi = apply_cost_unitary(psi, params.gammas[j], table)
            if j == layer and after_cost is not None:
                psi = psi * after_cost
            psi = apply_mixer(psi, params.betas[j])
            if j == layer and after_mixer is not None:
                psi = after_mixer(psi)
        return expectation(psi, table)

    def x_rotation(q: int, angle: float):
        def apply(psi):
            v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
            a0, a1 = v[:, 0, :].copy(), v[:, 1, :].copy()
            out = np.empty_like(v)
            c, s = np.cos(angle), -1j * np.sin(angle)
            out[:, 0, :] = c * a0 + s * a1
            out[:, 1, :] = s * a0 + c * a1
            return out.reshape(-1)

        return apply

    grad = np.zeros(2 * l)
    quarter = np.pi / 4
    for j in range(l):
        g = 0.0
        for c, zs in terms:
            plus = shifted(j, after_cost=np.exp(-1j * quarter * zs))
            minus = shifted(j, after_cost=np.exp(1j * quarter * zs))
            g += c * (plus - minus)
        grad[j] = g
        b = 0.0
        for q in range(n):
            b += shifted(j, after_mixer=x_rotation(q, quarter)) - shifted(j, after_mixer=x_rotation(q, -quarter))
        grad[l + j] = b
    return grad


def _finite_difference_gradient(params: QaoaParams, table, step: float = 1e-5) -> np.ndarray:
    theta = params.flat()
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        tp, tm = theta.copy(), theta.copy()
        tp[i] += step
        tm[i] -= step
        fp = expectation(ansatz_state(QaoaParams.from_flat(tp), table), table)
        fm = expectation(ansatz_state(QaoaParams.from_flat(tm), table), table)
        grad[i] = (fp - fm) / (2 * step)
    return grad


def gradient(params: QaoaParams, table, method: str = "adjoint") -> np.ndarray:
    """Gradient of the expected energy, ordered ``[d/dgammas..., d/dbetas...]``."""
    table = np.asarray(table, dtype=np.float64)
    if method == "adjoint":
        return _adjoint_value_and_gradient(params, table)[1]
    if method == "shift":
        return _shift_gradient(params, table)
    if method == "finite-difference":
        return _finite_difference_gradient(params, table)
    raise InputError(f"unknown gradient method {method!r}")


def initial_params(config: QaoaConfig, rng: np.random.Generator) -> QaoaParams:
    """Every angle drawn uniformly from (0, init_scale]."""
    u = 1.0 - rng.random(2 * config.depth)
    return QaoaParams.from_flat(config.init_scale * u)


def energy_scale(table) -> float:
    """Standard deviation of the energy table, used to make step sizes unit-free.

    Gradient descent on ``table / s`` with gammas mapped back by ``1 / s``
    explores the same ansatz family as descent on ``table``; only the step
    geometry changes. A flat table returns 1.
    """
    s = float(np.std(table))
    return s if s > 0 else 1.0


def optimize(table, config: QaoaConfig, rng: np.random.Generator | None = None) -> OptimizationTrace:
    """Momentum gradient descent on the exact expected energy.

    ``energies[0]`` is the energy at the initial parameters and
    ``energies[s]`` the energy after update ``s``.
    """
    table = np.asarray(table, dtype=np.float64)
    if rng is None:
        rng = make_rng(np.random.SeedSequence(config.seed).spawn(2)[0])
    scale = energy_scale(table) if config.normalize else 1.0
    table = table / scale
    params = initial_params(config, rng)
    theta = params.flat()
    velocity = np.zeros_like(theta)
    energies = []
    for step in range(config.steps + 1):
        p = QaoaParams.from_flat(theta)
        if step == config.steps:
            e, grad = expectation(ansatz_state(p, table), table), None
        elif config.gradient_method == "adjoint":
            e, grad = _adjoint_value_and_gradient(p, table)
        else:
            e = expectation(ansatz_state(p, table), table)
            grad = gradient(p, table, config.gradient_method)
        if not np.isfinite(e):
            raise NumericFailure(f"non-finite energy at step {step}", step=step)
        energies.append(e * scale)
        if grad is None:
            break
        if not np.isfinite(grad).all():
            raise NumericFailure(f"non-finite gradient at step {step + 1}", step=step + 1)
        velocity = config.momentum * velocity - config.learning_rate * grad
        theta = theta + velocity
    final = QaoaParams.from_flat(theta)
    final = QaoaParams(final.gammas / scale, final.betas)
    return OptimizationTrace(np.array(energies), final)


def sample(state, shots: int, rng: np.random.Generator) -> dict[int, int]:
    """Measure ``shots`` times in the computational basis; returns index -> count."""
    if shots < 1:
        raise InputError("shots must be >= 1")
    probs = np.abs(np.asarray(state)) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    return dict(sorted(Counter(int(d) for d in draws).items()))


def select_candidate(counts: dict[int, int], table, n: int, policy: str = "min-energy-valid", h=None) -> int:
    """Choose a basis index from the measured counts.

    Energy-based policies rank by energy, then higher count, then the
    lexicographically smallest bit string; frequency-based ones by count, then
    bit string.  The ``-valid`` variants only consider samples with zero
    syndrome under ``h`` and fall back to all samples when none is valid.
    """
    if policy not in SELECTION_POLICIES:
        raise InputError(f"unknown selection policy {policy!r}")
    strs = {i: bits_to_str(index_to_bits(i, n)) for i in counts}
    pool = list(counts)
    if policy.endswith("-valid"):
        if h is None:
            raise InputError(f"policy {policy!r} needs the parity-check matrix")
        pool = [i for i in pool if is_codeword(h, index_to_bits(i, n))] or pool
    if policy.startswith("min-energy"):
        return min(pool, key=lambda i: (table[i], -counts[i], strs[i]))
    return min(pool, key=lambda i: (-counts[i], strs[i]))


def qaoa_decode(code: LinearCode, llr, config: QaoaConfig | None = None) -> DecodeResult:
    config = config or QaoaConfig()
    if code.n > MAX_TABLE_BITS:
        raise CapacityError(f"code length {code.n} exceeds the statevector limit {MAX_TABLE_BITS}")
    ham = DecodingHamiltonian.from_matrix(code.h, llr)
    table = build_energy_table(ham)
    init_ss, sample_ss = np.random.SeedSequence(config.seed).spawn(2)
    trace = optimize(table, config, make_rng(init_ss))
    psi = ansatz_state(trace.params_final, table)
    counts = sample(psi, config.shots, make_rng(sample_ss))
    best = select_candidate(counts, table, code.n, config.selection, code.h)
    decoded = index_to_bits(best, code.n)
    return DecodeResult(
        decoded=decoded,
        decoded_energy=float(table[best]),
        sampled_counts={bits_to_str(index_to_bits(i, code.n)): c for i, c in counts.items()},
        valid=is_codeword(code.h, decoded),
        trace=trace,
    )
