"""GF(2) linear algebra for short binary linear codes.

Bit vectors are 1-D ``uint8`` numpy arrays with entries in {0, 1}.  A code is
defined by its parity-check matrix; codewords are obtained by enumerating the
null space rather than by encoding messages.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapacityError, InputError

MAX_ENUMERATION_DIM = 24


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Coerce a sequence (or a string such as ``"101101"``) to a bit vector."""
    if isinstance(x, str):
        s = x.replace(",", "").replace(" ", "")
        if not s or any(ch not in "01" for ch in s):
            raise InputError(f"not a bit string: {x!r}")
        arr = np.fromiter((int(ch) for ch in s), dtype=np.uint8, count=len(s))
    else:
        raw = np.asarray(x)
        if raw.ndim != 1:
            raise InputError("bit vector must be one-dimensional")
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise InputError("bit vector entries must be 0 or 1")
        arr = raw.astype(np.uint8)
    if n is not None and arr.size != n:
        raise InputError(f"expected {n} bits, got {arr.size}")
    return arr


def bits_to_str(x) -> str:
    return "".join(str(int(b)) for b in x)


@dataclass(frozen=True)
class ParityCheckMatrix:
    """An m x n binary matrix. Rows need not be linearly independent."""

    rows: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.rows)
        if h.ndim != 2:
            raise InputError("parity-check matrix must be two-dimensional")
        if h.size and not np.isin(h, (0, 1)).all():
            raise InputError("parity-check matrix entries must be 0 or 1")
        h = h.astype(np.uint8)
        m, n = h.shape
        if m < 1 or n < 2:
            raise InputError(f"need m >= 1 and n >= 2, got m={m}, n={n}")
        if not h.any(axis=1).all():
            raise InputError("every parity-check row needs at least one nonzero entry")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "rows", h)

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class TannerGraph:
    var_to_checks: tuple[tuple[int, ...], ...]
    check_to_vars: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.var_to_checks)

    @property
    def m(self) -> int:
        return len(self.check_to_vars)

    def to_matrix(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, vs in enumerate(self.check_to_vars):
            h[j, list(vs)] = 1
        return h


@dataclass(frozen=True)
class LinearCode:
    h: ParityCheckMatrix
    codewords: np.ndarray = field(repr=False)
    name: str = ""

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def m(self) -> int:
        return self.h.m

    @property
    def k(self) -> int:
        return int(round(np.log2(len(self.codewords))))

    @classmethod
    def from_matrix(cls, h, name: str = "") -> "LinearCode":
        if not isinstance(h, ParityCheckMatrix):
            h = ParityCheckMatrix(np.asarray(h))
        words = enumerate_codewords(gf2_null_space_basis(h), n=h.n)
        words.setflags(write=False)
        return cls(h=h, codewords=words, name=name)

    def contains(self, x) -> bool:
        return is_codeword(self.h, x)


def gf2_rref(a) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form over GF(2), pivots chosen left to right."""
    r = np.array(a, dtype=np.uint8) % 2
    m, n = r.shape
    pivots = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            r[[row, p]] = r[[p, row]]
        others = np.nonzero(r[:, col])[0]
        others = others[others != row]
        r[others] ^= r[row]
        pivots.append(col)
        row += 1
    return r[:row], pivots


def gf2_rank(a) -> int:
    return len(gf2_rref(a)[1])


def gf2_null_space_basis(h) -> list[np.ndarray]:
    """Basis of {x : H x^T = 0} with one vector per free column.

    Free columns are taken in increasing order; each basis vector sets its own
    free variable to 1, every other free variable to 0, and solves for the
    pivot variables from the RREF.
    """
    rows = h.rows if isinstance(h, ParityCheckMatrix) else np.asarray(h, dtype=np.uint8)
    n = rows.shape[1]
    r, pivots = gf2_rref(rows)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.uint8)
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = r[i, f]
        basis.append(v)
    return basis


def enumerate_codewords(basis, n: int | None = None) -> np.ndarray:
    """All GF(2) combinations of ``basis``, deduplicated, lexicographically sorted.

    Returns a ``(2**k, n)`` array. An empty basis yields only the zero vector,
    in which case ``n`` must be supplied.
    """
    basis = [as_bits(b) for b in basis]
    k = len(basis)
    if k > MAX_ENUMERATION_DIM:
        raise CapacityError(f"refusing to enumerate 2**{k} codewords (limit k <= {MAX_ENUMERATION_DIM})")
    if k == 0:
        if n is None:
            raise InputError("code length required for an empty basis")
        return np.zeros((1, n), dtype=np.uint8)
    b = np.vstack(basis)
    if n is not None and b.shape[1] != n:
        raise InputError(f"basis vectors have length {b.shape[1]}, expected {n}")
    coeffs = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8)
    words = (coeffs @ b) % 2
    words = np.unique(words.astype(np.uint8), axis=0)
    return words


def syndrome(h, x) -> np.ndarray:
    rows = h.rows if isinstance(h, ParityCheckMatrix) else np.asarray(h, dtype=np.uint8)
    x = as_bits(x)
    if x.size != rows.shape[1]:
        raise InputError(f"vector length {x.size} does not match code length {rows.shape[1]}")
    return ((rows.astype(np.int64) @ x.astype(np.int64)) % 2).astype(np.uint8)


def is_codeword(h, x) -> bool:
    return not syndrome(h, x).any()


def build_tanner_graph(h) -> TannerGraph:
    rows = h.rows if isinstance(h, ParityCheckMatrix) else np.asarray(h, dtype=np.uint8)
    m, n = rows.shape
    var_to_checks = tuple(tuple(int(j) for j in np.nonzero(rows[:, i])[0]) for i in range(n))
    check_to_vars = tuple(tuple(int(i) for i in np.nonzero(rows[j])[0]) for j in range(m))
    return TannerGraph(var_to_checks, check_to_vars)


# The two [6, 2] matrices are the ones used for the published experiments.
# code-7-3 and code-8-4 are local choices: row weight 3, rank 4.
_BUILTIN_ROWS = {
    "table1-6-2": [
        [1, 1, 1, 0, 0, 0],
        [1, 1, 0, 1, 0, 0],
        [0, 0, 1, 1, 1, 0],
        [0, 0, 1, 1, 0, 1],
    ],
    "fig1-6-2": [
        [1, 1, 1, 0, 0, 0],
        [0, 1, 1, 1, 0, 0],
        [0, 0, 1, 1, 1, 0],
        [0, 0, 0, 1, 1, 1],
    ],
    "code-7-3": [
        [1, 1, 1, 0, 0, 0, 0],
        [0, 0, 1, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, 1, 1],
        [1, 0, 0, 1, 0, 0, 1],
    ],
    "code-8-4": [
        [1, 1, 1, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 1, 0],
        [1, 0, 0, 0, 0, 0, 1, 1],
    ],
}


def builtin_names() -> list[str]:
    return list(_BUILTIN_ROWS)


def builtin_code(name: str) -> LinearCode:
    try:
        rows = _BUILTIN_ROWS[name]
    except KeyError:
        raise LookupError(f"unknown code {name!r}; known: {', '.join(_BUILTIN_ROWS)}") from None
    return LinearCode.from_matrix(np.array(rows, dtype=np.uint8), name=name)


def load_alist(path) -> ParityCheckMatrix:
    """Read the simple sparse format: ``m n`` then one line of 0-based column
    indices per row."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InputError(f"{path}: empty matrix file")
    try:
        m, n = (int(t) for t in lines[0].split())
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(rows) != m:
        raise InputError(f"{path}: header says {m} rows, found {len(rows)}")
    h = np.zeros((m, n), dtype=np.uint8)
    for j, cols in enumerate(rows):
        for c in cols:
            if not 0 <= c < n:
                raise InputError(f"{path}: column index {c} out of range in row {j}")
            h[j, c] = 1
    return ParityCheckMatrix(h)


def dump_alist(h: ParityCheckMatrix) -> str:
    out = [f"{h.m} {h.n}"]
    out += [" ".join(str(int(c)) for c in np.nonzero(row)[0]) for row in h.rows]
    return "\n".join(out) + "\n"


def resolve_code(name_or_path: str) -> LinearCode:
    """Builtin name first, then a matrix file on disk."""
    if name_or_path in _BUILTIN_ROWS:
        return builtin_code(name_or_path)
    p = Path(name_or_path)
    if p.is_file():
        return LinearCode.from_matrix(load_alist(p), name=p.stem)
    raise LookupError(f"unknown code {name_or_path!r}; known: {', '.join(_BUILTIN_ROWS)}")
