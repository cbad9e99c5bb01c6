"""Bivariate bicycle code construction over GF(2).

A code instance is defined by cyclic dimensions (l, m) and two trinomials
A = A1+A2+A3, B = B1+B2+B3 whose terms are monomials x^p y^q, realized as
Kronecker products of cyclic shift matrices.  The check matrices are
H_X = [A | B] and H_Z = [B^T | A^T]; data qubits split into an L block
(left columns) and an R block (right columns).

Binary matrices are plain ``numpy`` arrays with dtype ``uint8`` and entries
in {0, 1}; all arithmetic on them is modulo 2.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Monomial",
    "mono_mul",
    "mono_inv",
    "mono_pow",
    "mono_index",
    "mono_from_index",
    "parse_monomial",
    "format_monomial",
    "BBCodeSpec",
    "TannerGraph",
    "PRESETS",
    "get_preset",
    "load_code_config",
    "shift_matrix",
    "monomial_matrix",
    "build_check_matrices",
    "gf2_rank",
    "compute_k",
    "tanner_graph",
]


@dataclass(frozen=True, order=True)
class Monomial:
    """Element x^p y^q of the abelian labeling group Z_l x Z_m.

    Exponents are kept canonical (0 <= p < l, 0 <= q < m) by the group
    operations below; the group dimensions are passed explicitly so that a
    monomial itself stays a plain exponent pair.
    """

    p: int
    q: int


IDENTITY = Monomial(0, 0)


def mono_mul(a: Monomial, b: Monomial, l: int, m: int) -> Monomial:
    """Product of two monomials, reduced to canonical form."""
    return Monomial((a.p + b.p) % l, (a.q + b.q) % m)


def mono_inv(a: Monomial, l: int, m: int) -> Monomial:
    """Group inverse; also the matrix transpose of the monomial."""
    return Monomial((-a.p) % l, (-a.q) % m)


def mono_pow(a: Monomial, k: int, l: int, m: int) -> Monomial:
    """k-th power (k may be negative)."""
    return Monomial((a.p * k) % l, (a.q * k) % m)


def mono_order(a: Monomial, l: int, m: int) -> int:
    """Smallest positive k with a^k equal to the identity."""
    ox = l // math.gcd(a.p, l) if a.p else 1
    oy = m // math.gcd(a.q, m) if a.q else 1
    return math.lcm(ox, oy)


def mono_index(a: Monomial, m: int) -> int:
    """Integer label of x^p y^q, namely p*m + q."""
    return a.p * m + a.q


def mono_from_index(i: int, m: int) -> Monomial:
    """Inverse of :func:`mono_index`."""
    return Monomial(i // m, i % m)


_FACTOR = re.compile(r"([xy])([0-9]*)")


def parse_monomial(text: str, l: int, m: int) -> Monomial:
    """Parse a monomial string such as "1", "y", "x3y2".

    Repeated factors multiply, so "x3xy" parses as x^4 y.  Exponents are
    reduced modulo (l, m).
    """
    s = text.strip().replace(" ", "").replace("*", "").replace("^", "")
    if s == "1":
        return IDENTITY
    if not s:
        raise ValueError(f"empty monomial string: {text!r}")
    p = q = 0
    pos = 0
    for match in _FACTOR.finditer(s):
        if match.start() != pos:
            raise ValueError(f"malformed monomial string: {text!r}")
        exp = int(match.group(2) or 1)
        if match.group(1) == "x":
            p += exp
        else:
            q += exp
        pos = match.end()
    if pos != len(s):
        raise ValueError(f"malformed monomial string: {text!r}")
    return Monomial(p % l, q % m)


def format_monomial(a: Monomial) -> str:
    """Canonical string form: "1", "x", "y2", "x3y2", ..."""
    if a.p == 0 and a.q == 0:
        return "1"
    parts = []
    if a.p:
        parts.append("x" if a.p == 1 else f"x{a.p}")
    if a.q:
        parts.append("y" if a.q == 1 else f"y{a.q}")
    return "".join(parts)


@dataclass(frozen=True)
class BBCodeSpec:
    """Definition of one bivariate bicycle code.

    The declared (n, k, d) triple is carried as metadata: n is validated
    against 2*l*m, k is checkable via :func:`compute_k`, and d is an input
    only (distance search is out of scope here).
    """

    l: int
    m: int
    a_terms: tuple[Monomial, ...]
    b_terms: tuple[Monomial, ...]
    declared_n: int
    declared_k: int
    declared_d: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.l < 1 or self.m < 1:
            raise ValueError("l and m must be positive")
        if self.declared_n != 2 * self.l * self.m:
            raise ValueError(
                f"declared n={self.declared_n} != 2*l*m={2 * self.l * self.m}"
            )
        for terms, label in ((self.a_terms, "A"), (self.b_terms, "B")):
            if len(terms) != 3 or len(set(terms)) != 3:
                raise ValueError(f"{label} must consist of 3 distinct monomials")
            for t in terms:
                if not (0 <= t.p < self.l and 0 <= t.q < self.m):
                    raise ValueError(f"{label} term {t} not canonical for (l={self.l}, m={self.m})")

    @property
    def n(self) -> int:
        return 2 * self.l * self.m

    @property
    def figure_of_merit(self) -> float:
        """r = k d^2 / n, the density gain over the rotated surface code (r=1)."""
        return self.declared_k * self.declared_d**2 / self.declared_n

    def describe(self) -> str:
        a = "+".join(format_monomial(t) for t in self.a_terms)
        b = "+".join(format_monomial(t) for t in self.b_terms)
        return f"[[{self.declared_n},{self.declared_k},{self.declared_d}]] l={self.l} m={self.m} A={a} B={b}"


def _preset(l: int, m: int, a: str, b: str, n: int, k: int, d: int) -> BBCodeSpec:
    name = f"[[{n},{k},{d}]]"
    return BBCodeSpec(
        l=l,
        m=m,
        a_terms=tuple(parse_monomial(t, l, m) for t in a.split("+")),
        b_terms=tuple(parse_monomial(t, l, m) for t in b.split("+")),
        declared_n=n,
        declared_k=k,
        declared_d=d,
        name=name,
    )


PRESETS: dict[str, BBCodeSpec] = {
    spec.name: spec
    for spec in (
        _preset(6, 6, "x3+y+y2", "y3+x+x2", 72, 12, 6),
        _preset(15, 3, "x9+y+y2", "1+x2+x7", 90, 8, 10),
        _preset(9, 6, "x3+y+y2", "y3+x+x2", 108, 8, 10),
        _preset(12, 6, "x3+y+y2", "y3+x+x2", 144, 12, 12),
        _preset(12, 12, "x3+y2+y7", "y3+x+x2", 288, 12, 18),
    )
}


class UnknownPresetError(KeyError):
    """Raised when a preset name does not resolve to a built-in code."""


def get_preset(name: str) -> BBCodeSpec:
    """Look up a built-in code by name ("[[144,12,12]]") or by qubit count ("144")."""
    key = name.strip()
    if key in PRESETS:
        return PRESETS[key]
    for spec in PRESETS.values():
        if key == str(spec.declared_n):
            return spec
    raise UnknownPresetError(f"unknown code preset {name!r}; known: {sorted(PRESETS)}")


def load_code_config(path: str | Path) -> BBCodeSpec:
    """Read a code definition from an INI-style config file.

    Expected section ``[code]`` with keys l, m, a_terms, b_terms (comma
    separated monomial strings) and declared n, k, d.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    if not parser.has_section("code"):
        raise ValueError(f"{path}: missing [code] section")
    sec = parser["code"]
    try:
        l = sec.getint("l")
        m = sec.getint("m")
        a = tuple(parse_monomial(t, l, m) for t in sec["a_terms"].split(","))
        b = tuple(parse_monomial(t, l, m) for t in sec["b_terms"].split(","))
        return BBCodeSpec(
            l=l,
            m=m,
            a_terms=a,
            b_terms=b,
            declared_n=sec.getint("n"),
            declared_k=sec.getint("k"),
            declared_d=sec.getint("d"),
            name=sec.get("name", f"[[{sec.getint('n')},{sec.getint('k')},{sec.getint('d')}]]"),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: invalid code config: {exc}") from exc


def shift_matrix(l: int) -> np.ndarray:
    """Cyclic shift matrix S_l: row i has its single 1 at column (i+1) mod l."""
    if l < 1:
        raise ValueError("shift matrix dimension must be >= 1")
    s = np.zeros((l, l), dtype=np.uint8)
    s[np.arange(l), (np.arange(l) + 1) % l] = 1
    return s


def monomial_matrix(mono: Monomial, l: int, m: int) -> np.ndarray:
    """Permutation matrix S_l^p (x) S_m^q for x^p y^q."""
    if not (0 <= mono.p < l and 0 <= mono.q < m):
        raise ValueError(f"monomial {mono} not canonical for (l={l}, m={m})")
    sx = np.zeros((l, l), dtype=np.uint8)
    sx[np.arange(l), (np.arange(l) + mono.p) % l] = 1
    sy = np.zeros((m, m), dtype=np.uint8)
    sy[np.arange(m), (np.arange(m) + mono.q) % m] = 1
    return np.kron(sx, sy)


def build_check_matrices(spec: BBCodeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Check matrices (H_X, H_Z), each of shape (l*m, 2*l*m), over GF(2)."""
    a = sum(monomial_matrix(t, spec.l, spec.m) for t in spec.a_terms) % 2
    b = sum(monomial_matrix(t, spec.l, spec.m) for t in spec.b_terms) % 2
    hx = np.hstack([a, b]).astype(np.uint8)
    hz = np.hstack([b.T, a.T]).astype(np.uint8)
    return hx, hz


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination on bit-packed rows.

    Pivots are chosen at the lowest free column index, so the elimination
    order is deterministic.
    """
    rows = []
    for r in np.asarray(matrix, dtype=np.uint8) % 2:
        acc = 0
        for j in np.nonzero(r)[0]:
            acc |= 1 << int(j)
        rows.append(acc)
    n_cols = matrix.shape[1]
    rank = 0
    top = 0
    for col in range(n_cols):
        bit = 1 << col
        pivot = next((r for r in range(top, len(rows)) if rows[r] & bit), None)
        if pivot is None:
            continue
        rows[top], rows[pivot] = rows[pivot], rows[top]
        for r in range(len(rows)):
            if r != top and rows[r] & bit:
                rows[r] ^= rows[top]
        rank += 1
        top += 1
        if top == len(rows):
            break
    return rank


def compute_k(hx: np.ndarray, hz: np.ndarray) -> int:
    """Number of logical qubits of the CSS code: n - rank(H_X) - rank(H_Z)."""
    n = hx.shape[1]
    if hz.shape[1] != n:
        raise ValueError("check matrices disagree on qubit count")
    return n - gf2_rank(hx) - gf2_rank(hz)


@dataclass(frozen=True)
class TannerGraph:
    """Bipartite check/data adjacency of one code.

    Checks are indexed 0..2lm-1 (X block first, then Z); data qubits
    0..2lm-1 (L block first, then R).  ``check_neighbors`` row c lists the 6
    data neighbors of check c: the 3 L-side neighbors first, then the 3
    R-side, each in the term order of the defining polynomials.
    """

    spec: BBCodeSpec
    check_neighbors: np.ndarray

    @property
    def half(self) -> int:
        return self.spec.l * self.spec.m

    @property
    def n_checks(self) -> int:
        return 2 * self.half

    @property
    def n_data(self) -> int:
        return 2 * self.half

    @property
    def checks(self) -> list[tuple[str, int]]:
        return [("X", i) for i in range(self.half)] + [("Z", i) for i in range(self.half)]

    @property
    def data(self) -> list[tuple[str, int]]:
        return [("L", i) for i in range(self.half)] + [("R", i) for i in range(self.half)]

    @property
    def edges(self) -> list[tuple[tuple[str, int], tuple[str, int]]]:
        out = []
        for cid in range(self.n_checks):
            ckind = "X" if cid < self.half else "Z"
            cidx = cid % self.half
            for did in self.check_neighbors[cid]:
                side = "L" if did < self.half else "R"
                out.append(((ckind, cidx), (side, int(did) % self.half)))
        return out

    def check_id(self, kind: str, index: int) -> int:
        return index if kind == "X" else self.half + index

    def data_id(self, side: str, index: int) -> int:
        return index if side == "L" else self.half + index


def tanner_graph(spec: BBCodeSpec) -> TannerGraph:
    """Tanner graph with edges exactly at the nonzero entries of H_X and H_Z.

    An X check with row monomial g touches L qubits g*A_i and R qubits
    g*B_i; a Z check with row monomial g touches L qubits g*B_i^-1 and R
    qubits g*A_i^-1.
    """
    l, m = spec.l, spec.m
    half = l * m
    p = np.arange(half) // m
    q = np.arange(half) % m

    def translated(term: Monomial, invert: bool = False) -> np.ndarray:
        sign = -1 if invert else 1
        return ((p + sign * term.p) % l) * m + (q + sign * term.q) % m

    neighbors = np.empty((2 * half, 6), dtype=np.int64)
    for j, term in enumerate(spec.a_terms):
        neighbors[:half, j] = translated(term)
    for j, term in enumerate(spec.b_terms):
        neighbors[:half, 3 + j] = half + translated(term)
    for j, term in enumerate(spec.b_terms):
        neighbors[half:, j] = translated(term, invert=True)
    for j, term in enumerate(spec.a_terms):
        neighbors[half:, 3 + j] = half + translated(term, invert=True)
    return TannerGraph(spec=spec, check_neighbors=neighbors)
