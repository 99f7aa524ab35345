"""Symbolic dynamics of substitutions on a finite alphabet.

Covers possibly reducible substitutions: invariant sub-alphabet chains,
Perron-Frobenius data of the transition blocks, and limit word frequencies.
Letters are arbitrary hashable values (single-character strings in the text
format, oriented splitting units elsewhere).

Word frequencies are computed through an exact integer recursion on factor
counts: occurrences of a factor w in zeta(W) decompose over the factors of W
of length <= |w| that the occurrence spans, so the vector of factor counts
transforms linearly under the substitution with an integer matrix.  This
gives the empirical ratio |zeta^t(a)|_w / |zeta^t(a)| without materializing
the iterate, and its dominant eigenvector gives the limit value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (
    CapExceededError,
    LengthCapError,
    NonConvergenceError,
    NonDominantError,
    NotIrreducibleError,
)

DEFAULT_SYMBOL_BUDGET = 10 ** 12  # counts stay exact integers, so the budget
                                  # is a stopping length, not a memory bound
MATERIALIZE_BUDGET = 10 ** 8


class Substitution:
    """A rule assigning to each letter a nonempty word over the alphabet."""

    def __init__(self, rule: Dict, alphabet: Optional[Sequence] = None):
        self.rule = {a: tuple(w) for a, w in rule.items()}
        if alphabet is None:
            alphabet = sorted(self.rule, key=repr)
        self.alphabet = tuple(alphabet)
        missing = [a for a in self.alphabet if a not in self.rule]
        if missing:
            raise ValueError(f"letters without an image: {missing}")
        for a, w in self.rule.items():
            if not w:
                raise ValueError(f"empty image for letter {a!r}")
            for x in w:
                if x not in self.rule:
                    raise ValueError(f"image of {a!r} uses unknown letter {x!r}")

    def __call__(self, word: Sequence) -> Tuple:
        out = []
        for a in word:
            out.extend(self.rule[a])
        return tuple(out)

    def power(self, k: int, budget: int = MATERIALIZE_BUDGET) -> "Substitution":
        """The substitution zeta = xi^k, with images materialized."""
        if k < 1:
            raise ValueError("power must be positive")
        rule = {a: iterate(self, (a,), k, budget=budget) for a in self.alphabet}
        return Substitution(rule, alphabet=self.alphabet)

    @staticmethod
    def from_strings(rule: Dict[str, str]) -> "Substitution":
        return Substitution({a: tuple(w) for a, w in rule.items()})

    def __repr__(self) -> str:
        parts = ", ".join(f"{a!r}->{''.join(map(str, w))}" for a, w in sorted(
            self.rule.items(), key=lambda kv: repr(kv[0])))
        return f"Substitution({parts})"


def iterate(s: Substitution, w: Sequence, t: int, budget: int = MATERIALIZE_BUDGET) -> Tuple:
    """t-fold application of s to w, materialized.

    Raises LengthCapError before producing a word longer than ``budget``.
    """
    if t < 0:
        raise ValueError("iteration count must be nonnegative")
    current = tuple(w)
    for _ in range(t):
        next_len = sum(len(s.rule[a]) for a in current)
        if next_len > budget:
            raise LengthCapError(
                f"iterate would reach {next_len} symbols (budget {budget})")
        current = s(current)
    return current


def count_occurrences(pattern: Sequence, text: Sequence) -> int:
    """Number of (overlapping) occurrences of pattern as a factor of text."""
    pattern = tuple(pattern)
    if not pattern:
        raise ValueError("pattern must be nonempty")
    text = tuple(text)
    m = len(pattern)
    return sum(1 for i in range(len(text) - m + 1) if text[i:i + m] == pattern)


# ---------------------------------------------------------------------------
# Transition matrices and block structure

def transition_matrix(s: Substitution, letters: Optional[Sequence] = None) -> List[List[int]]:
    """Integer matrix whose (i, j) entry counts letter j in the image of letter i."""
    if letters is None:
        letters = s.alphabet
    index = {a: i for i, a in enumerate(letters)}
    mat = [[0] * len(letters) for _ in letters]
    for a in letters:
        row = mat[index[a]]
        for x in s.rule[a]:
            if x in index:
                row[index[x]] += 1
    return mat


def _is_strongly_connected(mat: Sequence[Sequence[int]]) -> bool:
    n = len(mat)
    if n == 0:
        return False
    if n == 1:
        return mat[0][0] > 0

    def reach(transpose: bool) -> set:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(n):
                entry = mat[j][i] if transpose else mat[i][j]
                if entry and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    return len(reach(False)) == n and len(reach(True)) == n


def _is_permutation_matrix(mat: Sequence[Sequence[int]]) -> bool:
    n = len(mat)
    for row in mat:
        if sum(row) != 1 or any(x not in (0, 1) for x in row):
            return False
    return all(sum(mat[i][j] for i in range(n)) == 1 for j in range(n))


def _is_primitive(mat: Sequence[Sequence[int]]) -> bool:
    """Wielandt test: M is primitive iff M^(n^2 - 2n + 2) is positive."""
    n = len(mat)
    target = n * n - 2 * n + 2
    boolean = np.array(mat, dtype=bool)
    power = np.eye(n, dtype=bool)
    base = boolean
    k = target
    while k:
        if k & 1:
            power = power @ base
        base = base @ base
        k >>= 1
    return bool(power.all())


def pf_data(mat, tol: float = 1e-12, max_iter: int = 200_000):
    """Perron-Frobenius eigenvalue with right and left eigenvectors.

    The matrix must be irreducible.  Iteration runs on M + I (primitive for
    any irreducible M, so periodic blocks converge too) until the relative
    residual of M itself drops below ``tol``; eigenvectors are normalized to
    sum 1.
    """
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if (m < 0).any():
        raise ValueError("matrix must be nonnegative")
    if not _is_strongly_connected(m.tolist()):
        raise NotIrreducibleError("matrix is not irreducible")
    n = m.shape[0]
    shifted = m + np.eye(n)

    def dominant(a: np.ndarray) -> Tuple[float, np.ndarray]:
        unshifted = a - np.eye(n)
        v = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            w = a @ v
            norm = w.sum()
            v_new = w / norm
            lam = norm - 1.0  # eigenvalue of the unshifted matrix
            residual = np.abs(unshifted @ v_new - lam * v_new).sum()
            if residual <= tol * max(lam, 1.0):
                return lam, v_new
            v = v_new
        raise NonConvergenceError("power iteration did not reach the residual target")

    lam_r, right = dominant(shifted)
    lam_l, left = dominant(shifted.T)
    lam = max(lam_r, lam_l)
    return lam, right, left


@dataclass(frozen=True)
class Block:
    """A maximal invariant sub-alphabet with its diagonal transition block."""

    letters: Tuple
    matrix: Tuple[Tuple[int, ...], ...]
    kind: str  # "primitive" | "bounded" | "imprimitive"
    pf_eigenvalue: float


@dataclass(frozen=True)
class BlockStructure:
    """Blocks in dependency order (lowest first) with the invariant chain."""

    blocks: Tuple[Block, ...]

    def sub_alphabets(self) -> List[Tuple]:
        chain, acc = [], []
        for block in self.blocks:
            acc.extend(block.letters)
            chain.append(tuple(acc))
        return chain

    def block_of(self, letter) -> Block:
        for block in self.blocks:
            if letter in block.letters:
                return block
        raise KeyError(letter)


def _classify_block(mat: List[List[int]]) -> Tuple[str, float]:
    n = len(mat)
    if n == 1:
        entry = mat[0][0]
        if entry <= 1:
            return "bounded", float(entry)
        return "primitive", float(entry)
    if _is_permutation_matrix(mat):
        # Irreducible integer blocks have bounded powers exactly when they
        # are cyclic permutation matrices.
        return "bounded", 1.0
    lam, _, _ = pf_data(mat)
    if _is_primitive(mat):
        return "primitive", lam
    return "imprimitive", lam


def block_structure(s: Substitution) -> BlockStructure:
    """SCC condensation of the letter-dependency digraph, lowest block first."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(s.alphabet)
    for a in s.alphabet:
        for x in s.rule[a]:
            digraph.add_edge(a, x)
    condensed = nx.condensation(digraph)
    order = list(nx.topological_sort(condensed))
    order.reverse()  # dependencies (lower blocks) first
    blocks = []
    for node in order:
        letters = tuple(sorted(condensed.nodes[node]["members"], key=repr))
        mat = transition_matrix(s, letters)
        kind, lam = _classify_block(mat)
        blocks.append(Block(letters, tuple(tuple(row) for row in mat), kind, lam))
    return BlockStructure(tuple(blocks))


def _reachable_letters(s: Substitution, seed) -> set:
    seen = {seed}
    stack = [seed]
    while stack:
        a = stack.pop()
        for x in s.rule[a]:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return seen


# ---------------------------------------------------------------------------
# Exact factor-count recursion

def _span_count(s: Substitution, omega: Tuple, beta: Tuple) -> int:
    """Occurrences of omega in s(beta) starting in the first letter's image
    and ending in the last letter's image."""
    parts = [s.rule[b] for b in beta]
    text = tuple(x for part in parts for x in part)
    first_end = len(parts[0])
    last_start = len(text) - len(parts[-1])
    m = len(omega)
    count = 0
    for p in range(min(first_end, len(text) - m + 1)):
        if p + m > last_start and text[p:p + m] == omega:
            count += 1
    return count


def block_closure(s: Substitution, seed, max_len: int) -> List[Tuple]:
    """All factors of length <= max_len of any iterate s^t(seed), t >= 0.

    Every factor of s(W) spans a factor of W of at most its own length, so
    closing the factor set under span-occurrences in images is exhaustive.
    """
    blocks = set()
    frontier = [(seed,)] if not isinstance(seed, tuple) else [seed]
    for beta in frontier:
        blocks.add(beta)
    while frontier:
        new = []
        for beta in frontier:
            parts = [s.rule[b] for b in beta]
            text = tuple(x for part in parts for x in part)
            first_end = len(parts[0])
            last_start = len(text) - len(parts[-1])
            for p in range(first_end):
                for m in range(1, max_len + 1):
                    if p + m > len(text):
                        break
                    if p + m > last_start:
                        omega = text[p:p + m]
                        if omega not in blocks:
                            blocks.add(omega)
                            new.append(omega)
        frontier = new
    return sorted(blocks, key=lambda b: (len(b), repr(b)))


def block_transition(s: Substitution, blocks: Sequence[Tuple]) -> List[List[int]]:
    """Integer matrix T with T[i][j] = span-occurrences of block i in s(block j)."""
    index = {b: i for i, b in enumerate(blocks)}
    mat = [[0] * len(blocks) for _ in blocks]
    for j, beta in enumerate(blocks):
        for i, omega in enumerate(blocks):
            if len(omega) <= sum(len(s.rule[b]) for b in beta):
                mat[i][j] = _span_count(s, omega, beta)
    return mat


class FactorCounts:
    """Exact factor counts of s^t(seed) for all factors up to a given length."""

    def __init__(self, s: Substitution, seed, max_len: int):
        self.substitution = s
        self.seed = seed
        self.max_len = max_len
        self.blocks = block_closure(s, seed, max_len)
        self.index = {b: i for i, b in enumerate(self.blocks)}
        self.matrix = block_transition(s, self.blocks)
        self.letter_rows = [i for i, b in enumerate(self.blocks) if len(b) == 1]
        self.counts = [0] * len(self.blocks)
        self.counts[self.index[(seed,)]] = 1
        self.t = 0

    def step(self):
        mat, counts = self.matrix, self.counts
        self.counts = [sum(row[j] * counts[j] for j in range(len(counts)) if counts[j])
                       for row in mat]
        self.t += 1

    @property
    def length(self) -> int:
        return sum(self.counts[i] for i in self.letter_rows)

    def count(self, block: Tuple) -> int:
        i = self.index.get(tuple(block))
        return self.counts[i] if i is not None else 0

    def frequency(self, block: Tuple) -> float:
        n = self.length
        return self.count(block) / n if n else 0.0

    def frequencies(self) -> Dict[Tuple, float]:
        n = self.length
        return {b: self.counts[i] / n for i, b in enumerate(self.blocks)}


def limit_block_frequencies(s: Substitution, seed, max_len: int,
                            tol: float = 1e-12, max_iter: int = 100_000):
    """Limit frequencies of all factors up to max_len along iterates of seed.

    Power-iterates the factor-count matrix from the seed's count vector and
    normalizes by letter mass.  Returns (frequencies, achieved residual).
    """
    fc = FactorCounts(s, seed, max_len)
    mat = np.array(fc.matrix, dtype=float)
    v = np.zeros(len(fc.blocks))
    v[fc.index[(seed,)]] = 1.0
    # Warm-start inside the positive cone: advance a few exact steps.
    for _ in range(max(2, max_len)):
        fc.step()
    if fc.length and any(fc.counts):
        v = np.array([float(c) for c in fc.counts])
        v /= v.sum()
    lam = 1.0
    residual = float("inf")
    for _ in range(max_iter):
        w = mat @ v
        norm = w.sum()
        if norm == 0.0:
            break
        w /= norm
        lam = norm
        residual = np.abs(mat @ w - lam * w).sum() / max(lam, 1.0)
        delta = np.abs(w - v).sum()
        v = w
        if residual <= tol and delta <= tol:
            break
    letter_mass = sum(v[i] for i in fc.letter_rows)
    if letter_mass <= 0:
        raise NonConvergenceError("letter mass vanished in the limit vector")
    freqs = {b: float(v[i] / letter_mass) for i, b in enumerate(fc.blocks)}
    return freqs, float(residual)


# ---------------------------------------------------------------------------
# Stabilizing power and frequency limits

def _is_bounded_letter(structure: BlockStructure, s: Substitution, a) -> bool:
    reachable = _reachable_letters(s, a)
    return all(structure.block_of(x).kind == "bounded" for x in reachable)


def stabilizing_power(s: Substitution, cap: int = 16, osc_tol: float = 1e-2,
                      probe_budget: int = 10 ** 5, t_max: int = 64) -> int:
    """Least power s.t. frequencies of length-<=2 factors stabilize per letter.

    What the power must resolve is the letter-permutation action on bounded
    blocks and the period of imprimitive blocks; both show up as order-one
    oscillation of the probe frequencies, while resolved substitutions have
    probe differences decaying with the iterate length.  Bounded letters are
    checked exactly (the iterate sequence must become eventually fixed).
    """
    structure = block_structure(s)
    oscillating: list = []
    for exp in range(1, cap + 1):
        zeta = s.power(exp)
        oscillating = []
        for a in s.alphabet:
            if not _letter_stabilizes(zeta, structure, s, a, osc_tol, probe_budget, t_max):
                oscillating.append(a)
        if not oscillating:
            return exp
    raise CapExceededError(
        f"no stabilizing power up to {cap}; oscillating letters: {oscillating}")


def _letter_stabilizes(zeta: Substitution, structure: BlockStructure,
                       original: Substitution, a, osc_tol: float,
                       probe_budget: int, t_max: int) -> bool:
    if _is_bounded_letter(structure, original, a):
        # Bounded orbit: the word sequence must become eventually fixed.
        seen = {}
        w = (a,)
        for t in range(t_max):
            if w in seen:
                return False  # period > 1
            seen[w] = t
            nxt = zeta(w)
            if nxt == w:
                return True
        return False
    fc = FactorCounts(zeta, a, 2)
    prev = None
    diffs = []
    for _ in range(t_max):
        fc.step()
        freqs = fc.frequencies()
        if prev is not None:
            diff = max(abs(freqs.get(b, 0.0) - prev.get(b, 0.0))
                       for b in set(freqs) | set(prev))
            diffs.append(diff)
        prev = freqs
        if fc.length >= probe_budget:
            break
    tail = diffs[-3:]
    return bool(tail) and max(tail) < osc_tol


def frequency_limit(s: Substitution, a, w: Sequence, method: str = "direct",
                    budget: int = DEFAULT_SYMBOL_BUDGET, incr_tol: float = 1e-8,
                    t_max: int = 4096) -> float:
    """Limit frequency of the word w along iterates of the letter a.

    direct:   exact factor-count recursion; returns the empirical ratio at
              the first iterate of length >= budget, or earlier once two
              successive increments drop below ``incr_tol``.
    spectral: for single letters in a dominant primitive block, the
              normalized left Perron-Frobenius eigenvector entry.
    """
    w = tuple(w) if not isinstance(w, tuple) else w
    if not w:
        raise ValueError("word must be nonempty")
    if method == "direct":
        return _direct_frequency(s, a, w, budget, incr_tol, t_max)
    if method == "spectral":
        return _spectral_frequency(s, a, w)
    raise ValueError(f"unknown method {method!r}")


def _direct_frequency(s: Substitution, a, w: Tuple, budget: int,
                      incr_tol: float, t_max: int) -> float:
    fc = FactorCounts(s, a, len(w))
    if w not in fc.index:
        return 0.0
    prev_ratio = None
    small_steps = 0
    for _ in range(t_max):
        fc.step()
        n = fc.length
        ratio = fc.count(w) / n
        if n >= budget:
            return ratio
        if prev_ratio is not None:
            small_steps = small_steps + 1 if abs(ratio - prev_ratio) < incr_tol else 0
            if small_steps >= 2:
                return ratio
        prev_ratio = ratio
    raise NonConvergenceError(
        "direct frequency did not stabilize; was the stabilizing power applied?")


def _spectral_frequency(s: Substitution, a, w: Tuple) -> float:
    if len(w) != 1:
        raise NonDominantError("spectral frequencies are defined for single letters")
    structure = block_structure(s)
    home = structure.block_of(a)
    if home.kind != "primitive":
        raise NonDominantError(f"letter {a!r} is not in a primitive block")
    reachable = sorted(_reachable_letters(s, a), key=repr)
    for x in reachable:
        other = structure.block_of(x)
        if other.letters != home.letters and other.pf_eigenvalue >= home.pf_eigenvalue:
            raise NonDominantError(
                "a dependent block matches or exceeds the home eigenvalue")
    target = w[0]
    if target not in reachable:
        return 0.0
    mat = np.array(transition_matrix(s, reachable), dtype=float)
    n = len(reachable)
    shifted = mat.T + np.eye(n)
    v = np.full(n, 1.0 / n)
    for _ in range(200_000):
        u = shifted @ v
        u /= u.sum()
        residual = np.abs(mat.T @ u - (home.pf_eigenvalue) * u).sum()
        if residual <= 1e-13 * max(home.pf_eigenvalue, 1.0) * n:
            v = u
            break
        v = u
    v = np.maximum(v, 0.0)
    v /= v.sum()
    return float(v[reachable.index(target)])


@dataclass
class FrequencyTable:
    """Limit frequencies for (letter, word) pairs with the achieved residual."""

    entries: Dict[Tuple, float]
    residual: float

    def get(self, a, w: Sequence) -> float:
        return self.entries.get((a, tuple(w)), 0.0)


def frequency_table(s: Substitution, letters: Iterable, words: Iterable[Sequence],
                    method: str = "direct", **kwargs) -> FrequencyTable:
    """Tabulate frequency_limit over letters x words.

    The residual is the largest deviation of the per-letter length-1 mass
    from 1 (0.0 when no single letters are tabulated).
    """
    words = [tuple(w) for w in words]
    letters = list(letters)
    entries = {}
    for a in letters:
        for w in words:
            entries[(a, w)] = frequency_limit(s, a, w, method=method, **kwargs)
    residual = 0.0
    singles = [w for w in words if len(w) == 1]
    if set(x for (x,) in singles) >= set(s.alphabet):
        for a in letters:
            mass = sum(entries[(a, w)] for w in singles)
            residual = max(residual, abs(mass - 1.0))
    return FrequencyTable(entries, residual)
