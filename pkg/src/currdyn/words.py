"""Words, cyclic words and automorphisms of a free group of rank N >= 2.

Letters are nonzero signed integers: ``+(i+1)`` is the i-th positive
generator and ``-(i+1)`` its inverse.  In text form generators are single
lowercase letters and inverses the corresponding uppercase letters, so
``a`` <-> ``+1``, ``A`` <-> ``-1``, ``b`` <-> ``+2`` and so on.

All values are immutable after construction; operations are pure.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import LengthCapError, ParseError, RankMismatchError, TrivialWordError


class Generator(NamedTuple):
    """A signed generator: index in [0, N) and sign +1 or -1."""

    index: int
    sign: int

    def inverse(self) -> "Generator":
        return Generator(self.index, -self.sign)

    @property
    def code(self) -> int:
        return self.sign * (self.index + 1)

    @staticmethod
    def from_code(code: int) -> "Generator":
        if code == 0:
            raise ValueError("letter code must be nonzero")
        return Generator(abs(code) - 1, 1 if code > 0 else -1)


def letter_key(code: int) -> int:
    """Total order on letters: a < a^-1 < b < b^-1 < ..."""
    return 2 * (abs(code) - 1) + (0 if code > 0 else 1)


def letter_to_char(code: int) -> str:
    index = abs(code) - 1
    if index >= 26:
        return f"x{index}" if code > 0 else f"X{index}"
    ch = chr(ord("a") + index)
    return ch if code > 0 else ch.upper()


def char_to_letter(ch: str) -> int:
    if len(ch) != 1 or not ch.isalpha():
        raise ValueError(f"not a generator character: {ch!r}")
    if ch.islower():
        return ord(ch) - ord("a") + 1
    return -(ord(ch.lower()) - ord("a") + 1)


def _reduce_codes(codes: Iterable[int]) -> list:
    out = []
    for c in codes:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return out


def _invert_codes(codes: Sequence[int]) -> tuple:
    return tuple(-c for c in reversed(codes))


def _string_to_codes(text: str) -> tuple:
    return tuple(char_to_letter(ch) for ch in text)


class Word:
    """A finite sequence of letters with a reducedness flag."""

    __slots__ = ("letters", "reduced")

    def __init__(self, letters=(), reduced: bool = False):
        if isinstance(letters, str):
            letters = _string_to_codes(letters)
        else:
            letters = tuple(letters)
        if any(c == 0 for c in letters):
            raise ValueError("letter codes must be nonzero")
        self.letters = letters
        self.reduced = reduced or _is_reduced(letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(("Word", self.letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(_reduce_codes(self.letters + other.letters), reduced=True) \
            if (self.reduced and other.reduced) else reduce(Word(self.letters + other.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        result = Word((), reduced=True)
        for _ in range(n):
            result = result * self
        return result

    def inverse(self) -> "Word":
        return Word(_invert_codes(self.letters), reduced=self.reduced)

    def is_trivial(self) -> bool:
        return not reduce(self).letters

    def __str__(self) -> str:
        return "".join(letter_to_char(c) for c in self.letters) or "1"

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


def _is_reduced(codes: Sequence[int]) -> bool:
    return all(codes[i] != -codes[i + 1] for i in range(len(codes) - 1))


def reduce(w: Word) -> Word:
    """The unique reduced word freely equal to w.  Idempotent."""
    if w.reduced:
        return w
    return Word(_reduce_codes(w.letters), reduced=True)


def _least_rotation(keys: Sequence[int]) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm)."""
    s = list(keys) + list(keys)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


class CyclicWord:
    """A cyclically reduced word up to rotation.

    Equality and hashing go through the lexicographically least rotation
    under the letter order a < a^-1 < b < b^-1 < ...; the canonical
    rotation is computed lazily and cached.
    """

    __slots__ = ("letters", "_canon")

    def __init__(self, letters):
        if isinstance(letters, Word):
            letters = letters.letters
        elif isinstance(letters, str):
            letters = _string_to_codes(letters)
        letters = tuple(_reduce_codes(letters))
        while len(letters) >= 2 and letters[0] == -letters[-1]:
            letters = letters[1:-1]
        if not letters:
            raise TrivialWordError("cyclic word is trivial")
        self.letters = letters
        self._canon = None

    @property
    def canonical_rotation(self) -> tuple:
        if self._canon is None:
            k = _least_rotation([letter_key(c) for c in self.letters])
            self._canon = self.letters[k:] + self.letters[:k]
        return self._canon

    def __len__(self) -> int:
        return len(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, CyclicWord) and self.canonical_rotation == other.canonical_rotation

    def __hash__(self) -> int:
        return hash(("CyclicWord", self.canonical_rotation))

    def inverse(self) -> "CyclicWord":
        return CyclicWord(_invert_codes(self.letters))

    def to_word(self) -> Word:
        return Word(self.canonical_rotation, reduced=True)

    def __str__(self) -> str:
        return "".join(letter_to_char(c) for c in self.canonical_rotation)

    def __repr__(self) -> str:
        return f"CyclicWord({str(self)!r})"


def cyclic_reduce(w: Word) -> tuple:
    """Split w = conjugator . cyclic . conjugator^-1 with cyclic a CyclicWord.

    Raises TrivialWordError if w reduces to the empty word.
    """
    letters = list(reduce(w).letters)
    if not letters:
        raise TrivialWordError("cannot cyclically reduce the trivial word")
    prefix = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        prefix.append(letters[0])
        letters = letters[1:-1]
    return CyclicWord(tuple(letters)), Word(tuple(prefix), reduced=True)


class Automorphism:
    """An automorphism given by images of the positive generators.

    Inverses are supplied, never computed: pass ``inverse_images`` to get a
    validated two-sided inverse (composition in both orders must fix every
    generator).
    """

    def __init__(self, rank: int, images: dict, inverse_images: Optional[dict] = None):
        if rank < 1:
            raise ValueError("rank must be at least 1")
        self.rank = rank
        self._table = self._build_table(rank, images)
        self.images = {g: Word(self._table[g], reduced=True) for g in range(1, rank + 1)}
        self.inverse_images = None
        self._inverse_table = None
        if inverse_images is not None:
            self._inverse_table = self._build_table(rank, inverse_images)
            self.inverse_images = {
                g: Word(self._inverse_table[g], reduced=True) for g in range(1, rank + 1)
            }
            self._validate_inverse()

    @staticmethod
    def _build_table(rank: int, images: dict) -> dict:
        table = {}
        for g in range(1, rank + 1):
            img = images.get(g)
            if img is None:
                raise ValueError(f"missing image for generator {letter_to_char(g)}")
            codes = tuple(_reduce_codes(img.letters if isinstance(img, Word) else
                                        _string_to_codes(img) if isinstance(img, str) else img))
            if not codes:
                raise ValueError(f"image of {letter_to_char(g)} is trivial")
            if any(abs(c) > rank for c in codes):
                raise RankMismatchError("image uses a generator beyond the rank")
            table[g] = codes
            table[-g] = _invert_codes(codes)
        return table

    def _validate_inverse(self):
        for g in range(1, self.rank + 1):
            fwd = _apply_table(self._table, self._inverse_table[g])
            bwd = _apply_table(self._inverse_table, self._table[g])
            if fwd != [g] or bwd != [g]:
                raise ValueError(
                    f"inverse images do not invert the automorphism at {letter_to_char(g)}")

    @staticmethod
    def identity(rank: int) -> "Automorphism":
        images = {g: (g,) for g in range(1, rank + 1)}
        return Automorphism(rank, images, inverse_images=images)

    def has_inverse(self) -> bool:
        return self._inverse_table is not None

    def inverse(self) -> "Automorphism":
        if self._inverse_table is None:
            raise ValueError("no inverse images were supplied")
        return Automorphism(
            self.rank,
            {g: self._inverse_table[g] for g in range(1, self.rank + 1)},
            inverse_images={g: self._table[g] for g in range(1, self.rank + 1)},
        )

    def __eq__(self, other) -> bool:
        return (isinstance(other, Automorphism) and self.rank == other.rank
                and all(self._table[g] == other._table[g] for g in range(1, self.rank + 1)))

    def __repr__(self) -> str:
        maps = ", ".join(
            f"{letter_to_char(g)}->{self.images[g]}" for g in range(1, self.rank + 1))
        return f"Automorphism({maps})"


def _apply_table(table: dict, codes: Sequence[int], budget: Optional[int] = None) -> list:
    """Image of a reduced code sequence under a letter-image table, reduced.

    Cancellation can only happen at junctions between consecutive letter
    images, so a single stack pass with per-image boundary cancellation
    suffices.
    """
    out = []
    for c in codes:
        img = table[c]
        i, n = 0, len(img)
        while out and i < n and out[-1] == -img[i]:
            out.pop()
            i += 1
        if budget is not None and len(out) + (n - i) > budget:
            raise LengthCapError(f"image exceeds the symbol budget {budget}")
        out.extend(img[i:])
    return out


def apply(phi: Automorphism, w: Word, budget: Optional[int] = None) -> Word:
    """The reduced image of w under phi."""
    return Word(_apply_table(phi._table, reduce(w).letters, budget), reduced=True)


def apply_cyclic(phi: Automorphism, c: CyclicWord, budget: Optional[int] = None) -> CyclicWord:
    """Image of a conjugacy class: apply to a representative, cyclically reduce."""
    return CyclicWord(_apply_table(phi._table, c.letters, budget))


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """The automorphism (phi o psi)(g) = phi(psi(g))."""
    if phi.rank != psi.rank:
        raise RankMismatchError(f"ranks differ: {phi.rank} vs {psi.rank}")
    images = {g: tuple(_apply_table(phi._table, psi._table[g]))
              for g in range(1, phi.rank + 1)}
    inverse_images = None
    if phi.has_inverse() and psi.has_inverse():
        inverse_images = {g: tuple(_apply_table(psi._inverse_table, phi._inverse_table[g]))
                          for g in range(1, phi.rank + 1)}
    return Automorphism(phi.rank, images, inverse_images=inverse_images)


def power_apply(phi: Automorphism, w: Word, n: int, budget: Optional[int] = None) -> Word:
    """n-fold application with intermediate reduction; n >= 0."""
    if n < 0:
        raise ValueError("power must be nonnegative; apply the inverse instead")
    codes = list(reduce(w).letters)
    for _ in range(n):
        codes = _apply_table(phi._table, codes, budget)
    return Word(tuple(codes), reduced=True)


def conjugacy_equal(u: CyclicWord, v: CyclicWord, oriented: bool = True) -> bool:
    """Equality of conjugacy classes; oriented=False also identifies w with w^-1."""
    if len(u) != len(v):
        return False
    if u.canonical_rotation == v.canonical_rotation:
        return True
    if not oriented:
        return u.inverse().canonical_rotation == v.canonical_rotation
    return False


# ---------------------------------------------------------------------------
# Text format:  one mapping per line, `a -> a b`; inverses uppercase or
# `a^-1` (emitted as uppercase); optional second block headed `inverse:`.

def _parse_image_tokens(tokens, lineno) -> list:
    codes = []
    for tok in tokens:
        rest = tok
        while rest:
            ch = rest[0]
            if not ch.isalpha():
                raise ParseError(f"bad generator token {tok!r}", line=lineno)
            if rest[1:4] == "^-1":
                codes.append(-abs(char_to_letter(ch)))
                rest = rest[4:]
            else:
                codes.append(char_to_letter(ch))
                rest = rest[1:]
    return codes


def _parse_mapping_block(lines) -> dict:
    images = {}
    for lineno, line in lines:
        if "->" not in line:
            raise ParseError("expected `x -> image`", line=lineno)
        lhs, rhs = line.split("->", 1)
        lhs = lhs.strip()
        if len(lhs) != 1 or not lhs.islower():
            raise ParseError(f"left side must be a single lowercase generator, got {lhs!r}",
                             line=lineno)
        tokens = rhs.split()
        if not tokens:
            raise ParseError(f"empty image for generator {lhs!r}", line=lineno)
        g = char_to_letter(lhs)
        if g in images:
            raise ParseError(f"duplicate mapping for {lhs!r}", line=lineno)
        images[g] = _parse_image_tokens(tokens, lineno)
    return images


def parse_automorphism(text: str) -> Automorphism:
    """Parse the automorphism text format; validates an inverse block if present."""
    main, inverse = [], []
    current = main
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "inverse:":
            current = inverse
            continue
        current.append((lineno, line))
    images = _parse_mapping_block(main)
    if not images:
        raise ParseError("no generator mappings found")
    rank = max(max(abs(g) for g in images),
               max((abs(c) for img in images.values() for c in img), default=1))
    if sorted(images) != list(range(1, rank + 1)):
        missing = [letter_to_char(g) for g in range(1, rank + 1) if g not in images]
        raise ParseError(f"missing mappings for generators: {', '.join(missing)}")
    inverse_images = None
    if inverse:
        inverse_images = _parse_mapping_block(inverse)
        if sorted(inverse_images) != list(range(1, rank + 1)):
            raise ParseError("inverse block must map every generator")
    return Automorphism(rank, images, inverse_images=inverse_images)


def format_automorphism(phi: Automorphism) -> str:
    """Emit the text format, inverses as uppercase letters."""
    lines = [f"{letter_to_char(g)} -> " + " ".join(letter_to_char(c) for c in phi._table[g])
             for g in range(1, phi.rank + 1)]
    if phi.has_inverse():
        lines.append("inverse:")
        lines.extend(
            f"{letter_to_char(g)} -> " + " ".join(letter_to_char(c) for c in phi._inverse_table[g])
            for g in range(1, phi.rank + 1))
    return "\n".join(lines) + "\n"
