"""Finite permutations, the normalized Hamming metric, and almost-solution checkers.

Permutations act on ``{0, ..., k-1}`` and compose like functions:
``(p * q)(x) == p(q(x))``, i.e. the right factor acts first.  All distances
are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .words import ReducedWord, WordSet


@dataclass(frozen=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self):
        k = len(self.images)
        seen = [False] * k
        for i in self.images:
            if not 0 <= i < k or seen[i]:
                raise ValueError(f"not a bijection of range({k}): {self.images}")
            seen[i] = True

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Perm") -> "Perm":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        im = self.images
        return Perm(tuple(im[x] for x in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for x, y in enumerate(self.images):
            inv[y] = x
        return Perm(tuple(inv))

    def __pow__(self, n: int) -> "Perm":
        base = self if n >= 0 else self.inverse()
        out = identity_perm(self.degree)
        for _ in range(abs(n)):
            out = base * out
        return out

    @property
    def is_identity(self) -> bool:
        return all(i == x for x, i in enumerate(self.images))

    def key(self) -> bytes:
        """Canonical byte encoding, used as dedup key in closures."""
        if self.degree < 256:
            return bytes(self.images)
        return b",".join(str(i).encode() for i in self.images)

    def fixed_count(self) -> int:
        return sum(1 for x, i in enumerate(self.images) if i == x)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least element."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def parity(self) -> int:
        """0 for even, 1 for odd."""
        return sum(len(c) - 1 for c in self.cycles()) % 2

    def order(self) -> int:
        out = 1
        for c in self.cycles():
            out = out * len(c) // gcd(out, len(c))
        return out

    def __repr__(self) -> str:
        return f"Perm({list(self.images)})"


def identity_perm(degree: int) -> Perm:
    return Perm(tuple(range(degree)))


def perm_from_cycles(degree: int, cycles) -> Perm:
    images = list(range(degree))
    for cyc in cycles:
        for i, x in enumerate(cyc):
            images[x] = cyc[(i + 1) % len(cyc)]
    return Perm(tuple(images))


def perm_to_line(p: Perm) -> str:
    return " ".join(str(i) for i in p.images)


def parse_perm(text: str, degree: int | None = None) -> Perm:
    """Parse either a one-line image array ("1 2 0") or cycles ("(0 1 2)(3 4)")."""
    text = text.strip()
    if text.startswith("("):
        if degree is None:
            raise ValueError("cycle notation needs an explicit degree")
        cycles = []
        for chunk in text.replace("(", " ").split(")"):
            entries = chunk.replace(",", " ").split()
            if entries:
                cycles.append(tuple(int(e) for e in entries))
        return perm_from_cycles(degree, cycles)
    images = tuple(int(e) for e in text.replace(",", " ").split())
    return Perm(images)


def hamming_distance(p: Perm, q: Perm) -> Fraction:
    """Normalized Hamming distance: the fraction of points where p and q differ."""
    if p.degree != q.degree:
        raise ValueError("degree mismatch")
    agree = sum(1 for a, b in zip(p.images, q.images) if a == b)
    return Fraction(p.degree - agree, p.degree)


@dataclass(frozen=True)
class GenTuple:
    """A d-tuple of permutations of a common finite set: a point of Sym(k)^d."""

    perms: tuple[Perm, ...]

    def __post_init__(self):
        if not self.perms:
            raise ValueError("need at least one generator")
        k = self.perms[0].degree
        if any(p.degree != k for p in self.perms):
            raise ValueError("generators must share a degree")

    @property
    def degree(self) -> int:
        return self.perms[0].degree

    @property
    def rank(self) -> int:
        return len(self.perms)

    def letter_perm(self, letter: int) -> Perm:
        p = self.perms[abs(letter) - 1]
        return p if letter > 0 else p.inverse()


def word_eval(word: ReducedWord, gens: GenTuple) -> Perm:
    """Evaluate a free-group word at the tuple; the result of the unique
    homomorphism extending the tuple."""
    if word.rank != gens.rank:
        raise ValueError(f"rank mismatch: word {word.rank} vs tuple {gens.rank}")
    out = identity_perm(gens.degree)
    for letter in word.letters:
        out = out * gens.letter_perm(letter)
    return out


def tuple_distance(a: GenTuple, b: GenTuple) -> Fraction:
    if a.degree != b.degree or a.rank != b.rank:
        raise ValueError("degree/rank mismatch")
    return sum((hamming_distance(p, q) for p, q in zip(a.perms, b.perms)),
               start=Fraction(0))


@dataclass(frozen=True)
class AlmostSolutionReport:
    distances: tuple[tuple[ReducedWord, Fraction], ...]
    max_distance: Fraction | None
    threshold: Fraction
    passed: bool


@dataclass(frozen=True)
class SeparationReport:
    distances: tuple[tuple[ReducedWord, Fraction], ...]
    min_distance: Fraction | None
    threshold: Fraction
    passed: bool


def _as_words(words) -> tuple[ReducedWord, ...]:
    if isinstance(words, WordSet):
        return words.sorted_words()
    return tuple(words)


def check_almost_solution(gens: GenTuple, relators, delta) -> AlmostSolutionReport:
    """Check that every relator evaluates within Hamming distance < delta of the identity."""
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    ident = identity_perm(gens.degree)
    dists = tuple((w, hamming_distance(word_eval(w, gens), ident))
                  for w in _as_words(relators))
    max_d = max((d for _, d in dists), default=None)
    passed = all(d < delta for _, d in dists)
    return AlmostSolutionReport(dists, max_d, delta, passed)


def check_separating(gens: GenTuple, witnesses, delta) -> SeparationReport:
    """Check that every witness word evaluates at Hamming distance > 1 - delta
    from the identity; vacuously true on the empty set."""
    delta = Fraction(delta)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    ident = identity_perm(gens.degree)
    dists = tuple((w, hamming_distance(word_eval(w, gens), ident))
                  for w in _as_words(witnesses))
    min_d = min((d for _, d in dists), default=None)
    passed = all(d > 1 - delta for _, d in dists)
    return SeparationReport(dists, min_d, delta, passed)


@dataclass(frozen=True)
class ClosureResult:
    elements: tuple[Perm, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.elements)


def generate_closure(gens: GenTuple, cap: int = 10**7) -> ClosureResult:
    """BFS closure of the generated permutation group, in a deterministic order.

    Complete when the group has at most ``cap`` elements; otherwise the result
    is truncated and flagged, not an error.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    start = identity_perm(gens.degree)
    seen = {start.key()}
    elements = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens.perms:
                h = g * s
                k = h.key()
                if k not in seen:
                    if len(elements) >= cap:
                        return ClosureResult(tuple(elements), True)
                    seen.add(k)
                    elements.append(h)
                    nxt.append(h)
        frontier = nxt
    return ClosureResult(tuple(elements), False)


def alt_marking(r: int) -> GenTuple:
    """The 2-marking of the alternating group on the 2r+1 integers of absolute
    value <= r: a full forward cycle together with the 3-cycle at the center.

    Points are relabeled to 0..2r (integer n maps to index n + r).
    """
    if r < 2:
        raise ValueError("need r >= 2")
    k = 2 * r + 1
    alpha = Perm(tuple((i + 1) % k for i in range(k)))
    beta = perm_from_cycles(k, [(r - 1, r, r + 1)])
    return GenTuple((alpha, beta))
