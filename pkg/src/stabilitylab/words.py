"""Reduced words in a finite-rank free group, metric balls, kernel fingerprints.

A letter is a nonzero integer: ``i`` (with ``1 <= i <= rank``) is the i-th
generator and ``-i`` its inverse.  Words serialize as strings: generator ``i``
prints as the i-th lowercase latin letter, its inverse as the uppercase one,
and the empty word as ``"e"``.  All values here are immutable and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_RANK = 26
DEFAULT_BALL_CAP = 10**6


class ResourceLimitError(RuntimeError):
    """A configured size cap (ball size, closure size, depth, ...) would be exceeded."""


def reduce_letters(letters) -> tuple[int, ...]:
    """Freely reduce a letter sequence (cancel adjacent inverse pairs)."""
    out: list[int] = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def _letter_key(letter: int) -> int:
    # a < A < b < B < ...
    return 2 * abs(letter) - (1 if letter > 0 else 0)


@dataclass(frozen=True)
class ReducedWord:
    """A freely reduced word over the free group of the given rank."""

    rank: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.rank <= MAX_RANK:
            raise ValueError(f"rank must be in 1..{MAX_RANK}, got {self.rank}")
        for letter in self.letters:
            if letter == 0 or abs(letter) > self.rank:
                raise ValueError(f"invalid letter {letter} for rank {self.rank}")
        for x, y in zip(self.letters, self.letters[1:]):
            if x == -y:
                raise ValueError(f"letter sequence {self.letters} is not freely reduced")

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        return ReducedWord(self.rank, reduce_letters(self.letters + other.letters))

    def inverse(self) -> "ReducedWord":
        return ReducedWord(self.rank, tuple(-l for l in reversed(self.letters)))

    def __pow__(self, n: int) -> "ReducedWord":
        base = self if n >= 0 else self.inverse()
        out = identity(self.rank)
        for _ in range(abs(n)):
            out = out * base
        return out

    def sort_key(self):
        """Length-lexicographic key; generators sort before their inverses."""
        return (len(self.letters), tuple(_letter_key(l) for l in self.letters))

    def __str__(self) -> str:
        return word_to_string(self)

    def __repr__(self) -> str:
        return f"ReducedWord({self.rank}, {word_to_string(self)!r})"


def identity(rank: int) -> ReducedWord:
    return ReducedWord(rank, ())


def reduce(rank: int, letters) -> ReducedWord:
    """Build the reduced word represented by an arbitrary letter sequence."""
    for letter in letters:
        if letter == 0 or abs(letter) > rank:
            raise ValueError(f"invalid letter {letter} for rank {rank}")
    return ReducedWord(rank, reduce_letters(letters))


def word_to_string(word: ReducedWord) -> str:
    if word.is_identity:
        return "e"
    chars = []
    for letter in word.letters:
        i = abs(letter) - 1
        chars.append(chr(ord("a") + i) if letter > 0 else chr(ord("A") + i))
    return "".join(chars)


def word_from_string(text: str, rank: int) -> ReducedWord:
    """Parse a word string (``"abA"``-style, ``"e"`` for the identity) and reduce it."""
    text = text.strip()
    if text in ("", "e"):
        return identity(rank)
    letters = []
    for ch in text:
        if "a" <= ch <= "z":
            letters.append(ord(ch) - ord("a") + 1)
        elif "A" <= ch <= "Z":
            letters.append(-(ord(ch) - ord("A") + 1))
        else:
            raise ValueError(f"invalid word character {ch!r}")
    return reduce(rank, letters)


def ball_size(rank: int, radius: int) -> int:
    """Number of reduced words of length <= radius: 1 + sum 2d(2d-1)^(k-1)."""
    d = rank
    return 1 + sum(2 * d * (2 * d - 1) ** (k - 1) for k in range(1, radius + 1))


@dataclass(frozen=True)
class Ball:
    """All reduced words of length <= radius, in length-lexicographic order."""

    rank: int
    radius: int
    words: tuple[ReducedWord, ...]

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)


def enumerate_ball(rank: int, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
    """Enumerate the closed ball of the given radius in the rank-d free group.

    Raises ResourceLimitError if the closed-form size would exceed ``cap``.
    """
    if rank < 1 or radius < 0:
        raise ValueError("need rank >= 1 and radius >= 0")
    size = ball_size(rank, radius)
    if size > cap:
        raise ResourceLimitError(f"ball of size {size} exceeds cap {cap}")
    letter_order = [l for i in range(1, rank + 1) for l in (i, -i)]
    words: list[ReducedWord] = [identity(rank)]
    level: list[tuple[int, ...]] = [()]
    for _ in range(radius):
        nxt: list[tuple[int, ...]] = []
        for parent in level:
            last = parent[-1] if parent else 0
            for letter in letter_order:
                if letter != -last:
                    nxt.append(parent + (letter,))
        words.extend(ReducedWord(rank, ls) for ls in nxt)
        level = nxt
    assert len(words) == size
    return Ball(rank, radius, tuple(words))


def ball_lines(ball: Ball) -> str:
    """Line-delimited text dump of a ball, one word string per line."""
    return "\n".join(word_to_string(w) for w in ball.words) + "\n"


@dataclass(frozen=True)
class WordSet:
    """A set of reduced words, all of length <= radius."""

    radius: int
    members: frozenset

    def __post_init__(self):
        for w in self.members:
            if len(w) > self.radius:
                raise ValueError(f"word {w} longer than radius {self.radius}")

    def __contains__(self, word) -> bool:
        return word in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted_words(self) -> tuple[ReducedWord, ...]:
        return tuple(sorted(self.members, key=ReducedWord.sort_key))

    def restrict(self, radius: int) -> "WordSet":
        if radius > self.radius:
            raise ValueError("can only restrict to a smaller radius")
        return WordSet(radius, frozenset(w for w in self.members if len(w) <= radius))


def kernel_fingerprint(oracle, radius: int, ball: Ball | None = None,
                       cap: int = DEFAULT_BALL_CAP) -> WordSet:
    """Ball words that the marked-group oracle evaluates to the identity.

    ``oracle`` needs ``rank``, ``evaluate(word)`` and ``is_identity(handle)``.
    The result contains the empty word and is closed under inversion and under
    products that stay inside the ball.
    """
    if ball is None:
        ball = enumerate_ball(oracle.rank, radius, cap=cap)
    if ball.rank != oracle.rank:
        raise ValueError(f"rank mismatch: ball {ball.rank} vs oracle {oracle.rank}")
    if ball.radius < radius:
        raise ValueError("ball radius smaller than requested fingerprint radius")
    members = frozenset(
        w for w in ball.words
        if len(w) <= radius and oracle.is_identity(oracle.evaluate(w))
    )
    return WordSet(radius, members)
