"""The space of marked groups at desk scale.

A *marked-group oracle* is anything with a ``rank``, an ``evaluate(word)``
method returning an opaque element handle, and ``is_identity(handle)``.
Evaluation is the homomorphism from the rank-d free group fixed by the
marking.  Concrete oracles here: finite alternating groups with their
standard 2-marking, the alternating enrichment of the integers (finitely
supported even permutations extended by the shift), truncated diagonal
products of finite factors, and the trivial/free endpoints.

Two markings are compared through their ball-restricted kernels: nu is the
largest radius on which the kernels agree, and 2**-nu is the marked-group
distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .perms import GenTuple, Perm, alt_marking, word_eval
from .words import (DEFAULT_BALL_CAP, ReducedWord, enumerate_ball,
                    kernel_fingerprint)


# ---------------------------------------------------------------------------
# elements of the alternating enrichment of Z

@dataclass(frozen=True)
class AZElement:
    """(sigma, t): a finitely supported even permutation of Z and a shift.

    ``sigma`` is stored as a sorted tuple of (source, image) pairs with fixed
    points dropped, so equality and hashing are structural.  The pair acts on
    Z by x -> sigma(x + t).
    """

    sigma: tuple[tuple[int, int], ...]
    shift: int

    def as_dict(self) -> dict[int, int]:
        return dict(self.sigma)

    @property
    def is_identity(self) -> bool:
        return not self.sigma and self.shift == 0

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(n for n, _ in self.sigma))

    def sigma_parity(self) -> int:
        """Parity of the finitely supported permutation (0 even / 1 odd)."""
        s = self.as_dict()
        seen = set()
        parity = 0
        for start in s:
            if start in seen:
                continue
            length = 0
            x = start
            while x not in seen:
                seen.add(x)
                x = s[x]
                length += 1
            parity ^= (length - 1) % 2
        return parity

    def __mul__(self, other: "AZElement") -> "AZElement":
        # (sigma, t)(tau, s) = (sigma o (t.tau), t + s), (t.tau)(n) = tau(n-t)+t
        sig = self.as_dict()
        tau = other.as_dict()
        t = self.shift
        moved = {}
        for n in set(sig) | {m + t for m in tau}:
            mid = tau.get(n - t, n - t) + t
            out = sig.get(mid, mid)
            if out != n:
                moved[n] = out
        return AZElement(tuple(sorted(moved.items())), t + other.shift)

    def inverse(self) -> "AZElement":
        # (sigma, t)^{-1} = (sigma', -t) with sigma'(n) = sigma^{-1}(n + t) - t
        inv = {v: k for k, v in self.sigma}
        t = self.shift
        moved = {}
        for n in {k - t for k in inv}:
            out = inv.get(n + t, n + t) - t
            if out != n:
                moved[n] = out
        return AZElement(tuple(sorted(moved.items())), -t)

    def apply(self, x: int) -> int:
        """Action on the integers: x -> sigma(x + t)."""
        sig = self.as_dict()
        y = x + self.shift
        return sig.get(y, y)

    def __repr__(self) -> str:
        return f"AZElement(sigma={dict(self.sigma)}, shift={self.shift})"


AZ_IDENTITY = AZElement((), 0)


def az_shift(t: int) -> AZElement:
    return AZElement((), t)


def az_from_cycles(cycles, shift: int = 0) -> AZElement:
    moved = {}
    for cyc in cycles:
        for i, x in enumerate(cyc):
            y = cyc[(i + 1) % len(cyc)]
            if y != x:
                moved[x] = y
    elem = AZElement(tuple(sorted(moved.items())), shift)
    if elem.sigma_parity() != 0:
        raise ValueError("finitely supported part must be an even permutation")
    return elem


# ---------------------------------------------------------------------------
# oracles

class MarkedGroupOracle:
    """Base class; subclasses fix rank, evaluate and is_identity."""

    rank: int
    name: str

    def evaluate(self, word: ReducedWord):
        raise NotImplementedError

    def is_identity(self, handle) -> bool:
        raise NotImplementedError

    def word_is_identity(self, word: ReducedWord) -> bool:
        return self.is_identity(self.evaluate(word))

    def __repr__(self) -> str:
        return f"<oracle {self.name}>"


class TrivialOracle(MarkedGroupOracle):
    """The one-element group: every word dies."""

    def __init__(self, rank: int = 2):
        self.rank = rank
        self.name = "trivial"

    def evaluate(self, word):
        self._check(word)
        return None

    def is_identity(self, handle) -> bool:
        return True

    def _check(self, word):
        if word.rank != self.rank:
            raise ValueError("rank mismatch")


class FreeOracle(MarkedGroupOracle):
    """The free group marked by its own basis: only the empty word dies."""

    def __init__(self, rank: int = 2):
        self.rank = rank
        self.name = "free"

    def evaluate(self, word):
        if word.rank != self.rank:
            raise ValueError("rank mismatch")
        return word

    def is_identity(self, handle) -> bool:
        return handle.is_identity


class AltOracle(MarkedGroupOracle):
    """Alt on the integers of absolute value <= r with its standard 2-marking."""

    def __init__(self, r: int):
        self.r = r
        self.gens = alt_marking(r)
        self.rank = self.gens.rank
        self.name = f"alt:{r}"

    def evaluate(self, word) -> Perm:
        return word_eval(word, self.gens)

    def is_identity(self, handle) -> bool:
        return handle.is_identity


class AZOracle(MarkedGroupOracle):
    """The alternating enrichment of Z, marked by (shift, center 3-cycle)."""

    def __init__(self):
        self.rank = 2
        self.name = "az"
        self._gens = (az_shift(1), az_from_cycles([(-1, 0, 1)]))

    def letter_element(self, letter: int) -> AZElement:
        g = self._gens[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def evaluate(self, word) -> AZElement:
        if word.rank != self.rank:
            raise ValueError("rank mismatch")
        out = AZ_IDENTITY
        for letter in word.letters:
            out = out * self.letter_element(letter)
        return out

    def is_identity(self, handle) -> bool:
        return handle.is_identity


class DiagonalOracle(MarkedGroupOracle):
    """Coordinatewise evaluation in a finite list of marked finite factors."""

    def __init__(self, factors, name: str = "diagonal"):
        factors = tuple(factors)
        if not factors:
            raise ValueError("need at least one factor")
        rank = factors[0].rank
        if any(f.rank != rank for f in factors):
            raise ValueError("factors must share a rank")
        self.factors = factors
        self.rank = rank
        self.name = name

    def evaluate(self, word) -> tuple[Perm, ...]:
        return tuple(word_eval(word, f) for f in self.factors)

    def is_identity(self, handle) -> bool:
        return all(p.is_identity for p in handle)


def az_oracle() -> AZOracle:
    return AZOracle()


def alt_oracle(r: int) -> AltOracle:
    return AltOracle(r)


def diagonal_oracle(factors, name: str = "diagonal") -> DiagonalOracle:
    return DiagonalOracle(factors, name)


def oracle_by_name(text: str) -> MarkedGroupOracle:
    """CLI names: ``az``, ``alt:R``, ``neumann:OFFSET:LENGTH``, ``trivial``, ``free``."""
    parts = text.split(":")
    if parts[0] == "az":
        return az_oracle()
    if parts[0] == "alt" and len(parts) == 2:
        return alt_oracle(int(parts[1]))
    if parts[0] == "neumann" and len(parts) == 3:
        return neumann_truncation(int(parts[1]), int(parts[2])).oracle()
    if parts[0] == "trivial":
        return TrivialOracle()
    if parts[0] == "free":
        return FreeOracle()
    raise ValueError(f"unknown oracle name {text!r}")


# ---------------------------------------------------------------------------
# the marked-group metric

@dataclass(frozen=True)
class NuResult:
    """Largest radius (up to the scanned maximum) on which two kernels agree."""

    value: int
    saturated: bool  # true when the kernels agree on the whole scanned ball

    @property
    def distance(self) -> Fraction:
        """2**-value; an upper bound on the distance when saturated."""
        return Fraction(1, 2 ** self.value)

    def __str__(self) -> str:
        return f">= {self.value}" if self.saturated else str(self.value)


def _nu_from_kernels(k1: frozenset, k2: frozenset, r_max: int) -> NuResult:
    diff = k1 ^ k2
    if not diff:
        return NuResult(r_max, True)
    return NuResult(min(len(w) for w in diff) - 1, False)


def marked_nu(o1: MarkedGroupOracle, o2: MarkedGroupOracle, r_max: int,
              cap: int = DEFAULT_BALL_CAP) -> NuResult:
    """Compare two oracles' kernels on the ball of radius r_max.

    The kernels always agree at radius 0, so the result is >= 0.  Agreement
    at radius n implies agreement at every smaller radius, so a single
    symmetric-difference scan suffices.
    """
    if o1.rank != o2.rank:
        raise ValueError("rank mismatch")
    ball = enumerate_ball(o1.rank, r_max, cap=cap)
    k1 = kernel_fingerprint(o1, r_max, ball=ball).members
    k2 = kernel_fingerprint(o2, r_max, ball=ball).members
    return _nu_from_kernels(k1, k2, r_max)


def convergence_table(oracles, target: MarkedGroupOracle, r_max: int,
                      cap: int = DEFAULT_BALL_CAP) -> list[tuple[str, NuResult]]:
    """nu against a fixed target for each oracle in a sequence.

    The ball and the target kernel are computed once and shared.
    """
    oracles = list(oracles)
    if not oracles:
        return []
    ball = enumerate_ball(target.rank, r_max, cap=cap)
    target_kernel = kernel_fingerprint(target, r_max, ball=ball).members
    rows = []
    for o in oracles:
        if o.rank != target.rank:
            raise ValueError("rank mismatch")
        kernel = kernel_fingerprint(o, r_max, ball=ball).members
        rows.append((o.name, _nu_from_kernels(kernel, target_kernel, r_max)))
    return rows


# ---------------------------------------------------------------------------
# diagonal products and the tail homomorphism

def default_neumann_rates(m: int) -> int:
    return m + 2


@dataclass(frozen=True)
class TruncatedDiagonalProduct:
    """Finitely many marked finite factors with the diagonal marking.

    Stands in for an infinite diagonal product; the factor list is the
    truncation and evaluation is coordinatewise.
    """

    factors: tuple[GenTuple, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one factor")
        rank = self.factors[0].rank
        if any(f.rank != rank for f in self.factors):
            raise ValueError("factors must share a rank")

    @property
    def rank(self) -> int:
        return self.factors[0].rank

    def marking(self) -> tuple[tuple[Perm, ...], ...]:
        """The diagonal tuple: coordinate i collects generator i of every factor."""
        return tuple(tuple(f.perms[i] for f in self.factors)
                     for i in range(self.rank))

    def oracle(self, name: str | None = None) -> DiagonalOracle:
        return DiagonalOracle(self.factors, name or f"diagonal[{len(self.factors)}]")


def neumann_truncation(offset: int, length: int, rates=None) -> TruncatedDiagonalProduct:
    """Truncated diagonal product of alternating factors with shifted rates.

    Factor m (for m < length) is the alternating group of rank
    ``rates(m + offset)``; the default rate function is m -> m + 2.
    """
    if length < 1:
        raise ValueError("need at least one factor")
    if offset < 0:
        raise ValueError("offset must be >= 0")
    rates = rates or default_neumann_rates
    return TruncatedDiagonalProduct(
        tuple(alt_marking(rates(m + offset)) for m in range(length)))


@dataclass(frozen=True)
class TailDefectReport:
    word: ReducedWord
    trivial_in_target: bool
    defect: tuple[int, ...]  # factor indices where the word is nontrivial


def tail_defect(word: ReducedWord, product: TruncatedDiagonalProduct,
                target: MarkedGroupOracle) -> TailDefectReport:
    """Factor indices of a truncated diagonal product where a word survives.

    For words that die in the limit oracle the defect set is the computable
    shadow of the tail-homomorphism kernel: it must avoid all sufficiently
    deep factors.
    """
    if word.rank != product.rank or word.rank != target.rank:
        raise ValueError("rank mismatch")
    trivial = target.word_is_identity(word)
    defect = tuple(i for i, f in enumerate(product.factors)
                   if not word_eval(word, f).is_identity)
    return TailDefectReport(word, trivial, defect)
