"""Invariant random subgroups of finite actions, made computable.

An IRS is observed only through its radius-r marginal: the distribution of
*cylinder fingerprints* W = (stabilizer) intersected with the ball B(r) of the
free group.  Exact distributions carry Fraction masses; sampled ones carry
float masses with a sample count and per-fingerprint standard errors.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .perms import GenTuple, Perm, alt_marking, identity_perm, word_eval
from .words import (Ball, ReducedWord, ResourceLimitError, enumerate_ball,
                    identity, word_from_string, word_to_string)


@dataclass(frozen=True)
class CylinderFingerprint:
    """The ball words lying in a subgroup (equivalently fixing a point)."""

    radius: int
    words: tuple[ReducedWord, ...]

    def __post_init__(self):
        if not self.words or not self.words[0].is_identity:
            raise ValueError("a fingerprint must contain the empty word first")
        for word in self.words:
            if len(word) > self.radius:
                raise ValueError(f"word {word} exceeds radius {self.radius}")

    @classmethod
    def from_words(cls, radius: int, words) -> "CylinderFingerprint":
        return cls(radius, tuple(sorted(set(words), key=ReducedWord.sort_key)))

    def __contains__(self, word) -> bool:
        return word in set(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def restrict(self, radius: int) -> "CylinderFingerprint":
        if radius > self.radius:
            raise ValueError("can only restrict to a smaller radius")
        return CylinderFingerprint(
            radius, tuple(w for w in self.words if len(w) <= radius))

    def validate(self) -> None:
        """Check closure invariants: inverses, and products staying in the ball."""
        members = set(self.words)
        for w in members:
            if w.inverse() not in members:
                raise ValueError(f"fingerprint not inverse-closed at {w}")
        for u in members:
            for v in members:
                prod = u * v
                if len(prod) <= self.radius and prod not in members:
                    raise ValueError(f"fingerprint not product-closed at {u}*{v}")

    def sort_key(self):
        return (len(self.words), tuple(w.sort_key() for w in self.words))

    def __repr__(self) -> str:
        return "Fingerprint{%s}" % ",".join(word_to_string(w) for w in self.words)


class EmpiricalIRS:
    """A probability distribution over cylinder fingerprints at one radius."""

    def __init__(self, radius: int, masses: dict, exact: bool,
                 n_samples: int | None = None, stderrs: dict | None = None,
                 sum_tolerance: float = 1e-12):
        for fp in masses:
            if fp.radius != radius:
                raise ValueError("fingerprint radius mismatch")
        if any(m < 0 for m in masses.values()):
            raise ValueError("masses must be nonnegative")
        total = sum(masses.values())
        if exact:
            if total != 1:
                raise ValueError(f"exact masses must sum to 1, got {total}")
        elif abs(total - 1) > sum_tolerance:
            raise ValueError(f"masses sum to {total}, off by more than {sum_tolerance}")
        self.radius = radius
        self.masses = dict(masses)
        self.exact = exact
        self.n_samples = n_samples
        self.stderrs = dict(stderrs) if stderrs else None

    def mass(self, fp: CylinderFingerprint):
        return self.masses.get(fp, Fraction(0) if self.exact else 0.0)

    def support(self) -> list[CylinderFingerprint]:
        return sorted((fp for fp, m in self.masses.items() if m > 0),
                      key=CylinderFingerprint.sort_key)

    def restrict(self, radius: int) -> "EmpiricalIRS":
        merged: dict = {}
        for fp, m in self.masses.items():
            small = fp.restrict(radius)
            merged[small] = merged.get(small, Fraction(0) if self.exact else 0.0) + m
        stderrs = None
        if self.n_samples:
            stderrs = {fp: _stderr(float(m), self.n_samples) for fp, m in merged.items()}
        return EmpiricalIRS(radius, merged, self.exact, self.n_samples, stderrs,
                            sum_tolerance=math.inf if not self.exact else 1e-12)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmpiricalIRS):
            return NotImplemented
        mine = {fp: m for fp, m in self.masses.items() if m > 0}
        theirs = {fp: m for fp, m in other.masses.items() if m > 0}
        return self.radius == other.radius and mine == theirs

    def to_json_lines(self) -> str:
        lines = []
        for fp in self.support():
            m = self.masses[fp]
            entry = {
                "r": self.radius,
                "W": [word_to_string(w) for w in fp.words],
                "mass": f"{m.numerator}/{m.denominator}" if self.exact else float(m),
            }
            if self.stderrs is not None:
                entry["stderr"] = self.stderrs.get(fp, 0.0)
            if self.n_samples is not None:
                entry["n_samples"] = self.n_samples
            lines.append(json.dumps(entry))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json_lines(cls, text: str, rank: int = 2) -> "EmpiricalIRS":
        masses: dict = {}
        stderrs: dict = {}
        radius = None
        n_samples = None
        exact = True
        for line in text.splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            radius = entry["r"]
            fp = CylinderFingerprint.from_words(
                radius, [word_from_string(t, rank) for t in entry["W"]])
            mass = entry["mass"]
            if isinstance(mass, str):
                num, den = mass.split("/")
                masses[fp] = Fraction(int(num), int(den))
            else:
                masses[fp] = float(mass)
                exact = False
            if "stderr" in entry:
                stderrs[fp] = entry["stderr"]
            n_samples = entry.get("n_samples", n_samples)
        if radius is None:
            raise ValueError("no fingerprints in input")
        return cls(radius, masses, exact, n_samples, stderrs or None,
                   sum_tolerance=math.inf)


def _stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


# ---------------------------------------------------------------------------
# finite F-sets and their associated IRS

@dataclass(frozen=True)
class FiniteGSet:
    """A finite set with a free-group action given by a permutation tuple."""

    action: GenTuple

    @property
    def size(self) -> int:
        return self.action.degree

    @property
    def rank(self) -> int:
        return self.action.rank


def trivial_gset(rank: int, size: int) -> FiniteGSet:
    return FiniteGSet(GenTuple(tuple(identity_perm(size) for _ in range(rank))))


def disjoint_union(*gsets: FiniteGSet) -> FiniteGSet:
    if not gsets:
        raise ValueError("need at least one part")
    rank = gsets[0].rank
    if any(g.rank != rank for g in gsets):
        raise ValueError("parts must share a rank")
    total = sum(g.size for g in gsets)
    perms = []
    for i in range(rank):
        images = []
        offset = 0
        for g in gsets:
            images.extend(offset + y for y in g.action.perms[i].images)
            offset += g.size
        perms.append(Perm(tuple(images)))
    assert offset == total
    return FiniteGSet(GenTuple(tuple(perms)))


def relabel(gset: FiniteGSet, rho: Perm) -> FiniteGSet:
    """Conjugate the action by a relabeling of the points."""
    if rho.degree != gset.size:
        raise ValueError("degree mismatch")
    rho_inv = rho.inverse()
    return FiniteGSet(GenTuple(tuple(rho * p * rho_inv for p in gset.action.perms)))


def gset_to_json(gset: FiniteGSet) -> str:
    return json.dumps({"size": gset.size,
                       "generators": [list(p.images) for p in gset.action.perms]})


def gset_from_json(text: str) -> FiniteGSet:
    data = json.loads(text)
    perms = tuple(Perm(tuple(images)) for images in data["generators"])
    gset = FiniteGSet(GenTuple(perms))
    if gset.size != data["size"]:
        raise ValueError("size field disagrees with generator degrees")
    return gset


def _ball_perms(action: GenTuple, ball: Ball) -> list[Perm]:
    if ball.rank != action.rank:
        raise ValueError("rank mismatch")
    return [word_eval(w, action) for w in ball.words]


def fingerprint(action: GenTuple, x: int, ball: Ball) -> CylinderFingerprint:
    """Stabilizer fingerprint of one point: the ball words fixing it."""
    if not 0 <= x < action.degree:
        raise ValueError(f"point {x} outside range({action.degree})")
    perms = _ball_perms(action, ball)
    return CylinderFingerprint.from_words(
        ball.radius, [w for w, p in zip(ball.words, perms) if p(x) == x])


def irs_of_gset(gset: FiniteGSet, radius: int, ball: Ball | None = None) -> EmpiricalIRS:
    """Exact stabilizer-fingerprint distribution of the uniform point measure."""
    if ball is None:
        ball = enumerate_ball(gset.rank, radius)
    perms = _ball_perms(gset.action, ball)
    counts: dict[tuple, int] = {}
    for x in range(gset.size):
        key = tuple(p(x) == x for p in perms)
        counts[key] = counts.get(key, 0) + 1
    masses = {}
    for key, count in counts.items():
        fp = CylinderFingerprint.from_words(
            radius, [w for w, fixed in zip(ball.words, key) if fixed])
        masses[fp] = masses.get(fp, Fraction(0)) + Fraction(count, gset.size)
    return EmpiricalIRS(radius, masses, exact=True)


def mixture(parts) -> EmpiricalIRS:
    """Convex combination of fingerprint distributions of a common radius."""
    parts = [(irs, Fraction(weight)) for irs, weight in parts]
    if not parts:
        raise ValueError("need at least one part")
    radius = parts[0][0].radius
    if any(irs.radius != radius for irs, _ in parts):
        raise ValueError("radius mismatch between mixture parts")
    weights = [wt for _, wt in parts]
    if any(wt < 0 for wt in weights) or sum(weights) != 1:
        raise ValueError("weights must be nonnegative and sum to 1")
    exact = all(irs.exact for irs, _ in parts)
    zero = Fraction(0) if exact else 0.0
    masses: dict = {}
    for irs, wt in parts:
        if wt == 0:
            continue
        for fp, m in irs.masses.items():
            masses[fp] = masses.get(fp, zero) + (wt if exact else float(wt)) * m
    return EmpiricalIRS(radius, masses, exact,
                        sum_tolerance=1e-9 if not exact else 1e-12)


def pad_gset(gset: FiniteGSet, target_size: int) -> FiniteGSet:
    """Grow a finite action to a prescribed size without moving its IRS far:
    q whole copies plus a trivial remainder, target = q*|X| + remainder."""
    if target_size < gset.size:
        raise ValueError(f"target size {target_size} below |X| = {gset.size}")
    q, r = divmod(target_size, gset.size)
    parts = [gset] * q
    if r:
        parts.append(trivial_gset(gset.rank, r))
    return disjoint_union(*parts)


def point_mass_irs(rank: int, radius: int, full: bool,
                   ball: Ball | None = None) -> EmpiricalIRS:
    """Point mass on the whole group (full ball) or on the trivial subgroup."""
    if ball is None:
        ball = enumerate_ball(rank, radius)
    words = ball.words if full else (identity(rank),)
    fp = CylinderFingerprint.from_words(radius, words)
    return EmpiricalIRS(radius, {fp: Fraction(1)}, exact=True)


# ---------------------------------------------------------------------------
# atomic IRS realized by coset actions

def subgroup_closure(generators, size_cap: int = 10**6) -> frozenset:
    """Closure of a set of permutations under multiplication."""
    gens = list(generators)
    if not gens:
        raise ValueError("pass at least one permutation (the identity for the "
                         "trivial subgroup)")
    seen = {identity_perm(gens[0].degree)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if h not in seen:
                    if len(seen) >= size_cap:
                        raise ResourceLimitError("subgroup closure exceeds cap")
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return frozenset(seen)


def coset_action(elements, marking: GenTuple, subgroup: frozenset) -> FiniteGSet:
    """Left-coset action of the marked finite group on G/H."""
    coset_of: dict[Perm, int] = {}
    reps: list[Perm] = []
    for g in elements:
        if g not in coset_of:
            idx = len(reps)
            reps.append(g)
            for h in subgroup:
                coset_of[g * h] = idx
    n = len(reps)
    perms = []
    for s in marking.perms:
        perms.append(Perm(tuple(coset_of[s * g] for g in reps)))
    return FiniteGSet(GenTuple(tuple(perms)))


def realize_irs_as_gset(elements, marking: GenTuple, atoms,
                        size_cap: int = 10**6) -> FiniteGSet:
    """A finite action whose stabilizer distribution is a prescribed atomic IRS.

    ``elements`` is the deterministic closure list of the ambient finite group,
    ``marking`` its generator tuple, and each atom is a pair (indices of
    subgroup generators into ``elements``, rational weight).  Weights must sum
    to 1; denominators are cleared by repeating coset spaces.
    """
    elements = list(elements)
    parsed = []
    for gen_indices, weight in atoms:
        weight = Fraction(weight)
        if weight < 0:
            raise ValueError("weights must be nonnegative")
        for idx in gen_indices:
            if not 0 <= idx < len(elements):
                raise ValueError(f"generator index {idx} outside the closure list")
        subgroup = subgroup_closure([elements[i] for i in gen_indices] or
                                    [identity_perm(marking.degree)])
        if len(elements) % len(subgroup):
            raise ValueError("input does not generate a subgroup of the closure")
        parsed.append((subgroup, weight))
    if sum(wt for _, wt in parsed) != 1:
        raise ValueError("weights must sum to 1")

    # smallest total size N with every weight*N divisible by the coset count
    n_total = 1
    for subgroup, weight in parsed:
        if weight == 0:
            continue
        index = len(elements) // len(subgroup)
        need = (weight / index).denominator
        n_total = n_total * need // math.gcd(n_total, need)
    if n_total > size_cap:
        raise ResourceLimitError(f"realization needs {n_total} points, cap {size_cap}")

    parts = []
    for subgroup, weight in parsed:
        if weight == 0:
            continue
        index = len(elements) // len(subgroup)
        copies = int(weight * n_total / index)
        action = coset_action(elements, marking, subgroup)
        parts.extend([action] * copies)
    return disjoint_union(*parts)


# ---------------------------------------------------------------------------
# distances and sampling

def irs_distance(mu: EmpiricalIRS, nu: EmpiricalIRS):
    """Total variation distance between fingerprint distributions."""
    if mu.radius != nu.radius:
        raise ValueError("radius mismatch")
    keys = sorted(set(mu.masses) | set(nu.masses), key=CylinderFingerprint.sort_key)
    if mu.exact and nu.exact:
        return sum((abs(mu.mass(fp) - nu.mass(fp)) for fp in keys),
                   start=Fraction(0)) / 2
    return sum(abs(float(mu.mass(fp)) - float(nu.mass(fp))) for fp in keys) / 2


def tv_standard_error(mu: EmpiricalIRS, nu: EmpiricalIRS) -> float:
    """Conservative standard error for the TV distance of two sampled IRS."""
    keys = sorted(set(mu.masses) | set(nu.masses), key=CylinderFingerprint.sort_key)
    var = 0.0
    for fp in keys:
        if mu.n_samples:
            var += _stderr(float(mu.mass(fp)), mu.n_samples) ** 2
        if nu.n_samples:
            var += _stderr(float(nu.mass(fp)), nu.n_samples) ** 2
    return math.sqrt(var) / 2


def sample_irs(point_sampler, fixes, ball: Ball, n_samples: int,
               seed: int) -> EmpiricalIRS:
    """Empirical fingerprint distribution over independent point samples.

    ``point_sampler(rng)`` draws an abstract point; ``fixes(word, point)``
    decides fixation.  Deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError("need n_samples >= 1")
    rng = random.Random(seed)
    counts: dict[CylinderFingerprint, int] = {}
    for i in range(n_samples):
        try:
            point = point_sampler(rng)
            fixed = [w for w in ball.words if fixes(w, point)]
        except Exception as exc:
            raise RuntimeError(f"sampler failed at sample {i}") from exc
        fp = CylinderFingerprint.from_words(ball.radius, fixed)
        counts[fp] = counts.get(fp, 0) + 1
    masses = {fp: c / n_samples for fp, c in counts.items()}
    stderrs = {fp: _stderr(m, n_samples) for fp, m in masses.items()}
    return EmpiricalIRS(ball.radius, masses, exact=False,
                        n_samples=n_samples, stderrs=stderrs,
                        sum_tolerance=1e-9)


# ---------------------------------------------------------------------------
# the coloring-stabilizer IRS

def _alt_like_marking(n: int) -> GenTuple:
    """The standard 2-marking for any n >= 1 (degree 3 duplicates the 3-cycle)."""
    if n >= 2:
        return alt_marking(n)
    if n == 1:
        three = Perm((1, 2, 0))
        return GenTuple((three, three))
    raise ValueError("need n >= 1")


def _parse_alpha(alpha):
    weights = [Fraction(a) for a in alpha]
    if len(weights) < 1 or any(a < 0 for a in weights) or sum(weights) != 1:
        raise ValueError("alpha must be a probability vector")
    return weights


def vershik_irs(alpha, target: str, radius: int = 2, mode: str = "exact",
                window: int | None = None, n_samples: int | None = None,
                seed: int | None = None,
                enumeration_cap: int = 2 * 10**6) -> EmpiricalIRS:
    """Stabilizer IRS of a random coloring.

    Points of the target's natural set are independently colored by ``alpha``;
    a group element fixes a coloring iff the coloring is constant on each of
    its orbits.  Targets: ``alt:n`` (n >= 1, the finite set of 2n+1 points) or
    ``az`` (colorings of the integers restricted to a window, which must cover
    everything the ball elements can move: radius + 1 suffices).
    """
    weights = _parse_alpha(alpha)
    ball = enumerate_ball(2, radius)
    if target == "az":
        return _vershik_az(weights, ball, mode, window, n_samples, seed,
                           enumeration_cap)
    if target.startswith("alt:"):
        n = int(target.split(":")[1])
        return _vershik_alt(weights, n, ball, mode, n_samples, seed,
                            enumeration_cap)
    raise ValueError(f"unknown vershik target {target!r}")


def _finish_exact(radius, ball, mass_by_key) -> EmpiricalIRS:
    masses: dict = {}
    for key, m in mass_by_key.items():
        fp = CylinderFingerprint.from_words(
            radius, [w for w, keep in zip(ball.words, key) if keep])
        masses[fp] = masses.get(fp, Fraction(0)) + m
    return EmpiricalIRS(radius, masses, exact=True)


def _finish_sampled(radius, ball, bool_matrix, n_samples) -> EmpiricalIRS:
    rows, counts = np.unique(bool_matrix, axis=0, return_counts=True)
    masses: dict = {}
    stderrs: dict = {}
    for row, count in zip(rows, counts):
        fp = CylinderFingerprint.from_words(
            radius, [w for w, keep in zip(ball.words, row) if keep])
        masses[fp] = masses.get(fp, 0.0) + float(count) / n_samples
    for fp, m in masses.items():
        stderrs[fp] = _stderr(m, n_samples)
    return EmpiricalIRS(radius, masses, exact=False, n_samples=n_samples,
                        stderrs=stderrs, sum_tolerance=1e-9)


def _vershik_alt(weights, n, ball, mode, n_samples, seed, cap) -> EmpiricalIRS:
    marking = _alt_like_marking(n)
    degree = marking.degree
    perms = [word_eval(w, marking) for w in ball.words]
    n_colors = len(weights)
    if mode == "exact":
        if n_colors ** degree > cap:
            raise ResourceLimitError(
                f"{n_colors}**{degree} colorings exceed the enumeration cap")
        mass_by_key: dict = {}
        for coloring in itertools.product(range(n_colors), repeat=degree):
            m = Fraction(1)
            for c in coloring:
                m *= weights[c]
            if m == 0:
                continue
            key = tuple(all(coloring[p(x)] == coloring[x] for x in range(degree))
                        for p in perms)
            mass_by_key[key] = mass_by_key.get(key, Fraction(0)) + m
        return _finish_exact(ball.radius, ball, mass_by_key)
    if mode == "sampled":
        if not n_samples or seed is None:
            raise ValueError("sampled mode needs n_samples and seed")
        rng = np.random.default_rng(seed)
        p = np.array([float(a) for a in weights])
        colorings = rng.choice(n_colors, size=(n_samples, degree), p=p / p.sum())
        cols = np.empty((n_samples, len(perms)), dtype=bool)
        for j, perm in enumerate(perms):
            images = np.array(perm.images)
            cols[:, j] = (colorings[:, images] == colorings).all(axis=1)
        return _finish_sampled(ball.radius, ball, cols, n_samples)
    raise ValueError(f"unknown mode {mode!r}")


def _vershik_az(weights, ball, mode, window, n_samples, seed, cap) -> EmpiricalIRS:
    from .marked import az_oracle

    oracle = az_oracle()
    elements = [oracle.evaluate(w) for w in ball.words]
    needed = 0
    for el in elements:
        pts = [abs(el.shift)]
        pts += [abs(n) for n, m in el.sigma] + [abs(m) for n, m in el.sigma]
        needed = max(needed, max(pts))
    if window is None:
        window = needed
    if window < needed:
        raise ValueError(
            f"window half-width {window} too small: ball elements reach {needed}")
    size = 2 * window + 1
    # index pairs (x, g(x)) with both endpoints inside the window
    pairs = []
    for el in elements:
        src, dst = [], []
        for x in range(-window, window + 1):
            y = el.apply(x)
            if -window <= y <= window:
                src.append(x + window)
                dst.append(y + window)
        pairs.append((src, dst))
    n_colors = len(weights)
    if mode == "exact":
        if n_colors ** size > cap:
            raise ResourceLimitError(
                f"{n_colors}**{size} colorings exceed the enumeration cap")
        mass_by_key: dict = {}
        for coloring in itertools.product(range(n_colors), repeat=size):
            m = Fraction(1)
            for c in coloring:
                m *= weights[c]
            if m == 0:
                continue
            key = tuple(all(coloring[d] == coloring[s] for s, d in zip(*pair))
                        for pair in pairs)
            mass_by_key[key] = mass_by_key.get(key, Fraction(0)) + m
        return _finish_exact(ball.radius, ball, mass_by_key)
    if mode == "sampled":
        if not n_samples or seed is None:
            raise ValueError("sampled mode needs n_samples and seed")
        rng = np.random.default_rng(seed)
        p = np.array([float(a) for a in weights])
        colorings = rng.choice(n_colors, size=(n_samples, size), p=p / p.sum())
        cols = np.empty((n_samples, len(elements)), dtype=bool)
        for j, (src, dst) in enumerate(pairs):
            src_a, dst_a = np.array(src, dtype=int), np.array(dst, dtype=int)
            cols[:, j] = (colorings[:, dst_a] == colorings[:, src_a]).all(axis=1)
        return _finish_sampled(ball.radius, ball, cols, n_samples)
    raise ValueError(f"unknown mode {mode!r}")
