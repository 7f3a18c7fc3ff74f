"""Full-group elements of a subshift as cocycle tables, and their finite shadows.

An element is a table of clopen parts with integer exponents: on each part it
acts as that power of the shift.  Products follow the cocycle rule (the
exponent of a product at x is the exponent of the right factor at x plus the
exponent of the left factor at the image).  On a tower partition whose atoms
make every table exponent constant, each element induces a permutation of the
atoms; checking that this assignment is injective and multiplicative on a
ball, and that atom fixation mirrors pointwise fixation, certifies a local
embedding into a finite symmetric group.  Pushing tower masses through atom
stabilizers then computes invariant-random-subgroup marginals exactly.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from .irs import CylinderFingerprint, EmpiricalIRS
from .perms import Perm
from .subshift import (ClopenSet, ErgodicMeasure, KRPartition, Substitution,
                       full_set, is_partition, kr_partition, refine_kr)
from .words import ReducedWord, ResourceLimitError, enumerate_ball, identity


class CocycleNotConstantError(ValueError):
    """An atom straddles two parts of a table element."""

    def __init__(self, atom_index: int):
        super().__init__(f"table exponent is not constant on atom {atom_index}")
        self.atom_index = atom_index


class TableElement:
    """A full-group element: clopen parts with shift exponents."""

    __slots__ = ("sub", "parts", "_key")

    def __init__(self, sub: Substitution, parts, _validated: bool = False):
        merged: dict[int, ClopenSet] = {}
        for part, exponent in parts:
            if part.is_empty:
                continue
            if exponent in merged:
                merged[exponent] = merged[exponent].union(part)
            else:
                merged[exponent] = part
        table = tuple(sorted(((c.reduce(), a) for a, c in merged.items()),
                             key=lambda pa: pa[1]))
        if not table:
            raise ValueError("a table element needs at least one nonempty part")
        self.sub = sub
        self.parts = table
        self._key = tuple((a, c.resolution, tuple(sorted(c.members)))
                          for c, a in table)
        if not _validated:
            self._validate()

    def _validate(self):
        domains = [c for c, _ in self.parts]
        if not is_partition(self.sub, domains):
            raise ValueError("table parts do not partition the space")
        images = [c.shift_pow(a) for c, a in self.parts]
        for (i, ci), (j, cj) in itertools.combinations(enumerate(images), 2):
            if not ci.is_disjoint(cj):
                raise ValueError(
                    f"images of parts {i} and {j} overlap: the table is not a bijection")
        if not is_partition(self.sub, images):
            raise ValueError("images of the parts fail to cover the space")

    @property
    def is_identity(self) -> bool:
        return len(self.parts) == 1 and self.parts[0][1] == 0

    def max_exponent(self) -> int:
        return max(abs(a) for _, a in self.parts)

    def __mul__(self, other: "TableElement") -> "TableElement":
        """Composition, right factor first; exponents add along the cocycle rule."""
        if self.sub != other.sub:
            raise ValueError("elements over different subshifts")
        pieces = []
        for ch, bh in other.parts:
            for cg, ag in self.parts:
                piece = ch.intersect(cg.shift_pow(-bh))
                if not piece.is_empty:
                    pieces.append((piece, ag + bh))
        return TableElement(self.sub, pieces, _validated=True)

    def inverse(self) -> "TableElement":
        return TableElement(self.sub, [(c.shift_pow(a), -a) for c, a in self.parts],
                            _validated=True)

    def __eq__(self, other):
        if not isinstance(other, TableElement):
            return NotImplemented
        return self.sub == other.sub and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "Table(%s)" % ", ".join(f"T^{a} on {len(c.members)}w" for c, a in self.parts)


def identity_element(sub: Substitution) -> TableElement:
    return TableElement(sub, [(full_set(sub), 0)], _validated=True)


def make_element(sub: Substitution, parts) -> TableElement:
    """Validated table element from (clopen set, exponent) pairs."""
    return TableElement(sub, parts)


def three_cycle(part: ClopenSet) -> TableElement:
    """The order-3 element cycling a clopen set through its first two shifts.

    Requires the set and its two forward shifts to be pairwise disjoint; acts
    as the identity elsewhere.
    """
    sub = part.sub
    if part.is_empty:
        return identity_element(sub)
    stages = [part, part.shift_image(), part.shift_image().shift_image()]
    for a, b in itertools.combinations(stages, 2):
        if not a.is_disjoint(b):
            raise ValueError("the set and its first two shifts must be disjoint")
    rest = full_set(sub)
    for s in stages:
        rest = rest.minus(s)
    return make_element(sub, [(stages[0], 1), (stages[1], 1), (stages[2], -2),
                              (rest, 0)])


def tower_gadgets(sub: Substitution, word: str, count: int = 2) -> list[TableElement]:
    """Disjointly supported three-cycles built from tower bases over a word.

    Bases of towers of height >= 3 have disjoint first shifts by the tower
    property, and distinct towers never meet, so the gadgets commute.
    """
    partition = kr_partition(sub, word)
    gadgets = []
    for tower in sorted(partition.towers, key=lambda t: (t.height, t.label)):
        if tower.height >= 3:
            gadgets.append(three_cycle(tower.base))
        if len(gadgets) == count:
            return gadgets
    raise ValueError(
        f"only {len(gadgets)} towers of height >= 3 over {word!r}; need {count}")


# ---------------------------------------------------------------------------
# pointwise orbit simulation

@dataclass(frozen=True)
class SymbolicPoint:
    """A point of the subshift known on a long finite window of coordinates."""

    text: str
    origin: int

    def window(self, resolution: int) -> str:
        lo, hi = self.origin - resolution, self.origin + resolution + 1
        if lo < 0 or hi > len(self.text):
            raise ValueError("sampled text too short for this resolution")
        return self.text[lo:hi]

    def in_set(self, part: ClopenSet) -> bool:
        return self.window(part.resolution) in part.members

    def cocycle(self, g: TableElement) -> int:
        for part, exponent in g.parts:
            if self.in_set(part):
                return exponent
        raise AssertionError("table parts failed to cover a point")

    def apply(self, g: TableElement) -> "SymbolicPoint":
        return SymbolicPoint(self.text, self.origin + self.cocycle(g))


def sample_points(sub: Substitution, count: int, margin: int,
                  seed: int) -> list[SymbolicPoint]:
    text = sub.long_word(max(4 * margin + 8 * count, 4096))
    rng = random.Random(seed)
    return [SymbolicPoint(text, rng.randrange(margin, len(text) - margin))
            for _ in range(count)]


def point_inside(part: ClopenSet, margin: int,
                 string_cap: int = 4_000_000) -> SymbolicPoint:
    """Some point of a nonempty clopen set, with room to move around it."""
    if part.is_empty:
        raise ValueError("empty set has no points")
    member = min(part.members)
    text = part.sub.long_word(4096)
    while True:
        idx = text.find(member, margin)
        if idx != -1 and idx + len(member) + margin <= len(text):
            return SymbolicPoint(text, idx + part.resolution)
        if len(text) > string_cap:
            raise ResourceLimitError(
                f"no occurrence of {member!r} with margin {margin} below the cap")
        text = part.sub.apply(text)


# ---------------------------------------------------------------------------
# balls in the generated group

@dataclass(frozen=True)
class BallElements:
    """Ball of a finite symmetric generating set, with shortlex representatives."""

    radius: int
    representatives: tuple  # (ReducedWord, TableElement) per distinct element
    word_to_index: dict     # every ball word -> index into representatives

    def element_of(self, word: ReducedWord) -> TableElement:
        return self.representatives[self.word_to_index[word]][1]


def ball_elements(generators, radius: int, element_cap: int = 4096) -> BallElements:
    """BFS over reduced words with exact element dedup; one shortlex word each."""
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    sub = gens[0].sub
    rank = len(gens)
    by_letter = {}
    for i, g in enumerate(gens, start=1):
        by_letter[i] = g
        by_letter[-i] = g.inverse()
    ident = identity_element(sub)
    reps = [(identity(rank), ident)]
    index_of = {ident: 0}
    word_to_index = {identity(rank): 0}
    level = [(identity(rank), ident)]
    letter_order = [l for i in range(1, rank + 1) for l in (i, -i)]
    for _ in range(radius):
        nxt = []
        for word, elem in level:
            last = word.letters[-1] if word.letters else 0
            for letter in letter_order:
                if letter == -last:
                    continue
                new_word = ReducedWord(rank, word.letters + (letter,))
                new_elem = elem * by_letter[letter]
                if new_elem in index_of:
                    word_to_index[new_word] = index_of[new_elem]
                else:
                    if len(reps) >= element_cap:
                        raise ResourceLimitError("ball exceeds the element cap")
                    index_of[new_elem] = len(reps)
                    word_to_index[new_word] = len(reps)
                    reps.append((new_word, new_elem))
                nxt.append((new_word, new_elem))
        level = nxt
    return BallElements(radius, tuple(reps), word_to_index)


# ---------------------------------------------------------------------------
# atom actions and local embeddings

@dataclass(frozen=True)
class AtomPerm:
    """A permutation of the atom indices of a tower partition."""

    perm: Perm
    tower_preserving: bool = True


def atom_exponents(g: TableElement, partition: KRPartition) -> tuple[int, ...]:
    """The table exponent on each atom; the partition must make them constant."""
    out = []
    for index, atom in enumerate(partition.atoms()):
        exponent = None
        for part, a in g.parts:
            if atom.part.is_subset(part):
                exponent = a
                break
        if exponent is None:
            raise CocycleNotConstantError(index)
        out.append(exponent)
    return tuple(out)


def atom_action(g: TableElement, partition: KRPartition) -> AtomPerm:
    """The tower-preserving atom permutation induced by a table element.

    Atoms whose shifted level stays inside their tower map there directly;
    the leftover sources and targets in each tower are matched in increasing
    height order.  Whether this completion is faithful is exactly what the
    embedding report checks.
    """
    exps = atom_exponents(g, partition)
    atoms = partition.atoms()
    images = [None] * len(atoms)
    start = 0
    for tower in partition.towers:
        h = tower.height
        taken = set()
        unmapped_src = []
        for i in range(h):
            j = i + exps[start + i]
            if 0 <= j < h:
                assert j not in taken
                taken.add(j)
                images[start + i] = start + j
            else:
                unmapped_src.append(i)
        unmapped_tgt = [j for j in range(h) if j not in taken]
        for i, j in zip(unmapped_src, unmapped_tgt):
            images[start + i] = start + j
        start += h
    return AtomPerm(Perm(tuple(images)))


@dataclass(frozen=True)
class EmbeddingEntry:
    word: ReducedWord
    element: TableElement
    image: AtomPerm
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class EmbeddingReport:
    """Verification record for a candidate local embedding on a ball."""

    radius: int
    atom_count: int
    entries: tuple[EmbeddingEntry, ...]
    word_to_index: dict
    injectivity_collisions: tuple
    multiplicativity_failures: tuple
    blockstab_failures: tuple
    cocycle_failures: tuple

    @property
    def passed(self) -> bool:
        return not (self.injectivity_collisions or self.multiplicativity_failures
                    or self.blockstab_failures or self.cocycle_failures)

    @property
    def recommendation(self) -> str:
        if self.passed:
            return "embedding verified"
        return "embedding failed; deepen the partition and retry"

    def image_of(self, word: ReducedWord) -> AtomPerm:
        return self.entries[self.word_to_index[word]].image

    def to_json(self) -> str:
        return json.dumps({
            "radius": self.radius,
            "atoms": self.atom_count,
            "elements": len(self.entries),
            "passed": self.passed,
            "injectivity_collisions": [
                [str(a), str(b)] for a, b in self.injectivity_collisions],
            "multiplicativity_failures": [
                [str(a), str(b)] for a, b in self.multiplicativity_failures],
            "blockstab_failures": [
                {"word": str(w), "atom": i} for w, i in self.blockstab_failures],
            "cocycle_failures": [
                {"word": str(w), "atom": i} for w, i in self.cocycle_failures],
            "recommendation": self.recommendation,
        }, indent=1)


def local_embedding(generators, radius: int, partition: KRPartition) -> EmbeddingReport:
    """Map a generator ball to atom permutations and verify it behaves.

    Checks: distinct elements get distinct permutations; products inside the
    ball map to products; and for every element and atom, fixing a sample
    point, having exponent zero, and fixing the atom are equivalent.
    Failures are report outcomes, not exceptions.
    """
    ball = ball_elements(generators, radius)
    entries = []
    cocycle_failures = []
    images_ok = True
    for word, elem in ball.representatives:
        try:
            exps = atom_exponents(elem, partition)
            image = atom_action(elem, partition)
        except CocycleNotConstantError as err:
            cocycle_failures.append((word, err.atom_index))
            images_ok = False
            continue
        entries.append(EmbeddingEntry(word, elem, image, exps))
    if not images_ok:
        return EmbeddingReport(radius, len(partition.atoms()), tuple(entries),
                               {}, (), (), (), tuple(cocycle_failures))

    collisions = []
    seen: dict[Perm, ReducedWord] = {}
    for e in entries:
        if e.image.perm in seen:
            collisions.append((seen[e.image.perm], e.word))
        else:
            seen[e.image.perm] = e.word

    elem_index = {e.element: i for i, e in enumerate(entries)}
    mult_failures = []
    for a in entries:
        for b in entries:
            product = a.element * b.element
            i = elem_index.get(product)
            if i is None:
                continue
            if entries[i].image.perm != a.image.perm * b.image.perm:
                mult_failures.append((a.word, b.word))

    blockstab_failures = []
    margin = max(c.resolution for e in entries for c, _ in e.element.parts) + 1
    atoms = partition.atoms()
    witnesses = [point_inside(atom.part, margin) for atom in atoms]
    for e in entries:
        for idx, atom in enumerate(atoms):
            fixes_point = witnesses[idx].cocycle(e.element) == 0
            exponent_zero = e.exponents[idx] == 0
            fixes_atom = e.image.perm(idx) == idx
            if not (fixes_point == exponent_zero == fixes_atom):
                blockstab_failures.append((e.word, idx))

    word_to_index = {w: elem_index[ball.representatives[i][1]]
                     for w, i in ball.word_to_index.items()}
    return EmbeddingReport(radius, len(atoms), tuple(entries), word_to_index,
                           tuple(collisions), tuple(mult_failures),
                           tuple(blockstab_failures), tuple(cocycle_failures))


# ---------------------------------------------------------------------------
# stabilizer pushforwards

def adapted_partition(sub: Substitution, generators, radius: int, seed_word: str,
                      max_seed_length: int = 64) -> KRPartition:
    """A tower partition tall enough for a ball and constant on its cocycles.

    Deepens the seed word until the minimal tower height reaches twice the
    largest table exponent plus two, then refines by every ball element's
    cocycle partition.  Heights, base and roof survive the refinement.
    """
    ball = ball_elements(generators, radius)
    max_exp = max(e.max_exponent() for _, e in ball.representatives)
    required = 2 * max_exp + 2
    word = seed_word
    while True:
        partition = kr_partition(sub, word)
        if partition.min_height >= required:
            break
        extensions = [word + ch for ch in sub.alphabet
                      if sub.is_admissible(word + ch)]
        if not extensions or len(word) >= max_seed_length:
            raise ResourceLimitError(
                f"seed {word!r} reaches min height {partition.min_height}, "
                f"need {required}")
        word = extensions[0]
    for _, elem in ball.representatives:
        if len(elem.parts) > 1:
            partition = refine_kr(partition, [c for c, _ in elem.parts])
    return partition


def fullgroup_irs(partition: KRPartition, generators, k: int, radius: int,
                  measure: ErgodicMeasure,
                  embedding: EmbeddingReport | None = None) -> EmpiricalIRS:
    """Stabilizer distribution of k independent tower-mass-random atoms.

    For every k-tuple of atoms the fingerprint collects the ball words whose
    atom permutation fixes each coordinate; the tuple carries the product of
    atom masses (each atom weighs as much as its tower base).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    report = embedding or local_embedding(generators, radius, partition)
    if not report.passed:
        raise ValueError(report.recommendation)
    rank = len(list(generators))
    ball = enumerate_ball(rank, radius)
    atoms = partition.atoms()
    atom_mass = [measure.measure(partition.towers[a.tower].base) for a in atoms]
    fixing: list[frozenset] = []
    perms = [report.entries[report.word_to_index[w]].image.perm for w in ball.words]
    for idx in range(len(atoms)):
        fixing.append(frozenset(w for w, p in zip(ball.words, perms)
                                if p(idx) == idx))
    masses: dict[CylinderFingerprint, float] = {}
    for combo in itertools.product(range(len(atoms)), repeat=k):
        words = fixing[combo[0]]
        for idx in combo[1:]:
            words = words & fixing[idx]
        mass = 1.0
        for idx in combo:
            mass *= atom_mass[idx]
        fp = CylinderFingerprint.from_words(radius, words)
        masses[fp] = masses.get(fp, 0.0) + mass
    slack = k * len(atoms) * measure.tolerance + 1e-9
    return EmpiricalIRS(radius, masses, exact=False, sum_tolerance=slack)


@dataclass(frozen=True)
class LimitLevel:
    seed: str
    atom_count: int
    min_height: int
    irs: EmpiricalIRS


@dataclass(frozen=True)
class LimitCheckReport:
    k: int
    radius: int
    levels: tuple[LimitLevel, ...]
    tv_matrix: tuple[tuple[float, ...], ...]
    marginal_max_gap: float
    marginal_supports_match: bool


def fullgroup_irs_limit_check(sub: Substitution, generators, k: int, radius: int,
                              seeds, measure: ErgodicMeasure) -> LimitCheckReport:
    """Compute the pushforward at several partition levels and compare.

    The distributions agree up to measure tolerance; the report also checks
    that marginalizing the k-fold tuple measure onto its first coordinate
    reproduces the 1-point distribution.
    """
    from .irs import irs_distance

    levels = []
    partitions = []
    for seed in seeds:
        partition = adapted_partition(sub, generators, radius, seed)
        report = local_embedding(generators, radius, partition)
        irs = fullgroup_irs(partition, generators, k, radius, measure,
                            embedding=report)
        levels.append(LimitLevel(seed, len(partition.atoms()),
                                 partition.min_height, irs))
        partitions.append((partition, report))
    tv = tuple(tuple(float(irs_distance(a.irs, b.irs)) for b in levels)
               for a in levels)

    # first-coordinate marginal of the k-tuple construction vs the 1-point IRS
    partition, report = partitions[0]
    one = fullgroup_irs(partition, generators, 1, radius, measure, embedding=report)
    marginal = _first_coordinate_marginal(partition, generators, k, radius,
                                          measure, report)
    gap = 0.0
    for fp in set(one.masses) | set(marginal.masses):
        gap = max(gap, abs(one.masses.get(fp, 0.0) - marginal.masses.get(fp, 0.0)))
    supports = {fp for fp, m in one.masses.items() if m > 0} == \
               {fp for fp, m in marginal.masses.items() if m > 0}
    return LimitCheckReport(k, radius, tuple(levels), tv, gap, supports)


def _first_coordinate_marginal(partition, generators, k, radius, measure,
                               report) -> EmpiricalIRS:
    rank = len(list(generators))
    ball = enumerate_ball(rank, radius)
    atoms = partition.atoms()
    atom_mass = [measure.measure(partition.towers[a.tower].base) for a in atoms]
    perms = [report.entries[report.word_to_index[w]].image.perm for w in ball.words]
    total = sum(atom_mass)
    masses: dict[CylinderFingerprint, float] = {}
    for idx in range(len(atoms)):
        fp = CylinderFingerprint.from_words(
            radius, [w for w, p in zip(ball.words, perms) if p(idx) == idx])
        masses[fp] = masses.get(fp, 0.0) + atom_mass[idx] * total ** (k - 1)
    slack = k * len(atoms) * measure.tolerance + 1e-9
    return EmpiricalIRS(radius, masses, exact=False, sum_tolerance=slack)


def element_to_json(g: TableElement) -> str:
    return json.dumps({
        "parts": [{"exponent": a, "resolution": c.resolution,
                   "members": sorted(c.members)} for c, a in g.parts]
    }, indent=1)
