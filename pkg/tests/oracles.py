"""Independent oracles shared by module and acceptance tests.

Everything here recomputes expectations by brute force along a different
route than the library code it checks.
"""

from fractions import Fraction

from stabilitylab.irs import CylinderFingerprint, EmpiricalIRS, subgroup_closure
from stabilitylab.perms import GenTuple, Perm, identity_perm, word_eval
from stabilitylab.words import enumerate_ball


def expected_atomic_irs(elements, marking, atoms, radius) -> EmpiricalIRS:
    """Fingerprint distribution of an atomic IRS, via conjugacy-class enumeration.

    Each atom (subgroup H, weight) contributes weight spread uniformly over the
    conjugates of H; fingerprints read off which ball words evaluate into each
    conjugate.
    """
    ball = enumerate_ball(marking.rank, radius)
    ball_perms = [word_eval(w, marking) for w in ball.words]
    masses: dict = {}
    for gen_indices, weight in atoms:
        gens = [elements[i] for i in gen_indices] or [identity_perm(marking.degree)]
        subgroup = subgroup_closure(gens)
        conjugates = set()
        for g in elements:
            g_inv = g.inverse()
            conjugates.add(frozenset(g * h * g_inv for h in subgroup))
        share = Fraction(weight) / len(conjugates)
        for conj in conjugates:
            fp = CylinderFingerprint.from_words(
                radius,
                [w for w, p in zip(ball.words, ball_perms) if p in conj])
            masses[fp] = masses.get(fp, Fraction(0)) + share
    return EmpiricalIRS(radius, masses, exact=True)


def random_gset(rng, size: int, rank: int = 2):
    """A uniformly random finite action of the rank-d free group."""
    from stabilitylab.irs import FiniteGSet

    perms = []
    for _ in range(rank):
        images = list(range(size))
        rng.shuffle(images)
        perms.append(Perm(tuple(images)))
    return FiniteGSet(GenTuple(tuple(perms)))


def random_subgroup_atom(rng, elements, max_gens: int = 2):
    """Indices of a few random elements, as subgroup generators."""
    count = rng.randint(1, max_gens)
    return [rng.randrange(len(elements)) for _ in range(count)]
