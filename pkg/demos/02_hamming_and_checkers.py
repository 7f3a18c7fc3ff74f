"""The normalized Hamming metric and the epsilon/delta checkers.

A tuple of permutations is an almost-solution to a system of relator words
when every relator evaluates close to the identity, and separating for a set
of witnesses when every witness evaluates far from it.  Both checks are
exact rational computations.
"""

from fractions import Fraction

from stabilitylab.perms import (alt_marking, check_almost_solution,
                                check_separating, generate_closure,
                                hamming_distance, identity_perm, word_eval)
from stabilitylab.words import word_from_string

gens = alt_marking(2)          # degree 5: a full 5-cycle and a centered 3-cycle
ident = identity_perm(5)

print("d(alpha, id) =", hamming_distance(gens.perms[0], ident))
print("d(beta,  id) =", hamming_distance(gens.perms[1], ident))

# The defining relators of this marking hold exactly...
relators = [word_from_string(t, 2) for t in ("aaaaa", "bbb")]
report = check_almost_solution(gens, relators, Fraction(1, 100))
print("almost-solution to {a^5, b^3}:", report.passed,
      " max distance", report.max_distance)

# ...while a wrong power is loudly violated: a^7 = a^2 moves every point.
report = check_almost_solution(gens, [word_from_string("a", 2) ** 7],
                               Fraction(1, 10))
print("almost-solution to {a^7}  :", report.passed,
      " max distance", report.max_distance)

# Separation: the full cycle fixes nothing, the 3-cycle fixes 2 points of 5.
for text, delta in (("a", "1/100"), ("b", "1/2"), ("b", "2/5")):
    rep = check_separating(gens, [word_from_string(text, 2)], Fraction(delta))
    print(f"({text}) separating at 1-{delta}: {rep.passed} "
          f"(distance {rep.min_distance})")

# The BFS closure doubles as an order oracle: these two elements generate
# the full alternating group.
print("closure sizes:", len(generate_closure(alt_marking(2))),
      len(generate_closure(alt_marking(3))))
print("a^5 evaluates to identity:",
      word_eval(word_from_string("a", 2) ** 5, gens).is_identity)
