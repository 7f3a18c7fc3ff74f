"""Substitution subshifts: language, measure, and tower partitions.

Return words of a seed factor index the towers of a clopen partition: the
tower of gap w stands over the points entering the seed cylinder whose next
visit happens after exactly len(w) steps.  Everything is certified by exact
word-set algebra; the invariant measure enters only through word frequencies
carrying an explicit tolerance.
"""

from stabilitylab.subshift import (ErgodicMeasure, chacon, cylinder, fibonacci,
                                   kr_partition, refine_kr, return_words,
                                   thue_morse)

for sub in (fibonacci(), thue_morse(), chacon()):
    print(f"{sub!r}: factors up to length 3:",
          sub.factors(1), sub.factors(2), sub.factors(3))

fib = fibonacci()
measure = ErgodicMeasure(fib)
print("\nFibonacci letter frequencies:",
      {ch: round(measure.frequency(ch), 6) for ch in fib.alphabet},
      "(golden ratio and its complement)")

print("return words of 'a':", return_words(fib, "a"))
print("return words of 'aa':", return_words(fib, "aa"))

part = kr_partition(fib, "aa")
print("\ntower partition over [aa]:")
for tower in part.towers:
    print(f"  gap {tower.label!r}: height {tower.height}, "
          f"base mass {measure.measure(tower.base):.6f}")
print("atoms:", len(part.atoms()), " min height:", part.min_height)
print("total mass of all atoms:",
      sum(t.height * measure.measure(t.base) for t in part.towers))
part.validate()
print("partition and roof checks pass")

# Refining by the letter partition keeps every tower datum.
refined = refine_kr(part, [cylinder(fib, "a"), cylinder(fib, "b")])
print("after refining by {[a], [b]}: towers",
      [(t.label, t.height) for t in refined.towers],
      " base preserved:", refined.base() == part.base())
