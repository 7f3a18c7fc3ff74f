"""Stabilizers of random colorings, finite against the integer limit.

Color every point independently and push the coloring measure through the
stabilizer map: an element fixes a coloring exactly when the coloring is
constant on each of its orbits.  On the integers only the finitely supported
part of an element can fix a typical coloring, so the fingerprint mass
concentrates on shift-free words; the finite alternating pictures converge
to the same distribution as the rank grows.
"""

from fractions import Fraction

from stabilitylab.irs import irs_distance, tv_standard_error, vershik_irs

HALF = Fraction(1, 2)

# Exactly enumerable toy case: 3 points, 8 colorings.
exact = vershik_irs([HALF, HALF], "alt:1", radius=1, mode="exact")
print("alt:1 exact fingerprints:")
for fp, mass in exact.masses.items():
    print("  ", fp, mass)

# The integer limit, sampled on a window.
limit = vershik_irs([HALF, HALF], "az", radius=2, mode="sampled",
                    window=40, n_samples=50000, seed=9)
print("\nwindow-sampled limit (radius 2):")
for fp in limit.support():
    print(f"   {fp}  mass {limit.masses[fp]:.4f}")

# Finite pictures approach it as the rank grows.
print("\nTV to the window limit:")
for i, n in enumerate((5, 10, 20, 40)):
    finite = vershik_irs([HALF, HALF], f"alt:{n}", radius=2, mode="sampled",
                         n_samples=50000, seed=10 + i)
    tv = float(irs_distance(finite, limit))
    err = tv_standard_error(finite, limit)
    print(f"   alt:{n:<3d} TV = {tv:.4f}  (stderr ~ {err:.4f})")
