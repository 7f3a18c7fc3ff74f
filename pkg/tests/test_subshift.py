import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilitylab.subshift import (ClopenSet, ErgodicMeasure,
                                   Substitution, chacon, cylinder, empty_set,
                                   fibonacci, full_set, is_partition,
                                   kr_partition, refine_kr, return_words,
                                   substitution_by_name, thue_morse)
from stabilitylab.words import ResourceLimitError

_FIB = fibonacci()


@st.composite
def fib_clopen(draw):
    resolution = draw(st.integers(min_value=0, max_value=2))
    lang = _FIB.factors(2 * resolution + 1)
    members = draw(st.sets(st.sampled_from(lang)))
    return ClopenSet(_FIB, resolution, members)

GOLDEN = (5 ** 0.5 - 1) / 2


def scan_factors(sub, length, level=12):
    """Direct-scan oracle: windows of a deep iterate of the first letter."""
    s = sub.expansion(sub.alphabet[0], level)
    return set(s[i:i + length] for i in range(len(s) - length + 1))


class TestSubstitution:
    def test_parse_and_names(self):
        assert substitution_by_name("fibonacci") == fibonacci()
        assert substitution_by_name("a->ab;b->a") == fibonacci()
        assert substitution_by_name("thue-morse") == thue_morse()

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            Substitution.parse("a->")

    def test_nonprimitive_rejected(self):
        with pytest.raises(ValueError, match="primitive"):
            Substitution("ab", {"a": "aaba", "b": "b"})

    def test_periodic_rejected(self):
        with pytest.raises(ValueError, match="periodic"):
            Substitution("ab", {"a": "ab", "b": "ab"})
        with pytest.raises(ValueError, match="periodic"):
            Substitution("a", {"a": "aa"})

    def test_images_must_cover_alphabet(self):
        with pytest.raises(ValueError):
            Substitution("ab", {"a": "ab"})


class TestLanguage:
    def test_fibonacci_pairs(self):
        assert fibonacci().factors(2) == ("aa", "ab", "ba")

    def test_thue_morse_pairs(self):
        assert thue_morse().factors(2) == ("aa", "ab", "ba", "bb")

    def test_length_one_is_alphabet(self):
        assert fibonacci().factors(1) == ("a", "b")
        assert chacon().factors(1) == ("a", "b", "c")

    @pytest.mark.parametrize("sub", [fibonacci(), thue_morse(), chacon()])
    @pytest.mark.parametrize("length", [1, 2, 3, 4, 5, 6])
    def test_against_direct_scan(self, sub, length):
        assert set(sub.factors(length)) == scan_factors(sub, length)

    @pytest.mark.parametrize("sub", [fibonacci(), thue_morse()])
    def test_factorial_and_extendable(self, sub):
        for length in (2, 3, 4):
            shorter = set(sub.factors(length - 1))
            longer = sub.factors(length)
            for w in longer:
                assert w[1:] in shorter and w[:-1] in shorter
            for w in sub.factors(length - 1):
                assert any(w + ch in set(longer) for ch in sub.alphabet)

    def test_language_collects_lengths(self):
        lang = fibonacci().language(2)
        assert lang == ("a", "b", "aa", "ab", "ba")


class TestClopenAlgebra:
    def setup_method(self):
        self.sub = fibonacci()
        self.full = full_set(self.sub)
        self.a = cylinder(self.sub, "a")
        self.b = cylinder(self.sub, "b")

    def test_idempotent_intersection(self):
        assert self.a.intersect(self.a) == self.a

    def test_complement_laws(self):
        assert self.a.union(self.a.complement()) == self.full
        assert self.a.intersect(self.a.complement()).is_empty
        assert self.a.complement() == self.b

    def test_full_is_shift_invariant(self):
        assert self.full.shift_image() == self.full
        assert self.full.shift_preimage() == self.full

    def test_shift_round_trip(self):
        c = cylinder(self.sub, "aab")
        assert c.shift_image().shift_preimage() == c
        assert c.shift_pow(3).shift_pow(-3) == c

    def test_resolution_independence(self):
        wide = self.a.at_resolution(4)
        assert wide == self.a
        assert hash(wide) == hash(self.a)
        assert wide.reduce().resolution == 0

    def test_empty_set(self):
        assert empty_set(self.sub).is_empty
        assert self.a.minus(self.a).is_empty

    def test_inadmissible_cylinder(self):
        with pytest.raises(ValueError):
            cylinder(self.sub, "bb")

    def test_resolution_cap(self):
        with pytest.raises(ResourceLimitError):
            self.a.at_resolution(1000)

    def test_is_partition(self):
        assert is_partition(self.sub, [self.a, self.b])
        assert not is_partition(self.sub, [self.a, self.full])
        assert not is_partition(self.sub, [self.a])

    @given(fib_clopen(), fib_clopen())
    @settings(max_examples=40, deadline=None)
    def test_boolean_laws(self, c, d):
        full = full_set(_FIB)
        assert c.complement().complement() == c
        assert c.intersect(d).complement() == c.complement().union(d.complement())
        assert c.union(d) == d.union(c)
        assert c.minus(d) == c.intersect(d.complement())
        assert c.union(c.complement()) == full

    @given(fib_clopen())
    @settings(max_examples=40, deadline=None)
    def test_shift_is_a_boolean_automorphism(self, c):
        assert c.shift_image().shift_preimage() == c
        assert c.complement().shift_image() == c.shift_image().complement()


class TestMeasure:
    def setup_method(self):
        self.sub = fibonacci()
        self.meas = ErgodicMeasure(self.sub)

    def test_full_and_empty(self):
        assert self.meas.measure(full_set(self.sub)) == pytest.approx(1.0, abs=1e-9)
        assert self.meas.measure(empty_set(self.sub)) == 0.0

    def test_golden_ratio_cylinder(self):
        assert self.meas.measure(cylinder(self.sub, "a")) == pytest.approx(
            GOLDEN, abs=1e-9)

    def test_shift_invariance(self):
        for word in ("a", "b", "ab", "aab"):
            c = cylinder(self.sub, word)
            assert abs(self.meas.measure(c.shift_image()) - self.meas.measure(c)) \
                <= 2 * max(self.meas.measure_bound(c), 1e-12)

    def test_additivity(self):
        a, b = cylinder(self.sub, "a"), cylinder(self.sub, "b")
        assert self.meas.measure(a) + self.meas.measure(b) == pytest.approx(
            1.0, abs=1e-9)

    @pytest.mark.parametrize("sub", [fibonacci(), thue_morse()])
    def test_marginal_consistency(self, sub):
        meas = ErgodicMeasure(sub)
        for length in (1, 2, 3):
            for w in sub.factors(length):
                extended = sum(meas.frequency(w + ch) for ch in sub.alphabet)
                assert extended == pytest.approx(meas.frequency(w), abs=1e-9)

    def test_thue_morse_letters_balanced(self):
        meas = ErgodicMeasure(thue_morse())
        assert meas.frequency("a") == pytest.approx(0.5, abs=1e-12)

    def test_inadmissible_frequency_is_zero(self):
        assert self.meas.frequency("bb") == 0.0


class TestReturnWords:
    def test_fibonacci_a(self):
        assert return_words(fibonacci(), "a") == ("a", "ab")

    def test_fibonacci_b(self):
        assert return_words(fibonacci(), "b") == ("ba", "baa")

    def test_inadmissible(self):
        with pytest.raises(ValueError):
            return_words(fibonacci(), "bb")

    def test_scan_cap(self):
        with pytest.raises(ResourceLimitError, match="stabilize"):
            return_words(fibonacci(), "a", string_cap=4)

    @pytest.mark.parametrize("sub", [fibonacci(), thue_morse()])
    def test_definition_restated(self, sub):
        # each gap word w: w+u is admissible and contains u exactly at 0, len(w)
        for length in (1, 2, 3):
            for u in sub.factors(length):
                for w in return_words(sub, u):
                    witness = w + u
                    assert sub.is_admissible(witness)
                    hits = [i for i in range(len(witness) - len(u) + 1)
                            if witness[i:i + len(u)] == u]
                    assert hits[0] == 0 and hits[-1] == len(w)
                    assert not [h for h in hits if 0 < h < len(w)]


class TestKRPartition:
    def test_fibonacci_a_two_towers(self):
        part = kr_partition(fibonacci(), "a")
        assert sorted(t.height for t in part.towers) == [1, 2]
        assert part.min_height == 1
        assert len(part.atoms()) == 3

    def test_base_is_the_cylinder(self):
        sub = fibonacci()
        part = kr_partition(sub, "a")
        assert part.base() == cylinder(sub, "a")

    def test_roof_shifts_to_base(self):
        part = kr_partition(fibonacci(), "aa")
        assert part.roof().shift_image() == part.base()

    def test_tower_masses_sum_to_cylinder(self):
        sub = fibonacci()
        meas = ErgodicMeasure(sub)
        part = kr_partition(sub, "a")
        bases = sum(meas.measure(t.base) for t in part.towers)
        assert bases == pytest.approx(meas.measure(cylinder(sub, "a")), abs=1e-9)

    @pytest.mark.parametrize("sub", [fibonacci(), thue_morse()])
    def test_full_mass_and_validity(self, sub):
        meas = ErgodicMeasure(sub)
        for length in (1, 2, 3):
            for u in sub.factors(length):
                part = kr_partition(sub, u)
                part.validate()
                total = sum(t.height * meas.measure(t.base) for t in part.towers)
                assert abs(total - 1) <= len(part.atoms()) * 1e-9

    def test_inadmissible_seed(self):
        with pytest.raises(ValueError):
            kr_partition(fibonacci(), "bb")


class TestRefine:
    def setup_method(self):
        self.sub = fibonacci()
        self.part = kr_partition(self.sub, "aa")

    def test_refine_by_whole_space(self):
        refined = refine_kr(self.part, [full_set(self.sub)])
        assert refined.base() == self.part.base()
        assert refined.roof() == self.part.roof()
        assert sorted(t.height for t in refined.towers) == \
            sorted(t.height for t in self.part.towers)

    def test_refine_by_own_atoms(self):
        refined = refine_kr(self.part, [a.part for a in self.part.atoms()])
        assert refined.min_height == self.part.min_height
        assert refined.base() == self.part.base()

    def test_refine_by_letter_partition(self):
        pieces = [cylinder(self.sub, "a"), cylinder(self.sub, "b")]
        refined = refine_kr(self.part, pieces)
        assert refined.base() == self.part.base()
        assert refined.roof() == self.part.roof()
        assert refined.min_height == self.part.min_height
        for atom in refined.atoms():
            assert any(atom.part.is_subset(p) for p in pieces)

    def test_rejects_non_partition(self):
        with pytest.raises(ValueError):
            refine_kr(self.part, [cylinder(self.sub, "a")])
