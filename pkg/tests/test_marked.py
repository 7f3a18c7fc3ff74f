import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabilitylab.marked import (AZ_IDENTITY, TrivialOracle, TruncatedDiagonalProduct,
                                 alt_oracle, az_from_cycles, az_oracle, az_shift,
                                 convergence_table, marked_nu, neumann_truncation,
                                 oracle_by_name, tail_defect)
from stabilitylab.perms import alt_marking
from stabilitylab.words import (identity, kernel_fingerprint, reduce,
                                word_from_string)

words_st = st.lists(st.integers(-2, 2).filter(bool), max_size=10).map(
    lambda ls: reduce(2, ls))


def w(text):
    return word_from_string(text, 2)


class TestAZElement:
    def test_identity(self):
        az = az_oracle()
        assert az.evaluate(identity(2)) == AZ_IDENTITY

    def test_conjugating_by_shift_translates_support(self):
        az = az_oracle()
        assert az.evaluate(w("abA")) == az_from_cycles([(0, 1, 2)])

    def test_beta_has_order_three(self):
        az = az_oracle()
        assert az.evaluate(w("bbb")).is_identity
        assert not az.evaluate(w("bb")).is_identity

    def test_shift_has_infinite_order_at_small_powers(self):
        az = az_oracle()
        for n in range(1, 9):
            assert az.evaluate(w("a") ** n) == az_shift(n)

    def test_action_on_integers(self):
        g = az_oracle().evaluate(w("ab"))
        # (1 . beta, 1) acts by x -> (1.beta)(x + 1)
        assert g.apply(-1) == 1
        assert g.apply(0) == 2
        assert g.apply(1) == 0
        assert g.apply(5) == 6

    @given(words_st, words_st)
    def test_evaluation_is_a_homomorphism(self, u, v):
        az = az_oracle()
        assert az.evaluate(u * v) == az.evaluate(u) * az.evaluate(v)

    @given(words_st, words_st, words_st)
    @settings(max_examples=50)
    def test_group_axioms(self, u, v, x):
        az = az_oracle()
        a, b, c = az.evaluate(u), az.evaluate(v), az.evaluate(x)
        assert (a * b) * c == a * (b * c)
        assert a * a.inverse() == AZ_IDENTITY
        assert a.inverse() * a == AZ_IDENTITY

    @given(words_st)
    def test_sigma_stays_even(self, u):
        assert az_oracle().evaluate(u).sigma_parity() == 0

    @given(words_st)
    def test_support_bound(self, u):
        elem = az_oracle().evaluate(u)
        bound = len(u) + 1
        assert all(abs(n) <= bound for n in elem.support())

    def test_odd_sigma_rejected(self):
        with pytest.raises(ValueError):
            az_from_cycles([(0, 1)])


class TestAltOracle:
    def test_full_cycle_order(self):
        for r in (2, 3):
            assert alt_oracle(r).word_is_identity(w("a") ** (2 * r + 1))
            assert alt_oracle(r).word_is_identity(w("bbb"))

    def test_fingerprints_distinguish_ranks(self):
        k2 = kernel_fingerprint(alt_oracle(2), 5)
        k3 = kernel_fingerprint(alt_oracle(3), 5)
        assert k2.members != k3.members
        assert w("aaaaa") in k2 and w("aaaaa") not in k3


class TestMarkedNu:
    def test_equal_oracles_saturate(self):
        res = marked_nu(alt_oracle(2), alt_oracle(2), 5)
        assert res.saturated and res.value == 5
        assert str(res) == ">= 5"

    def test_alt2_vs_az(self):
        # a**5 dies in the degree-5 factor but is a genuine shift in the limit
        res = marked_nu(alt_oracle(2), az_oracle(), 5)
        assert not res.saturated and res.value == 4

    def test_alt2_vs_alt3(self):
        res = marked_nu(alt_oracle(2), alt_oracle(3), 5)
        assert not res.saturated and res.value == 4

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            marked_nu(TrivialOracle(3), az_oracle(), 2)

    def test_symmetry_and_ultrametric(self):
        oracles = [alt_oracle(2), alt_oracle(3), alt_oracle(4), az_oracle()]
        r_max = 5
        nus = {}
        for i, a in enumerate(oracles):
            for j, b in enumerate(oracles):
                nus[i, j] = marked_nu(a, b, r_max).value
        for i in range(len(oracles)):
            for j in range(len(oracles)):
                assert nus[i, j] == nus[j, i]
                for k in range(len(oracles)):
                    assert nus[i, k] >= min(nus[i, j], nus[j, k])


class TestConvergenceTable:
    def test_constant_sequence(self):
        rows = convergence_table([az_oracle()] * 3, az_oracle(), 4)
        assert all(nu.saturated for _, nu in rows)

    def test_singleton_matches_marked_nu(self):
        [(_, nu)] = convergence_table([alt_oracle(2)], az_oracle(), 5)
        assert nu == marked_nu(alt_oracle(2), az_oracle(), 5)

    def test_alt_sequence_nondecreasing(self):
        rows = convergence_table([alt_oracle(r) for r in range(2, 5)], az_oracle(), 6)
        values = [nu.value for _, nu in rows]
        assert values == sorted(values)
        assert values[-1] > values[0]


class TestDiagonal:
    def test_identity_word_trivial_everywhere(self):
        product = neumann_truncation(0, 3)
        rep = tail_defect(identity(2), product, az_oracle())
        assert rep.trivial_in_target and rep.defect == ()

    def test_a5_defect_excludes_first_factor(self):
        product = TruncatedDiagonalProduct(
            (alt_marking(2), alt_marking(3), alt_marking(4)))
        rep = tail_defect(w("a") ** 5, product, az_oracle())
        assert not rep.trivial_in_target
        assert rep.defect == (1, 2)

    def test_b3_trivial_in_all_factors(self):
        product = neumann_truncation(0, 4)
        rep = tail_defect(w("bbb"), product, az_oracle())
        assert rep.trivial_in_target and rep.defect == ()

    def test_marking_projects_to_factors(self):
        product = neumann_truncation(1, 3)
        marking = product.marking()
        for m, factor in enumerate(product.factors):
            assert tuple(marking[i][m] for i in range(product.rank)) == factor.perms

    def test_truncation_length_one_is_alt(self):
        product = neumann_truncation(1, 1)
        k_prod = kernel_fingerprint(product.oracle(), 5)
        k_alt = kernel_fingerprint(alt_oracle(3), 5)
        assert k_prod.members == k_alt.members

    def test_offset_zero_length_zero_rejected(self):
        with pytest.raises(ValueError):
            neumann_truncation(0, 0)

    def test_consecutive_offsets_agree_on_small_balls(self):
        # experimental record: at this scale consecutive truncations agree on
        # the whole radius-6 ball, so nu saturates (and is thus nondecreasing)
        values = []
        for n in range(3):
            a = neumann_truncation(n, 2).oracle()
            b = neumann_truncation(n + 1, 2).oracle()
            values.append(marked_nu(a, b, 6))
        assert all(v.saturated for v in values)
        assert [v.value for v in values] == sorted(v.value for v in values)


class TestOracleNames:
    def test_parse(self):
        assert oracle_by_name("az").name == "az"
        assert oracle_by_name("alt:4").name == "alt:4"
        assert oracle_by_name("neumann:1:3").rank == 2
        with pytest.raises(ValueError):
            oracle_by_name("nope:1")
