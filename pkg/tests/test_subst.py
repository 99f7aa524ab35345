import random

import numpy as np
import pytest

from conftest import random_primitive_substitution
from currdyn.errors import (
    CapExceededError,
    LengthCapError,
    NotIrreducibleError,
)
from currdyn.subst import (
    FactorCounts,
    Substitution,
    block_closure,
    block_structure,
    count_occurrences,
    frequency_limit,
    frequency_table,
    iterate,
    limit_block_frequencies,
    pf_data,
    stabilizing_power,
    transition_matrix,
)

GOLDEN = (1 + 5 ** 0.5) / 2

FIB = Substitution.from_strings({"a": "ab", "b": "a"})


def naive_iterate(s, w, t):
    word = tuple(w)
    for _ in range(t):
        word = tuple(x for a in word for x in s.rule[a])
    return word


class TestIterate:
    def test_fibonacci_hand_iteration(self):
        # a -> ab -> aba -> abaab -> abaababa: four applications reach length 8.
        assert iterate(FIB, "a", 4) == tuple("abaababa")
        assert len(iterate(FIB, "a", 5)) == 13

    def test_t_zero(self):
        assert iterate(FIB, "ba", 0) == tuple("ba")

    def test_constant(self):
        s = Substitution.from_strings({"a": "a"})
        assert iterate(s, "a", 17) == ("a",)

    def test_budget(self):
        with pytest.raises(LengthCapError):
            iterate(FIB, "a", 60, budget=1000)

    def test_matches_naive(self):
        rng = random.Random(7)
        for _ in range(5):
            s = random_primitive_substitution(rng)
            w = tuple(rng.choice(s.alphabet) for _ in range(3))
            assert iterate(s, w, 4, budget=10**7) == naive_iterate(s, w, 4)


class TestCountOccurrences:
    def test_basic(self):
        assert count_occurrences("ab", "abab") == 2

    def test_overlapping(self):
        assert count_occurrences("aa", "aaa") == 2

    def test_fibonacci_factor(self):
        assert count_occurrences("aba", iterate(FIB, "a", 4)) == 3

    def test_empty_pattern_rejected(self):
        with pytest.raises(ValueError):
            count_occurrences("", "abc")


class TestBlockStructure:
    def test_fibonacci_single_primitive(self):
        bs = block_structure(FIB)
        assert len(bs.blocks) == 1
        block = bs.blocks[0]
        assert block.kind == "primitive"
        assert abs(block.pf_eigenvalue - GOLDEN) < 1e-10

    def test_condensation_by_hand(self):
        s = Substitution.from_strings({"a": "ab", "b": "a", "c": "cab"})
        bs = block_structure(s)
        assert [b.letters for b in bs.blocks] == [("a", "b"), ("c",)]
        assert [b.kind for b in bs.blocks] == ["primitive", "bounded"]
        assert bs.sub_alphabets() == [("a", "b"), ("a", "b", "c")]

    def test_identity_blocks_bounded(self):
        s = Substitution.from_strings({"a": "a", "b": "b"})
        bs = block_structure(s)
        assert [b.kind for b in bs.blocks] == ["bounded", "bounded"]

    def test_swap_is_bounded(self):
        s = Substitution.from_strings({"a": "b", "b": "a"})
        bs = block_structure(s)
        assert [b.kind for b in bs.blocks] == ["bounded"]

    def test_imprimitive_block_detected(self):
        s = Substitution.from_strings({"a": "bb", "b": "aa"})
        bs = block_structure(s)
        assert bs.blocks[0].kind == "imprimitive"
        assert abs(bs.blocks[0].pf_eigenvalue - 2.0) < 1e-10

    def test_chain_is_invariant(self):
        rng = random.Random(3)
        s = Substitution.from_strings(
            {"a": "ab", "b": "a", "c": "cb", "d": "dca"})
        for sub_alphabet in block_structure(s).sub_alphabets():
            allowed = set(sub_alphabet)
            for a in sub_alphabet:
                assert set(s.rule[a]) <= allowed


class TestPfData:
    def test_golden_ratio(self):
        # Oracle: the characteristic polynomial x^2 - x - 1.
        root = max(np.roots([1, -1, -1]).real)
        lam, right, left = pf_data([[1, 1], [1, 0]])
        assert abs(lam - root) < 1e-10
        assert abs(lam - GOLDEN) < 1e-10
        # right eigenvector proportional to (lambda, 1)
        assert abs(right[0] / right[1] - lam) < 1e-9
        assert abs(right.sum() - 1) < 1e-12 and abs(left.sum() - 1) < 1e-12

    def test_plastic_number(self):
        # Oracle: the real root of x^3 - x - 1.
        roots = np.roots([1, 0, -1, -1])
        root = max(r.real for r in roots if abs(r.imag) < 1e-12)
        lam, _, _ = pf_data([[0, 1, 0], [0, 0, 1], [1, 1, 0]])
        assert abs(lam - root) < 1e-10
        assert abs(lam - 1.3247179572447460) < 1e-8

    def test_permutation_matrix(self):
        lam, right, left = pf_data([[0, 1], [1, 0]])
        assert abs(lam - 1.0) < 1e-10
        assert np.allclose(right, [0.5, 0.5], atol=1e-10)

    def test_reducible_rejected(self):
        with pytest.raises(NotIrreducibleError):
            pf_data([[1, 1], [0, 1]])

    def test_residual_quality(self):
        rng = random.Random(11)
        for _ in range(10):
            s = random_primitive_substitution(rng)
            mat = np.array(transition_matrix(s), dtype=float)
            lam, right, left = pf_data(mat)
            assert np.abs(mat @ right - lam * right).sum() <= 1e-11 * max(lam, 1)
            assert np.abs(mat.T @ left - lam * left).sum() <= 1e-11 * max(lam, 1)


class TestFactorCounts:
    def test_counts_match_materialized_iterates(self):
        # Oracle: materialize the iterate and count factors by scanning.
        rng = random.Random(23)
        for _ in range(6):
            s = random_primitive_substitution(rng, max_letters=4, max_image=3)
            a = s.alphabet[0]
            fc = FactorCounts(s, a, 3)
            word = (a,)
            for t in range(5):
                for block in fc.blocks:
                    assert fc.count(block) == count_occurrences(block, word), (
                        s, a, t, block)
                fc_len = fc.length
                assert fc_len == len(word)
                fc.step()
                word = s(word)

    def test_closure_covers_iterates(self):
        s = Substitution.from_strings({"a": "ab", "b": "a", "c": "cab"})
        blocks = set(block_closure(s, "c", 3))
        word = ("c",)
        for _ in range(8):
            word = s(word)
        for i in range(len(word)):
            for m in range(1, 4):
                if i + m <= len(word):
                    assert word[i:i + m] in blocks

    def test_abelianization(self):
        # Length-1 counts of s^t(a) equal the t-th matrix power row.
        rng = random.Random(5)
        for _ in range(5):
            s = random_primitive_substitution(rng, max_letters=4, max_image=3)
            mat = np.array(transition_matrix(s), dtype=object)
            for t in range(5):
                power = np.linalg.matrix_power(mat, t)
                for i, a in enumerate(s.alphabet):
                    word = naive_iterate(s, (a,), t)
                    for j, b in enumerate(s.alphabet):
                        assert word.count(b) == power[i, j]


class TestStabilizingPower:
    def test_fibonacci(self):
        assert stabilizing_power(FIB) == 1

    def test_swap_has_period_two(self):
        s = Substitution.from_strings({"a": "b", "b": "a"})
        assert stabilizing_power(s) == 2

    def test_cyclic_candidate(self):
        s = Substitution.from_strings({"a": "b", "b": "c", "c": "ab"})
        # Primitive and aperiodic, so the first power already stabilizes.
        assert stabilizing_power(s) == 1

    def test_cap_exceeded_reports_letters(self):
        s = Substitution.from_strings({"a": "b", "b": "a"})
        with pytest.raises(CapExceededError, match="oscillating"):
            stabilizing_power(s, cap=1)


class TestFrequencyLimit:
    def test_fibonacci_direct(self):
        assert abs(frequency_limit(FIB, "a", "a", "direct") - 1 / GOLDEN) < 1e-6
        assert abs(frequency_limit(FIB, "a", "b", "direct") - (1 - 1 / GOLDEN)) < 1e-6

    def test_fibonacci_spectral(self):
        assert abs(frequency_limit(FIB, "a", "a", "spectral") - 1 / GOLDEN) < 1e-10
        assert abs(frequency_limit(FIB, "a", "b", "spectral") - (1 - 1 / GOLDEN)) < 1e-10

    def test_fixed_letter(self):
        s = Substitution.from_strings({"a": "a"})
        assert frequency_limit(s, "a", "a", "direct") == 1.0

    def test_methods_agree_on_random_primitives(self):
        rng = random.Random(101)
        for _ in range(8):
            s = random_primitive_substitution(rng)
            for a in s.alphabet[:2]:
                for b in s.alphabet:
                    d = frequency_limit(s, a, (b,), "direct")
                    sp = frequency_limit(s, a, (b,), "spectral")
                    assert abs(d - sp) < 1e-4, (s, a, b, d, sp)

    def test_letter_frequencies_sum_to_one(self):
        rng = random.Random(55)
        for _ in range(5):
            s = random_primitive_substitution(rng)
            for a in s.alphabet:
                mass = sum(frequency_limit(s, a, (b,), "direct") for b in s.alphabet)
                assert abs(mass - 1.0) < 1e-9

    def test_dominant_stratum_independence(self):
        rng = random.Random(77)
        for _ in range(4):
            s = random_primitive_substitution(rng)
            words = [(b,) for b in s.alphabet]
            tables = [
                [frequency_limit(s, a, w, "direct") for w in words]
                for a in s.alphabet
            ]
            for row in tables[1:]:
                assert max(abs(x - y) for x, y in zip(row, tables[0])) < 1e-6

    def test_two_letter_factor_frequency(self):
        # Fibonacci: the factor "ab" has limit frequency 1 - 1/phi
        # (every b is preceded by an a, and b-frequency is 1 - 1/phi).
        val = frequency_limit(FIB, "a", "ab", "direct")
        assert abs(val - (1 - 1 / GOLDEN)) < 1e-6


class TestLimitBlockFrequencies:
    def test_matches_direct_ratios(self):
        freqs, residual = limit_block_frequencies(FIB, "a", 2)
        assert residual < 1e-11
        assert abs(freqs[("a",)] - 1 / GOLDEN) < 1e-10
        assert abs(freqs[("a", "b")] - (1 - 1 / GOLDEN)) < 1e-10

    def test_kirchhoff_extension_sums(self):
        freqs, _ = limit_block_frequencies(FIB, "a", 3)
        for block, value in freqs.items():
            if len(block) < 3:
                right = sum(freqs.get(block + (x,), 0.0) for x in FIB.alphabet)
                left = sum(freqs.get((x,) + block, 0.0) for x in FIB.alphabet)
                assert abs(value - right) < 1e-9
                assert abs(value - left) < 1e-9


class TestFrequencyTable:
    def test_table_residual(self):
        table = frequency_table(FIB, ["a", "b"], [("a",), ("b",)], method="direct")
        assert table.residual < 1e-9
        assert abs(table.get("a", ("a",)) - 1 / GOLDEN) < 1e-6
