from itertools import permutations, product

import pytest

from nqtensor.errors import ArityMismatch, FormatError, SizeCapExceeded
from nqtensor.functions import (
    BUILTIN_FUNCTIONS,
    canonical_tensor,
    constant,
    eq_nondet_decomposition,
    equality,
    eval_eq,
    eval_gip,
    eval_hamming_neq1,
    from_name,
    gip,
    hamming_neq1,
    hamming_nondet_decomposition,
    inner_product_matrix,
    load_truth_table,
    random_nondet_substitution,
)
from nqtensor.rank_bounds import pattern_check
from nqtensor.scalar_linalg import exact
from nqtensor.tensor_core import DenseTensor, materialize, superdiagonal

# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------


def test_eval_eq_examples():
    assert eval_eq(2, 3, (0b01, 0b01, 0b01)) == 1
    assert eval_eq(2, 3, (0b01, 0b01, 0b11)) == 0


def test_eval_eq_two_party_matches_direct_comparison():
    for x, y in product(range(4), repeat=2):
        assert eval_eq(2, 2, (x, y)) == (1 if x == y else 0)


def test_eval_eq_arity():
    with pytest.raises(ArityMismatch):
        eval_eq(2, 3, (0, 1))
    with pytest.raises(ArityMismatch):
        eval_eq(1, 2, (2, 0))


def test_eval_gip_examples():
    assert eval_gip(2, 3, (0b11, 0b11, 0b11)) == 0  # two all-ones positions
    assert eval_gip(2, 3, (0b10, 0b10, 0b10)) == 1  # one all-ones position


def test_eval_gip_two_party_is_inner_product():
    m = inner_product_matrix(2)
    for x, y in product(range(4), repeat=2):
        expected = bin(x & y).count("1") % 2
        assert eval_gip(2, 2, (x, y)) == expected
        assert (not m.entry(x, y).is_zero()) == bool(expected)


def test_eval_gip_transposed_reading():
    # parity of players holding the all-ones string
    assert eval_gip(2, 3, (0b11, 0b11, 0b01), transpose_roles=True) == 0
    assert eval_gip(2, 3, (0b11, 0b10, 0b01), transpose_roles=True) == 1
    assert from_name("gip_transposed", 2, 3).value((0b11, 0b10, 0b01)) == 1


def test_gip_symmetric_under_player_permutation():
    f = gip(2, 3)
    for xs in f.inputs():
        base = f.value(xs)
        for perm in permutations(xs):
            assert f.value(perm) == base


def test_eval_hamming_examples():
    assert eval_hamming_neq1(3, 3, (0b110, 0b110, 0b110)) == 1  # weight 2
    assert eval_hamming_neq1(3, 3, (0b100, 0b100, 0b100)) == 0  # weight 1
    assert eval_hamming_neq1(3, 3, (0b000, 0b111, 0b010)) == 1  # weight 0


def test_hamming_symmetries():
    f = hamming_neq1(2, 3)
    for xs in f.inputs():
        base = f.value(xs)
        for perm in permutations(xs):
            assert f.value(perm) == base
        # swap the two bit positions in every string simultaneously
        swapped = tuple(((x & 1) << 1) | (x >> 1) for x in xs)
        assert f.value(swapped) == base


def test_sign_view():
    f = hamming_neq1(2, 3)
    for xs in f.inputs():
        assert f.sign_value(xs) == (1 if f.value(xs) == 1 else -1)


# ---------------------------------------------------------------------------
# canonical tensors
# ---------------------------------------------------------------------------


def test_canonical_eq_is_superdiagonal():
    assert canonical_tensor(equality(1, 3)) == superdiagonal(2, [1, 1], 3)


def test_canonical_gip_n1_single_entry():
    t = canonical_tensor(gip(1, 3))
    for idx in t.indices():
        expected = exact(1 if idx == (1, 1, 1) else 0)
        assert t.entry(idx) == expected


@pytest.mark.parametrize("name,n,k", [
    ("eq", 2, 3), ("gip", 2, 3), ("hamming_neq1", 2, 3),
    ("eq", 3, 3), ("gip", 3, 3), ("hamming_neq1", 3, 3),
])
def test_canonical_matches_evaluator_exhaustively(name, n, k):
    f = from_name(name, n, k)
    t = canonical_tensor(f)
    for xs in f.inputs():
        assert t.entry(xs) == exact(f.value(xs))


def test_size_cap(monkeypatch):
    monkeypatch.setenv("NQTENSOR_SIZE_CAP", "32")
    with pytest.raises(SizeCapExceeded):
        canonical_tensor(equality(2, 3))
    monkeypatch.setenv("NQTENSOR_SIZE_CAP", "64")
    canonical_tensor(equality(2, 3))


# ---------------------------------------------------------------------------
# nondeterministic constructions
# ---------------------------------------------------------------------------


def test_eq_decomposition_small():
    d = eq_nondet_decomposition(1, 3)
    assert d.term_count == 2
    assert materialize(d) == superdiagonal(2, [1, 1], 3)


def test_eq_decomposition_pattern():
    d = eq_nondet_decomposition(2, 3)
    assert d.term_count == 4
    assert pattern_check(materialize(d), equality(2, 3))


def test_eq_decomposition_term_count_n3():
    assert eq_nondet_decomposition(3, 3).term_count == 8


def test_hamming_decomposition_entry_values():
    d = hamming_nondet_decomposition(2, 3)
    assert d.term_count == 3  # n + 1
    t = materialize(d)
    # AND weight 2 -> 1+1-1 = 1; weight 1 -> 0; weight 0 -> -1
    assert t.entry((0b11, 0b11, 0b11)) == exact(1)
    assert t.entry((0b10, 0b10, 0b11)) == exact(0)
    assert t.entry((0b00, 0b11, 0b01)) == exact(-1)


def test_hamming_decomposition_pattern():
    for n, k in ((1, 3), (2, 3), (3, 3), (2, 4)):
        d = hamming_nondet_decomposition(n, k)
        assert d.term_count == n + 1
        assert pattern_check(materialize(d), hamming_neq1(n, k))


def test_random_substitution_constant0_is_zero():
    t = random_nondet_substitution(constant(1, 3, 0), rng_seed=5)
    assert t == DenseTensor.zero((2, 2, 2))


def test_random_substitution_pattern_over_seeds():
    f = gip(2, 3)
    for s in range(5):
        assert pattern_check(random_nondet_substitution(f, s), f)


def test_random_substitution_zero_pattern_is_seed_independent():
    f = hamming_neq1(2, 3)
    a = random_nondet_substitution(f, 1)
    b = random_nondet_substitution(f, 2)
    for idx in a.indices():
        assert a.entry(idx).is_zero() == b.entry(idx).is_zero()


def test_random_substitution_deterministic():
    f = equality(1, 3)
    assert random_nondet_substitution(f, 9) == random_nondet_substitution(f, 9)


def test_random_substitution_bound():
    t = random_nondet_substitution(equality(2, 3), 3, bound=2)
    for e in t.entries:
        assert abs(e.re) <= 2 and abs(e.im) <= 2


# ---------------------------------------------------------------------------
# registry and truth tables
# ---------------------------------------------------------------------------


def test_registry_names():
    assert {"eq", "gip", "hamming_neq1"} <= set(BUILTIN_FUNCTIONS)
    with pytest.raises(KeyError):
        from_name("nope", 1, 2)


def test_truth_table_roundtrip(tmp_path):
    f = equality(1, 2)
    lines = []
    for xs in f.inputs():
        strs = " ".join(format(x, "01b") for x in xs)
        lines.append(f"{strs} {f.value(xs)}")
    path = tmp_path / "eq.tt"
    path.write_text("# equality on one bit\n" + "\n".join(lines) + "\n")
    g = load_truth_table(path, name="eq_from_file")
    assert (g.n, g.k) == (1, 2)
    for xs in f.inputs():
        assert g.value(xs) == f.value(xs)


def test_truth_table_incomplete(tmp_path):
    path = tmp_path / "bad.tt"
    path.write_text("0 0 1\n")
    with pytest.raises(FormatError):
        load_truth_table(path)


def test_truth_table_bad_value(tmp_path):
    path = tmp_path / "bad.tt"
    path.write_text("0 0 2\n")
    with pytest.raises(FormatError) as err:
        load_truth_table(path)
    assert err.value.line == 1
