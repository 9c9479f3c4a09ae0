import random
from fractions import Fraction

import pytest

from conftest import minor_rank
from nqtensor.errors import DimMismatch, FormatError
from nqtensor.functions import canonical_tensor, equality, gip, inner_product_matrix
from nqtensor.scalar_linalg import EC_ONE, EC_ZERO, exact, exact_rank
from nqtensor.tensor_core import (
    Decomposition,
    DenseTensor,
    fiber,
    group_matrize,
    lift_order,
    materialize,
    outer_product,
    read_dec,
    read_tsr,
    superdiagonal,
    superdiagonal_decomposition,
    tensor_slice,
    unfold,
    write_dec,
    write_tsr,
)

# ---------------------------------------------------------------------------
# outer products and materialization
# ---------------------------------------------------------------------------


def test_outer_product_unit_vectors():
    e0 = [1, 0]
    t = outer_product([e0, e0, e0])
    assert t.entry((0, 0, 0)) == EC_ONE
    assert sum(0 if e.is_zero() else 1 for e in t.entries) == 1


def test_outer_product_all_ones_matrix():
    t = outer_product([[1, 1], [1, 1]])
    assert all(e == EC_ONE for e in t.entries)


def test_outer_product_direct_entry():
    t = outer_product([[1, 2], [3, 0], [1, 1]])
    assert t.entry((1, 0, 1)) == exact(6)


def test_materialize_empty_is_zero():
    d = Decomposition((2, 2, 2), ())
    assert materialize(d) == DenseTensor.zero((2, 2, 2))


def test_materialize_single_term_is_outer_product():
    vs = [[1, 2], [0, 1], [1, -1]]
    d = Decomposition((2, 2, 2), (tuple(tuple(exact(x) for x in v) for v in vs),))
    assert materialize(d) == outer_product(vs)


def test_materialize_diagonal_terms_reproduce_superdiagonal():
    d = superdiagonal_decomposition(2, [1, 1], 3)
    assert d.term_count == 2
    assert materialize(d) == superdiagonal(2, [1, 1], 3)


# ---------------------------------------------------------------------------
# fibers and slices
# ---------------------------------------------------------------------------


def test_fiber_superdiagonal():
    t = superdiagonal(2, [1, 1], 3)
    assert fiber(t, 1, (None, 0, 0)) == (EC_ONE, EC_ZERO)
    assert fiber(t, 1, (None, 0, 1)) == (EC_ZERO, EC_ZERO)


def test_fiber_all_ones():
    t = outer_product([[1, 1], [1, 1], [1, 1]])
    for fixed in ((None, 0, 1), (0, None, 0), (1, 1, None)):
        mode = fixed.index(None) + 1
        assert fiber(t, mode, fixed) == (EC_ONE, EC_ONE)


def test_fiber_bad_fixed_index():
    t = superdiagonal(2, [1, 1], 3)
    with pytest.raises(IndexError):
        fiber(t, 1, (None, 0, 5))


def test_slice_of_gip_canonical_is_inner_product_pattern():
    t = canonical_tensor(gip(2, 3))
    sl = tensor_slice(t, 1, 2, (None, None, 3))  # players 3.. pinned to 11
    assert sl == inner_product_matrix(2)


def test_slice_zero_tensor():
    sl = tensor_slice(DenseTensor.zero((2, 3, 2)), 1, 2, (None, None, 1))
    assert all(e.is_zero() for e in sl.entries)


def test_slice_of_outer_product_is_rank_one():
    t = outer_product([[1, 2], [1, -1], [2, 3]])
    sl = tensor_slice(t, 1, 3, (None, 1, None))
    assert exact_rank(sl) == 1


# ---------------------------------------------------------------------------
# unfoldings and matrizations
# ---------------------------------------------------------------------------


def test_unfold_superdiagonal_columns():
    t = superdiagonal(2, [1, 1], 3)
    m = unfold(t, 1)
    cols = [tuple(m.entry(i, j) for i in range(2)) for j in range(4)]
    assert cols == [
        (EC_ONE, EC_ZERO),
        (EC_ZERO, EC_ZERO),
        (EC_ZERO, EC_ZERO),
        (EC_ZERO, EC_ONE),
    ]


def test_unfold_rank_one_in_every_mode():
    t = outer_product([[1, 2], [1, -1], [2, 3]])
    for mode in (1, 2, 3):
        assert exact_rank(unfold(t, mode)) == 1


def test_unfold_gip_n1_k3_mode1():
    t = canonical_tensor(gip(1, 3))
    m = unfold(t, 1)
    assert (m.rows, m.cols) == (2, 4)
    nonzero = [(i, j) for i in range(2) for j in range(4) if not m.entry(i, j).is_zero()]
    assert nonzero == [(1, 3)]  # the (1, (1,1)) column
    assert exact_rank(m) == minor_rank(m) == 1


def test_group_matrize_order2_is_itself():
    t = DenseTensor((2, 3), [exact(v) for v in (1, 2, 3, 4, 5, 6)])
    m = group_matrize(t, 1)
    assert (m.rows, m.cols) == (2, 3)
    assert [e.re for e in m.entries] == [1, 2, 3, 4, 5, 6]
    assert m == unfold(t, 1)


def test_group_matrize_superdiagonal_order4():
    t = superdiagonal(2, [1, 1], 4)
    m = group_matrize(t, 2)
    nonzero = [(i, j) for i in range(4) for j in range(4) if not m.entry(i, j).is_zero()]
    assert nonzero == [(0, 0), (3, 3)]


def _random_decomposition(rng, dims, terms):
    out = []
    for _ in range(terms):
        term = tuple(
            tuple(exact(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(d))
            for d in dims
        )
        out.append(term)
    return Decomposition(dims, tuple(out))


def test_group_matrize_rank_bounded_by_term_count():
    rng = random.Random(4)
    for _ in range(10):
        d = _random_decomposition(rng, (2, 2, 2, 2), 3)
        t = materialize(d)
        for split in (1, 2, 3):
            assert exact_rank(group_matrize(t, split)) <= d.term_count


# ---------------------------------------------------------------------------
# order lift
# ---------------------------------------------------------------------------


def test_lift_single_term_constant_slices():
    d = Decomposition((2, 2), ((tuple([exact(1), exact(2)]), tuple([exact(3), exact(1)])),))
    lifted = materialize(lift_order(d))
    base = materialize(d)
    for v in range(2):
        for idx in base.indices():
            assert lifted.entry(idx + (v,)) == base.entry(idx)


def test_lift_preserves_term_count():
    d = superdiagonal_decomposition(2, [1, 1], 3)
    lifted = lift_order(d)
    assert lifted.term_count == 2
    assert lifted.order == 4


def test_lift_then_group_matrize_rank_bound():
    rng = random.Random(11)
    for terms in (1, 2, 3, 4):
        d = _random_decomposition(rng, (2, 2, 2), terms)
        lifted = lift_order(d)
        m = group_matrize(materialize(lifted), 2)
        assert exact_rank(m) <= terms


def test_lift_length_configurable():
    d = superdiagonal_decomposition(2, [1, 1], 2)
    lifted = lift_order(d, length=3)
    assert materialize(lifted).dims == (2, 2, 3)


# ---------------------------------------------------------------------------
# superdiagonal
# ---------------------------------------------------------------------------


def test_superdiagonal_matches_eq_canonical():
    assert superdiagonal(2, [1, 1], 3) == canonical_tensor(equality(1, 3))


def test_superdiagonal_zero_diag():
    assert superdiagonal(2, [0, 0], 3) == DenseTensor.zero((2, 2, 2))


def test_superdiagonal_unfold_rank_counts_nonzeros():
    t = superdiagonal(3, [1, 0, 2], 3)
    assert exact_rank(unfold(t, 1)) == 2


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def test_tsr_roundtrip(tmp_path):
    t = canonical_tensor(gip(2, 3)).scale(exact(Fraction(1, 3), Fraction(-2, 5)))
    path = tmp_path / "t.tsr"
    write_tsr(path, t)
    assert read_tsr(path) == t


def test_tsr_bad_entry_line(tmp_path):
    path = tmp_path / "bad.tsr"
    path.write_text("order 3\n2 2 2\n0 0 0 1/1\n")
    with pytest.raises(FormatError) as err:
        read_tsr(path)
    assert err.value.line == 3


def test_tsr_index_out_of_range(tmp_path):
    path = tmp_path / "bad.tsr"
    path.write_text("order 3\n2 2 2\n0 0 5 1/1 0/1\n")
    with pytest.raises(FormatError) as err:
        read_tsr(path)
    assert err.value.line == 3


def test_dec_roundtrip(tmp_path):
    d = _random_decomposition(random.Random(3), (2, 3, 2), 2)
    path = tmp_path / "d.dec"
    write_dec(path, d)
    back = read_dec(path)
    assert back.dims == d.dims
    assert back.terms == d.terms


def test_dec_bad_header(tmp_path):
    path = tmp_path / "bad.dec"
    path.write_text("3 2 2\n")
    with pytest.raises(FormatError) as err:
        read_dec(path)
    assert err.value.line == 1


def test_order_must_be_at_least_two():
    with pytest.raises(DimMismatch):
        DenseTensor((4,), [EC_ZERO] * 4)
