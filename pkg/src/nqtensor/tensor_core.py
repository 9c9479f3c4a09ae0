"""Dense order-k tensors over the exact field, and their standard sections.

A :class:`DenseTensor` is a flat row-major array (last index fastest) with an
explicit ``dims`` vector.  A :class:`Decomposition` is a list of rank-1 terms,
each term being one exact vector per mode; materializing it gives back a dense
tensor whose rank is at most the term count.

Sections follow the usual conventions:

* ``fiber``           — fix all but one index, read a vector.
* ``tensor_slice``    — fix all but two indices, read a matrix.
* ``unfold``          — mode-i fibers arranged as columns, remaining indices
                        in ascending-mode lexicographic order.
* ``group_matrize``   — merge the leading ``split`` modes into rows and the
                        rest into columns (the "operator" view of a tensor).

Modes are numbered 1..k throughout, matching the usual multilinear-algebra
convention.  The column order inside ``unfold`` is one fixed choice among the
many consistent ones; fixing it makes the file formats bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from . import config
from .errors import DimMismatch, FormatError, SizeCapExceeded
from .scalar_linalg import (
    EC_ONE,
    EC_ZERO,
    ExactComplex,
    ExactMatrix,
    coerce_exact,
    format_exact_scalar,
    parse_exact_scalar,
)

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class DenseTensor:
    """Order-k dense tensor of ExactComplex entries, row-major storage."""

    __slots__ = ("dims", "entries")

    def __init__(self, dims, entries):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2:
            raise DimMismatch("tensor order must be at least 2")
        entries = tuple(entries)
        if len(entries) != math.prod(dims):
            raise DimMismatch(
                f"expected {math.prod(dims)} entries for dims {dims}, got {len(entries)}"
            )
        self.dims = dims
        self.entries = entries

    @property
    def order(self) -> int:
        return len(self.dims)

    @classmethod
    def zero(cls, dims) -> "DenseTensor":
        return cls(dims, [EC_ZERO] * math.prod(dims))

    @classmethod
    def from_function(cls, dims, fn) -> "DenseTensor":
        check_size_cap(dims)
        return cls(dims, [coerce_or_pass(fn(idx)) for idx in product(*(range(d) for d in dims))])

    def flat_index(self, idx) -> int:
        if len(idx) != self.order:
            raise IndexError(f"need {self.order} indices, got {len(idx)}")
        flat = 0
        for d, j in zip(self.dims, idx):
            if not 0 <= j < d:
                raise IndexError(f"index {idx} out of range for dims {self.dims}")
            flat = flat * d + j
        return flat

    def entry(self, idx) -> ExactComplex:
        return self.entries[self.flat_index(idx)]

    def indices(self):
        return product(*(range(d) for d in self.dims))

    def scale(self, c: ExactComplex) -> "DenseTensor":
        return DenseTensor(self.dims, [c * e for e in self.entries])

    def __eq__(self, other):
        return (
            isinstance(other, DenseTensor)
            and self.dims == other.dims
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"DenseTensor(dims={self.dims})"


@dataclass(frozen=True)
class Decomposition:
    """Sum-of-rank-1-terms representation; term count bounds the rank."""

    dims: tuple
    terms: tuple  # each term: tuple of `order` vectors (tuples of ExactComplex)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        terms = []
        for term in self.terms:
            term = tuple(tuple(coerce_exact(v) for v in vec) for vec in term)
            if len(term) != len(self.dims):
                raise DimMismatch("each term needs one vector per mode")
            for vec, d in zip(term, self.dims):
                if len(vec) != d:
                    raise DimMismatch(f"vector length {len(vec)} != dim {d}")
            terms.append(term)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def term_count(self) -> int:
        return len(self.terms)


def coerce_or_pass(v):
    return v if isinstance(v, ExactComplex) else coerce_exact(v)


def check_size_cap(dims) -> None:
    total = math.prod(dims)
    cap = config.size_cap()
    if total > cap:
        raise SizeCapExceeded(f"{total} entries exceed cap {cap}")


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def outer_product(vectors) -> DenseTensor:
    """Rank-1 tensor whose entry at (j_1..j_k) is the product of components."""
    vectors = [tuple(coerce_exact(v) for v in vec) for vec in vectors]
    if len(vectors) < 2:
        raise DimMismatch("need at least two vectors")
    if any(len(v) == 0 for v in vectors):
        raise DimMismatch("vectors must be nonempty")
    dims = tuple(len(v) for v in vectors)
    check_size_cap(dims)
    entries = []
    for idx in product(*(range(d) for d in dims)):
        acc = EC_ONE
        for vec, j in zip(vectors, idx):
            acc = acc * vec[j]
        entries.append(acc)
    return DenseTensor(dims, entries)


def materialize(d: Decomposition) -> DenseTensor:
    """Entrywise sum of the outer products of all terms."""
    check_size_cap(d.dims)
    total = [EC_ZERO] * math.prod(d.dims)
    for term in d.terms:
        for flat, idx in enumerate(product(*(range(n) for n in d.dims))):
            acc = EC_ONE
            for vec, j in zip(term, idx):
                acc = acc * vec[j]
            total[flat] = total[flat] + acc
    return DenseTensor(d.dims, total)


def superdiagonal(side: int, diag, order: int) -> DenseTensor:
    """Tensor with diag[j] at position (j,...,j) and zero elsewhere."""
    diag = [coerce_exact(v) for v in diag]
    if len(diag) != side:
        raise DimMismatch("diag length must equal side")
    dims = (side,) * order
    check_size_cap(dims)
    entries = [EC_ZERO] * math.prod(dims)
    for j in range(side):
        flat = 0
        for _ in range(order):
            flat = flat * side + j
        entries[flat] = diag[j]
    return DenseTensor(dims, entries)


def superdiagonal_decomposition(side: int, diag, order: int) -> Decomposition:
    """One rank-1 term per nonzero diagonal entry: diag[j] * e_j^(x)order."""
    diag = [coerce_exact(v) for v in diag]
    terms = []
    for j, val in enumerate(diag):
        if val.is_zero():
            continue
        first = tuple(val if t == j else EC_ZERO for t in range(side))
        unit = tuple(EC_ONE if t == j else EC_ZERO for t in range(side))
        terms.append((first,) + (unit,) * (order - 1))
    return Decomposition((side,) * order, tuple(terms))


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def _check_mode(t: DenseTensor, mode: int) -> None:
    if not 1 <= mode <= t.order:
        raise IndexError(f"mode {mode} out of range for order {t.order}")


def fiber(t: DenseTensor, mode: int, fixed):
    """Mode-`mode` fiber: the vector along the free index at `fixed`.

    `fixed` supplies one value per mode; the entry at the free mode is
    ignored (conventionally None).
    """
    _check_mode(t, mode)
    _check_fixed(t, fixed, free={mode})
    out = []
    idx = list(fixed)
    for j in range(t.dims[mode - 1]):
        idx[mode - 1] = j
        out.append(t.entry(tuple(idx)))
    return tuple(out)


def _check_fixed(t: DenseTensor, fixed, free) -> None:
    if len(fixed) != t.order:
        raise IndexError("fixed tuple must cover every mode")
    for m, j in enumerate(fixed, start=1):
        if m in free:
            continue
        if not isinstance(j, int) or not 0 <= j < t.dims[m - 1]:
            raise IndexError(f"fixed index {j!r} out of range at mode {m}")


def tensor_slice(t: DenseTensor, mode_a: int, mode_b: int, fixed) -> ExactMatrix:
    """Two-dimensional section: rows run over mode_a, columns over mode_b."""
    _check_mode(t, mode_a)
    _check_mode(t, mode_b)
    if not mode_a < mode_b:
        raise IndexError("need mode_a < mode_b")
    _check_fixed(t, fixed, free={mode_a, mode_b})
    da, db = t.dims[mode_a - 1], t.dims[mode_b - 1]
    idx = list(fixed)
    entries = []
    for i in range(da):
        idx[mode_a - 1] = i
        for j in range(db):
            idx[mode_b - 1] = j
            entries.append(t.entry(tuple(idx)))
    return ExactMatrix(da, db, entries)


def unfold(t: DenseTensor, mode: int) -> ExactMatrix:
    """Mode-`mode` unfolding: fibers as columns.

    Columns are ordered lexicographically by the remaining indices taken in
    ascending mode order.
    """
    _check_mode(t, mode)
    rest = [m for m in range(1, t.order + 1) if m != mode]
    d_mode = t.dims[mode - 1]
    n_cols = math.prod(t.dims) // d_mode
    entries = [None] * (d_mode * n_cols)
    for col, rest_idx in enumerate(product(*(range(t.dims[m - 1]) for m in rest))):
        idx = [0] * t.order
        for m, j in zip(rest, rest_idx):
            idx[m - 1] = j
        for i in range(d_mode):
            idx[mode - 1] = i
            entries[i * n_cols + col] = t.entry(tuple(idx))
    return ExactMatrix(d_mode, n_cols, entries)


def group_matrize(t: DenseTensor, split: int) -> ExactMatrix:
    """Merge modes 1..split into rows and modes split+1..k into columns."""
    if not 1 <= split < t.order:
        raise IndexError(f"split {split} out of range for order {t.order}")
    rows = math.prod(t.dims[:split])
    cols = math.prod(t.dims[split:])
    # row-major storage with last index fastest makes this a plain reshape
    return ExactMatrix(rows, cols, t.entries)


# ---------------------------------------------------------------------------
# Order lift
# ---------------------------------------------------------------------------


def lift_order(d: Decomposition, length: int = 2) -> Decomposition:
    """Append an all-ones vector of `length` to every term.

    The materialized result repeats the original tensor along the new last
    mode, so the term count (and with it the rank certificate) is unchanged.
    """
    ones = (EC_ONE,) * length
    return Decomposition(d.dims + (length,), tuple(term + (ones,) for term in d.terms))


# ---------------------------------------------------------------------------
# .tsr / .dec text formats
# ---------------------------------------------------------------------------


def write_tsr(path, t: DenseTensor) -> None:
    lines = [f"order {t.order}", " ".join(str(d) for d in t.dims)]
    for idx in t.indices():
        e = t.entry(idx)
        if e.is_zero():
            continue
        lines.append(
            " ".join(str(j) for j in idx)
            + f" {e.re.numerator}/{e.re.denominator} {e.im.numerator}/{e.im.denominator}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_tsr(path) -> DenseTensor:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if len(raw) < 2:
        raise FormatError("need an order line and a dims line", max(1, len(raw)))
    head = raw[0].split()
    if len(head) != 2 or head[0] != "order":
        raise FormatError("line must read 'order k'", 1)
    try:
        order = int(head[1])
    except ValueError:
        raise FormatError("line must read 'order k'", 1) from None
    try:
        dims = tuple(int(tok) for tok in raw[1].split())
    except ValueError:
        raise FormatError("dims line must be integers", 2)
    if len(dims) != order:
        raise FormatError(f"expected {order} dims", 2)
    check_size_cap(dims)
    entries = [EC_ZERO] * math.prod(dims)
    for off, line in enumerate(raw[2:]):
        lineno = off + 3
        if not line.strip():
            continue
        toks = line.split()
        if len(toks) != order + 2:
            raise FormatError(f"expected {order} indices and 2 rationals", lineno)
        try:
            idx = tuple(int(tok) for tok in toks[:order])
        except ValueError:
            raise FormatError("bad index", lineno) from None
        try:
            re_p, re_q = toks[order].split("/")
            im_p, im_q = toks[order + 1].split("/")
            val = ExactComplex(
                _fraction(re_p, re_q, lineno), _fraction(im_p, im_q, lineno)
            )
        except ValueError:
            raise FormatError("bad rational", lineno) from None
        flat = 0
        for d, j in zip(dims, idx):
            if not 0 <= j < d:
                raise FormatError(f"index {idx} out of range", lineno)
            flat = flat * d + j
        entries[flat] = val
    return DenseTensor(dims, entries)


def _fraction(p, q, lineno):
    from fractions import Fraction

    try:
        qi = int(q)
        if qi == 0:
            raise FormatError("zero denominator", lineno)
        return Fraction(int(p), qi)
    except ValueError:
        raise FormatError("bad rational", lineno) from None


def write_dec(path, d: Decomposition) -> None:
    lines = [f"{d.order} " + " ".join(str(x) for x in d.dims) + f" {d.term_count}"]
    for term in d.terms:
        for vec in term:
            lines.append(" ".join(format_exact_scalar(v) for v in vec))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dec(path) -> Decomposition:
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise FormatError("empty .dec file", 1)
    head = raw[0].split()
    if len(head) < 3:
        raise FormatError("header must be 'order dims... r'", 1)
    try:
        order = int(head[0])
        dims = tuple(int(tok) for tok in head[1:1 + order])
        r = int(head[-1])
    except (ValueError, IndexError):
        raise FormatError("header must be 'order dims... r'", 1) from None
    if len(head) != order + 2:
        raise FormatError("header must be 'order dims... r'", 1)
    body = [(lineno, line) for lineno, line in enumerate(raw[1:], start=2)
            if line.strip()]
    if len(body) < r * order:
        raise FormatError(f"expected {r} blocks of {order} vector lines",
                          max(1, len(raw)))
    terms = []
    pos = 0
    for _ in range(r):
        term = []
        for _ in range(order):
            lineno, line = body[pos]
            term.append(tuple(parse_exact_scalar(tok, lineno) for tok in line.split()))
            pos += 1
        terms.append(tuple(term))
    return Decomposition(dims, tuple(terms))
