"""Boolean function families and their communication tensors.

A k-party function maps a tuple of k n-bit strings to {0,1}.  Strings are
represented as integers under a fixed big-endian convention: the string
``s_1 s_2 ... s_n`` (s_1 leftmost) is the integer ``sum s_j 2^(n-j)``, and
"bit j" below always means the j-th character of the string, 1-based from
the left.  Fixing the convention once keeps every file format and certificate
bit-exact.

Built-in families:

* ``eq``            — 1 iff all k strings are equal.
* ``gip``           — parity of the positions where all k players hold a 1.
* ``hamming_neq1``  — 1 iff the Hamming weight of the bitwise AND of all
                      strings differs from 1.

``gip`` also carries a ``transpose_roles`` flag that swaps the roles of
players and positions (parity of the players whose whole string is all ones);
the default is the reading every construction in this package relies on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from . import config
from .errors import ArityMismatch, FormatError
from .scalar_linalg import EC_ONE, EC_ZERO, ExactMatrix, exact
from .tensor_core import (
    Decomposition,
    DenseTensor,
    check_size_cap,
    group_matrize,
    superdiagonal_decomposition,
)

# ---------------------------------------------------------------------------
# Core type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BooleanFunction:
    """Total k-party boolean function with an evaluation oracle."""

    name: str
    n: int
    k: int
    _eval: callable = field(repr=False)

    def __post_init__(self):
        if self.k < 2:
            raise ArityMismatch("need at least two players")
        if self.n < 1:
            raise ArityMismatch("need at least one bit per player")

    @property
    def side(self) -> int:
        return 2 ** self.n

    def check_input(self, xs) -> tuple:
        xs = tuple(xs)
        if len(xs) != self.k:
            raise ArityMismatch(f"{self.name} takes {self.k} strings, got {len(xs)}")
        for x in xs:
            if not isinstance(x, int) or not 0 <= x < self.side:
                raise ArityMismatch(f"input {x!r} is not an {self.n}-bit string")
        return xs

    def value(self, xs) -> int:
        return self._eval(self.check_input(xs))

    def sign_value(self, xs) -> int:
        """The +-1 view: +1 on 1-inputs, -1 on 0-inputs."""
        return 2 * self.value(xs) - 1

    def inputs(self):
        return product(range(self.side), repeat=self.k)

    def ones(self):
        return (xs for xs in self.inputs() if self.value(xs) == 1)


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _validate(n: int, k: int, xs, name: str) -> tuple:
    xs = tuple(xs)
    if len(xs) != k:
        raise ArityMismatch(f"{name} takes {k} strings, got {len(xs)}")
    for x in xs:
        if not isinstance(x, int) or not 0 <= x < 2 ** n:
            raise ArityMismatch(f"input {x!r} is not an {n}-bit string")
    return xs


def eval_eq(n: int, k: int, xs) -> int:
    """1 iff all strings are equal."""
    xs = _validate(n, k, xs, "eq")
    return 1 if all(x == xs[0] for x in xs) else 0


def eval_gip(n: int, k: int, xs, transpose_roles: bool = False) -> int:
    """Parity of positions where every player holds a 1.

    With ``transpose_roles`` the summation runs over players and the
    conjunction over positions instead (parity of all-ones strings).
    """
    xs = _validate(n, k, xs, "gip")
    if transpose_roles:
        full = (1 << n) - 1
        return sum(1 for x in xs if x == full) % 2
    acc = (1 << n) - 1
    for x in xs:
        acc &= x
    return _popcount(acc) % 2


def eval_hamming_neq1(n: int, k: int, xs) -> int:
    """1 iff the Hamming weight of x_1 & ... & x_k is not 1."""
    xs = _validate(n, k, xs, "hamming_neq1")
    acc = (1 << n) - 1
    for x in xs:
        acc &= x
    return 1 if _popcount(acc) != 1 else 0


# ---------------------------------------------------------------------------
# Family builders
# ---------------------------------------------------------------------------


def equality(n: int, k: int) -> BooleanFunction:
    return BooleanFunction("eq", n, k, lambda xs: 1 if all(x == xs[0] for x in xs) else 0)


def gip(n: int, k: int, transpose_roles: bool = False) -> BooleanFunction:
    if transpose_roles:
        full = (1 << n) - 1

        def ev(xs):
            return sum(1 for x in xs if x == full) % 2

        return BooleanFunction("gip_transposed", n, k, ev)

    def ev(xs):
        acc = (1 << n) - 1
        for x in xs:
            acc &= x
        return _popcount(acc) % 2

    return BooleanFunction("gip", n, k, ev)


def hamming_neq1(n: int, k: int) -> BooleanFunction:
    def ev(xs):
        acc = (1 << n) - 1
        for x in xs:
            acc &= x
        return 1 if _popcount(acc) != 1 else 0

    return BooleanFunction("hamming_neq1", n, k, ev)


def constant(n: int, k: int, bit: int) -> BooleanFunction:
    return BooleanFunction(f"const{bit}", n, k, lambda xs: bit)


BUILTIN_FUNCTIONS = {
    "eq": equality,
    "gip": gip,
    "gip_transposed": lambda n, k: gip(n, k, transpose_roles=True),
    "hamming_neq1": hamming_neq1,
    "const0": lambda n, k: constant(n, k, 0),
    "const1": lambda n, k: constant(n, k, 1),
}


def from_name(name: str, n: int, k: int) -> BooleanFunction:
    try:
        builder = BUILTIN_FUNCTIONS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_FUNCTIONS))
        raise KeyError(f"unknown function {name!r}; known: {known}") from None
    return builder(n, k)


def load_truth_table(path, name: str = "custom") -> BooleanFunction:
    """Read a custom function from a truth-table file.

    One line per input: k whitespace-separated bit strings followed by the
    function value, e.g. ``01 11 01 0``.  Every input must appear exactly once.
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    table = {}
    n = k = None
    for off, line in enumerate(raw):
        lineno = off + 1
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        toks = line.split()
        if len(toks) < 3:
            raise FormatError("need k bit strings and a value", lineno)
        *strs, bit = toks
        if bit not in ("0", "1"):
            raise FormatError(f"value must be 0 or 1, got {bit!r}", lineno)
        if k is None:
            k = len(strs)
            n = len(strs[0])
        if len(strs) != k:
            raise FormatError(f"expected {k} strings", lineno)
        xs = []
        for s in strs:
            if len(s) != n or any(ch not in "01" for ch in s):
                raise FormatError(f"bad {n}-bit string {s!r}", lineno)
            xs.append(int(s, 2))
        key = tuple(xs)
        if key in table:
            raise FormatError(f"duplicate input {' '.join(strs)}", lineno)
        table[key] = int(bit)
    if not table:
        raise FormatError("empty truth table", 1)
    if len(table) != (2 ** n) ** k:
        raise FormatError(
            f"truth table covers {len(table)} of {(2 ** n) ** k} inputs", len(raw)
        )
    return BooleanFunction(name, n, k, lambda xs: table[tuple(xs)])


# ---------------------------------------------------------------------------
# Tensors
# ---------------------------------------------------------------------------


def canonical_tensor(f: BooleanFunction) -> DenseTensor:
    """The 0/1 communication tensor: entry = f at the index tuple."""
    dims = (f.side,) * f.k
    check_size_cap(dims)
    return DenseTensor(dims, [exact(f.value(xs)) for xs in f.inputs()])


def inner_product_matrix(n: int) -> ExactMatrix:
    """The 2-party inner-product 0/1 matrix (entry <x|y> mod 2)."""
    t = canonical_tensor(gip(n, 2))
    return group_matrize(t, 1)


def eq_nondet_decomposition(n: int, k: int) -> Decomposition:
    """The superdiagonal witness for equality: one term e_x^(x)k per string."""
    check_size_cap((2 ** n,) * k)
    return superdiagonal_decomposition(2 ** n, [EC_ONE] * (2 ** n), k)


def hamming_nondet_decomposition(n: int, k: int) -> Decomposition:
    """n+1 rank-1 terms materializing to |x_1 & ... & x_k| - 1.

    For each position j there is one term whose mode-i vector indicates "bit j
    of x_i is 1"; the extra term is the all-ones outer product scaled by -1.
    The sum is zero exactly where the AND has weight 1, i.e. on the 0-inputs
    of ``hamming_neq1``.
    """
    side = 2 ** n
    check_size_cap((side,) * k)
    terms = []
    for j in range(1, n + 1):
        mask = 1 << (n - j)
        indicator = tuple(EC_ONE if (x & mask) else EC_ZERO for x in range(side))
        terms.append((indicator,) * k)
    minus_ones = (exact(-1),) * side
    ones = (EC_ONE,) * side
    terms.append((minus_ones,) + (ones,) * (k - 1))
    return Decomposition((side,) * k, tuple(terms))


def random_nondet_substitution(
    f: BooleanFunction, rng_seed: int, bound: int = config.SUBSTITUTION_BOUND
) -> DenseTensor:
    """Replace every 1-entry of the canonical tensor by a random nonzero
    Gaussian integer with components in [-bound, bound]; deterministic in
    the seed, and the zero pattern never depends on the draw."""
    dims = (f.side,) * f.k
    check_size_cap(dims)
    rng = random.Random(rng_seed)
    entries = []
    for xs in f.inputs():
        if f.value(xs) == 0:
            entries.append(EC_ZERO)
            continue
        while True:
            a = rng.randint(-bound, bound)
            b = rng.randint(-bound, bound)
            if a or b:
                break
        entries.append(exact(a, b))
    return DenseTensor(dims, entries)
