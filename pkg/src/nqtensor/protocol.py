"""Quantum multiparty protocol machinery.

Model: k players with local spaces H_1..H_k plus a single-qubit channel C.
A protocol is a fixed turn list; on player i's turn an arbitrary unitary acts
on H_i (x) C and as the identity elsewhere.  What the turn's unitary may
depend on is the only difference between the two communication modes:

* NIH — the generator sees only the acting player's own string;
* NOF — the generator sees every string except the acting player's own.

The initial state is |0...0>|0> with no prior entanglement, and the protocol
accepts with the probability of measuring the channel in |1> at the end.

Three views of a protocol live here:

* a branch-form simulator, splitting the state along channel basis states so
  the result is a sum over transcripts of per-player product vectors;
* a dense statevector simulator used as an independent cross-check;
* the SVD route: compress one grouped half of a nondeterministic tensor into
  ceil(log2 r) qubits and read the acceptance amplitude off the factors.

On top of the branch form sits the extraction pipeline: restrict to the
accepted transcripts, group the players into two halves, contract each half
with integer coefficients, and certify the zero pattern and rank of the
resulting grouped matrix.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import config
from .errors import (
    ArityMismatch,
    CoefficientNotFound,
    DimMismatch,
    FormatError,
    NonUnitary,
    NormalizationError,
    PatternMismatch,
    PremiseViolation,
)
from .functions import BooleanFunction
from .rank_bounds import pattern_check
from .scalar_linalg import (
    ExactComplex,
    ExactMatrix,
    FloatMatrix,
    exact_rank,
    numerical_rank,
    svd,
    to_float,
)
from .tensor_core import (
    Decomposition,
    DenseTensor,
    group_matrize,
    lift_order,
    materialize,
)

# ---------------------------------------------------------------------------
# Unitary helpers
# ---------------------------------------------------------------------------


def unitarity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def require_unitary(m: np.ndarray, label: str) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonUnitary(f"{label}: matrix must be square, got {m.shape}")
    if unitarity_defect(m) > config.UNITARY_TOL:
        raise NonUnitary(f"{label}: unitarity defect {unitarity_defect(m):.3e}")
    return m


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish random unitary via QR with the standard phase fix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _channel_xor(d: int, flip_for_local) -> np.ndarray:
    """|h,c> -> |h, c xor flip_for_local(h)>; a permutation on H (x) C."""
    u = np.zeros((2 * d, 2 * d))
    for h in range(d):
        v = flip_for_local(h) & 1
        for c in range(2):
            u[h * 2 + (c ^ v), h * 2 + c] = 1.0
    return u


def _swap_channel_into_slot(d: int, slot: int) -> np.ndarray:
    """Swap the channel qubit with local qubit `slot` (0-based)."""
    if d < 2 ** (slot + 1):
        raise DimMismatch(f"player dim {d} has no qubit slot {slot}")
    u = np.zeros((2 * d, 2 * d))
    for h in range(d):
        for c in range(2):
            old = (h >> slot) & 1
            h2 = (h & ~(1 << slot)) | (c << slot)
            u[h2 * 2 + old, h * 2 + c] = 1.0
    return u


# ---------------------------------------------------------------------------
# Turn generator library
# ---------------------------------------------------------------------------
#
# A generator is a callable visible -> unitary on H_player (x) C.  In NIH mode
# `visible` is the acting player's own string; in NOF mode it is the tuple of
# everyone else's.  Generators that read the input therefore only make sense
# in NIH mode and say so via `nih_only`.


def gen_write_bit(d: int, n: int, j: int):
    """Channel <- channel xor (bit j of the player's own string)."""
    if not 1 <= j <= n:
        raise DimMismatch(f"bit index {j} out of range 1..{n}")
    x_gate = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye2 = np.eye(2)

    def make(visible):
        bit = (int(visible) >> (n - j)) & 1
        return np.kron(np.eye(d), x_gate if bit else eye2)

    make.label = f"write-bit {j}"
    make.nih_only = True
    return make


def gen_flip_channel(d: int):
    """Unconditional NOT on the channel qubit."""
    u = np.kron(np.eye(d), np.array([[0.0, 1.0], [1.0, 0.0]]))

    def make(visible):
        return u

    make.label = "flip-channel"
    make.nih_only = False
    return make


def gen_cnot_channel(d: int, slot: int):
    """CNOT: control = local qubit `slot` (1-based), target = channel."""
    u = _channel_xor(d, lambda h: (h >> (slot - 1)) & 1)

    def make(visible):
        return u

    make.label = f"cnot-channel {slot}"
    make.nih_only = False
    return make


def gen_store(d: int, slot: int):
    """Swap the channel qubit into local slot `slot` (1-based)."""
    u = _swap_channel_into_slot(d, slot - 1)

    def make(visible):
        return u

    make.label = f"store {slot}"
    make.nih_only = False
    return make


def gen_compare_and_flag(d: int, n: int):
    """Flip the channel iff two locally stored n-bit strings and the player's
    own string are all equal.

    Local layout: qubits 0..n-1 hold the first stored string (qubit j-1 is
    string bit j), qubits n..2n-1 the second.
    """
    if d != 4 ** n:
        raise DimMismatch(f"compare-and-flag needs player dim {4 ** n}, got {d}")

    def unpack(h: int, base: int) -> int:
        x = 0
        for j in range(1, n + 1):
            x |= ((h >> (base + j - 1)) & 1) << (n - j)
        return x

    def make(visible):
        own = int(visible)
        return _channel_xor(d, lambda h: 1 if unpack(h, 0) == unpack(h, n) == own else 0)

    make.label = "compare-and-flag"
    make.nih_only = True
    return make


def gen_matrix_literal(d: int, matrix: np.ndarray):
    """A fixed, input-independent unitary supplied as a literal."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (2 * d, 2 * d):
        raise DimMismatch(f"literal must be {2 * d}x{2 * d}, got {m.shape}")

    def make(visible):
        return m

    make.label = "matrix"
    make.nih_only = False
    return make


# ---------------------------------------------------------------------------
# Protocol specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Turn:
    player: int
    make: callable = field(repr=False)

    @property
    def label(self) -> str:
        return getattr(self.make, "label", "custom")


@dataclass(frozen=True)
class ProtocolSpec:
    mode: str  # "nih" | "nof"
    k: int
    n: int
    player_dims: tuple
    turns: tuple

    def __post_init__(self):
        if self.mode not in ("nih", "nof"):
            raise ValueError(f"mode must be 'nih' or 'nof', got {self.mode!r}")
        if len(self.player_dims) != self.k:
            raise DimMismatch("need one dimension per player")
        for t in self.turns:
            if not 1 <= t.player <= self.k:
                raise DimMismatch(f"turn player {t.player} out of range")
            if self.mode == "nof" and getattr(t.make, "nih_only", False):
                raise ValueError(f"generator {t.label!r} reads its own input; NIH only")

    @property
    def ell(self) -> int:
        return len(self.turns)

    def visible(self, player: int, xs) -> object:
        if self.mode == "nih":
            return xs[player - 1]
        return tuple(x for i, x in enumerate(xs, start=1) if i != player)

    def check_input(self, xs) -> tuple:
        xs = tuple(xs)
        if len(xs) != self.k:
            raise ArityMismatch(f"protocol takes {self.k} strings, got {len(xs)}")
        side = 2 ** self.n
        for x in xs:
            if not isinstance(x, int) or not 0 <= x < side:
                raise ArityMismatch(f"input {x!r} is not an {self.n}-bit string")
        return xs


# ---------------------------------------------------------------------------
# Branch-form simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchState:
    """State after ell turns, split along channel transcripts.

    ``branches`` maps each transcript m (tuple of ell bits) to one vector per
    player; the physical state is the sum over m of the per-player product
    tensored with the channel basis vector |m_ell>.
    """

    player_dims: tuple
    branches: dict
    norm_history: tuple

    @property
    def ell(self) -> int:
        return len(self.norm_history)

    def total_sq_norm(self) -> float:
        return _total_sq_norm(self.branches)

    def accepted_transcripts(self):
        return sorted(m for m in self.branches if m and m[-1] == 1)

    def _product_vector(self, vecs) -> np.ndarray:
        out = np.array([1.0 + 0j])
        for v in vecs:
            out = np.kron(out, v)
        return out

    def accept_vector(self) -> np.ndarray:
        """Sum over transcripts ending in 1 of the per-player products."""
        dim = math.prod(self.player_dims)
        acc = np.zeros(dim, dtype=np.complex128)
        for m in self.accepted_transcripts():
            acc += self._product_vector(self.branches[m])
        return acc

    def accept_probability(self) -> float:
        v = self.accept_vector()
        return float(np.vdot(v, v).real)

    def recontract(self) -> np.ndarray:
        """Full statevector over H_1 (x) ... (x) H_k (x) C.

        The channel is the fastest axis: index = flat_player_index * 2 + c.
        """
        dim = math.prod(self.player_dims)
        out = np.zeros(dim * 2, dtype=np.complex128)
        for m, vecs in self.branches.items():
            c = m[-1] if m else 0
            out[c::2] += self._product_vector(vecs)
        return out


def simulate_branches(spec: ProtocolSpec, xs) -> BranchState:
    """Run the protocol, splitting one branch per channel basis state."""
    xs = spec.check_input(xs)
    branches = {
        (): tuple(np.eye(d, dtype=np.complex128)[:, 0] for d in spec.player_dims)
    }
    norm_history = []
    for idx, turn in enumerate(spec.turns):
        d = spec.player_dims[turn.player - 1]
        w = require_unitary(
            turn.make(spec.visible(turn.player, xs)),
            f"turn {idx + 1} ({turn.label})",
        )
        if w.shape != (2 * d, 2 * d):
            raise NonUnitary(
                f"turn {idx + 1} ({turn.label}): expected {2 * d}x{2 * d}, got {w.shape}"
            )
        new = {}
        for m, vecs in branches.items():
            c = m[-1] if m else 0
            inp = np.kron(vecs[turn.player - 1], np.eye(2)[:, c])
            out = (w @ inp).reshape(d, 2)
            for c2 in (0, 1):
                child = list(vecs)
                child[turn.player - 1] = out[:, c2].copy()
                new[m + (c2,)] = tuple(child)
        branches = new
        norm_history.append(_total_sq_norm(branches))
    return BranchState(spec.player_dims, branches, tuple(norm_history))


def _total_sq_norm(branches) -> float:
    total = 0.0
    for vecs in branches.values():
        prod_sq = 1.0
        for v in vecs:
            prod_sq *= float(np.vdot(v, v).real)
        total += prod_sq
    return total


def simulate_dense(spec: ProtocolSpec, xs) -> np.ndarray:
    """Reference statevector simulation over the full product space."""
    xs = spec.check_input(xs)
    dims = tuple(spec.player_dims) + (2,)
    state = np.zeros(dims, dtype=np.complex128)
    state[(0,) * len(dims)] = 1.0
    k = spec.k
    for idx, turn in enumerate(spec.turns):
        p = turn.player - 1
        d = spec.player_dims[p]
        w = require_unitary(
            turn.make(spec.visible(turn.player, xs)),
            f"turn {idx + 1} ({turn.label})",
        ).reshape(d, 2, d, 2)
        # contract (player axis, channel axis) with the unitary's input axes
        state = np.tensordot(state, w, axes=([p, k], [2, 3]))
        # tensordot appends the output axes; move the player axis back
        state = np.moveaxis(state, k - 1, p)
    return state.reshape(-1)


# ---------------------------------------------------------------------------
# Canned protocols
# ---------------------------------------------------------------------------


def trivial_eq_relay_spec(n: int) -> ProtocolSpec:
    """The trivial NIH protocol for 3-party equality.

    Players 1 and 2 write their strings bit by bit; player 3 banks each bit
    into local qubits and finally flips the channel iff both stored strings
    equal its own.  Cost: 4n+1 turns.
    """
    d3 = 4 ** n
    turns = []
    for j in range(1, n + 1):
        turns.append(Turn(1, gen_write_bit(2, n, j)))
        turns.append(Turn(3, gen_store(d3, j)))
    for j in range(1, n + 1):
        turns.append(Turn(2, gen_write_bit(2, n, j)))
        turns.append(Turn(3, gen_store(d3, n + j)))
    turns.append(Turn(3, gen_compare_and_flag(d3, n)))
    return ProtocolSpec("nih", 3, n, (2, 2, d3), tuple(turns))


def constant_one_spec(n: int = 1, k: int = 2) -> ProtocolSpec:
    """One turn: player 1 unconditionally raises the channel."""
    dims = (2,) * k
    return ProtocolSpec("nih", k, n, dims, (Turn(1, gen_flip_channel(2)),))


def random_protocol(master_seed: int, k: int, ell: int, mode: str = "nih",
                    dim: int = 2, n: int = 1) -> ProtocolSpec:
    """Seeded random protocol with input-dependent Haar unitaries.

    Every turn's unitary is keyed by (master seed, turn index, visible
    inputs), so two runs with the same seed agree and the generators respect
    the information constraints of the chosen mode.
    """
    order_rng = np.random.default_rng(np.random.SeedSequence([master_seed, k, ell]))
    players = [int(order_rng.integers(1, k + 1)) for _ in range(ell)]
    turns = []
    for t, player in enumerate(players):
        def make(visible, _t=t, _player=player):
            if isinstance(visible, tuple):
                key = list(visible)
            else:
                key = [int(visible)]
            seq = np.random.SeedSequence([master_seed, _t, _player] + key)
            return haar_unitary(np.random.default_rng(seq), 2 * dim)

        make.label = f"random {t}"
        make.nih_only = False
        turns.append(Turn(player, make))
    return ProtocolSpec(mode, k, n, (dim,) * k, tuple(turns))


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

_GENERATOR_PARSERS = {
    "write-bit": lambda d, n, args, line: gen_write_bit(d, n, _one_int(args, line)),
    "flip-channel": lambda d, n, args, line: gen_flip_channel(d),
    "cnot-channel": lambda d, n, args, line: gen_cnot_channel(d, _one_int(args, line)),
    "store": lambda d, n, args, line: gen_store(d, _one_int(args, line)),
    "compare-and-flag": lambda d, n, args, line: gen_compare_and_flag(d, n),
    "matrix": lambda d, n, args, line: gen_matrix_literal(d, _parse_matrix(args, d, line)),
}


def _one_int(args, line):
    if len(args) != 1:
        raise FormatError("generator takes exactly one integer argument", line)
    try:
        return int(args[0])
    except ValueError:
        raise FormatError(f"bad integer {args[0]!r}", line) from None


def _parse_matrix(args, d, line):
    from .scalar_linalg import parse_float_scalar

    rows = " ".join(args).split(";")
    try:
        m = np.array(
            [[parse_float_scalar(tok, line) for tok in row.split()] for row in rows]
        )
    except FormatError:
        raise
    if m.shape != (2 * d, 2 * d):
        raise FormatError(f"matrix must be {2 * d}x{2 * d}", line)
    return m


def read_scenario(path) -> ProtocolSpec:
    """Parse a protocol scenario file.

    Grammar (one directive per line, '#' comments)::

        mode nih|nof
        players K
        bits N
        dims D_1 ... D_K
        turn PLAYER GENERATOR [ARGS...]
    """
    with open(path) as fh:
        raw = fh.read().splitlines()
    mode = k = n = None
    dims = None
    turn_lines = []
    for off, line in enumerate(raw):
        lineno = off + 1
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        toks = body.split()
        key = toks[0]
        if key == "mode":
            if len(toks) != 2 or toks[1] not in ("nih", "nof"):
                raise FormatError("mode must be nih or nof", lineno)
            mode = toks[1]
        elif key == "players":
            k = _one_int(toks[1:], lineno)
        elif key == "bits":
            n = _one_int(toks[1:], lineno)
        elif key == "dims":
            try:
                dims = tuple(int(t) for t in toks[1:])
            except ValueError:
                raise FormatError("dims must be integers", lineno) from None
        elif key == "turn":
            turn_lines.append((lineno, toks[1:]))
        else:
            raise FormatError(f"unknown directive {key!r}", lineno)
    for name, val in (("mode", mode), ("players", k), ("bits", n), ("dims", dims)):
        if val is None:
            raise FormatError(f"missing {name} directive", len(raw) or 1)
    if len(dims) != k:
        raise FormatError("dims count must equal players", 1)
    turns = []
    for lineno, toks in turn_lines:
        if len(toks) < 2:
            raise FormatError("turn needs a player and a generator", lineno)
        try:
            player = int(toks[0])
        except ValueError:
            raise FormatError(f"bad player {toks[0]!r}", lineno) from None
        if not 1 <= player <= k:
            raise FormatError(f"player {player} out of range", lineno)
        gname = toks[1]
        if gname not in _GENERATOR_PARSERS:
            known = ", ".join(sorted(_GENERATOR_PARSERS))
            raise FormatError(f"unknown generator {gname!r}; known: {known}", lineno)
        make = _GENERATOR_PARSERS[gname](dims[player - 1], n, toks[2:], lineno)
        turns.append(Turn(player, make))
    if not turns:
        raise FormatError("scenario has no turns", len(raw) or 1)
    try:
        return ProtocolSpec(mode, k, n, dims, tuple(turns))
    except ValueError as exc:
        raise FormatError(str(exc), 1) from None


# ---------------------------------------------------------------------------
# NOF protocol from a decomposition (SVD route)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NofProtocol:
    """Compiled SVD protocol for one nondeterministic tensor."""

    source: str
    f: BooleanFunction
    lifted: bool
    lift_length: int
    split: int
    u: FloatMatrix
    sigma: tuple
    v: FloatMatrix
    r: int
    qubit_cost: int
    exact_tensor: DenseTensor = field(repr=False)
    work_dims: tuple = field(repr=False)


@dataclass(frozen=True)
class AcceptanceResult:
    probability: float
    accepted: bool
    qubit_cost: int
    analytic_probability: float


def build_nof_protocol(d: Decomposition, f: BooleanFunction,
                       lift_length: int = 2) -> NofProtocol:
    """Compile a decomposition into the grouped-SVD protocol.

    Even player counts matrize at k/2 directly; odd ones first gain a dummy
    mode carrying the all-ones vector (term count, and hence the rank
    certificate, is preserved), making the order even.  The qubit cost is
    ceil(log2 r) + 1 where r is the numerical rank of the matrization.
    """
    t = materialize(d)
    if not pattern_check(t, f):
        raise PatternMismatch(f"decomposition does not match {f.name}")
    if f.k % 2 == 1:
        worked = lift_order(d, lift_length)
        lifted = True
    else:
        worked = d
        lifted = False
    dims = worked.dims
    split = len(dims) // 2
    g = group_matrize(materialize(worked), split)
    u, s, v = svd(to_float(g))
    r = numerical_rank(s, (g.rows, g.cols))
    q = math.ceil(math.log2(r)) if r >= 1 else 0
    return NofProtocol(
        source=f"{f.name}_n{f.n}_k{f.k}",
        f=f,
        lifted=lifted,
        lift_length=lift_length,
        split=split,
        u=u,
        sigma=tuple(float(x) for x in s),
        v=v,
        r=r,
        qubit_cost=q + 1,
        exact_tensor=t,
        work_dims=dims,
    )


def _flat(dims, idx) -> int:
    out = 0
    for d, j in zip(dims, idx):
        out = out * d + j
    return out


def run_nof(p: NofProtocol, xs, dummy: int = 0) -> AcceptanceResult:
    """Execute the protocol algebra on one input.

    One side holds the trailing (column) half of the input and prepares the
    compressed state sigma * V |column-half>, keeping only the r live
    coordinates; the other side applies U and projects onto its own (row)
    half.  The resulting probability is |c|^2 |T[x]|^2 for the normalization
    c, which is also computed analytically from the exact tensor entry.
    """
    xs = p.f.check_input(xs)
    work = xs + (dummy,) if p.lifted else xs
    if p.lifted and not 0 <= dummy < p.lift_length:
        raise ArityMismatch(f"dummy index {dummy} out of range")
    row = _flat(p.work_dims[:p.split], work[:p.split])
    col = _flat(p.work_dims[p.split:], work[p.split:])

    sigma = np.array(p.sigma)
    phi = sigma[:p.r] * p.v.array[:p.r, col]
    norm = float(np.linalg.norm(phi))
    if norm == 0.0:
        if _column_has_one_input(p, xs):
            raise NormalizationError(
                "compressed state vanished although the column half has a 1-input"
            )
        return AcceptanceResult(0.0, False, p.qubit_cost, 0.0)
    c = 1.0 / norm
    amp = p.u.array[row, :p.r] @ (phi * c)
    prob = float(abs(amp) ** 2)
    analytic = float(p.exact_tensor.entry(xs).abs2()) * c * c
    return AcceptanceResult(prob, prob > config.ACCEPT_EPS, p.qubit_cost, analytic)


def _column_has_one_input(p: NofProtocol, xs) -> bool:
    side = p.f.side
    fixed_tail = xs[p.split:]
    for head in product(range(side), repeat=p.split):
        if p.f.value(head + fixed_tail) == 1:
            return True
    return False


@dataclass(frozen=True)
class SweepReport:
    passed: bool
    total_inputs: int
    min_accept_probability: float | None
    max_reject_probability: float
    max_sim_analytic_gap: float
    wrong_decisions: tuple


def strong_nondet_check(p: NofProtocol, f: BooleanFunction, dummy: int = 0) -> SweepReport:
    """Exhaustive sweep: accepted iff f = 1, plus probability extremes."""
    min_accept = None
    max_reject = 0.0
    max_gap = 0.0
    wrong = []
    total = 0
    for xs in f.inputs():
        res = run_nof(p, xs, dummy=dummy)
        total += 1
        gap = abs(res.probability - res.analytic_probability)
        max_gap = max(max_gap, gap)
        if f.value(xs) == 1:
            if min_accept is None or res.probability < min_accept:
                min_accept = res.probability
            if not res.accepted:
                wrong.append(xs)
        else:
            max_reject = max(max_reject, res.probability)
            if res.accepted:
                wrong.append(xs)
    return SweepReport(
        passed=not wrong,
        total_inputs=total,
        min_accept_probability=min_accept,
        max_reject_probability=max_reject,
        max_sim_analytic_gap=max_gap,
        wrong_decisions=tuple(wrong[:8]),
    )


# ---------------------------------------------------------------------------
# Extraction pipeline (branch form -> grouped matrix)
# ---------------------------------------------------------------------------


def extract_families(b: BranchState):
    """Split the accepted transcripts into two grouped vector families.

    Returns (members, a_vectors, b_vectors): for each transcript m ending in
    1, the product of the first floor(k/2) players' vectors and the product
    of the rest.  Family size is 2^(ell-1).
    """
    k = len(b.player_dims)
    if k < 2:
        raise DimMismatch("need at least two players to group")
    g = k // 2
    members = b.accepted_transcripts()
    a_vecs, b_vecs = [], []
    for m in members:
        vecs = b.branches[m]
        a = np.array([1.0 + 0j])
        for v in vecs[:g]:
            a = np.kron(a, v)
        bb = np.array([1.0 + 0j])
        for v in vecs[g:]:
            bb = np.kron(bb, v)
        a_vecs.append(a)
        b_vecs.append(bb)
    return members, a_vecs, b_vecs


@dataclass(frozen=True)
class CoefficientResult:
    alpha: tuple
    beta: tuple
    attempts: int


def coefficient_search(fam_a: dict, fam_b: dict, ones, set_size_exponent: int,
                       rng_seed: int, max_attempts: int = 10) -> CoefficientResult:
    """Sample integer contraction coefficients until every 1-input survives.

    ``fam_a`` maps each grouped input y to its list of family vectors (one
    per accepted transcript, in a fixed order), ``fam_b`` likewise for z.
    Coefficients are drawn uniformly from 1..2^set_size_exponent.  A draw is
    accepted when v(y,z) = sum_i (alpha . A_i(y)) (beta . B_i(z)) is nonzero
    for every (y,z) in ``ones`` — exactly for exact families, |v| > 1e-9 for
    floating ones.
    """
    ones = list(ones)
    if not fam_a or not fam_b:
        raise DimMismatch("families must be nonempty")
    a_sample = next(iter(fam_a.values()))
    b_sample = next(iter(fam_b.values()))
    if not a_sample or not b_sample:
        raise DimMismatch("families must contain at least one vector")
    d_a = len(a_sample[0])
    d_b = len(b_sample[0])
    rng = random.Random(rng_seed)
    hi = 2 ** set_size_exponent
    for attempt in range(1, max_attempts + 1):
        alpha = tuple(rng.randint(1, hi) for _ in range(d_a))
        beta = tuple(rng.randint(1, hi) for _ in range(d_b))
        if all(not _contracted_is_zero(fam_a[y], fam_b[z], alpha, beta)
               for (y, z) in ones):
            return CoefficientResult(alpha, beta, attempt)
    raise CoefficientNotFound(f"no coefficients after {max_attempts} attempts")


def _contracted_is_zero(a_vectors, b_vectors, alpha, beta) -> bool:
    v = _contract_pair(a_vectors, b_vectors, alpha, beta)
    if isinstance(v, ExactComplex):
        return v.is_zero()
    return abs(v) <= config.ACCEPT_EPS


def _contract_pair(a_vectors, b_vectors, alpha, beta):
    if a_vectors and isinstance(a_vectors[0], np.ndarray):
        alpha_arr = np.array(alpha, dtype=np.complex128)
        beta_arr = np.array(beta, dtype=np.complex128)
        total = 0.0 + 0.0j
        for av, bv in zip(a_vectors, b_vectors):
            total += (alpha_arr @ av) * (beta_arr @ bv)
        return complex(total)
    from .scalar_linalg import EC_ZERO, exact

    total = EC_ZERO
    for av, bv in zip(a_vectors, b_vectors):
        a_c = EC_ZERO
        for coef, comp in zip(alpha, av):
            a_c = a_c + exact(coef) * comp
        b_c = EC_ZERO
        for coef, comp in zip(beta, bv):
            b_c = b_c + exact(coef) * comp
        total = total + a_c * b_c
    return total


@dataclass(frozen=True)
class NihCertificate:
    """Outcome of the NIH extraction pipeline for one protocol/function pair."""

    ell: int
    group_split: int
    rank_bound: int  # 2^(ell-1)
    grouped_rank: int
    pattern_ok: bool
    pattern_rank: int
    implied_min_cost: int
    cost_bound_ok: bool
    attempts: int

    @property
    def rank_ok(self) -> bool:
        return self.grouped_rank <= self.rank_bound


def nih_rank_certificate(spec: ProtocolSpec, f: BooleanFunction, rng_seed: int,
                         set_size_exponent: int | None = None,
                         max_attempts: int = 10) -> NihCertificate:
    """Run the full extraction: premise sweep, grouping, coefficient search,
    grouped-matrix pattern and rank checks.

    The protocol must be strongly nondeterministic for f (verified first,
    else :class:`PremiseViolation`).  The grouped matrix is certified as a
    grouped matrization: its zero pattern must match f under the grouping and
    its exact rank must not exceed 2^(ell-1).
    """
    if spec.mode != "nih":
        raise PremiseViolation("certificate applies to NIH protocols")
    if spec.k != f.k or spec.n != f.n:
        raise DimMismatch("protocol and function shapes disagree")
    if spec.ell < 1:
        raise DimMismatch("certificate needs at least one turn")
    if set_size_exponent is None:
        set_size_exponent = f.k * f.n + 1

    side = f.side
    g = f.k // 2
    states = {}
    for xs in f.inputs():
        b = simulate_branches(spec, xs)
        states[xs] = b
        accepted = b.accept_probability() > config.ACCEPT_EPS
        if accepted != (f.value(xs) == 1):
            raise PremiseViolation(
                f"protocol acceptance at {xs} disagrees with {f.name}"
            )

    ys = list(product(range(side), repeat=g))
    zs = list(product(range(side), repeat=f.k - g))
    z0 = zs[0]
    y0 = ys[0]
    fam_a = {}
    for y in ys:
        _, a_vecs, _ = extract_families(states[y + z0])
        fam_a[y] = a_vecs
    fam_b = {}
    for z in zs:
        _, _, b_vecs = extract_families(states[y0 + z])
        fam_b[z] = b_vecs

    ones = [(y, z) for y in ys for z in zs if f.value(y + z) == 1]
    coeff = coefficient_search(fam_a, fam_b, ones, set_size_exponent,
                               rng_seed, max_attempts)

    alpha = np.array(coeff.alpha, dtype=np.complex128)
    beta = np.array(coeff.beta, dtype=np.complex128)
    a_scalar = {y: np.array([alpha @ v for v in fam_a[y]]) for y in ys}
    b_scalar = {z: np.array([beta @ v for v in fam_b[z]]) for z in zs}
    grouped = np.array([[np.sum(a_scalar[y] * b_scalar[z]) for z in zs] for y in ys])

    pattern_ok = all(
        (abs(grouped[yi, zi]) > config.ACCEPT_EPS) == (f.value(y + z) == 1)
        for yi, y in enumerate(ys)
        for zi, z in enumerate(zs)
    )

    grouped_rank = exact_rank(_rationalize(grouped))
    pattern01 = ExactMatrix.from_rows(
        [[f.value(y + z) for z in zs] for y in ys]
    )
    pattern_rank = exact_rank(pattern01)
    implied = (math.ceil(math.log2(pattern_rank)) + 1) if pattern_rank >= 1 else 0
    ell = spec.ell
    return NihCertificate(
        ell=ell,
        group_split=g,
        rank_bound=2 ** (ell - 1),
        grouped_rank=grouped_rank,
        pattern_ok=pattern_ok,
        pattern_rank=pattern_rank,
        implied_min_cost=implied,
        cost_bound_ok=ell >= implied,
        attempts=coeff.attempts,
    )


def _rationalize(arr: np.ndarray) -> ExactMatrix:
    rows, cols = arr.shape
    entries = []
    for i in range(rows):
        for j in range(cols):
            z = arr[i, j]
            re = Fraction(float(z.real))
            im = Fraction(float(z.imag))
            # wash out float dust so rank reflects the contracted values
            if abs(z) <= config.ACCEPT_EPS:
                re = im = Fraction(0)
            entries.append(ExactComplex(re, im))
    return ExactMatrix(rows, cols, entries)
