"""Stagewise construction of the one-sided rigid point and its finite verifiers.

Stage 1 is the block ``1 0 0`` at positions 1..3.  Each stage appends scaled
copies of the previous stage:

    next = prev prev ((m/(m+1)) prev) ((m-1)/(m+1) prev) ... ((1/(m+1)) prev) (0 prev)

so stage m+1 has (m+3) copies of stage m and length (m+3) * n_m.  The prefix
is never rewritten, only extended.  The verifiers certify, on the finite
prefix, the three properties the construction is designed for:

  C1     unbounded zero-runs immediately followed by the symbol 1
  C3     shift-by-n_k rigidity, strict 1/k bound, gated on a nonzero window
  C2PRIME  smallness propagation: a symbol exceeds the next n_j symbols'
           maximum by at most 1/(j+1)  (non-strict; the bound is attained)
  TAILS  the final (stage+1) symbols are 0

plus a diagnostic falsifier for the uncorrected smallness statement (hypothesis
over k symbols with bound 1/k), which the constructed point itself refutes.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .blocks import Block, ResourceCapError, ZERO, concat_all, scale
from .report import CheckReport, FAIL, INFO, PASS

DEFAULT_MAX_SYMBOLS = 10**8

CONDITIONS = ("C1", "C3", "C2PRIME", "TAILS")


@dataclass(frozen=True)
class Thm1State:
    """Construction state: stage number, per-stage lengths, and the prefix block."""

    stage: int
    lengths: tuple
    prefix: Block

    def __post_init__(self):
        if self.stage < 1 or len(self.lengths) != self.stage:
            raise ValueError("stage and length history disagree")
        if self.prefix.base != 1 or len(self.prefix) != self.lengths[-1]:
            raise ValueError("prefix does not match recorded length")

    @property
    def length(self) -> int:
        return self.lengths[-1]

    def length_of_stage(self, k: int) -> int:
        """n_k for 1 <= k <= stage."""
        if not 1 <= k <= self.stage:
            raise ValueError(f"stage {k} not built (have 1..{self.stage})")
        return self.lengths[k - 1]


def initial_state() -> Thm1State:
    return Thm1State(1, (3,), Block([1, 0, 0], base=1))


def step(state: Thm1State) -> Thm1State:
    """Extend by one stage per the copy formula; length grows by factor m+3."""
    m = state.stage
    prev = state.prefix
    copies = [prev, prev]
    copies.extend(scale(Fraction(r, m + 1), prev) for r in range(m, -1, -1))
    nxt = concat_all(copies, base=1)
    assert len(nxt) == (m + 3) * len(prev)
    # Extension only: the new prefix starts with the old one.
    assert nxt.symbols[: len(prev)] == prev.symbols
    # Zero tail grows past the m+2 the next stage requires.
    assert nxt.trailing_zero_run() >= m + 2
    return Thm1State(m + 1, state.lengths + (len(nxt),), nxt)


def predicted_length(m: int) -> int:
    """Length of the stage-m prefix, from the copy-count recurrence."""
    n = 3
    for j in range(1, m):
        n *= j + 3
    return n


def build(m: int, max_symbols: int = DEFAULT_MAX_SYMBOLS) -> Thm1State:
    """Build the stage-m state; refuses oversized stages before allocating."""
    if m < 1:
        raise ValueError("stage must be >= 1")
    need = predicted_length(m)
    if need > max_symbols:
        raise ResourceCapError(
            f"stage {m} needs {need} symbols, cap is {max_symbols}"
        )
    state = initial_state()
    for _ in range(m - 1):
        state = step(state)
    return state


# -- verifiers ---------------------------------------------------------------


def _require_range(state: Thm1State, value: int, name: str) -> None:
    if not 1 <= value <= state.stage - 1:
        raise ValueError(
            f"{name}={value} out of admissible range 1..{state.stage - 1}"
        )


def check_c1(state: Thm1State, kmax: int) -> CheckReport:
    """Some position carries k zeros immediately followed by a 1, for each k <= kmax.

    Equivalent to: the longest zero-run immediately preceding a 1 is >= kmax.
    Reports the maximal k found and where.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    block = state.prefix
    nz = block.nonzero_positions
    best_k = 0
    best_pos = None
    for idx, p in enumerate(nz):
        if block[p] != 1:
            continue
        prev_nz = nz[idx - 1] if idx > 0 else block.base - 1
        run = p - prev_nz - 1
        if run > best_k:
            best_k, best_pos = run, p
    params = (("stage", state.stage), ("kmax", kmax))
    witness = (("max_run", best_k), ("one_at", best_pos))
    verdict = PASS if best_k >= kmax else FAIL
    return CheckReport("C1", verdict, params, witness)


def check_c3(state: Thm1State, kmax: int) -> CheckReport:
    """Strict rigidity: shifting by n_k moves no symbol by 1/k or more.

    For every k <= kmax and every position i with i + n_k + k - 1 in range,
    if the window x(i..i+k-1) is not identically 0 then
    max_{0<=d<k} |x(i+d) - x(i+n_k+d)| < 1/k.

    The scan touches only positions near nonzero symbols: a violating pair
    (q, q+n_k) needs a nonzero on one side, and the gating window needs a
    nonzero within distance k-1 of some admissible start.  Reports the first
    failure as (k, position) with both offending values, smallest k first,
    then smallest position.
    """
    _require_range(state, kmax, "kmax")
    block = state.prefix
    nz = block.nonzero_positions
    syms = block.symbols
    base, last = block.base, block.last
    for k in range(1, kmax + 1):
        n_k = state.length_of_stage(k)
        bound = Fraction(1, k)
        hi_start = last - n_k - k + 1  # largest admissible window start
        if hi_start < base:
            continue
        candidates = set()
        for p in nz:
            if base <= p <= last - n_k:
                candidates.add(p)
            q = p - n_k
            if base <= q <= last - n_k:
                candidates.add(q)
        failure = None
        for q in sorted(candidates):
            lo_i = max(base, q - k + 1)
            hi_i = min(q, hi_start)
            if lo_i > hi_i:
                continue
            # Gate: some admissible window start lo_i..hi_i sees a nonzero.
            a = bisect_left(nz, lo_i)
            b = bisect_right(nz, hi_i + k - 1)
            if a == b:
                continue
            d = syms[q - base] - syms[q + n_k - base]
            if d < 0:
                d = -d
            if d >= bound:
                failure = (q, syms[q - base], syms[q + n_k - base])
                break
        if failure is not None:
            q, v0, v1 = failure
            return CheckReport(
                "C3",
                FAIL,
                (("stage", state.stage), ("kmax", kmax)),
                (
                    ("k", k),
                    ("pos", q),
                    ("value", v0),
                    ("shifted", v1),
                    ("bound", bound),
                ),
            )
    return CheckReport("C3", PASS, (("stage", state.stage), ("kmax", kmax)))


class _RangeMax:
    """Sparse table for exact range-maximum over the block's nonzero values."""

    def __init__(self, block: Block):
        self._positions = block.nonzero_positions
        values = [block[p] for p in self._positions]
        self._table = [values]
        size = 1
        while 2 * size <= len(values):
            prev = self._table[-1]
            nxt = [
                prev[i] if prev[i] >= prev[i + size] else prev[i + size]
                for i in range(len(prev) - size)
            ]
            self._table.append(nxt)
            size *= 2

    def max_in(self, lo: int, hi: int) -> Fraction:
        """Maximum symbol value over nonzero positions in [lo, hi]; 0 if none."""
        a = bisect_left(self._positions, lo)
        b = bisect_right(self._positions, hi)
        if a >= b:
            return ZERO
        span = b - a
        level = span.bit_length() - 1
        row = self._table[level]
        left, right = row[a], row[b - (1 << level)]
        return left if left >= right else right


def check_c2prime(state: Thm1State, jmax: int) -> CheckReport:
    """Smallness propagation: x(i) <= max(next n_j symbols) + 1/(j+1), non-strict.

    Positions with x(i) = 0 hold trivially, so the scan visits nonzero
    positions only; window maxima come from a range-max table over the
    nonzero values.  The bound is attained with equality inside the
    construction, which is why the comparison must be non-strict.
    """
    _require_range(state, jmax, "jmax")
    block = state.prefix
    table = _RangeMax(block)
    base, last = block.base, block.last
    for j in range(1, jmax + 1):
        n_j = state.length_of_stage(j)
        slack = Fraction(1, j + 1)
        for p in block.nonzero_positions:
            if p + n_j > last:
                break
            eps = table.max_in(p + 1, p + n_j)
            if block[p] > eps + slack:
                return CheckReport(
                    "C2PRIME",
                    FAIL,
                    (("stage", state.stage), ("jmax", jmax)),
                    (
                        ("j", j),
                        ("pos", p),
                        ("value", block[p]),
                        ("window_max", eps),
                        ("slack", slack),
                    ),
                )
    return CheckReport("C2PRIME", PASS, (("stage", state.stage), ("jmax", jmax)))


def check_tails(state: Thm1State) -> CheckReport:
    """The final stage+1 symbols of the prefix are 0."""
    need = state.stage + 1
    run = state.prefix.trailing_zero_run()
    params = (("stage", state.stage), ("required", need))
    if run >= need:
        return CheckReport("TAILS", PASS, params, (("zero_run", run),))
    return CheckReport("TAILS", FAIL, params, (("zero_run", run),))


def literal_smallness_falsifier(state: Thm1State, kmax: int) -> CheckReport:
    """Diagnostic: search for a window refuting the uncorrected smallness bound.

    The uncorrected statement reads: if the k symbols after position i are
    all <= eps then x(i) <= eps + 1/k.  The built point refutes it (take eps
    to be the window maximum).  INFO either way; the witness, when found, is
    the first (position, k) in lexicographic scan order.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    block = state.prefix
    params = (("stage", state.stage), ("kmax", kmax))
    for p in block.nonzero_positions:
        a = block[p]
        eps = ZERO
        # b_{k+1} must exist, so the window needs k+1 symbols after p.
        for k in range(1, min(kmax, block.last - p - 1) + 1):
            v = block[p + k]
            if v > eps:
                eps = v
            if a > eps + Fraction(1, k):
                return CheckReport(
                    "LITERAL2_FALSIFIER",
                    INFO,
                    params,
                    (
                        ("found", True),
                        ("pos", p),
                        ("k", k),
                        ("value", a),
                        ("window_max", eps),
                    ),
                )
    return CheckReport("LITERAL2_FALSIFIER", INFO, params, (("found", False),))


def verify(state: Thm1State, condition: str, **params) -> CheckReport:
    """Dispatch to the named condition checker (C1, C3, C2PRIME, TAILS)."""
    if condition == "C1":
        return check_c1(state, params["kmax"])
    if condition == "C3":
        return check_c3(state, params["kmax"])
    if condition == "C2PRIME":
        return check_c2prime(state, params["jmax"])
    if condition == "TAILS":
        return check_tails(state)
    raise ValueError(f"unknown condition {condition!r}")
