"""Paired centered blocks with orthogonal supports, and the spacer solver.

Stage 1 is the single symbol 1 at position 0 for both blocks.  A stage step
surrounds each block with 2r scaled copies of itself and zero spacers:

    x_next = v (1/(r+1) x) u ... u (r/(r+1) x) u x u (r/(r+1) x) u ... u (1/(r+1) x) v

with u, v zero blocks of lengths s, t; the partner block y uses lengths
s', t'.  Both results have the same odd length and keep position 0 on the
unscaled central copy, so earlier stages are never rewritten.  The step
defines the return times

    m_r = len + s      (pitch between copy bases on the x side)
    n_r = len + s'     (pitch on the y side)

The verifiers certify on the finite blocks:

    I / II      shift by m_k / n_k moves no symbol of x / y by more than 1/k
    III / IV    phased sparseness: some length-n_k (resp. m_k) partition has
                at most one nonzero block among any three consecutive
    V           supports meet only at position 0, where both symbols are 1
    Z           leading/trailing zero runs cover 2x every defined time

plus the sliding-window falsifier (the any-offset reading of III fails as
soon as two nonzeros sit within one block length) and the weakened rigidity
that survives the transitive interleave (repeat at distance m_k OR n_k).

The solver picks spacer lengths by seeding congruences that keep copy
placement phase-aligned across stages, then verifying and doubling whichever
length the failed condition depends on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .blocks import Block, ResourceCapError, concat_all, scale, window, zeros
from .report import CheckReport, FAIL, INFO, PASS

DEFAULT_MAX_SYMBOLS = 10**8
DEFAULT_ITERATION_CAP = 32

CONDITIONS = ("I", "II", "III", "IV", "V", "Z")


class SolverError(RuntimeError):
    """Spacer search exhausted its retry budget."""

    def __init__(self, message: str, failing_condition: str):
        super().__init__(message)
        self.failing_condition = failing_condition


@dataclass(frozen=True)
class SpacerChoice:
    """Zero-block lengths (s, t) for the x side and (sp, tp) for the y side."""

    s: int
    t: int
    sp: int
    tp: int

    def __post_init__(self):
        if min(self.s, self.t, self.sp, self.tp) < 0:
            raise ValueError("spacer lengths must be nonnegative")
        if self.sp <= self.s:
            raise ValueError(f"need sp > s, got sp={self.sp} s={self.s}")

    def log_line(self, r: int) -> str:
        return f"SPACERS r={r} s={self.s} t={self.t} sp={self.sp} tp={self.tp}"


@dataclass(frozen=True)
class Thm2State:
    """Stage state: the two centered blocks, the times defined so far, history."""

    stage: int
    x: Block
    y: Block
    m_times: tuple
    n_times: tuple
    spacers: tuple
    transitive: bool = False

    def __post_init__(self):
        if self.stage < 1:
            raise ValueError("stage must be >= 1")
        if len(self.x) != len(self.y):
            raise ValueError("blocks must share a common length")
        if len(self.x) % 2 == 0:
            raise ValueError("common length must be odd")
        half = (len(self.x) - 1) // 2
        if self.x.base != -half or self.y.base != -half:
            raise ValueError("blocks must be center-indexed")
        if self.x[0] != 1 or self.y[0] != 1:
            raise ValueError("central symbols must equal 1")
        if len(self.m_times) != self.stage - 1 or len(self.n_times) != self.stage - 1:
            raise ValueError("time history must cover stages 1..stage-1")

    @property
    def common_length(self) -> int:
        return len(self.x)

    @property
    def half_width(self) -> int:
        return (len(self.x) - 1) // 2

    def times_max(self) -> int:
        """Largest defined return time (0 at stage 1)."""
        return max(self.m_times + self.n_times, default=0)

    def m(self, k: int) -> int:
        self._require_k(k)
        return self.m_times[k - 1]

    def n(self, k: int) -> int:
        self._require_k(k)
        return self.n_times[k - 1]

    def _require_k(self, k: int) -> None:
        if not 1 <= k <= self.stage - 1:
            raise ValueError(
                f"k={k} out of admissible range 1..{self.stage - 1}"
            )


def initial_state() -> Thm2State:
    one = Block([1], base=0)
    return Thm2State(1, one, one, (), (), ())


def _surround(block: Block, r: int, gap: int, end: int) -> Block:
    """v copy u copy ... u copy v with 2r+1 scaled copies, centered."""
    scales = [Fraction(i, r + 1) for i in range(1, r + 1)]
    scales = scales + [Fraction(1)] + scales[::-1]
    # Consecutive copy scales differ by exactly 1/(r+1) <= 1/r.
    assert all(
        abs(scales[i] - scales[i + 1]) == Fraction(1, r + 1)
        for i in range(len(scales) - 1)
    )
    parts = [zeros(end)] if end else []
    for idx, tscale in enumerate(scales):
        if idx > 0 and gap:
            parts.append(zeros(gap))
        parts.append(scale(tscale, block))
    if end:
        parts.append(zeros(end))
    length = 2 * end + (2 * r + 1) * len(block) + 2 * r * gap
    out = concat_all(parts, base=-(length - 1) // 2)
    assert len(out) == length
    return out


def predicted_length(state: Thm2State, choice: SpacerChoice) -> int:
    r = state.stage
    ell = state.common_length
    return 2 * choice.t + (2 * r + 1) * ell + 2 * r * choice.s


def build_stage(
    state: Thm2State,
    choice: SpacerChoice,
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> Thm2State:
    """One construction step; defines m_r and n_r and re-centers the result."""
    r = state.stage
    ell = state.common_length
    if choice.t != choice.tp + r * (choice.sp - choice.s):
        raise ValueError(
            "length-identity violation: need t = tp + r*(sp - s), got "
            f"t={choice.t} tp={choice.tp} s={choice.s} sp={choice.sp} r={r}"
        )
    if predicted_length(state, choice) > max_symbols:
        raise ResourceCapError(
            f"stage {r + 1} needs {predicted_length(state, choice)} symbols, "
            f"cap is {max_symbols}"
        )
    x_next = _surround(state.x, r, choice.s, choice.t)
    y_next = _surround(state.y, r, choice.sp, choice.tp)
    assert len(x_next) == len(y_next)
    m_r = ell + choice.s
    n_r = ell + choice.sp
    # Pitch audit: r pitches of m_r (n_r) step from the first copy base to
    # the central copy base, which the centering must place at state.x.base.
    assert x_next.base + choice.t + r * m_r == state.x.base
    assert y_next.base + choice.tp + r * n_r == state.y.base
    # Center consistency: the stage-r block sits unchanged at the center.
    assert window(x_next, state.x.base, state.x.last) == state.x
    assert window(y_next, state.y.base, state.y.last) == state.y
    return Thm2State(
        stage=r + 1,
        x=x_next,
        y=y_next,
        m_times=state.m_times + (m_r,),
        n_times=state.n_times + (n_r,),
        spacers=state.spacers + (choice,),
        transitive=state.transitive,
    )


def build_transitive_stage(
    state: Thm2State, za: int, zb: int, zc: int, zd: int
) -> Thm2State:
    """Interleave step: x' = b y a x a y b and y' = d x c y c x d.

    za..zd are the zero-block lengths |a|..|d|.  Lengths must balance
    (|b|+|a| = |d|+|c|), the copy offsets must differ (|a| != |c|), and all
    four must cover the zero-tail bound.  The support-orthogonality condition
    is re-verified on the result and a violation is an error.
    """
    if min(za, zb, zc, zd) < 0:
        raise ValueError("interleave spacer lengths must be nonnegative")
    if zb + za != zd + zc:
        raise ValueError(
            f"unequal interleave lengths: |b|+|a|={zb + za} vs |d|+|c|={zd + zc}"
        )
    if za == zc:
        raise ValueError(
            f"need |a| != |c|: copies at identical offsets +-{za + state.common_length} "
            "would overlap nonzero symbols"
        )
    bound = 2 * state.times_max()
    if min(za, zb, zc, zd) < bound:
        raise ValueError(
            f"interleave spacers must be >= the zero-tail bound {bound}"
        )

    def weave(center: Block, side: Block, inner: int, outer: int) -> Block:
        parts = []
        if outer:
            parts.append(zeros(outer))
        parts.append(side)
        if inner:
            parts.append(zeros(inner))
        parts.append(center)
        if inner:
            parts.append(zeros(inner))
        parts.append(side)
        if outer:
            parts.append(zeros(outer))
        length = 3 * len(center) + 2 * inner + 2 * outer
        return concat_all(parts, base=-(length - 1) // 2)

    x_prime = weave(state.x, state.y, za, zb)
    y_prime = weave(state.y, state.x, zc, zd)
    assert len(x_prime) == len(y_prime)
    out = Thm2State(
        stage=state.stage,
        x=x_prime,
        y=y_prime,
        m_times=state.m_times,
        n_times=state.n_times,
        spacers=state.spacers,
        transitive=True,
    )
    orth = check_orthogonality(out)
    if not orth.passed:
        raise ValueError(f"interleave breaks support orthogonality: {orth.line()}")
    return out


# -- verifiers ---------------------------------------------------------------


def _shift_bound_violation(block: Block, shift: int, bound: Fraction):
    """First i (smallest) with |v(i+shift) - v(i)| > bound, reading outside as 0."""
    candidates = set()
    for p in block.nonzero_positions:
        candidates.add(p)
        candidates.add(p - shift)
    for i in sorted(candidates):
        d = block.at_or_zero(i + shift) - block.at_or_zero(i)
        if d < 0:
            d = -d
        if d > bound:
            return i, block.at_or_zero(i), block.at_or_zero(i + shift)
    return None


def check_rigidity_x(state: Thm2State, k: int) -> CheckReport:
    """Condition I: shifting x by m_k moves every symbol by at most 1/k."""
    shift = state.m(k)
    params = (("stage", state.stage), ("k", k), ("shift", shift))
    hit = _shift_bound_violation(state.x, shift, Fraction(1, k))
    if hit is None:
        return CheckReport("I", PASS, params)
    i, v0, v1 = hit
    return CheckReport(
        "I", FAIL, params, (("pos", i), ("value", v0), ("shifted", v1))
    )


def check_rigidity_y(state: Thm2State, k: int) -> CheckReport:
    """Condition II: shifting y by n_k moves every symbol by at most 1/k."""
    shift = state.n(k)
    params = (("stage", state.stage), ("k", k), ("shift", shift))
    hit = _shift_bound_violation(state.y, shift, Fraction(1, k))
    if hit is None:
        return CheckReport("II", PASS, params)
    i, v0, v1 = hit
    return CheckReport(
        "II", FAIL, params, (("pos", i), ("value", v0), ("shifted", v1))
    )


def _phased_sparseness(block: Block, length: int):
    """Search for a phase c in [0, length) packing nonzeros so that any three
    consecutive length-``length`` cells contain at most one nonzero cell.

    Cell boundaries sit at c + q*length.  Candidate phases are the residues
    where some position's cell assignment changes, so testing them covers
    every distinct assignment.  Returns (phase, None) or (None, witness).
    """
    nz = block.nonzero_positions
    if len(nz) <= 1:
        return 0, None
    candidates = {0}
    candidates.update((p + 1) % length for p in nz)
    for c in sorted(candidates):
        ok = True
        prev_cell = None
        prev_pos = None
        for p in nz:
            cell = (p - c) // length
            if prev_cell is not None and 0 < cell - prev_cell < 3:
                ok = False
                break
            if prev_cell != cell:
                prev_cell, prev_pos = cell, p
        if ok:
            return c, None
    # No phase: report the offending pair under phase 0.
    prev_cell = None
    prev_pos = None
    for p in nz:
        cell = p // length
        if prev_cell is not None and 0 < cell - prev_cell < 3:
            return None, (prev_pos, p)
        prev_cell, prev_pos = cell, p
    return None, (nz[0], nz[1])


def check_sparseness_x(state: Thm2State, k: int) -> CheckReport:
    """Condition III (phased): x has at most one nonzero length-n_k cell per three."""
    length = state.n(k)
    params = (("stage", state.stage), ("k", k), ("cell", length))
    phase, witness = _phased_sparseness(state.x, length)
    if phase is not None:
        return CheckReport("III", PASS, params, (("phase", phase),))
    return CheckReport(
        "III", FAIL, params, (("pos_a", witness[0]), ("pos_b", witness[1]))
    )


def check_sparseness_y(state: Thm2State, k: int) -> CheckReport:
    """Condition IV (phased): y has at most one nonzero length-m_k cell per three."""
    length = state.m(k)
    params = (("stage", state.stage), ("k", k), ("cell", length))
    phase, witness = _phased_sparseness(state.y, length)
    if phase is not None:
        return CheckReport("IV", PASS, params, (("phase", phase),))
    return CheckReport(
        "IV", FAIL, params, (("pos_a", witness[0]), ("pos_b", witness[1]))
    )


def check_orthogonality(state: Thm2State) -> CheckReport:
    """Condition V: min(x(p), y(p)) = 0 away from 0, and x(0) = y(0) = 1."""
    params = (("stage", state.stage),)
    if state.x[0] != 1 or state.y[0] != 1:
        return CheckReport(
            "V", FAIL, params,
            (("pos", 0), ("x", state.x[0]), ("y", state.y[0])),
        )
    shared = set(state.x.nonzero_positions) & set(state.y.nonzero_positions)
    shared.discard(0)
    if shared:
        p = min(shared)
        return CheckReport(
            "V", FAIL, params, (("pos", p), ("x", state.x[p]), ("y", state.y[p]))
        )
    return CheckReport("V", PASS, params)


def check_zero_tails(state: Thm2State) -> CheckReport:
    """Condition Z: both ends of both blocks are 0 for 2x the largest time."""
    need = 2 * state.times_max()
    runs = (
        ("x_lead", state.x.leading_zero_run()),
        ("x_trail", state.x.trailing_zero_run()),
        ("y_lead", state.y.leading_zero_run()),
        ("y_trail", state.y.trailing_zero_run()),
    )
    params = (("stage", state.stage), ("required", need))
    for name, run in runs:
        if run < need:
            return CheckReport("Z", FAIL, params, ((name, run),))
    return CheckReport("Z", PASS, params, runs)


def sliding_falsifier(state: Thm2State, k: int) -> CheckReport:
    """Diagnostic: the any-offset reading of III fails once two nonzeros of x
    sit within one cell length of each other.  INFO either way; a found
    witness names the offset whose three consecutive cells contain two
    nonzero ones.
    """
    length = state.n(k)
    params = (("stage", state.stage), ("k", k), ("cell", length))
    nz = state.x.nonzero_positions
    for a, b in zip(nz, nz[1:]):
        if b - a <= length:
            offset = b - 2 * length
            return CheckReport(
                "SLIDING_FALSIFIER",
                INFO,
                params,
                (
                    ("found", True),
                    ("offset", offset),
                    ("pos_a", a),
                    ("pos_b", b),
                ),
            )
    return CheckReport("SLIDING_FALSIFIER", INFO, params, (("found", False),))


def check_transitive_rigidity(state: Thm2State, k: int) -> CheckReport:
    """Weakened rigidity: every symbol repeats within 1/k at distance m_k or n_k."""
    m_k, n_k = state.m(k), state.n(k)
    bound = Fraction(1, k)
    params = (("stage", state.stage), ("k", k), ("m", m_k), ("n", n_k))
    for name, block in (("x", state.x), ("y", state.y)):
        candidates = set()
        for p in block.nonzero_positions:
            candidates.update((p, p - m_k, p - n_k))
        for i in sorted(candidates):
            v = block.at_or_zero(i)
            d1 = abs(block.at_or_zero(i + m_k) - v)
            if d1 <= bound:
                continue
            d2 = abs(block.at_or_zero(i + n_k) - v)
            if d2 > bound:
                return CheckReport(
                    "TRANSITIVE_RIGIDITY",
                    FAIL,
                    params,
                    (("side", name), ("pos", i), ("diff_m", d1), ("diff_n", d2)),
                )
    return CheckReport("TRANSITIVE_RIGIDITY", PASS, params)


def verify(state: Thm2State, condition: str, **params) -> CheckReport:
    """Dispatch to the named condition checker."""
    if condition == "I":
        return check_rigidity_x(state, params["k"])
    if condition == "II":
        return check_rigidity_y(state, params["k"])
    if condition == "III":
        return check_sparseness_x(state, params["k"])
    if condition == "IV":
        return check_sparseness_y(state, params["k"])
    if condition == "V":
        return check_orthogonality(state)
    if condition == "Z":
        return check_zero_tails(state)
    if condition == "SLIDING_FALSIFIER":
        return sliding_falsifier(state, params["k"])
    if condition == "TRANSITIVE_RIGIDITY":
        return check_transitive_rigidity(state, params["k"])
    raise ValueError(f"unknown condition {condition!r}")


def stage_reports(state: Thm2State) -> list:
    """All gate conditions for the state, every admissible k, ordered by id."""
    reports = []
    ks = range(1, state.stage)
    if state.transitive:
        reports.extend(check_transitive_rigidity(state, k) for k in ks)
    else:
        reports.extend(check_rigidity_x(state, k) for k in ks)
        reports.extend(check_rigidity_y(state, k) for k in ks)
        reports.extend(check_sparseness_x(state, k) for k in ks)
        reports.extend(check_sparseness_y(state, k) for k in ks)
    reports.append(check_orthogonality(state))
    reports.append(check_zero_tails(state))
    return reports


# -- spacer solver ------------------------------------------------------------


def _align_up(raw: int, ell: int, modulus: int) -> int:
    """Smallest value >= raw making ell + value divisible by modulus."""
    if modulus <= 1:
        return raw
    rem = (ell + raw) % modulus
    return raw if rem == 0 else raw + modulus - rem


def _propose(state: Thm2State, raw_s: int, raw_sp: int, tp_floor: int) -> SpacerChoice:
    r = state.stage
    ell = state.common_length
    # x-side pitch keeps phase across the y-scale cells, y-side across x-scale.
    x_mod = math.lcm(*state.n_times) if state.n_times else 1
    s = _align_up(raw_s, ell, x_mod)
    m_new = ell + s
    y_mod = math.lcm(m_new, *state.m_times)
    sp = _align_up(max(raw_sp, r * m_new), ell, y_mod)
    n_new = ell + sp
    tp = max(tp_floor, 2 * max(m_new, n_new))
    t = tp + r * (sp - s)
    return SpacerChoice(s=s, t=t, sp=sp, tp=tp)


# Which spacer length each condition's failure calls for growing.
_BUMP_FOR = {
    "I": "s",
    "II": "sp",
    "III": "sp",  # at k = stage the whole span must fit one cell
    "III_SMALL": "s",  # at k < stage the copy separation is what matters
    "IV": "sp",
    "V": "sp",
    "Z": "tp",
    "TRANSITIVE_RIGIDITY": "s",
}


def solve_spacers(
    state: Thm2State,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> SpacerChoice:
    """Find spacer lengths whose built stage passes every gate condition.

    Seeds s at twice the largest defined time and sp at r copy pitches, both
    rounded up to the phase-preserving congruences, then builds, verifies,
    and doubles the length implicated by the first failing condition.
    Deterministic: equal states yield equal choices.
    """
    r = state.stage
    raw_s = max(2 * state.times_max(), 1)
    raw_sp = r * (state.common_length + raw_s)
    tp_floor = 0
    last_failure = None
    for _ in range(iteration_cap + 1):
        choice = _propose(state, raw_s, raw_sp, tp_floor)
        built = build_stage(state, choice, max_symbols=max_symbols)
        failure = None
        for rep in stage_reports(built):
            if not rep.passed:
                failure = rep
                break
        if failure is None:
            return choice
        last_failure = failure
        key = failure.check_id
        if key == "III":
            k = dict(failure.params)["k"]
            key = "III" if k == r else "III_SMALL"
        bump = _BUMP_FOR.get(key, "sp")
        if bump == "s":
            raw_s = 2 * max(raw_s, 1)
        elif bump == "sp":
            raw_sp = 2 * max(raw_sp, 1)
        else:
            tp_floor = 2 * max(tp_floor, choice.tp)
    raise SolverError(
        f"no spacer choice found within {iteration_cap} retries; "
        f"last failure: {last_failure.line()}",
        failing_condition=last_failure.check_id,
    )


def solve_transitive_spacers(state: Thm2State, iteration_cap: int = 16) -> tuple:
    """Interleave spacer lengths (za, zb, zc, zd) passing the orthogonality check.

    Seeds the copy offsets past both supports so shifted supports cannot
    collide, then widens deterministically until the built interleave passes.
    """
    bound = max(1, 2 * state.times_max())
    span = state.half_width
    za = bound + span + 1
    zc = za + 2 * span + 2
    for _ in range(iteration_cap):
        zd = bound
        zb = zd + zc - za
        try:
            build_transitive_stage(state, za, zb, zc, zd)
        except ValueError:
            zc = 2 * zc + 1
            continue
        return za, zb, zc, zd
    raise SolverError(
        f"no interleave spacers found within {iteration_cap} retries",
        failing_condition="V",
    )


def build_to_stage(
    target: int,
    transitive: bool = False,
    iteration_cap: int = DEFAULT_ITERATION_CAP,
    max_symbols: int = DEFAULT_MAX_SYMBOLS,
) -> Thm2State:
    """Drive the solver from stage 1 up to ``target``.

    With ``transitive`` the interleave step runs just before the final build,
    so the last stage exercises the weakened rigidity.
    """
    if target < 1:
        raise ValueError("target stage must be >= 1")
    if transitive and target < 2:
        raise ValueError("transitive build needs a target stage >= 2")
    state = initial_state()
    while state.stage < target:
        if transitive and state.stage == target - 1:
            za, zb, zc, zd = solve_transitive_spacers(state)
            state = build_transitive_stage(state, za, zb, zc, zd)
        choice = solve_spacers(
            state, iteration_cap=iteration_cap, max_symbols=max_symbols
        )
        state = build_stage(state, choice, max_symbols=max_symbols)
    return state
