"""Finite-stage entropy quantities and the checkers built on them.

Every value here is a finite-stage report: (1/d) log of an exact count at
one stage of a sofic approximation sequence, or (1/|F_n|) log / Shannon
entropy along a Folner sequence.  Running maxima stand in for the limsup
of the definitions; nothing is extrapolated.  Zero counts carry the -inf
sentinel, which only ever enters comparisons, never arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .covers import (Cover, cover_entropy, cylinder_complement_cover, min_subcover,
                     pullback_iterate, shannon_entropy)
from .errors import ArgumentError, ResourceBudgetError
from .groups import FiniteSubset, FolnerSequence
from .microstates import (MeasureFilter, MicrostateSet, count_cover,
                          enumerate_microstates_both, filter_microstates)
from .symbolic import SymbolicSystem, Window, as_fraction, integrate

NEG_INF = float("-inf")


def stage_value(count: int, d: int) -> float:
    """(1/d) log count in nats, with log 0 = -inf."""
    if count < 0:
        raise ArgumentError("counts cannot be negative")
    if count == 0:
        return NEG_INF
    return log_big(count) / d


def log_big(n: int) -> float:
    """Natural log of a (possibly huge) positive integer."""
    if n <= 0:
        raise ArgumentError("log of non-positive count")
    try:
        return math.log(n)
    except OverflowError:
        shift = n.bit_length() - 500
        return math.log(n >> shift) + shift * math.log(2)


@dataclass(frozen=True)
class TraceRow:
    stage: int
    d: int
    count_inner: int
    count_outer: int
    value_inner: float
    value_outer: float
    incomplete: bool = False


@dataclass
class EntropyTrace:
    kind: str
    cover_label: str
    F: tuple
    delta: Fraction
    rows: list = field(default_factory=list)
    log_cover_count: float = 0.0  # log N(U, X) on the cover window

    @property
    def running_max_outer(self) -> float:
        vals = [r.value_outer for r in self.rows if not r.incomplete]
        return max(vals) if vals else NEG_INF

    @property
    def running_max_inner(self) -> float:
        vals = [r.value_inner for r in self.rows if not r.incomplete]
        return max(vals) if vals else NEG_INF


def _trace(kind, system, cover, F, delta, maps, window, measure_filter, budget):
    delta = as_fraction(delta)
    n_cover = min_subcover(cover).count
    trace = EntropyTrace(
        kind=kind,
        cover_label=",".join(cover.labels),
        F=tuple(F),
        delta=delta,
        log_cover_count=log_big(n_cover) if n_cover else NEG_INF,
    )
    for stage, sigma in enumerate(maps):
        try:
            inner, outer = enumerate_microstates_both(
                system, F, delta, sigma, window,
                measure_filter=measure_filter, budget=budget,
            )
            ci = count_cover(inner, cover)
            co = count_cover(outer, cover)
            row = TraceRow(stage, sigma.d, ci, co,
                           stage_value(ci, sigma.d), stage_value(co, sigma.d))
            if ci > co:
                raise ArgumentError("inner count exceeded outer count (bug)")
            if co > n_cover ** sigma.d:
                raise ArgumentError("count exceeded N(U,X)^d (bug)")
        except ResourceBudgetError:
            row = TraceRow(stage, sigma.d, 0, 0, NEG_INF, NEG_INF, incomplete=True)
        trace.rows.append(row)
    return trace


def sofic_topological_trace(system: SymbolicSystem, cover: Cover, F, delta,
                            maps, window: Window, budget=2_000_000) -> EntropyTrace:
    """Per-stage (1/d_i) log N(U^{d_i}, microstates) in both certified modes."""
    return _trace("sofic-topological", system, cover, F, delta, maps, window,
                  None, budget)


def sofic_measure_trace(system: SymbolicSystem, cover: Cover, measure, L, F,
                        delta, maps, window: Window, budget=2_000_000) -> EntropyTrace:
    """Measure-filtered variant; L empty reduces to the topological trace."""
    delta = as_fraction(delta)
    mf = MeasureFilter.build(measure, L, delta) if L else None
    return _trace("sofic-measure", system, cover, F, delta, maps, window, mf, budget)


@dataclass(frozen=True)
class AmenableRow:
    n: int
    size: int  # |F_n|
    count: int  # N(U_{F_n}, X) for topological rows, 0 for measure rows
    entropy: float  # log count, or H_mu(V_{F_n})
    value: float  # normalized by |F_n|


@dataclass
class AmenableTrace:
    kind: str
    cover_label: str
    rows: list = field(default_factory=list)

    @property
    def final_value(self) -> float:
        return self.rows[-1].value if self.rows else NEG_INF


def amenable_topological_trace(system: SymbolicSystem, cover: Cover, ns,
                               budget=500_000) -> AmenableTrace:
    """(1/|F_n|) log N(U_{F_n}, X) along the box Folner sequence.

    Values live in [0, log N(U, X)]; the count-level form of the upper
    bound, N(U_{F_n}, X) <= N(U, X)^{|F_n|}, is asserted exactly.
    """
    folner = FolnerSequence(system.group)
    n_cover = min_subcover(cover, budget=budget).count
    trace = AmenableTrace("amenable-topological", ",".join(cover.labels))
    for n in ns:
        F = folner(n)
        vf = pullback_iterate(cover, F, budget=budget)
        count = min_subcover(vf, budget=budget).count
        if count > n_cover ** len(F):
            raise ArgumentError("N(U_F, X) exceeded N(U, X)^|F| (bug)")
        trace.rows.append(AmenableRow(n, len(F), count,
                                      log_big(count) if count else NEG_INF,
                                      stage_value(count, len(F))))
    return trace


def amenable_measure_trace(system: SymbolicSystem, cover: Cover, measure, ns,
                           budget=500_000) -> AmenableTrace:
    """(1/|F_n|) H_mu(V_{F_n}) along the box Folner sequence.

    Rows also carry N(V_{F_n}, X) in the count column, so the trace dumps
    as (F, N(V_F, X), H_mu(V_F), value).  Values live in [0, log |V|].
    """
    folner = FolnerSequence(system.group)
    trace = AmenableTrace("amenable-measure", ",".join(cover.labels))
    bound = math.log(len(cover))
    for n in ns:
        F = folner(n)
        vf = pullback_iterate(cover, F, budget=budget)
        count = min_subcover(vf, budget=budget).count
        h = cover_entropy(measure, vf, budget=budget).value
        value = h / len(F)
        if not -1e-12 <= value <= bound + 1e-9:
            raise ArgumentError("measure trace value escaped [0, log |V|] (bug)")
        trace.rows.append(AmenableRow(n, len(F), count, h, value))
    return trace


# dominant measure selection ----------------------------------------------------


@dataclass(frozen=True)
class DominantMeasureResult:
    winner_index: int
    winner_count: int
    unfiltered_count: int
    bound: int  # ceil(unfiltered / |D|)
    counts: tuple
    net_ok: bool
    uncovered: tuple  # sample empirical vectors not near any candidate


def select_dominant_measure(M: MicrostateSet, candidates, L, delta, cover: Cover,
                            require_net: bool = True) -> DominantMeasureResult:
    """Pick the candidate measure whose filtered count dominates.

    Validates the net condition (every tuple's empirical vector lies within
    delta of some candidate's expectations); with a covering net the winner
    provably satisfies count >= ceil(unfiltered / |D|).
    """
    if not candidates:
        raise ArgumentError("need at least one candidate measure")
    delta = as_fraction(delta)
    L = tuple(L)
    expectations = []
    for nu in candidates:
        expectations.append([integrate(nu, f) for f in L])

    uncovered = []
    if L:
        proj = []
        for f in L:
            for g in f.window.elements:
                if g not in M.window.index:
                    raise ArgumentError("test function exceeds microstate window")
            proj.append([M.window.index[g] for g in f.window.elements])
        for t in M.tuples:
            emp = []
            for f, pr in zip(L, proj):
                s = sum((f(tuple(x[i] for i in pr)) for x in t), Fraction(0))
                emp.append(s / M.d)
            near = any(
                all(abs(e - ex) < delta for e, ex in zip(emp, exp))
                for exp in expectations
            )
            if not near:
                uncovered.append(tuple(float(e) for e in emp))
    net_ok = not uncovered
    if require_net and not net_ok:
        raise ArgumentError(
            f"net condition violated: empirical vector {uncovered[0]} "
            f"is not within delta of any candidate"
        )

    unfiltered = count_cover(M, cover)
    counts = []
    for nu in candidates:
        filtered = filter_microstates(M, MeasureFilter.build(nu, L, delta))
        counts.append(count_cover(filtered, cover))
    winner = max(range(len(candidates)), key=lambda i: (counts[i], -i))
    bound = -(-unfiltered // len(candidates))  # ceil division
    if net_ok and counts[winner] < bound:
        raise ArgumentError("pigeonhole bound failed despite covering net (bug)")
    return DominantMeasureResult(
        winner_index=winner,
        winner_count=counts[winner],
        unfiltered_count=unfiltered,
        bound=bound,
        counts=tuple(counts),
        net_ok=net_ok,
        uncovered=tuple(uncovered[:5]),
    )


# partition counting bound -------------------------------------------------------


@dataclass(frozen=True)
class PartitionCountResult:
    count: int
    log_count: float
    log_bound: float  # |Lambda| (H(p) + 2 eps)
    holds: bool


def partition_count_bound(lam_size: int, p, eta, eps) -> PartitionCountResult:
    """Exact count of proportion-pinned labelled partitions vs the entropy bound.

    Counts partitions (gamma_1, ..., gamma_n, rest) of a lam_size-point set
    with | |gamma_k|/lam - p_k | < eta for every k, by exact multinomial
    summation in big integers, and compares log count against
    lam (H(p) + 2 eps).
    """
    if lam_size < 1:
        raise ArgumentError("lam_size must be >= 1")
    probs = [as_fraction(x) for x in p]
    if any(q <= 0 for q in probs):
        raise ArgumentError("probabilities must be strictly positive")
    if sum(probs) != 1:
        raise ArgumentError("probabilities must sum to exactly 1")
    eta = as_fraction(eta)
    if not 0 < eta < min(probs):
        raise ArgumentError("eta must satisfy 0 < eta < min p_k")
    eps = as_fraction(eps)
    if eps <= 0:
        raise ArgumentError("eps must be positive")

    ranges = []
    for q in probs:
        lo_f = lam_size * (q - eta)
        hi_f = lam_size * (q + eta)
        lo = math.floor(lo_f) + 1 if lo_f == math.floor(lo_f) else math.ceil(lo_f)
        hi = math.ceil(hi_f) - 1 if hi_f == math.ceil(hi_f) else math.floor(hi_f)
        lo = max(lo, 0)
        ranges.append((lo, hi))

    total = 0

    def rec(k, used, partial):
        nonlocal total
        if k == len(ranges):
            total += partial  # remainder goes to the (n+1)-th cell
            return
        lo, hi = ranges[k]
        for a in range(lo, min(hi, lam_size - used) + 1):
            rec(k + 1, used + a, partial * math.comb(lam_size - used, a))

    rec(0, 0, 1)
    entropy = -sum(float(q) * math.log(q) for q in probs)
    log_bound = lam_size * (entropy + 2 * float(eps))
    log_count = log_big(total) if total else NEG_INF
    return PartitionCountResult(total, log_count, log_bound, log_count <= log_bound)


# variational and agreement checkers ----------------------------------------------


@dataclass(frozen=True)
class VariationalRow:
    measure_label: str
    delta: Fraction
    stage: int
    d: int
    count_unfiltered_inner: int
    count_unfiltered_outer: int
    count_filtered_inner: int
    count_filtered_outer: int
    ordered_ok: bool
    gap_outer: float


@dataclass
class VariationalReport:
    rows: list
    ok: bool
    best_gap_by_stage: dict

    def worst_gap(self):
        gaps = [r.gap_outer for r in self.rows if r.gap_outer == r.gap_outer]
        return max(gaps) if gaps else 0.0


def check_variational(system: SymbolicSystem, cover: Cover, measures, L, F,
                      deltas, maps, window: Window, budget=2_000_000) -> VariationalReport:
    """Assert the finite-stage variational inequality on a (F, delta) grid.

    For every stage, measure and delta the filtered counts never exceed the
    unfiltered ones (exact integer comparison, both certification modes).
    measures is a list of (label, measure) pairs; the same L filters each.
    """
    rows = []
    best = {}
    ok = True
    for delta in deltas:
        delta = as_fraction(delta)
        for stage, sigma in enumerate(maps):
            inner_u, outer_u = enumerate_microstates_both(
                system, F, delta, sigma, window, budget=budget)
            cui = count_cover(inner_u, cover)
            cuo = count_cover(outer_u, cover)
            for label, mu in measures:
                mf = MeasureFilter.build(mu, L, delta)
                cfi = count_cover(filter_microstates(inner_u, mf), cover)
                cfo = count_cover(filter_microstates(outer_u, mf), cover)
                ordered = cfi <= cui and cfo <= cuo
                ok = ok and ordered
                vu = stage_value(cuo, sigma.d)
                vf = stage_value(cfo, sigma.d)
                if vu == NEG_INF and vf == NEG_INF:
                    gap = 0.0
                elif vf == NEG_INF:
                    gap = math.inf
                else:
                    gap = vu - vf
                rows.append(VariationalRow(label, delta, stage, sigma.d,
                                           cui, cuo, cfi, cfo, ordered, gap))
                key = (stage, delta)
                best[key] = min(best.get(key, math.inf), gap)
    return VariationalReport(rows=rows, ok=ok, best_gap_by_stage=best)


@dataclass(frozen=True)
class AgreementRow:
    n: int
    d: int
    delta: Fraction
    value_sofic_inner: float
    value_sofic_outer: float
    value_amenable: float
    gap: float  # |outer sofic - amenable|
    bound_ok: bool  # sofic <= amenable + slack


@dataclass
class AgreementReport:
    rows: list
    ok: bool
    slack_used: dict


def default_agreement_slack(d: int) -> float:
    """0.05 nats once d >= 12; looser at the very small stages."""
    return 0.05 if d >= 12 else 0.12


def check_amenable_agreement(system: SymbolicSystem, cover: Cover, ns, sigma_builder,
                             deltas, F, window: Window, measure=None, L=(),
                             slack=default_agreement_slack,
                             budget=2_000_000) -> AgreementReport:
    """Compare finite-stage sofic values against the amenable values at
    matched scale (d = |F_n|) and assert sofic <= amenable + slack.
    """
    folner = FolnerSequence(system.group)
    slack_fn = slack if callable(slack) else (lambda d: slack)
    rows = []
    slack_used = {}
    ok = True
    for n in ns:
        Fn = folner(n)
        d = len(Fn)
        sigma = sigma_builder(n)
        if sigma.d != d:
            raise ArgumentError("sigma_builder must match |F_n| for matched scale")
        if measure is None:
            am = amenable_topological_trace(system, cover, [n], budget=budget)
        else:
            am = amenable_measure_trace(system, cover, measure, [n], budget=budget)
        value_am = am.rows[-1].value
        for delta in deltas:
            delta = as_fraction(delta)
            if measure is None:
                tr = sofic_topological_trace(system, cover, F, delta, [sigma],
                                             window, budget=budget)
            else:
                tr = sofic_measure_trace(system, cover, measure, L, F, delta,
                                         [sigma], window, budget=budget)
            row = tr.rows[-1]
            s = slack_fn(d)
            slack_used[(n, delta)] = s
            vo = row.value_outer
            gap = abs(vo - value_am) if vo != NEG_INF else math.inf
            bound_ok = (vo == NEG_INF) or (vo <= value_am + s)
            ok = ok and bound_ok
            rows.append(AgreementRow(n, d, delta, row.value_inner, vo,
                                     value_am, gap, bound_ok))
    return AgreementReport(rows=rows, ok=ok, slack_used=slack_used)


# entropy pair scan ---------------------------------------------------------------


@dataclass(frozen=True)
class PairScanRow:
    pair_label: str
    value: float
    positive: bool


@dataclass
class PairScanReport:
    rows: list
    threshold: float
    note: str = "numerical evidence, not a certificate"


def entropy_pair_scan(system: SymbolicSystem, candidate_pairs, threshold: float,
                      n_stage: int, budget=500_000) -> PairScanReport:
    """Finite-stage scan for entropy pairs.

    Each candidate pair of disjoint cylinder patterns induces the cover by
    their complements; the reported value is the amenable finite-stage
    entropy of that cover at window size n_stage.  Values above threshold
    are flagged as numerical evidence for an entropy pair.
    """
    rows = []
    for p1, p2 in candidate_pairs:
        cov = cylinder_complement_cover(system, [p1, p2])
        label = f"{''.join(map(str, p1.values))}|{''.join(map(str, p2.values))}"
        if len(cov) == 1:
            value = 0.0
        else:
            tr = amenable_topological_trace(system, cov, [n_stage], budget=budget)
            value = tr.rows[-1].value
        rows.append(PairScanRow(label, value, value > threshold))
    return PairScanReport(rows=rows, threshold=threshold)
