"""Enumeration of the finite model spaces behind the sofic entropy counts.

A microstate is a d-tuple of admissible window patterns that is
approximately equivariant under a sofic map sigma on a finite set F to
tolerance delta, in the averaged-l2 sense

    max_{s in F} sqrt( (1/d) sum_i rho^2(s . x_i, x_{sigma_s(i)}) ) < delta.

Window truncation makes exact membership undecidable, so sets come in two
certified modes: 'outer' uses the lower distance bound (a superset of the
true set), 'inner' uses the upper bound (a subset).  All comparisons are
exact: dyadic weights are rescaled to integers, delta is read as a decimal
literal, and the strict < of the definition is preserved bit-for-bit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ArgumentError, ResourceBudgetError
from .groups import FiniteSubset
from .symbolic import Pattern, SymbolicSystem, Window, as_fraction
from .covers import Cover, exact_min_cover

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class MeasureFilter:
    """Empirical-average filter: |(1/d) sum_i f(x_i) - mu(f)| < delta per f."""

    measure: object
    functions: tuple
    delta: Fraction

    @classmethod
    def build(cls, measure, functions, delta):
        return cls(measure, tuple(functions), as_fraction(delta))


@dataclass
class MicrostateSet:
    system: SymbolicSystem
    window: Window
    d: int
    F: tuple
    delta: Fraction
    mode: str  # 'inner' or 'outer'
    tuples: tuple  # each microstate is a tuple of d value-tuples
    sigma_provenance: str = "?"
    filtered: bool = False

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, t):
        return tuple(tuple(x) for x in t) in set(self.tuples)

    def __repr__(self):
        tag = "filtered " if self.filtered else ""
        return (f"MicrostateSet(d={self.d}, |W|={len(self.window)}, "
                f"{tag}{self.mode}, {len(self.tuples)} tuples)")


class ComparisonPlan:
    """Precomputed per-shift comparison data for one (window, F) pair.

    For each s in F the comparison window is W_s = {g in W : g s in W};
    the pair list holds (weight, source index of g s, target index of g).
    """

    def __init__(self, system: SymbolicSystem, window: Window, F):
        group = system.group
        self.system = system
        self.window = window
        self.shifts = tuple(
            sorted((group.coerce(g) for g in F), key=group.enumeration_key)
        )
        if not self.shifts:
            raise ArgumentError("F must be non-empty")
        denom = 1
        for w in window.weights:
            denom = denom * w.denominator // math.gcd(denom, w.denominator)
        total = system.weights.total
        denom = denom * total.denominator // math.gcd(denom, total.denominator)
        self.scale = denom  # all lo and tail values times scale are integers
        self.pairs = []
        self.tails = []
        for s in self.shifts:
            pairs = []
            mass = Fraction(0)
            for g in window.elements:
                gs = group.multiply(g, s)
                if gs in window.index:
                    w = window.weights[window.index[g]]
                    pairs.append((int(w * denom), window.index[gs], window.index[g]))
                    mass += w
            if not pairs:
                raise ArgumentError(
                    f"window too small for shift {group.element_name(s)}: "
                    "enlarge W so that W and W s overlap"
                )
            self.pairs.append(tuple(pairs))
            self.tails.append(int((total - mass) * denom))

    def distances(self, p_values, q_values, s_index):
        """(lo, hi) scaled by self.scale for rho(s . p, q) on W_s."""
        lo = 0
        for w, src, dst in self.pairs[s_index]:
            if p_values[src] != q_values[dst]:
                lo += w
        return lo, lo + self.tails[s_index]


def zero_defect_delta(system: SymbolicSystem, window: Window, F, d: int) -> Fraction:
    """A delta small enough that no single coordinate mismatch survives.

    With this tolerance the enumerated (outer) set consists exactly of the
    tuples with perfect pattern agreement along every sigma_s overlap: the
    lightest possible mismatch already violates the averaged-l2 bound.
    """
    plan = ComparisonPlan(system, window, F)
    min_w = min(w for pairs in plan.pairs for (w, _, _) in pairs)
    # d * delta^2 <= (min_w/scale)^2 guarantees the cut; halve for margin
    return Fraction(min_w, 2 * d * plan.scale)


def microstate_check(system: SymbolicSystem, patterns, F, delta, sigma,
                     window: Window = None, mode: str = "outer",
                     plan: ComparisonPlan = None) -> bool:
    """Decide the averaged-l2 equivariance test for one tuple, exactly."""
    values = [p.values if isinstance(p, Pattern) else tuple(p) for p in patterns]
    if window is None:
        window = patterns[0].window
    if plan is None:
        plan = ComparisonPlan(system, window, F)
    if mode not in ("inner", "outer"):
        raise ArgumentError(f"unknown mode {mode!r}")
    d = len(values)
    delta = as_fraction(delta)
    # sum_i dist^2 < d delta^2, with dist scaled by plan.scale
    threshold = d * delta * delta * plan.scale * plan.scale
    for s_index, s in enumerate(plan.shifts):
        perm = sigma.image_array(s)
        total = 0
        for i in range(d):
            lo, hi = plan.distances(values[i], values[int(perm[i])], s_index)
            dist = lo if mode == "outer" else hi
            total += dist * dist
        if not Fraction(total) < threshold:
            return False
    return True


def _filter_tables(system, window, measure_filter, d):
    """Per-function lookup of f on restricted patterns plus strict bounds."""
    from .symbolic import integrate

    tables = []
    for f in measure_filter.functions:
        for g in f.window.elements:
            if g not in window.index:
                raise ArgumentError(
                    f"test function {f.label} needs coordinates outside the window"
                )
        proj = [window.index[g] for g in f.window.elements]
        mu_f = integrate(measure_filter.measure, f)
        lo = d * (mu_f - measure_filter.delta)
        hi = d * (mu_f + measure_filter.delta)
        tables.append({
            "proj": proj,
            "f": f,
            "lo": lo,
            "hi": hi,
            "min": f.min_value,
            "max": f.max_value,
        })
    return tables


def _f_value(table, values):
    return table["f"](tuple(values[i] for i in table["proj"]))


def enumerate_microstates(system: SymbolicSystem, F, delta, sigma,
                          window: Window, mode: str = "outer",
                          measure_filter: MeasureFilter = None,
                          strategy: str = "pruned",
                          budget: int = DEFAULT_NODE_BUDGET) -> MicrostateSet:
    inner, outer = enumerate_microstates_both(
        system, F, delta, sigma, window,
        measure_filter=measure_filter, strategy=strategy, budget=budget,
    )
    if mode == "inner":
        return inner
    if mode == "outer":
        return outer
    raise ArgumentError(f"unknown mode {mode!r}")


def enumerate_microstates_both(system: SymbolicSystem, F, delta, sigma,
                               window: Window,
                               measure_filter: MeasureFilter = None,
                               strategy: str = "pruned",
                               budget: int = DEFAULT_NODE_BUDGET):
    """Enumerate certified-inner and certified-outer sets in one pass.

    strategy 'pruned' walks tuples depth-first, cutting as soon as a partial
    outer sum crosses the threshold (sums only grow); 'naive' scans the full
    product space and is kept as a cross-check oracle for small instances.
    """
    delta = as_fraction(delta)
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    d = sigma.d
    plan = ComparisonPlan(system, window, F)
    lang = system.language_values(window)
    if not lang:
        base = dict(system=system, window=window, d=d, F=plan.shifts, delta=delta,
                    sigma_provenance=sigma.provenance,
                    filtered=measure_filter is not None)
        return (MicrostateSet(mode="inner", tuples=(), **base),
                MicrostateSet(mode="outer", tuples=(), **base))
    perms = [sigma.image_array(s) for s in plan.shifts]
    n_shifts = len(plan.shifts)
    threshold = d * delta * delta * plan.scale * plan.scale
    t_num, t_den = threshold.numerator, threshold.denominator

    # term (s, i, j=sigma_s(i)) is evaluated once both ends are assigned
    terms_at = [[] for _ in range(d)]
    for s_index in range(n_shifts):
        perm = perms[s_index]
        for i in range(d):
            j = int(perm[i])
            terms_at[max(i, j)].append((s_index, i, j))

    pen_cache = {}

    def penalties(s_index, pi, qi):
        key = (s_index, pi, qi)
        hit = pen_cache.get(key)
        if hit is None:
            lo, hi = plan.distances(lang[pi], lang[qi], s_index)
            hit = (lo * lo, hi * hi)
            pen_cache[key] = hit
        return hit

    tables = (_filter_tables(system, window, measure_filter, d)
              if measure_filter is not None else [])
    fvals = []
    for table in tables:
        fvals.append([_f_value(table, v) for v in lang])

    inner_out = []
    outer_out = []
    if strategy == "naive":
        if len(lang) ** d > budget:
            raise ResourceBudgetError(
                f"naive scan of {len(lang)}^{d} tuples exceeds budget",
                dp_prunable=True,
            )
        for combo in itertools.product(range(len(lang)), repeat=d):
            sums_out = [0] * n_shifts
            sums_in = [0] * n_shifts
            for s_index in range(n_shifts):
                perm = perms[s_index]
                for i in range(d):
                    po, pi_ = penalties(s_index, combo[i], combo[int(perm[i])])
                    sums_out[s_index] += po
                    sums_in[s_index] += pi_
            ok_out = all(v * t_den < t_num for v in sums_out)
            ok_in = all(v * t_den < t_num for v in sums_in)
            if not ok_out:
                continue
            if tables and not _passes_filter(tables, fvals, combo):
                continue
            t = tuple(lang[c] for c in combo)
            outer_out.append(t)
            if ok_in:
                inner_out.append(t)
    elif strategy == "pruned":
        _pruned_scan(lang, d, n_shifts, terms_at, penalties, t_num, t_den,
                     tables, fvals, inner_out, outer_out, budget)
    else:
        raise ArgumentError(f"unknown strategy {strategy!r}")

    base = dict(system=system, window=window, d=d, F=plan.shifts, delta=delta,
                sigma_provenance=sigma.provenance,
                filtered=measure_filter is not None)
    return (MicrostateSet(mode="inner", tuples=tuple(inner_out), **base),
            MicrostateSet(mode="outer", tuples=tuple(outer_out), **base))


def _passes_filter(tables, fvals, combo):
    for table, vals in zip(tables, fvals):
        total = sum((vals[c] for c in combo), Fraction(0))
        if not (table["lo"] < total < table["hi"]):
            return False
    return True


def _pruned_scan(lang, d, n_shifts, terms_at, penalties, t_num, t_den,
                 tables, fvals, inner_out, outer_out, budget):
    """Depth-first tuple scan.

    At each position the first pending constraint drives candidate order:
    candidates are visited by ascending penalty against the already-fixed
    partner pattern, so the scan breaks out of a position as soon as the
    cheapest remaining candidate would cross the (monotone) threshold.
    """
    n_lang = len(lang)
    assign = [0] * d
    sums_out = [0] * n_shifts
    sums_in = [0] * n_shifts
    fsums = [Fraction(0)] * len(tables)
    nodes = 0
    free_list = [(0, 0, c) for c in range(n_lang)]
    sorted_cache = {}

    def sorted_candidates(s_index, role, fixed):
        key = (s_index, role, fixed)
        hit = sorted_cache.get(key)
        if hit is None:
            out = []
            for c in range(n_lang):
                if role == "p":
                    po, pi_ = penalties(s_index, c, fixed)
                elif role == "q":
                    po, pi_ = penalties(s_index, fixed, c)
                else:
                    po, pi_ = penalties(s_index, c, c)
                out.append((po, pi_, c))
            out.sort(key=lambda t: (t[0], t[2]))
            sorted_cache[key] = out
            hit = out
        return hit

    def feasible_filters(depth):
        remaining = d - depth
        for k, table in enumerate(tables):
            total = fsums[k]
            if not (table["lo"] < total + remaining * table["max"]):
                return False
            if not (total + remaining * table["min"] < table["hi"]):
                return False
        return True

    def rec(pos):
        nonlocal nodes
        if pos == d:
            t = tuple(lang[c] for c in assign)
            outer_out.append(t)
            if all(v * t_den < t_num for v in sums_in):
                inner_out.append(t)
            return
        terms = terms_at[pos]
        if terms:
            s0, i0, j0 = terms[0]
            if i0 == pos and j0 == pos:
                cands = sorted_candidates(s0, "self", None)
            elif i0 == pos:
                cands = sorted_candidates(s0, "p", assign[j0])
            else:
                cands = sorted_candidates(s0, "q", assign[i0])
            rest = terms[1:]
        else:
            s0 = None
            cands = free_list
            rest = ()
        for po0, pi0, c in cands:
            nodes += 1
            if nodes > budget:
                raise ResourceBudgetError(
                    "microstate enumeration budget exceeded",
                    partial=(tuple(inner_out), tuple(outer_out)),
                    dp_prunable=True,
                )
            if s0 is not None:
                if not (sums_out[s0] + po0) * t_den < t_num:
                    break  # candidates are sorted: all later ones bust too
                sums_out[s0] += po0
                sums_in[s0] += pi0
            assign[pos] = c
            ok = True
            added = []
            for s_index, i, j in rest:
                po, pi_ = penalties(s_index, assign[i], assign[j])
                sums_out[s_index] += po
                sums_in[s_index] += pi_
                added.append((s_index, po, pi_))
                if not sums_out[s_index] * t_den < t_num:
                    ok = False
                    break
            if ok and tables:
                for k in range(len(tables)):
                    fsums[k] += fvals[k][c]
                if feasible_filters(pos + 1):
                    rec(pos + 1)
                for k in range(len(tables)):
                    fsums[k] -= fvals[k][c]
            elif ok:
                rec(pos + 1)
            for s_index, po, pi_ in added:
                sums_out[s_index] -= po
                sums_in[s_index] -= pi_
            if s0 is not None:
                sums_out[s0] -= po0
                sums_in[s0] -= pi0
        assign[pos] = 0

    rec(0)
    inner_out.sort()
    outer_out.sort()


def filter_microstates(M: MicrostateSet, measure_filter: MeasureFilter) -> MicrostateSet:
    """Apply the empirical-average filter to an already enumerated set."""
    tables = _filter_tables(M.system, M.window, measure_filter, M.d)
    kept = []
    for t in M.tuples:
        ok = True
        for table in tables:
            total = sum((_f_value(table, x) for x in t), Fraction(0))
            if not (table["lo"] < total < table["hi"]):
                ok = False
                break
        if ok:
            kept.append(t)
    return MicrostateSet(
        system=M.system, window=M.window, d=M.d, F=M.F, delta=M.delta,
        mode=M.mode, tuples=tuple(kept), sigma_provenance=M.sigma_provenance,
        filtered=True,
    )


def count_cover(M: MicrostateSet, cover: Cover, budget: int = 250_000) -> int:
    """N(U^d, M): minimal number of product cells U_{i_1} x ... x U_{i_d}
    covering the microstate set.  Partitions short-cut to counting the
    distinct cell signatures; general covers reduce per coordinate to
    maximal elements and run the exact set-cover search.
    """
    if len(M.tuples) == 0:
        return 0
    window = M.window
    for g in cover.window.elements:
        if g not in window.index:
            raise ArgumentError("cover window must sit inside the microstate window")
    proj = [window.index[g] for g in cover.window.elements]

    def restrict(values):
        return tuple(values[i] for i in proj)

    if cover.is_partition:
        owner = {}
        for idx, e in enumerate(cover.elements):
            for v in e:
                owner[v] = idx
        signatures = set()
        for t in M.tuples:
            try:
                signatures.add(tuple(owner[restrict(x)] for x in t))
            except KeyError as exc:
                raise ArgumentError(f"microstate pattern uncovered: {exc}") from exc
        return len(signatures)

    d = M.d
    restricted = [tuple(restrict(x) for x in t) for t in M.tuples]
    occurring = [frozenset(t[j] for t in restricted) for j in range(d)]
    per_position = []
    for j in range(d):
        views = []
        for idx, e in enumerate(cover.elements):
            view = e & occurring[j]
            views.append((idx, view))
        maximal = []
        for idx, view in views:
            if not view:
                continue
            dominated = any(
                (view < other) or (view == other and jdx < idx)
                for jdx, other in views if jdx != idx
            )
            if not dominated:
                maximal.append((idx, view))
        if not maximal:
            raise ArgumentError(f"coordinate {j} has uncovered patterns")
        per_position.append(maximal)

    n_products = 1
    for options in per_position:
        n_products *= len(options)
        if n_products > budget:
            raise ResourceBudgetError(
                f"product cover family too large (> {budget})"
            )
    universe = frozenset(range(len(restricted)))
    candidate_sets = []
    for choice in itertools.product(*per_position):
        views = [view for _, view in choice]
        covered = frozenset(
            k for k, t in enumerate(restricted)
            if all(t[j] in views[j] for j in range(d))
        )
        if covered:
            candidate_sets.append(covered)
    result = exact_min_cover(candidate_sets, universe, budget=budget)
    if not result.exact:
        raise ResourceBudgetError("count_cover search budget exceeded",
                                  upper_bound=result.count)
    return result.count
