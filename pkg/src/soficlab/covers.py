"""Finite covers of a subshift by unions of cylinders over a common window.

A cover element is a set of admissible window patterns (each pattern is a
clopen cylinder, so open and Borel covers coincide at this resolution; the
flag is kept for fidelity).  The module provides the join / pullback
algebra, exact minimal-subcover counting by branch and bound, Shannon and
cover entropy of measures, and measure-weighted partial cover counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError, ResourceBudgetError
from .groups import FiniteSubset
from .symbolic import Pattern, SymbolicSystem, Window, as_fraction

DEFAULT_NODE_BUDGET = 500_000


class Cover:
    """A finite cover of the window language by pattern sets."""

    def __init__(self, system: SymbolicSystem, window: Window, elements,
                 labels=None, drop_empty=False, open_cover=True):
        language = set(system.language_values(window))
        sets = []
        for raw in elements:
            vals = frozenset(tuple(v) for v in raw)
            trimmed = vals & language
            if not trimmed:
                if drop_empty:
                    continue
                raise ArgumentError("cover element is empty as a pattern set")
            sets.append(trimmed)
        if not sets:
            raise ArgumentError("cover needs at least one non-empty element")
        covered = frozenset().union(*sets)
        if covered != frozenset(language):
            missing = sorted(language - covered)[0]
            raise ArgumentError(f"not a cover: pattern {missing} is uncovered")
        self.system = system
        self.window = window
        self.elements = tuple(sets)
        self.open_cover = open_cover
        if labels is None:
            labels = tuple(f"E{i}" for i in range(len(self.elements)))
        self.labels = tuple(labels)[: len(self.elements)]
        self._is_partition = None

    def __len__(self):
        return len(self.elements)

    @property
    def is_partition(self) -> bool:
        if self._is_partition is None:
            total = sum(len(e) for e in self.elements)
            union = len(frozenset().union(*self.elements))
            self._is_partition = total == union
        return self._is_partition

    def canonical(self):
        return tuple(sorted(tuple(sorted(e)) for e in self.elements))

    def element_containing(self, values):
        """Indices of elements containing the given pattern values."""
        return tuple(i for i, e in enumerate(self.elements) if tuple(values) in e)

    def __repr__(self):
        kind = "partition" if self.is_partition else "cover"
        return f"Cover({self.system.label}, |W|={len(self.window)}, {len(self)} {kind} cells)"


def origin_partition(system: SymbolicSystem) -> Cover:
    """Partition of X by the symbol at the identity coordinate."""
    window = system.window([system.group.identity])
    cells = [[(a,)] for a in system.alphabet
             if (a,) in set(system.language_values(window))]
    return Cover(system, window, cells,
                 labels=tuple(f"[{a}]" for a, in (c[0] for c in cells)))


def trivial_cover(system: SymbolicSystem, window: Window = None) -> Cover:
    window = window or system.window([system.group.identity])
    return Cover(system, window, [system.language_values(window)], labels=("X",))


def cylinder_complement_cover(system: SymbolicSystem, patterns) -> Cover:
    """The cover {U_1^c, ..., U_n^c} for pairwise disjoint cylinders U_i."""
    pats = list(patterns)
    if len(pats) < 2:
        raise ArgumentError("need at least two candidate cylinders")
    window = pats[0].window
    for p in pats[1:]:
        window = system.window(window.elements + p.window.elements)
    lifted = []
    for p in pats:
        proj = [window.index[g] for g in p.window.elements]
        lifted.append(frozenset(
            v for v in system.language_values(window)
            if tuple(v[i] for i in proj) == p.values
        ))
    for a, b in itertools.combinations(lifted, 2):
        if a & b:
            raise ArgumentError("candidate cylinders overlap (not separable)")
    language = frozenset(system.language_values(window))
    elements = [language - c for c in lifted]
    return Cover(system, window, elements, drop_empty=True,
                 labels=tuple(f"comp{i}" for i in range(len(pats))))


def lift(cover: Cover, window: Window) -> Cover:
    """The same cover viewed on a larger window."""
    if cover.window == window:
        return cover
    for g in cover.window.elements:
        if g not in window.index:
            raise ArgumentError("lift target must contain the cover window")
    proj = [window.index[g] for g in cover.window.elements]
    language = cover.system.language_values(window)
    elements = []
    for e in cover.elements:
        elements.append([v for v in language if tuple(v[i] for i in proj) in e])
    return Cover(cover.system, window, elements, labels=cover.labels,
                 drop_empty=True, open_cover=cover.open_cover)


def join(v1: Cover, v2: Cover, budget: int = 4096) -> Cover:
    """V1 v V2: pairwise intersections over the united window, empties dropped."""
    if v1.system is not v2.system:
        raise ArgumentError("covers live over different systems")
    system = v1.system
    window = system.window(v1.window.elements + v2.window.elements)
    a = lift(v1, window)
    b = lift(v2, window)
    if len(a) * len(b) > budget:
        raise ResourceBudgetError(f"join would create {len(a) * len(b)} candidate cells")
    elements = []
    labels = []
    for (la, ea), (lb, eb) in itertools.product(zip(a.labels, a.elements),
                                                zip(b.labels, b.elements)):
        cell = ea & eb
        if cell:
            elements.append(cell)
            labels.append(f"{la}&{lb}")
    return Cover(system, window, elements, labels=labels,
                 open_cover=v1.open_cover and v2.open_cover)


def pullback(cover: Cover, g) -> Cover:
    """g^{-1} V: each cylinder on W moves to the translated window W g."""
    system = cover.system
    group = system.group
    g = group.coerce(g)
    new_window = system.window(group.multiply(w, g) for w in cover.window.elements)
    ginv = group.inverse(g)
    source = [cover.window.index[group.multiply(h, ginv)] for h in new_window.elements]
    elements = []
    for e in cover.elements:
        elements.append([tuple(v[i] for i in source) for v in e])
    return Cover(system, new_window, elements, labels=cover.labels,
                 drop_empty=True, open_cover=cover.open_cover)


def pullback_iterate(cover: Cover, F: FiniteSubset, budget: int = 200_000) -> Cover:
    """V_F = join over g in F of g^{-1} V."""
    system = cover.system
    group = system.group
    elems = sorted((group.coerce(g) for g in F), key=group.enumeration_key)
    if cover.is_partition:
        return _pullback_partition(cover, elems, budget)
    result = None
    for g in elems:
        part = pullback(cover, g)
        result = part if result is None else join(result, part, budget=budget)
    return result


def _pullback_partition(cover: Cover, elems, budget) -> Cover:
    """Partition fast path: cells are fibers of the per-translate signature."""
    system = cover.system
    group = system.group
    window = system.window(
        [group.multiply(w, g) for g in elems for w in cover.window.elements]
    )
    language = system.language_values(window, budget=budget * 10)
    lookup = {}
    for i, e in enumerate(cover.elements):
        for v in e:
            lookup[v] = i
    projections = []
    for g in elems:
        projections.append([
            window.index[group.multiply(w, g)] for w in cover.window.elements
        ])
    cells = {}
    for v in language:
        sig = tuple(lookup[tuple(v[i] for i in proj)] for proj in projections)
        cells.setdefault(sig, []).append(v)
    ordered = sorted(cells.items())
    labels = tuple("x".join(cover.labels[i] for i in sig) for sig, _ in ordered)
    return Cover(system, window, [vals for _, vals in ordered], labels=labels,
                 open_cover=cover.open_cover)


def refines(v1: Cover, v2: Cover) -> bool:
    """True iff every element of V1 is contained in some element of V2."""
    system = v1.system
    window = system.window(v1.window.elements + v2.window.elements)
    a = lift(v1, window)
    b = lift(v2, window)
    return all(any(ea <= eb for eb in b.elements) for ea in a.elements)


@dataclass(frozen=True)
class MinCoverResult:
    count: int
    witness: tuple
    exact: bool  # False means budget ran out: count is a greedy upper bound


def _greedy_cover(sets, universe):
    remaining = set(universe)
    chosen = []
    while remaining:
        best_i, best_gain = None, -1
        for i, s in enumerate(sets):
            gain = len(s & remaining)
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_gain <= 0:
            break
        chosen.append(best_i)
        remaining -= sets[best_i]
    return chosen


def exact_min_cover(sets, universe, budget: int = DEFAULT_NODE_BUDGET) -> MinCoverResult:
    """Exact minimum set cover via branch and bound.

    Branches on the uncovered point with fewest candidate sets; prunes with
    a greedy upper bound, a counting lower bound and pairwise set dominance.
    On budget exhaustion the greedy bound is returned flagged inexact.
    """
    universe = frozenset(universe)
    if not universe:
        return MinCoverResult(0, (), True)
    sets = [frozenset(s) & universe for s in sets]
    covered = frozenset().union(*sets) if sets else frozenset()
    if not universe <= covered:
        point = sorted(universe - covered)[0]
        raise ArgumentError(f"uncovered target point: {point}")

    # pairwise-disjoint families (partitions) admit unique covers
    if sum(len(s) for s in sets) == len(covered):
        witness = tuple(i for i, s in enumerate(sets) if s)
        return MinCoverResult(len(witness), witness, True)

    # dominance: drop sets contained in a later-or-equal superset
    if len(sets) <= 2000:
        keep = []
        for i, s in enumerate(sets):
            dominated = any(
                (s < t) or (s == t and j < i)
                for j, t in enumerate(sets) if j != i
            )
            if not dominated and s:
                keep.append(i)
    else:
        keep = [i for i, s in enumerate(sets) if s]
    index_map = keep
    work = [sets[i] for i in keep]

    greedy = _greedy_cover(work, universe)
    best = {"count": len(greedy), "witness": tuple(greedy), "exact": True}
    max_size = max(len(s) for s in work)
    nodes = 0

    def dfs(remaining, chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _Budget()
        if not remaining:
            if len(chosen) < best["count"]:
                best["count"] = len(chosen)
                best["witness"] = tuple(chosen)
            return
        lower = len(chosen) + math.ceil(len(remaining) / max_size)
        if lower >= best["count"]:
            return
        point = min(remaining, key=lambda p: (sum(1 for s in work if p in s), p))
        candidates = [i for i, s in enumerate(work) if point in s]
        candidates.sort(key=lambda i: (-len(work[i] & remaining), i))
        for i in candidates:
            if i in chosen:
                continue
            dfs(remaining - work[i], chosen + [i])

    class _Budget(Exception):
        pass

    try:
        dfs(frozenset(universe), [])
    except _Budget:
        return MinCoverResult(len(greedy),
                              tuple(index_map[i] for i in greedy), False)
    return MinCoverResult(best["count"],
                          tuple(index_map[i] for i in best["witness"]),
                          best["exact"])


def min_subcover(cover: Cover, target=None, budget: int = DEFAULT_NODE_BUDGET) -> MinCoverResult:
    """N(V, K): minimal subfamily of V covering the target pattern set.

    target defaults to the full window language (K = X); N(V, empty) = 0.
    """
    if target is None:
        universe = frozenset(cover.system.language_values(cover.window))
    else:
        universe = frozenset(
            p.values if isinstance(p, Pattern) else tuple(p) for p in target
        )
    return exact_min_cover(cover.elements, universe, budget=budget)


def element_measure(measure, window: Window, element) -> Fraction:
    total = Fraction(0)
    for values in element:
        total += measure.cylinder(Pattern(window, values))
    return total


def shannon_entropy(measure, partition: Cover) -> float:
    """H_mu(alpha) = -sum mu(A) log mu(A) in nats (0 log 0 = 0)."""
    if not partition.is_partition:
        raise ArgumentError("shannon_entropy needs a partition")
    out = 0.0
    for e in partition.elements:
        m = element_measure(measure, partition.window, e)
        if m > 0:
            out -= float(m) * math.log(m)
    return out


def partitions_refining(cover: Cover, budget: int = 250_000):
    """The assignment family P(V): every pattern mapped to a containing element.

    Yields deduplicated partitions as tuples of frozensets in a deterministic
    (lexicographic assignment) order; the cover-entropy minimum over all
    partitions finer than V is attained inside this family.
    """
    patterns = sorted(frozenset().union(*cover.elements))
    options = []
    for v in patterns:
        opts = cover.element_containing(v)
        options.append(opts)
    count = 1
    for opts in options:
        count *= len(opts)
        if count > budget:
            raise ResourceBudgetError(
                f"assignment family too large (> {budget})",
                upper_bound=None,
            )
    seen = set()
    for assignment in itertools.product(*options):
        atoms = {}
        for v, idx in zip(patterns, assignment):
            atoms.setdefault(idx, []).append(v)
        partition = tuple(
            frozenset(atoms[idx]) for idx in sorted(atoms)
        )
        key = frozenset(partition)
        if key in seen:
            continue
        seen.add(key)
        yield partition


@dataclass(frozen=True)
class CoverEntropyResult:
    value: float
    argmin: tuple  # atoms of the minimizing partition, as frozensets


def cover_entropy(measure, cover: Cover, budget: int = 250_000) -> CoverEntropyResult:
    """H_mu(V) = min over partitions finer than V of the Shannon entropy.

    Partitions come from the assignment family; ties break toward the first
    assignment in lexicographic order.
    """
    if cover.is_partition:
        value = shannon_entropy(measure, cover)
        return CoverEntropyResult(value, tuple(cover.elements))
    measures = {}

    def atom_measure(atom):
        if atom not in measures:
            measures[atom] = element_measure(measure, cover.window, atom)
        return measures[atom]

    best = None
    best_atoms = None
    try:
        family = partitions_refining(cover, budget=budget)
        for partition in family:
            h = 0.0
            for atom in partition:
                m = atom_measure(atom)
                if m > 0:
                    h -= float(m) * math.log(m)
            if best is None or h < best - 1e-15:
                best = h
                best_atoms = partition
    except ResourceBudgetError as exc:
        greedy = _greedy_assignment_entropy(measure, cover)
        raise ResourceBudgetError(
            "cover entropy family budget exceeded",
            upper_bound=greedy,
        ) from exc
    return CoverEntropyResult(best, best_atoms)


def _greedy_assignment_entropy(measure, cover: Cover) -> float:
    patterns = sorted(frozenset().union(*cover.elements))
    atoms = {}
    for v in patterns:
        idx = cover.element_containing(v)[0]
        atoms.setdefault(idx, []).append(v)
    h = 0.0
    for vals in atoms.values():
        m = element_measure(measure, cover.window, frozenset(vals))
        if m > 0:
            h -= float(m) * math.log(m)
    return h


def partial_cover_count(measure, F: FiniteSubset, a, cover: Cover,
                        budget: int = DEFAULT_NODE_BUDGET):
    """b_nu(F, a, V): minimal size of a subfamily of V_F with union measure >= a."""
    a = as_fraction(a)
    if not 0 < a < 1:
        raise ArgumentError("a must lie strictly between 0 and 1")
    vf = pullback_iterate(cover, F)
    return partial_cover_count_of(measure, vf, a, budget=budget)


def partial_cover_count_of(measure, cover: Cover, a, budget: int = DEFAULT_NODE_BUDGET):
    """b_nu against an already-joined cover."""
    a = as_fraction(a)
    window = cover.window
    weights = [element_measure(measure, window, e) for e in cover.elements]
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], i))
    sets = [cover.elements[i] for i in order]
    singles = [weights[i] for i in order]
    total_union = element_measure(measure, window, frozenset().union(*sets))
    if total_union < a:
        raise ArgumentError(
            f"cover union has measure {float(total_union):.6g} < a={float(a):.6g}"
        )

    pattern_mass = {}

    def union_measure(patterns):
        out = Fraction(0)
        for v in patterns:
            m = pattern_mass.get(v)
            if m is None:
                m = measure.cylinder(Pattern(window, v))
                pattern_mass[v] = m
            out += m
        return out

    best = {"count": len(sets)}
    nodes = 0

    def extra_needed(mass_gap, idx):
        need = 0
        acc = Fraction(0)
        for j in range(idx, len(sets)):
            if acc >= mass_gap:
                break
            acc += singles[j]
            need += 1
        return need if acc >= mass_gap else None

    def dfs(idx, chosen_union, count):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceBudgetError("partial cover budget exceeded",
                                      upper_bound=best["count"])
        mass = union_measure(chosen_union)
        if mass >= a:
            best["count"] = min(best["count"], count)
            return
        if idx == len(sets) or count >= best["count"]:
            return
        need = extra_needed(a - mass, idx)
        if need is None or count + need >= best["count"]:
            return
        dfs(idx + 1, chosen_union | sets[idx], count + 1)
        dfs(idx + 1, chosen_union, count)

    dfs(0, frozenset(), 0)
    return best["count"]
