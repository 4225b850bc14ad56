"""Subshifts of finite type over a finitely generated group, at window
resolution.

Points of the (usually infinite) shift space are only ever touched through
their restrictions to finite windows.  Every metric comparison therefore
returns a certified interval [lo, lo + tail(W)] where tail(W) is the total
weight outside the window; downstream counts carry that bracketing instead
of pretending to exact membership.

Default metric weights give the j-th element of the group's canonical
enumeration (ordered by word length, lexicographic tie-break) the dyadic
weight 2^-(j+1), so all window sums and tails are exact Fractions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArgumentError, ResourceBudgetError, UnsupportedOperationError
from .groups import Group


def as_fraction(x) -> Fraction:
    """Exact rational from int/str/Fraction; floats read as decimal literals."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    try:
        return Fraction(str(float(x)))
    except (TypeError, ValueError) as exc:
        raise ArgumentError(f"cannot interpret {x!r} as an exact number") from exc


class MetricWeights:
    """Summable positive weights w_g with an exactly known total mass.

    The default assigns 2^-(j+1) to the j-th element of the group's
    canonical enumeration (total mass 1 for infinite groups, 1 - 2^-|G|
    for finite ones), keeping every window mass and tail dyadic.
    """

    def __init__(self, group: Group, weight_fn=None, total=None, max_enumeration=2_000_000):
        self.group = group
        self._custom = weight_fn
        self._index = {}
        self._iter = group.enumerate_elements()
        self._max_enumeration = max_enumeration
        if weight_fn is not None:
            if total is None:
                raise ArgumentError("custom weights need a declared total mass")
            self.total = as_fraction(total)
        elif group.is_finite():
            self.total = 1 - Fraction(1, 2 ** group.order)
        else:
            self.total = Fraction(1)

    def _enumeration_index(self, g) -> int:
        if g in self._index:
            return self._index[g]
        while len(self._index) < self._max_enumeration:
            h = next(self._iter)
            self._index.setdefault(h, len(self._index))
            if h == g:
                return self._index[g]
        raise ResourceBudgetError(f"enumeration budget hit before reaching {g!r}")

    def weight(self, g) -> Fraction:
        g = self.group.coerce(g)
        if self._custom is not None:
            w = as_fraction(self._custom(g))
            if w <= 0:
                raise ArgumentError("weights must be positive")
            return w
        return Fraction(1, 2 ** (self._enumeration_index(g) + 1))

    def mass(self, elements) -> Fraction:
        return sum((self.weight(g) for g in elements), Fraction(0))

    def tail(self, elements) -> Fraction:
        t = self.total - self.mass(elements)
        if t < 0:
            raise ArgumentError("declared total mass is inconsistent (negative tail)")
        return t


class Window:
    """A canonically ordered finite window with cached weights and tail."""

    __slots__ = ("system", "elements", "index", "weights", "mass", "tail")

    def __init__(self, system: "SymbolicSystem", elements):
        group = system.group
        elems = sorted({group.coerce(g) for g in elements}, key=group.enumeration_key)
        if not elems:
            raise ArgumentError("window must be non-empty")
        self.system = system
        self.elements = tuple(elems)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.weights = tuple(system.weights.weight(g) for g in self.elements)
        self.mass = sum(self.weights, Fraction(0))
        self.tail = system.weights.tail(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    def __eq__(self, other):
        return (
            isinstance(other, Window)
            and self.system is other.system
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((id(self.system), self.elements))

    def __repr__(self):
        names = ",".join(self.system.group.element_name(g) for g in self.elements)
        return f"Window({{{names}}})"


@dataclass(frozen=True)
class Pattern:
    """A total assignment window -> alphabet."""

    window: Window
    values: tuple

    def __post_init__(self):
        if len(self.values) != len(self.window):
            raise ArgumentError("pattern values must match window size")

    def value_at(self, g):
        return self.values[self.window.index[g]]

    def __repr__(self):
        return f"Pattern({''.join(map(str, self.values))}@{self.window!r})"


class SymbolicSystem:
    """A subshift of finite type with window-truncated compatible metric.

    Forbidden patterns are finite; ``language`` enumerates all locally
    admissible patterns on a window (no translated forbidden pattern fits
    inside).  For nearest-neighbour Z-systems on intervals this coincides
    with the set of globally admissible words.
    """

    def __init__(self, alphabet, group: Group, forbidden=(), weights: MetricWeights = None,
                 label="system"):
        symbols = tuple(alphabet)
        if len(symbols) < 1 or len(set(symbols)) != len(symbols):
            raise ArgumentError("alphabet must be non-empty without repeats")
        self.alphabet = symbols
        self.group = group
        self.weights = weights if weights is not None else MetricWeights(group)
        self.label = label
        self._windows = {}
        self._language_cache = {}
        self.forbidden = tuple(
            self._coerce_forbidden(win, vals) for win, vals in forbidden
        )

    def _coerce_forbidden(self, window_elements, values):
        group = self.group
        elems = tuple(group.coerce(g) for g in window_elements)
        vals = tuple(values)
        if len(elems) != len(vals) or len(set(elems)) != len(elems):
            raise ArgumentError("forbidden pattern must assign each window element once")
        for v in vals:
            if v not in self.alphabet:
                raise ArgumentError(f"forbidden pattern uses unknown symbol {v!r}")
        order = sorted(range(len(elems)), key=lambda i: group.enumeration_key(elems[i]))
        return (
            tuple(elems[i] for i in order),
            tuple(vals[i] for i in order),
        )

    # windows and patterns ---------------------------------------------------

    def window(self, elements) -> Window:
        w = Window(self, elements)
        return self._windows.setdefault(w.elements, w)

    def interval_window(self, lo: int, hi: int) -> Window:
        """Convenience for Z systems: the window {lo, ..., hi}."""
        if self.group.kind != "lattice" or self.group.rank != 1:
            raise UnsupportedOperationError("interval windows are a Z convenience")
        return self.window(range(lo, hi + 1))

    def pattern(self, window: Window, assignment) -> Pattern:
        if isinstance(assignment, dict):
            coerced = {self.group.coerce(g): v for g, v in assignment.items()}
            values = tuple(coerced[g] for g in window.elements)
        else:
            values = tuple(assignment)
        for v in values:
            if v not in self.alphabet:
                raise ArgumentError(f"unknown symbol {v!r}")
        return Pattern(window, values)

    # shift action ------------------------------------------------------------

    def act(self, g, p: Pattern) -> Pattern:
        """(g.p) on window W g^-1, via (g.x)_h = x_{hg}."""
        group = self.group
        g = group.coerce(g)
        ginv = group.inverse(g)
        new_window = self.window(group.multiply(w, ginv) for w in p.window.elements)
        values = tuple(
            p.value_at(group.multiply(h, g)) for h in new_window.elements
        )
        return Pattern(new_window, values)

    def restrict(self, p: Pattern, window: Window) -> Pattern:
        for g in window.elements:
            if g not in p.window:
                raise ArgumentError("restriction target exceeds pattern window")
        return Pattern(window, tuple(p.value_at(g) for g in window.elements))

    # metric ------------------------------------------------------------------

    def rho(self, p: Pattern, q: Pattern):
        """Certified distance interval [lo, hi] between any two extensions."""
        if p.window != q.window:
            raise ArgumentError("rho needs patterns on the same window")
        lo = Fraction(0)
        for w, a, b in zip(p.window.weights, p.values, q.values):
            if a != b:
                lo += w
        return lo, lo + p.window.tail

    # language ------------------------------------------------------------------

    def _embeddings(self, window: Window):
        """Positions where a translate of a forbidden pattern fits inside."""
        group = self.group
        by_last = {}
        for elems, vals in self.forbidden:
            v0_inv = group.inverse(elems[0])
            anchors = {group.multiply(v0_inv, w) for w in window.elements}
            for g in sorted(anchors, key=group.enumeration_key):
                positions = []
                ok = True
                for v in elems:
                    t = group.multiply(v, g)
                    if t not in window.index:
                        ok = False
                        break
                    positions.append(window.index[t])
                if ok:
                    last = max(positions)
                    by_last.setdefault(last, []).append((tuple(positions), vals))
        return by_last

    def language_values(self, window: Window, budget: int = None):
        """All locally admissible value tuples on the window, sorted."""
        key = window.elements
        cached = self._language_cache.get(key)
        if cached is not None:
            return cached
        by_last = self._embeddings(window)
        m = len(window)
        budget = budget if budget is not None else 5_000_000
        nodes = 0
        out = []
        values = [None] * m

        def admissible_at(j):
            for positions, vals in by_last.get(j, ()):
                if all(values[p] == v for p, v in zip(positions, vals)):
                    return False
            return True

        def rec(j):
            nonlocal nodes
            if j == m:
                out.append(tuple(values))
                return
            for sym in self.alphabet:
                nodes += 1
                if nodes > budget:
                    raise ResourceBudgetError(
                        "language enumeration budget exceeded",
                        partial=tuple(out),
                        dp_prunable=True,
                    )
                values[j] = sym
                if admissible_at(j):
                    rec(j + 1)
                values[j] = None

        rec(0)
        result = tuple(out)
        self._language_cache[key] = result
        return result

    def language(self, window: Window, budget: int = None):
        return tuple(Pattern(window, v) for v in self.language_values(window, budget))


def full_shift(alphabet, group: Group, weights=None, label=None) -> SymbolicSystem:
    return SymbolicSystem(alphabet, group, forbidden=(),
                          weights=weights, label=label or "full-shift")


def golden_mean_system(group: Group = None, weights=None) -> SymbolicSystem:
    """Binary Z shift forbidding the word '11'."""
    from .groups import LatticeGroup

    group = group or LatticeGroup(1)
    forbidden = [ (((0,), (1,)), ("1", "1")) ]
    return SymbolicSystem(("0", "1"), group, forbidden=forbidden,
                          weights=weights, label="golden-mean")


# measures ---------------------------------------------------------------------


def _normalized(fractions):
    vals = [as_fraction(x) for x in fractions]
    total = sum(vals, Fraction(0))
    if total <= 0:
        raise ArgumentError("probabilities must have positive total")
    if abs(total - 1) > Fraction(1, 10**9):
        raise ArgumentError(f"probabilities sum to {float(total)}, not 1")
    return tuple(v / total for v in vals)


class BernoulliMeasure:
    """Shift-invariant product measure with one symbol distribution."""

    kind = "bernoulli"

    def __init__(self, system: SymbolicSystem, probs):
        if isinstance(probs, dict):
            vec = [probs.get(a, 0) for a in system.alphabet]
        else:
            vec = list(probs)
        if len(vec) != len(system.alphabet):
            raise ArgumentError("need one probability per symbol")
        self.system = system
        self.probs = dict(zip(system.alphabet, _normalized(vec)))

    def cylinder(self, p: Pattern) -> Fraction:
        out = Fraction(1)
        for v in p.values:
            out *= self.probs[v]
        return out

    def __repr__(self):
        ps = ",".join(f"{a}:{float(v):g}" for a, v in self.probs.items())
        return f"Bernoulli({ps})"


class MarkovMeasure:
    """Stationary Markov chain on a Z system; cylinders on interval windows."""

    kind = "markov"

    def __init__(self, system: SymbolicSystem, initial, transition):
        if system.group.kind != "lattice" or system.group.rank != 1:
            raise UnsupportedOperationError("Markov measures are defined for Z only")
        self.system = system
        symbols = system.alphabet
        if isinstance(initial, dict):
            initial = [initial.get(a, 0) for a in symbols]
        self.initial = dict(zip(symbols, _normalized(initial)))
        rows = {}
        for a in symbols:
            row = transition[a] if isinstance(transition, dict) else transition[symbols.index(a)]
            if isinstance(row, dict):
                row = [row.get(b, 0) for b in symbols]
            rows[a] = dict(zip(symbols, _normalized(row)))
        self.transition = rows
        self._check_stationary()

    def _check_stationary(self):
        for b in self.system.alphabet:
            mass = sum(
                (self.initial[a] * self.transition[a][b] for a in self.system.alphabet),
                Fraction(0),
            )
            if abs(mass - self.initial[b]) > Fraction(1, 10**9):
                raise ArgumentError("initial distribution is not stationary")

    @classmethod
    def stationary(cls, system: SymbolicSystem, transition):
        """Build the chain from its transition matrix; solves pi P = pi exactly."""
        symbols = system.alphabet
        n = len(symbols)
        rows = []
        for a in symbols:
            row = transition[a] if isinstance(transition, dict) else transition[symbols.index(a)]
            if isinstance(row, dict):
                row = [row.get(b, 0) for b in symbols]
            rows.append([as_fraction(x) for x in row])
        # solve (P^T - I) pi = 0 with sum pi = 1 by Gaussian elimination
        mat = [[rows[j][i] - (1 if i == j else 0) for j in range(n)] + [Fraction(0)]
               for i in range(n)]
        mat[-1] = [Fraction(1)] * n + [Fraction(1)]
        pivots = list(range(n))
        for col in range(n):
            piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
            if piv is None:
                raise ArgumentError("transition matrix has no unique stationary vector")
            mat[col], mat[piv] = mat[piv], mat[col]
            inv = 1 / mat[col][col]
            mat[col] = [x * inv for x in mat[col]]
            for r in range(n):
                if r != col and mat[r][col] != 0:
                    f = mat[r][col]
                    mat[r] = [x - f * y for x, y in zip(mat[r], mat[col])]
        pi = [mat[i][n] for i in pivots]
        return cls(system, pi, {a: dict(zip(symbols, rows[i])) for i, a in enumerate(symbols)})

    def cylinder(self, p: Pattern) -> Fraction:
        coords = sorted((g[0], v) for g, v in zip(p.window.elements, p.values))
        positions = [c for c, _ in coords]
        if positions != list(range(positions[0], positions[0] + len(positions))):
            raise UnsupportedOperationError("Markov cylinders need interval windows")
        out = self.initial[coords[0][1]]
        for (_, a), (_, b) in zip(coords, coords[1:]):
            out *= self.transition[a][b]
        return out

    def entropy_rate(self) -> float:
        """Closed-form -sum_i pi_i P_ij log P_ij in nats."""
        import math

        total = 0.0
        for a in self.system.alphabet:
            for b, p in self.transition[a].items():
                if p > 0:
                    total -= float(self.initial[a]) * float(p) * math.log(p)
        return total


def cylinder_measure(measure, p: Pattern) -> Fraction:
    """Exact probability of the cylinder {x : x|_W = p}."""
    return measure.cylinder(p)


class TestFunction:
    """A continuous observable depending on finitely many coordinates."""

    __test__ = False  # not a pytest class

    def __init__(self, window: Window, table, default=0, label="f"):
        self.window = window
        self.table = {tuple(k): as_fraction(v) for k, v in table.items()}
        self.default = as_fraction(default)
        self.label = label
        vals = list(self.table.values()) + [self.default]
        self.sup_norm = max(abs(v) for v in vals)
        self.min_value = min(vals)
        self.max_value = max(vals)

    def __call__(self, values) -> Fraction:
        return self.table.get(tuple(values), self.default)

    @classmethod
    def indicator(cls, p: Pattern, label=None):
        return cls(p.window, {p.values: 1}, default=0,
                   label=label or f"1[{''.join(map(str, p.values))}]")

    def translate(self, g) -> "TestFunction":
        """f o g, i.e. x -> f(g.x); depends on coordinates W g."""
        system = self.window.system
        group = system.group
        g = group.coerce(g)
        new_window = system.window(group.multiply(w, g) for w in self.window.elements)
        # (g.x)|_W reads x at W g; re-key the table accordingly
        source_positions = [
            new_window.index[group.multiply(w, g)] for w in self.window.elements
        ]
        table = {}
        for vals in itertools.product(system.alphabet, repeat=len(new_window)):
            key = tuple(vals[i] for i in source_positions)
            table[vals] = self.table.get(key, self.default)
        return TestFunction(new_window, table, default=self.default,
                            label=f"{self.label}o{group.element_name(g)}")


def integrate(measure, f: TestFunction) -> Fraction:
    """mu(f) = sum over patterns p on f's window of f(p) mu([p])."""
    system = f.window.system
    total = Fraction(0)
    for vals in itertools.product(system.alphabet, repeat=len(f.window)):
        fv = f(vals)
        if fv != 0:
            total += fv * measure.cylinder(Pattern(f.window, vals))
    return total


# transfer-matrix helpers for Z systems ---------------------------------------


def is_nearest_neighbour_z(system: SymbolicSystem) -> bool:
    if system.group.kind != "lattice" or system.group.rank != 1:
        return False
    for elems, _ in system.forbidden:
        coords = [g[0] for g in elems]
        if max(coords) - min(coords) > 1:
            return False
    return True


def transfer_matrix(system: SymbolicSystem):
    """0/1 adjacency on symbols: T[a][b] = 1 iff the word ab is admissible."""
    if not is_nearest_neighbour_z(system):
        raise UnsupportedOperationError("transfer matrix needs a nearest-neighbour Z system")
    window = system.window([0, 1])
    allowed = set(system.language_values(window))
    symbols = system.alphabet
    return [[1 if (a, b) in allowed else 0 for b in symbols] for a in symbols]


def _mat_mul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _mat_pow(A, e):
    n = len(A)
    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    while e:
        if e & 1:
            R = _mat_mul(R, A)
        A = _mat_mul(A, A)
        e >>= 1
    return R


def count_words(system: SymbolicSystem, n: int) -> int:
    """Number of admissible words of length n (exact transfer-matrix count)."""
    if n < 1:
        raise ArgumentError("word length must be >= 1")
    unary_ok = [a for a in system.alphabet
                if (a,) in system.language_values(system.window([0]))]
    if n == 1:
        return len(unary_ok)
    T = transfer_matrix(system)
    P = _mat_pow(T, n - 1)
    idx = {a: i for i, a in enumerate(system.alphabet)}
    return sum(P[idx[a]][idx[b]] for a in unary_ok for b in unary_ok)


def count_cyclic_words(system: SymbolicSystem, n: int) -> int:
    """Number of admissible necklaces of length n: trace of T^n."""
    if n < 1:
        raise ArgumentError("necklace length must be >= 1")
    T = transfer_matrix(system)
    P = _mat_pow(T, n)
    return sum(P[i][i] for i in range(len(P)))
