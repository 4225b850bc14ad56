"""Sofic approximation maps sigma: G -> Sym(d) and their defect measurements.

Maps store images of a declared finite support (usually the generators) as
0-based numpy index arrays; arbitrary elements are evaluated by factoring
into support elements and composing, unless the map carries a direct rule
(cyclic lattice model, identity-fallback Folner model).

Point labels in all public output are 1-based, matching the {1..d}
convention of the underlying definitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, UnsupportedOperationError
from .groups import FiniteSubset, FolnerSequence, Group, folner_set


class SoficMap:
    """A finitely supported map g -> self-map of {1..d}.

    All bundled constructions except the identity-fallback Folner model
    produce genuine permutations; the fallback model can merge points
    (see ``from_folner``), which is precisely what its defects measure.
    """

    def __init__(self, group: Group, d: int, images=None, provenance="explicit",
                 direct_rule=None):
        if d < 1:
            raise ArgumentError("d must be >= 1")
        self.group = group
        self.d = d
        self.provenance = provenance
        self._direct_rule = direct_rule
        self._images = {}
        if images:
            for g, arr in images.items():
                self._images[group.coerce(g)] = self._as_array(arr)

    def _as_array(self, arr):
        a = np.asarray(arr, dtype=np.int64)
        if a.shape != (self.d,):
            raise ArgumentError(f"image must have length d={self.d}")
        if a.min() < 0 or a.max() >= self.d:
            raise ArgumentError("image values out of range")
        return a

    # evaluation ------------------------------------------------------------

    def image_array(self, g) -> np.ndarray:
        """0-based index array representing the image of ``g``."""
        g = self.group.coerce(g)
        cached = self._images.get(g)
        if cached is not None:
            return cached
        if self._direct_rule is not None:
            arr = self._as_array(self._direct_rule(g))
        else:
            arr = self._compose_word(self._factor(g))
        self._images[g] = arr
        return arr

    def _compose_word(self, word):
        arr = np.arange(self.d, dtype=np.int64)
        # sigma_{s1 s2 ... sm} = sigma_{s1} o ... o sigma_{sm}
        for s in reversed(word):
            img = self._images.get(s)
            if img is None:
                raise ArgumentError(
                    f"element {self.group.element_name(s)} outside declared support"
                )
            arr = img[arr]
        return arr

    def _factor(self, g):
        """Deterministic factorization of g into support elements."""
        group = self.group
        if group.kind == "free":
            return [(a,) for a in g]
        if group.kind == "lattice":
            word = []
            for i, c in enumerate(g):
                if c == 0:
                    continue
                step = [0] * group.rank
                step[i] = 1 if c > 0 else -1
                word.extend([tuple(step)] * abs(c))
            return word
        if group.kind == "finite":
            # BFS path from the identity over the generating set
            if g == group.identity:
                return []
            prev = {group.identity: None}
            frontier = [group.identity]
            while frontier:
                nxt = []
                for h in frontier:
                    for s in group.generators:
                        u = group.multiply(h, s)
                        if u not in prev:
                            prev[u] = (h, s)
                            nxt.append(u)
                frontier = nxt
                if g in prev:
                    break
            word = []
            cur = g
            while prev[cur] is not None:
                h, s = prev[cur]
                word.append(s)
                cur = h
            return list(reversed(word))
        raise UnsupportedOperationError(f"cannot factor over kind {group.kind!r}")

    def apply(self, g, a: int) -> int:
        """sigma_g(a) for a 1-based point label a."""
        if not 1 <= a <= self.d:
            raise ArgumentError(f"point label out of range: {a}")
        return int(self.image_array(g)[a - 1]) + 1

    def permutation(self, g):
        """1-based image tuple (sigma_g(1), ..., sigma_g(d))."""
        return tuple(int(v) + 1 for v in self.image_array(g))

    def is_bijective(self, g) -> bool:
        arr = self.image_array(g)
        return len(np.unique(arr)) == self.d


def cyclic_model(group: Group, n: int) -> SoficMap:
    """Exact cyclic model on the box [0,n)^k: the quotient map Z^k -> (Z/n)^k.

    All multiplicativity defects vanish; freeness fails exactly on n Z^k.
    """
    if group.kind != "lattice":
        raise UnsupportedOperationError("cyclic model is a lattice construction")
    k = group.rank
    d = n ** k
    # point a-1 <-> box vector in lexicographic (row-major) order
    strides = [n ** (k - 1 - i) for i in range(k)]

    def rule(g):
        idx = np.arange(d, dtype=np.int64)
        out = np.zeros(d, dtype=np.int64)
        for i in range(k):
            coord = (idx // strides[i]) % n
            out += ((coord + g[i]) % n) * strides[i]
        return out

    return SoficMap(group, d, provenance="cyclic-from-folner", direct_rule=rule)


def from_folner(group: Group, F: FiniteSubset, model: str = "identity") -> SoficMap:
    """Sofic map built from a Folner set F with d = |F|.

    model="identity": index F by {1..d} in F's element order and set
    sigma_g(a) = index(g . f_a) when the translate stays in F, else a.
    Out-of-set translates can land on occupied points, so these images are
    self-maps rather than permutations in general; their defects are
    bounded by the invariance defect of F.

    model="cyclic": for lattice boxes [0,n)^k, the exact cyclic model.
    """
    if group.kind == "free":
        raise UnsupportedOperationError("free groups get random models, not Folner maps")
    if model == "cyclic":
        if group.kind != "lattice":
            raise UnsupportedOperationError("cyclic model needs a lattice group")
        n = round(len(F) ** (1.0 / group.rank))
        if FiniteSubset(group, folner_set(group, n).elements) != F:
            raise ArgumentError("cyclic model needs the box Folner set [0,n)^k")
        return cyclic_model(group, n)
    if model != "identity":
        raise ArgumentError(f"unknown from_folner model {model!r}")

    elems = F.elements
    index = {f: i for i, f in enumerate(elems)}
    d = len(elems)

    def rule(g):
        out = np.empty(d, dtype=np.int64)
        for a in range(d):
            t = group.multiply(g, elems[a])
            out[a] = index.get(t, a)
        return out

    return SoficMap(group, d, provenance="folner-identity-fallback", direct_rule=rule)


def regular_representation(group: Group) -> SoficMap:
    """Left regular representation of a finite group; all defects vanish."""
    if group.kind != "finite":
        raise UnsupportedOperationError("regular representation needs a finite group")
    return from_folner(group, folner_set(group, 1))


def random_free_model(rank: int, d: int, seed: int, names=None):
    """Independent uniformly random permutation per free generator.

    Reproducible from the single 64-bit seed: generator i draws from the
    child stream SeedSequence(seed, spawn_key=(i,)).
    Returns (group, SoficMap).
    """
    from .groups import FreeGroup

    if d < 2:
        raise ArgumentError("d must be >= 2")
    group = FreeGroup(rank, names=names)
    images = {}
    for i in range(rank):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        perm = rng.permutation(d).astype(np.int64)
        images[(i + 1,)] = perm
        inv = np.empty(d, dtype=np.int64)
        inv[perm] = np.arange(d, dtype=np.int64)
        images[(-(i + 1),)] = inv
    sm = SoficMap(group, d, images=images, provenance="random-free")
    return group, sm


def mult_defect(sigma: SoficMap, s, t) -> Fraction:
    """1 - (1/d) |{a : sigma_{st}(a) = sigma_s sigma_t(a)}|, exact."""
    group = sigma.group
    s = group.coerce(s)
    t = group.coerce(t)
    st = group.multiply(s, t)
    lhs = sigma.image_array(st)
    rhs = sigma.image_array(s)[sigma.image_array(t)]
    agree = int(np.count_nonzero(lhs == rhs))
    return 1 - Fraction(agree, sigma.d)


def freeness_defect(sigma: SoficMap, s, t) -> Fraction:
    """1 - (1/d) |{a : sigma_s(a) != sigma_t(a)}| for distinct s, t, exact."""
    group = sigma.group
    s = group.coerce(s)
    t = group.coerce(t)
    if s == t:
        raise ArgumentError("freeness defect needs distinct elements")
    differ = int(np.count_nonzero(sigma.image_array(s) != sigma.image_array(t)))
    return 1 - Fraction(differ, sigma.d)


@dataclass(frozen=True)
class GoodnessCertificate:
    ok: bool
    eta: float
    good_fraction: Fraction
    good_points: tuple  # 1-based labels of the maximal good set B


def is_good(sigma: SoficMap, E: FiniteSubset, eta) -> GoodnessCertificate:
    """Decide whether sigma is a (1-eta)-good sofic approximation on E.

    B is the maximal set of points a where sigma_{st}(a) = sigma_s sigma_t(a)
    for all s,t in E, sigma_s(a) != sigma_{s'}(a) for distinct s,s' in E, and
    sigma_e(a) = a.  Verdict: |B| >= (1-eta) d.
    """
    group = sigma.group
    if group.identity not in E:
        raise ArgumentError("E must contain the identity")
    if not 0 < float(eta) < 1:
        raise ArgumentError("eta must lie in (0,1)")
    d = sigma.d
    good = np.ones(d, dtype=bool)
    good &= sigma.image_array(group.identity) == np.arange(d, dtype=np.int64)
    elems = E.elements
    for s in elems:
        img_s = sigma.image_array(s)
        for t in elems:
            st = group.multiply(s, t)
            good &= sigma.image_array(st) == img_s[sigma.image_array(t)]
        for t in elems:
            if t == s:
                continue
            good &= img_s != sigma.image_array(t)
    points = tuple(int(i) + 1 for i in np.flatnonzero(good))
    frac = Fraction(len(points), d)
    return GoodnessCertificate(
        ok=frac >= 1 - Fraction(str(float(eta))),
        eta=float(eta),
        good_fraction=frac,
        good_points=points,
    )


class SoficSequence:
    """i -> SoficMap with strictly increasing d_i (checked on request)."""

    def __init__(self, builder, label="sofic-sequence"):
        self._builder = builder
        self.label = label
        self._cache = {}

    def __getitem__(self, i: int) -> SoficMap:
        if i not in self._cache:
            self._cache[i] = self._builder(i)
        return self._cache[i]

    def prefix(self, length: int):
        maps = [self[i] for i in range(length)]
        for a, b in zip(maps, maps[1:]):
            if b.d <= a.d:
                raise ArgumentError("sofic sequence needs strictly increasing d_i")
        return maps


def cyclic_sequence(group: Group, ns) -> SoficSequence:
    """Cyclic lattice models at the given box sizes."""
    sizes = list(ns)
    return SoficSequence(lambda i: cyclic_model(group, sizes[i]), label="cyclic")
