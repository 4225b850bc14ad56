"""Experiment spec files: canonical JSON, schema validation, object building.

One spec file describes one task over one symbolic system.  Every parameter
is echoed into output headers together with the sha256 of the spec file, so
a result is reproducible from the artifact alone.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import jsonschema

from .errors import SpecError
from .groups import FiniteSubset, FiniteTableGroup, FreeGroup, Group, LatticeGroup
from .symbolic import (BernoulliMeasure, MarkovMeasure, MetricWeights, SymbolicSystem,
                       TestFunction)
from .covers import Cover, origin_partition, trivial_cover
from .sofic import SoficMap, cyclic_model, from_folner, random_free_model, regular_representation
from .groups import folner_set

TASKS = (
    "language", "defects", "microstates", "entropy-sofic", "entropy-amenable",
    "compare", "variational", "tile", "pairs", "partition-bound",
)

_ELEMENT = {
    "anyOf": [
        {"type": "array", "items": {"type": "integer"}},
        {"type": "integer"},
        {"type": "string"},
    ]
}

_PATTERN = {
    "type": "object",
    "required": ["window", "values"],
    "properties": {
        "window": {"type": "array", "items": _ELEMENT, "minItems": 1},
        "values": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
    "additionalProperties": False,
}

_NUMBER = {"anyOf": [{"type": "string"}, {"type": "number"}]}

SCHEMA = {
    "type": "object",
    "required": ["task", "system", "params"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "label": {"type": "string"},
        "system": {
            "type": "object",
            "required": ["alphabet", "group"],
            "properties": {
                "label": {"type": "string"},
                "alphabet": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "group": {
                    "type": "object",
                    "required": ["kind", "rank_or_order"],
                    "properties": {
                        "kind": {"enum": ["lattice", "finite", "free"]},
                        "rank_or_order": {"type": "integer", "minimum": 1},
                        "generators": {"type": "array"},
                        "table": {"type": "array"},
                    },
                },
                "forbidden": {"type": "array", "items": _PATTERN},
            },
            "additionalProperties": False,
        },
        "measures": {"type": "object"},
        "params": {"type": "object"},
        "out": {
            "type": "object",
            "properties": {"prefix": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def spec_hash(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def load_spec(path) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno}: {exc.msg}",
                        field="<json>") from exc
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        parts = [str(p) for p in exc.absolute_path]
        if exc.validator == "required":
            # name the missing property itself, e.g. system.alphabet
            missing = exc.message.split("'")[1]
            parts.append(missing)
        field = ".".join(parts) or "<root>"
        raise SpecError(f"schema violation at {field}: {exc.message}", field=field) from exc
    return raw


def build_group(gspec: dict) -> Group:
    kind = gspec["kind"]
    n = gspec["rank_or_order"]
    if kind == "lattice":
        return LatticeGroup(n)
    if kind == "finite":
        table = gspec.get("table")
        gens = gspec.get("generators")
        if table is not None:
            return FiniteTableGroup(table, generators=gens)
        return FiniteTableGroup.cyclic(n, generators=gens)
    names = gspec.get("generators")
    return FreeGroup(n, names=names)


def build_system(spec: dict) -> SymbolicSystem:
    sysspec = spec["system"]
    group = build_group(sysspec["group"])
    forbidden = []
    for fp in sysspec.get("forbidden", ()):
        if len(fp["window"]) != len(fp["values"]):
            raise SpecError("forbidden pattern window/value length mismatch",
                            field="system.forbidden")
        forbidden.append((tuple(fp["window"]), tuple(fp["values"])))
    try:
        return SymbolicSystem(tuple(sysspec["alphabet"]), group,
                              forbidden=forbidden,
                              label=sysspec.get("label", spec.get("label", "system")))
    except Exception as exc:
        raise SpecError(f"bad system: {exc}", field="system") from exc


def build_measure(system: SymbolicSystem, mspec: dict):
    kind = mspec.get("kind")
    if kind == "bernoulli":
        return BernoulliMeasure(system, mspec["probs"])
    if kind == "markov":
        if "initial" in mspec:
            return MarkovMeasure(system, mspec["initial"], mspec["transition"])
        return MarkovMeasure.stationary(system, mspec["transition"])
    raise SpecError(f"unknown measure kind {kind!r}", field="measures")


def build_cover(system: SymbolicSystem, cspec) -> Cover:
    if cspec is None or cspec.get("kind") == "origin-partition":
        return origin_partition(system)
    kind = cspec.get("kind")
    if kind == "trivial":
        window = (system.window(cspec["window"]) if "window" in cspec
                  else system.window([system.group.identity]))
        return trivial_cover(system, window)
    if kind == "pattern-sets":
        window = system.window(cspec["window"])
        order = [window.index[system.group.coerce(g)] for g in cspec["window"]]
        elements = []
        for elem in cspec["elements"]:
            pats = []
            for values in elem:
                v = [None] * len(window)
                for pos, sym in zip(order, values):
                    v[pos] = sym
                pats.append(tuple(v))
            elements.append(pats)
        return Cover(system, window, elements,
                     labels=cspec.get("labels"),
                     drop_empty=bool(cspec.get("drop_empty", False)))
    raise SpecError(f"unknown cover kind {kind!r}", field="params.cover")


def build_sigma(system: SymbolicSystem, sspec: dict, stage_value=None) -> SoficMap:
    group = system.group
    model = sspec["model"]
    if model == "cyclic":
        n = stage_value if stage_value is not None else sspec["n"]
        return cyclic_model(group, n)
    if model == "folner-identity":
        n = stage_value if stage_value is not None else sspec["n"]
        return from_folner(group, folner_set(group, n))
    if model == "regular":
        return regular_representation(group)
    if model == "random-free":
        d = stage_value if stage_value is not None else sspec["d"]
        _, sigma = random_free_model(group.rank, d, int(sspec.get("seed", 0)),
                                     names=getattr(group, "names", None))
        return sigma
    raise SpecError(f"unknown sigma model {model!r}", field="params.sigma")


def build_test_functions(system: SymbolicSystem, fspecs):
    out = []
    for fp in fspecs:
        window = system.window(fp["window"])
        order = [window.index[system.group.coerce(g)] for g in fp["window"]]
        v = [None] * len(window)
        for pos, sym in zip(order, fp["values"]):
            v[pos] = sym
        out.append(TestFunction.indicator(system.pattern(window, tuple(v))))
    return out


def build_pattern(system: SymbolicSystem, pspec: dict):
    window = system.window(pspec["window"])
    order = [window.index[system.group.coerce(g)] for g in pspec["window"]]
    v = [None] * len(window)
    for pos, sym in zip(order, pspec["values"]):
        v[pos] = sym
    return system.pattern(window, tuple(v))


def cross_validate(spec: dict) -> list:
    """Semantic checks beyond the JSON schema; returns diagnostics."""
    diagnostics = []
    try:
        system = build_system(spec)
    except SpecError as exc:
        return [f"{exc.field}: {exc}"]
    params = spec.get("params", {})
    group = system.group
    for key in ("delta", "deltas"):
        if key in params:
            vals = params[key] if isinstance(params[key], list) else [params[key]]
            for v in vals:
                try:
                    f = Fraction(str(v))
                except ValueError:
                    diagnostics.append(f"params.{key}: not a number: {v!r}")
                    continue
                if f <= 0:
                    diagnostics.append(
                        f"params.{key}: delta must be > 0 (strict inequalities), got {v}"
                    )
    for key in ("F", "window"):
        if key in params:
            for g in params[key]:
                try:
                    group.coerce(g)
                except Exception:
                    diagnostics.append(f"params.{key}: not a group element: {g!r}")
    for name, mspec in spec.get("measures", {}).items():
        try:
            build_measure(system, mspec)
        except SpecError as exc:
            diagnostics.append(f"measures.{name}: {exc}")
        except Exception as exc:
            diagnostics.append(f"measures.{name}: {exc}")
    task = spec["task"]
    needs = {
        "language": ("window",),
        "defects": ("sigma", "stages", "pairs"),
        "microstates": ("sigma", "F", "window", "stages"),
        "entropy-sofic": ("sigma", "F", "window", "stages"),
        "entropy-amenable": ("ns",),
        "compare": ("ns", "F", "window"),
        "variational": ("F", "window", "stages", "measure_labels"),
        "tile": ("sigma", "shapes"),
        "pairs": ("candidates",),
        "partition-bound": ("lam_size", "p", "eta", "eps"),
    }
    for key in needs.get(task, ()):
        if key not in params:
            diagnostics.append(f"params.{key}: required for task {task!r}")
    return diagnostics
