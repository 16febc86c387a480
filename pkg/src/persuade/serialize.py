"""JSON schemas for instances, policies, and reduction artifacts.

Numbers may be JSON numbers, decimal strings, or exact fraction strings
("p/q").  The reduction path keeps fractions exact end to end; everything
else converts to float on load.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .exceptions import SchemaError
from .measures import Instance, Prior, Utility
from .partition_reduction import PartitionInput, ReductionArtifacts
from .policies import BiPoolingPolicy, BiPoolingSegment, PartitionalPolicy


def parse_fraction(value) -> Fraction:
    try:
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, bool):
            raise ValueError("booleans are not numbers")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"cannot parse number {value!r}: {exc}") from exc
    raise SchemaError(f"cannot parse number {value!r}")


def parse_number(value) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"cannot parse number {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    return float(parse_fraction(value))


def fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def _require(mapping, key, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaError(f"{where}: missing key {key!r}")
    return mapping[key]


# -- instances ---------------------------------------------------------------


def prior_from_dict(doc) -> Prior:
    kind = _require(doc, "kind", "prior")
    if kind == "uniform":
        return Prior.uniform()
    if kind != "piecewise_density":
        raise SchemaError(f"prior: unknown kind {kind!r}")
    segments = tuple(
        tuple(parse_number(v) for v in seg)
        for seg in _require(doc, "segments", "prior")
    )
    if any(len(s) != 4 for s in segments):
        raise SchemaError("prior: segments must be [left, right, c0, c1]")
    atoms = tuple(
        (parse_number(x), parse_number(m)) for x, m in doc.get("atoms", ())
    )
    return Prior(segments, atoms)


def prior_to_dict(prior: Prior) -> dict:
    if prior.is_uniform:
        return {"kind": "uniform"}
    return {
        "kind": "piecewise_density",
        "segments": [list(s) for s in prior.density_segments],
        "atoms": [list(a) for a in prior.atoms],
    }


def utility_from_dict(doc) -> Utility:
    base = tuple(
        tuple(parse_number(v) for v in seg) for seg in _require(doc, "base", "utility")
    )
    if any(len(s) != 4 for s in base):
        raise SchemaError("utility: base must be [left, right, v_left, v_right]")
    spikes = tuple((parse_number(x), parse_number(v))
                   for x, v in doc.get("spikes", ()))
    lipschitz = doc.get("lipschitz")
    if lipschitz is not None:
        lipschitz = parse_number(lipschitz)
    ubound = parse_number(doc.get("ubound", 1.0))
    return Utility(base, spikes, lipschitz, ubound)


def utility_to_dict(utility: Utility) -> dict:
    return {
        "base": [list(s) for s in utility.base_segments],
        "spikes": [list(s) for s in utility.spikes],
        "lipschitz": utility.lipschitz,
        "ubound": utility.ubound,
    }


def instance_from_dict(doc) -> Instance:
    prior = prior_from_dict(_require(doc, "prior", "instance"))
    utility = utility_from_dict(_require(doc, "utility", "instance"))
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise SchemaError("instance: label must be a string")
    return Instance(prior, utility, label)


def instance_to_dict(instance: Instance) -> dict:
    return {
        "prior": prior_to_dict(instance.prior),
        "utility": utility_to_dict(instance.utility),
        "label": instance.label,
    }


# -- policies ----------------------------------------------------------------


def policy_to_dict(policy) -> dict:
    if isinstance(policy, PartitionalPolicy):
        return {
            "cuts": list(policy.cuts),
            "atom_splits": [list(s) for s in policy.atom_splits],
        }
    if isinstance(policy, BiPoolingPolicy):
        segs = []
        for s in policy.segments:
            if s.is_two_signal:
                segs.append({"l": s.left, "r": s.right, "mu1": s.mu1,
                             "mu2": s.mu2, "p1": s.p1})
            else:
                segs.append({"l": s.left, "r": s.right, "one": True})
        return {"segments": segs}
    raise SchemaError(f"cannot serialize policy of type {type(policy).__name__}")


def policy_from_dict(doc):
    if "cuts" in doc:
        cuts = tuple(parse_number(c) for c in doc["cuts"])
        splits = tuple((parse_number(x), parse_number(f))
                       for x, f in doc.get("atom_splits", ()))
        return PartitionalPolicy(cuts, splits)
    if "segments" in doc:
        segments = []
        for seg in doc["segments"]:
            left = parse_number(_require(seg, "l", "segment"))
            right = parse_number(_require(seg, "r", "segment"))
            if seg.get("one"):
                segments.append(BiPoolingSegment(left, right))
            else:
                segments.append(BiPoolingSegment(
                    left, right,
                    parse_number(_require(seg, "mu1", "segment")),
                    parse_number(_require(seg, "mu2", "segment")),
                    parse_number(_require(seg, "p1", "segment")),
                ))
        return BiPoolingPolicy(tuple(segments))
    raise SchemaError("policy document needs either 'cuts' or 'segments'")


# -- reduction artifacts -----------------------------------------------------


def artifacts_to_dict(artifacts: ReductionArtifacts) -> dict:
    return {
        "c": list(artifacts.c.values),
        "d": fraction_str(artifacts.d),
        "T": fraction_str(artifacts.t),
        "X": [fraction_str(x) for x in artifacts.x],
        "K": artifacts.k,
    }


def artifacts_from_dict(doc) -> ReductionArtifacts:
    c = PartitionInput(tuple(int(v) for v in _require(doc, "c", "artifacts")))
    return ReductionArtifacts(
        c,
        parse_fraction(_require(doc, "d", "artifacts")),
        parse_fraction(_require(doc, "T", "artifacts")),
        tuple(parse_fraction(x) for x in _require(doc, "X", "artifacts")),
        int(_require(doc, "K", "artifacts")),
    )


# -- files -------------------------------------------------------------------


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def dump_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
