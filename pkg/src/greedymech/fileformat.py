"""JSON instance files with exact rational literals.

Numbers are written as integers or ``"p/q"`` strings. Item order in the
file is the tie-break order.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .core import Bid, BinSpec, Instance, InstanceError, to_fraction, validate_instance


def fmt(x: Fraction) -> Any:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num(raw, where: str) -> Fraction:
    if isinstance(raw, float) or isinstance(raw, bool):
        raise InstanceError(f"{where}: write rationals as integers or \"p/q\" strings")
    try:
        return to_fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InstanceError(f"{where}: not a rational: {raw!r}") from None


def _int(raw, where: str) -> int:
    if not isinstance(raw, int) or isinstance(raw, bool):
        raise InstanceError(f"{where}: expected an integer, got {raw!r}")
    return raw


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("top level must be an object")
    # witness files add a "perturbation" record on top of the instance
    unknown = set(doc) - {"bins", "items", "bin_budget", "online", "perturbation"}
    if unknown:
        raise InstanceError(f"unknown field(s): {', '.join(sorted(unknown))}")
    bins = []
    for j, b in enumerate(doc.get("bins", [])):
        where = f"bins[{j}]"
        if not isinstance(b, dict):
            raise InstanceError(f"{where}: expected an object")
        if "capacity" not in b:
            raise InstanceError(f"{where}.capacity: missing")
        slot = None if b.get("slot") is None else _int(b["slot"], f"{where}.slot")
        bins.append(BinSpec(j, _num(b["capacity"], f"{where}.capacity"), slot))
    bids = []
    for i, it in enumerate(doc.get("items", [])):
        where = f"items[{i}]"
        if not isinstance(it, dict):
            raise InstanceError(f"{where}: expected an object")
        if "value" not in it:
            raise InstanceError(f"{where}.value: missing")
        vec = None
        if "sizes" in it:
            vec = tuple(_num(s, f"{where}.sizes[{j}]") for j, s in enumerate(it["sizes"]))
        if "size" in it:
            size = _num(it["size"], f"{where}.size")
        elif vec:
            size = max(vec)
        else:
            raise InstanceError(f"{where}.size: missing")
        arr = it.get("arrival")
        dep = it.get("departure")
        bids.append(Bid(
            i, _num(it["value"], f"{where}.value"), size, vec,
            None if arr is None else _int(arr, f"{where}.arrival"),
            None if dep is None else _int(dep, f"{where}.departure"),
        ))
    budget = doc.get("bin_budget")
    if budget is not None:
        budget = _int(budget, "bin_budget")
    online = doc.get("online", False)
    if not isinstance(online, bool):
        raise InstanceError("online: expected true or false")
    return validate_instance(Instance(tuple(bids), tuple(bins), budget, online))


def bid_to_dict(b: Bid) -> dict:
    d: dict = {"value": fmt(b.value), "size": fmt(b.size)}
    if b.size_vector is not None:
        d["sizes"] = [fmt(s) for s in b.size_vector]
    if b.arrival is not None:
        d["arrival"] = b.arrival
    if b.departure is not None:
        d["departure"] = b.departure
    return d


def instance_to_dict(inst: Instance) -> dict:
    bins = []
    for b in inst.bins:
        d: dict = {"capacity": fmt(b.capacity)}
        if b.slot is not None:
            d["slot"] = b.slot
        bins.append(d)
    doc: dict = {"bins": bins, "items": [bid_to_dict(b) for b in inst.bids]}
    if inst.bin_budget is not None:
        doc["bin_budget"] = inst.bin_budget
    if inst.online:
        doc["online"] = True
    return doc


def dumps(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def loads(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return instance_from_dict(doc)


def load(path) -> Instance:
    return loads(Path(path).read_text())


def save(inst: Instance, path) -> None:
    Path(path).write_text(dumps(inst))
