"""Reading tree + weight descriptions from JSON.

A file either names a built-in tree::

    {"builtin": "T2", "weights": "isometric", "ray_weights": {"2": {"period": [3]}}}

or spells the tree out::

    {"root": "r", "core_edges": [["r", "a"]], "rays": [{"attach": "a", "id": "1"}],
     "core_weights": {"a": 2.0}, "ray_weights": {"1": {"prefix": [1], "period": [2, 0.5]}}}

``weights`` ("default", "isometric" or "normalized") fills every weight not
given explicitly.  A ``back_ray`` entry makes the description rootless.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidTree, InvalidWeights, SpecParseError, UnknownBuiltin
from .rootless import ROOTLESS_BUILTINS, RootlessShift, from_parts, rootless_builtin
from .shift import WeightedShift
from .tree import DirectedTree, builtin
from .weights import WeightSequence

__all__ = ["LoadedSpec", "load_spec", "load_spec_text", "load_spec_dict"]

_KEYS = {
    "name", "builtin", "params", "weights", "root", "core_edges", "rays",
    "core_weights", "ray_weights", "back_ray",
}
_FILLS = ("default", "isometric", "normalized")


@dataclass
class LoadedSpec:
    name: str
    shift: WeightedShift
    rootless: RootlessShift | None
    source: dict


def _line_of(text: str | None, token: str) -> int | None:
    if not text:
        return None
    needle = json.dumps(token)
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def _relocate(err: SpecParseError, text: str | None) -> SpecParseError:
    """Attach the line of the first quoted name in the message, if it can be found."""
    if err.line is not None:
        return err
    for token in re.findall(r"'([^']*)'", str(err)):
        line = _line_of(text, token)
        if line is not None:
            return type(err)(str(err), line)
    return err


def _fill(tree: DirectedTree, how: str) -> WeightedShift:
    if how not in _FILLS:
        raise InvalidWeights(f"'weights' must be one of {list(_FILLS)}, got {how!r}")
    if how == "isometric":
        return WeightedShift.isometric(tree)
    S = WeightedShift.default(tree)
    return S.normalized() if how == "normalized" else S


def _parse_tree(d: dict) -> DirectedTree:
    if "root" not in d:
        raise InvalidTree("missing 'root'")
    edges = d.get("core_edges", [])
    if not isinstance(edges, list) or any(not isinstance(e, list) or len(e) != 2 for e in edges):
        raise InvalidTree("'core_edges' must be a list of [parent, child] pairs")
    rays = []
    for r in d.get("rays", []):
        if not isinstance(r, dict) or set(r) != {"attach", "id"}:
            raise InvalidTree(f"each ray needs exactly 'attach' and 'id', got {r!r}")
        rays.append((r["attach"], r["id"]))
    return DirectedTree(d["root"], edges, rays, name=d.get("name"))


def load_spec_dict(d: dict, text: str | None = None) -> LoadedSpec:
    try:
        return _load(d)
    except SpecParseError as err:
        raise _relocate(err, text) from None


def _load(d: dict) -> LoadedSpec:
    if not isinstance(d, dict):
        raise SpecParseError("top level must be a JSON object")
    unknown = set(d) - _KEYS
    if unknown:
        raise SpecParseError(f"unknown keys {sorted(unknown)}")
    core_w = d.get("core_weights", {})
    ray_w = {str(k): v for k, v in d.get("ray_weights", {}).items()}

    if "builtin" in d:
        name = d["builtin"]
        if name in ROOTLESS_BUILTINS:
            back = WeightSequence.from_dict(d["back_ray"]) if "back_ray" in d else None
            R = rootless_builtin(name, back)
            base = R.rooted
            if "weights" in d:
                base = _fill(base.tree, d["weights"])
            S = base.with_weights(core_w, ray_w)
            R = RootlessShift(S, R.back, branching_back=R.branching_back)
            return LoadedSpec(d.get("name", name), S, R, d)
        try:
            tree = builtin(name, **d.get("params", {}))
        except UnknownBuiltin:
            raise SpecParseError(f"unknown builtin '{name}'") from None
        except TypeError as err:
            raise SpecParseError(f"bad params for builtin '{name}': {err}") from None
    else:
        tree = _parse_tree(d)
        name = d.get("name") or "custom"

    if "weights" in d or "builtin" in d:
        S = _fill(tree, d.get("weights", "default")).with_weights(core_w, ray_w)
    else:
        S = WeightedShift(tree, core_w, ray_w)
    R = from_parts(S, d["back_ray"]) if "back_ray" in d else None
    return LoadedSpec(d.get("name", tree.name or name), S, R, d)


def load_spec_text(text: str) -> LoadedSpec:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecParseError(err.msg, err.lineno) from None
    return load_spec_dict(d, text)


def load_spec(path) -> LoadedSpec:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise SpecParseError(f"cannot read {path}: {err.strerror}") from None
    return load_spec_text(text)
