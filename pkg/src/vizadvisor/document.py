"""Tree-document serialization.

The on-disk format is UTF-8 JSON:

    {
      "version": "1.0.0",
      "root": "q-root",
      "nodes": {id: {"text", "branch": "task"|"data", "feature",
                     "allowsDontKnow": bool, "dontKnowTarget"?: ref,
                     "options": [{"label", "value", "target": ref}]}},
      "leaves": {id: {"name", "aliases": [...], "description",
                      "advantages": [...], "disadvantages": [...],
                      "eligibility": [...], "sourcesCount"?: int,
                      "source"?: str}},
      "fallbackLeaf": id,
      "features": {key: {"name", "children"?: {...}}}
    }

where a ref is ``{"node": id}`` or ``{"leaf": id}``. Parsing is strict:
unknown keys are rejected, so typos fail loudly instead of silently
dropping behavior.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import TreeDocumentError, TreeValidationError
from .features import FeatureHierarchy
from .model import (
    AnswerOption,
    Branch,
    ConditionKind,
    DecisionTree,
    EligibilityCondition,
    QuestionNode,
    StructuralFlag,
    Target,
    TargetKind,
    VisualizationLeaf,
    validate,
)

_TOP_KEYS = {"version", "root", "nodes", "leaves", "fallbackLeaf", "features"}
_NODE_KEYS = {"text", "branch", "feature", "allowsDontKnow", "dontKnowTarget", "options"}
_NODE_REQUIRED = {"text", "branch", "feature", "allowsDontKnow", "options"}
_OPTION_KEYS = {"label", "value", "target"}
_LEAF_KEYS = {"name", "aliases", "description", "advantages", "disadvantages",
              "eligibility", "sourcesCount", "source"}
_LEAF_REQUIRED = {"name", "aliases", "description", "advantages", "disadvantages",
                  "eligibility"}
_FEATURE_KEYS = {"name", "children"}


def _reject_unknown(obj: dict, allowed: set[str], location: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise TreeDocumentError(f"unknown keys: {sorted(unknown)}", location)


def _require(obj: dict, required: set[str], location: str) -> None:
    missing = required - set(obj)
    if missing:
        raise TreeDocumentError(f"missing keys: {sorted(missing)}", location)


def _expect(value: Any, kind: type, location: str) -> Any:
    if not isinstance(value, kind):
        raise TreeDocumentError(
            f"expected {kind.__name__}, got {type(value).__name__}", location)
    return value


def _parse_target(obj: Any, location: str) -> Target:
    _expect(obj, dict, location)
    if set(obj) == {"node"}:
        return Target(TargetKind.NODE, _expect(obj["node"], str, location))
    if set(obj) == {"leaf"}:
        return Target(TargetKind.LEAF, _expect(obj["leaf"], str, location))
    raise TreeDocumentError('target must be {"node": id} or {"leaf": id}', location)


def _parse_condition(obj: Any, location: str) -> EligibilityCondition:
    _expect(obj, dict, location)
    keys = set(obj)
    if "attribute" in keys:
        _reject_unknown(obj, {"attribute", "min", "max"}, location)
        if not keys & {"min", "max"}:
            raise TreeDocumentError("attribute condition needs min and/or max", location)
        return EligibilityCondition(
            kind=ConditionKind.ATTRIBUTE_COUNT,
            attribute=_expect(obj["attribute"], str, location),
            min_count=obj.get("min"),
            max_count=obj.get("max"),
        )
    if keys == {"maxCategoricalCardinality"}:
        return EligibilityCondition(
            kind=ConditionKind.MAX_CARDINALITY,
            max_cardinality=_expect(obj["maxCategoricalCardinality"], int, location),
        )
    if keys == {"requiresFlag"}:
        raw = _expect(obj["requiresFlag"], str, location)
        try:
            flag = StructuralFlag(raw)
        except ValueError:
            raise TreeDocumentError(f"unknown structural flag {raw!r}", location) from None
        return EligibilityCondition(kind=ConditionKind.REQUIRED_FLAG, flag=flag)
    raise TreeDocumentError(f"unrecognized eligibility condition: {sorted(keys)}", location)


def _parse_node(node_id: str, obj: Any) -> QuestionNode:
    location = f"nodes.{node_id}"
    _expect(obj, dict, location)
    _reject_unknown(obj, _NODE_KEYS, location)
    _require(obj, _NODE_REQUIRED, location)
    raw_branch = _expect(obj["branch"], str, location)
    try:
        branch = Branch(raw_branch)
    except ValueError:
        raise TreeDocumentError(f"branch must be 'task' or 'data', got {raw_branch!r}",
                                location) from None
    options = []
    for i, raw in enumerate(_expect(obj["options"], list, location)):
        opt_loc = f"{location}.options[{i}]"
        _expect(raw, dict, opt_loc)
        _reject_unknown(raw, _OPTION_KEYS, opt_loc)
        _require(raw, _OPTION_KEYS, opt_loc)
        options.append(AnswerOption(
            label=_expect(raw["label"], str, opt_loc),
            value=_expect(raw["value"], str, opt_loc),
            target=_parse_target(raw["target"], opt_loc),
        ))
    dont_know_target = None
    if "dontKnowTarget" in obj:
        dont_know_target = _parse_target(obj["dontKnowTarget"], f"{location}.dontKnowTarget")
    return QuestionNode(
        id=node_id,
        text=_expect(obj["text"], str, location),
        branch=branch,
        feature=_expect(obj["feature"], str, location),
        options=tuple(options),
        allows_dont_know=_expect(obj["allowsDontKnow"], bool, location),
        dont_know_target=dont_know_target,
    )


def _parse_leaf(leaf_id: str, obj: Any) -> VisualizationLeaf:
    location = f"leaves.{leaf_id}"
    _expect(obj, dict, location)
    _reject_unknown(obj, _LEAF_KEYS, location)
    _require(obj, _LEAF_REQUIRED, location)
    conditions = tuple(
        _parse_condition(raw, f"{location}.eligibility[{i}]")
        for i, raw in enumerate(_expect(obj["eligibility"], list, location))
    )
    return VisualizationLeaf(
        id=leaf_id,
        name=_expect(obj["name"], str, location),
        aliases=tuple(_expect(a, str, location) for a in _expect(obj["aliases"], list, location)),
        description=_expect(obj["description"], str, location),
        advantages=tuple(_expect(obj["advantages"], list, location)),
        disadvantages=tuple(_expect(obj["disadvantages"], list, location)),
        eligibility=conditions,
        sources_count=obj.get("sourcesCount"),
        source=obj.get("source"),
    )


def _check_feature_doc(doc: Any, location: str) -> None:
    _expect(doc, dict, location)
    for key, body in doc.items():
        child_loc = f"{location}.{key}"
        _expect(body, dict, child_loc)
        _reject_unknown(body, _FEATURE_KEYS, child_loc)
        _require(body, {"name"}, child_loc)
        if "children" in body:
            _check_feature_doc(body["children"], child_loc)


def parse_tree(document: bytes | str | dict) -> DecisionTree:
    """Parse a tree document without enforcing graph invariants.

    Schema problems raise :class:`TreeDocumentError`; semantic problems
    (dangling ids, cycles, ...) are left for :func:`vizadvisor.model.validate`.
    """
    if isinstance(document, (bytes, str)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TreeDocumentError(f"not valid JSON: {exc}") from exc
    else:
        raw = document
    _expect(raw, dict, "$")
    _reject_unknown(raw, _TOP_KEYS, "$")
    _require(raw, _TOP_KEYS, "$")

    _check_feature_doc(raw["features"], "features")
    features = FeatureHierarchy.from_document(raw["features"])

    nodes = {
        node_id: _parse_node(node_id, body)
        for node_id, body in _expect(raw["nodes"], dict, "nodes").items()
    }
    leaves = {
        leaf_id: _parse_leaf(leaf_id, body)
        for leaf_id, body in _expect(raw["leaves"], dict, "leaves").items()
    }
    return DecisionTree(
        version=_expect(raw["version"], str, "version"),
        root=_expect(raw["root"], str, "root"),
        nodes=nodes,
        leaves=leaves,
        fallback_leaf=_expect(raw["fallbackLeaf"], str, "fallbackLeaf"),
        features=features,
    )


def load_tree(document: bytes | str | dict) -> DecisionTree:
    """Parse and validate a tree document.

    Raises :class:`TreeDocumentError` on schema problems and
    :class:`TreeValidationError` (carrying every violation) when any
    structural invariant is broken. Loading the same bytes always produces
    an identical tree.
    """
    tree = parse_tree(document)
    report = validate(tree)
    if not report.ok:
        raise TreeValidationError(report.violations)
    return tree


def _dump_target(target: Target) -> dict:
    return {target.kind.value: target.ref}


def _dump_condition(condition: EligibilityCondition) -> dict:
    if condition.kind is ConditionKind.ATTRIBUTE_COUNT:
        out: dict[str, Any] = {"attribute": condition.attribute}
        if condition.min_count is not None:
            out["min"] = condition.min_count
        if condition.max_count is not None:
            out["max"] = condition.max_count
        return out
    if condition.kind is ConditionKind.MAX_CARDINALITY:
        return {"maxCategoricalCardinality": condition.max_cardinality}
    return {"requiresFlag": condition.flag.value}


def dump_tree(tree: DecisionTree) -> dict:
    """Serialize back to the document structure ``parse_tree`` accepts."""
    nodes = {}
    for node_id, node in tree.nodes.items():
        body: dict[str, Any] = {
            "text": node.text,
            "branch": node.branch.value,
            "feature": node.feature,
            "allowsDontKnow": node.allows_dont_know,
            "options": [
                {"label": o.label, "value": o.value, "target": _dump_target(o.target)}
                for o in node.options
            ],
        }
        if node.dont_know_target is not None:
            body["dontKnowTarget"] = _dump_target(node.dont_know_target)
        nodes[node_id] = body

    leaves = {}
    for leaf_id, leaf in tree.leaves.items():
        body = {
            "name": leaf.name,
            "aliases": list(leaf.aliases),
            "description": leaf.description,
            "advantages": list(leaf.advantages),
            "disadvantages": list(leaf.disadvantages),
            "eligibility": [_dump_condition(c) for c in leaf.eligibility],
        }
        if leaf.sources_count is not None:
            body["sourcesCount"] = leaf.sources_count
        if leaf.source is not None:
            body["source"] = leaf.source
        leaves[leaf_id] = body

    return {
        "version": tree.version,
        "root": tree.root,
        "nodes": nodes,
        "leaves": leaves,
        "fallbackLeaf": tree.fallback_leaf,
        "features": tree.features.to_document(),
    }


def dumps_tree(tree: DecisionTree) -> str:
    return json.dumps(dump_tree(tree), indent=2, ensure_ascii=False) + "\n"
