"""Knowledge-base extension: adding a new visualization type.

The workflow mirrors how a curator grows the tree: classify the candidate
over the existing features, look for the most similar leaf, and when the
candidate collides with an existing visualization, insert a distinguishing
question at every edge that reached the colliding leaf. The input tree is
never mutated; a successful insertion yields a fresh, validated tree with a
bumped version plus a machine-readable diff.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ExtensionError, UnknownFeatureError, UnknownLeafError
from .model import (
    AnswerOption,
    DecisionTree,
    QuestionNode,
    Target,
    VisualizationLeaf,
    leaf_vectors,
    validate,
)

ROUTE_EXISTING = "existing"
ROUTE_NEW = "new"


@dataclass(frozen=True)
class CandidateClassification:
    """Normalized feature -> answer map; features left out are unspecified."""

    answers: dict[str, str]

    def specified(self) -> set[str]:
        return set(self.answers)


def classify_candidate(tree: DecisionTree, answers: dict[str, str]) -> CandidateClassification:
    """Normalize a candidate's answers against the tree's feature hierarchy."""
    for key in answers:
        if key not in tree.features:
            raise UnknownFeatureError(key)
    return CandidateClassification(answers=dict(answers))


@dataclass(frozen=True)
class SimilarityMatch:
    leaf_id: str
    name: str
    distance: int
    collision: bool

    def as_dict(self) -> dict:
        return {
            "leafId": self.leaf_id,
            "name": self.name,
            "distance": self.distance,
            "collision": self.collision,
        }


def _vector_distance(candidate: CandidateClassification, vector: dict[str, str]) -> int:
    return sum(
        1 for feature, token in candidate.answers.items()
        if feature in vector and vector[feature] != token
    )


def find_similar(tree: DecisionTree,
                 candidate: CandidateClassification) -> list[SimilarityMatch]:
    """Rank every leaf by classification distance to the candidate.

    Distance counts the specified features whose answers disagree with the
    leaf's path vector, minimized over the leaf's paths. Distance-0 entries
    are collisions: the tree cannot tell the candidate and that leaf apart.
    """
    vectors = leaf_vectors(tree)
    matches = []
    for leaf_id, leaf in tree.leaves.items():
        distance = min(
            (_vector_distance(candidate, v) for v in vectors[leaf_id]),
            default=0,
        )
        matches.append(SimilarityMatch(
            leaf_id=leaf_id,
            name=leaf.name,
            distance=distance,
            collision=distance == 0,
        ))
    matches.sort(key=lambda m: (m.distance, m.name))
    return matches


@dataclass(frozen=True)
class RouteOption:
    label: str
    value: str
    routes_to: str  # "existing" | "new"


@dataclass(frozen=True)
class ExtensionSpec:
    """Declarative description of one distinguishing-question insertion."""

    target_leaf: str
    question_text: str
    feature_key: str
    new_leaf: VisualizationLeaf
    options: tuple[RouteOption, ...]
    feature_name: str | None = None
    feature_parent: str | None = None
    dont_know_routes_to: str | None = ROUTE_EXISTING


@dataclass(frozen=True)
class RewiredEdge:
    source: str
    kind: str  # "option" | "dont-know"
    value: str | None
    old_target: str
    new_target: str

    def as_dict(self) -> dict:
        out = {
            "source": self.source,
            "kind": self.kind,
            "oldTarget": self.old_target,
            "newTarget": self.new_target,
        }
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass
class TreeDiff:
    base_version: str
    new_version: str
    added_nodes: list[str] = field(default_factory=list)
    added_leaves: list[str] = field(default_factory=list)
    added_features: list[str] = field(default_factory=list)
    rewired_edges: list[RewiredEdge] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "baseVersion": self.base_version,
            "newVersion": self.new_version,
            "addedNodes": list(self.added_nodes),
            "addedLeaves": list(self.added_leaves),
            "addedFeatures": list(self.added_features),
            "rewiredEdges": [edge.as_dict() for edge in self.rewired_edges],
        }


@dataclass
class ExtensionResult:
    tree: DecisionTree
    diff: TreeDiff


def bump_version(version: str) -> str:
    parts = version.split(".")
    if len(parts) >= 2 and all(p.isdigit() for p in parts):
        parts[1] = str(int(parts[1]) + 1)
        for i in range(2, len(parts)):
            parts[i] = "0"
        return ".".join(parts)
    return f"{version}.1"


def _check_spec(tree: DecisionTree, spec: ExtensionSpec) -> None:
    if spec.target_leaf not in tree.leaves:
        raise UnknownLeafError(spec.target_leaf)
    if spec.new_leaf.id in tree.leaves or spec.new_leaf.id in tree.nodes:
        raise ExtensionError(f"id {spec.new_leaf.id!r} already exists in the tree")
    if len(spec.options) < 2:
        raise ExtensionError("a distinguishing question needs at least 2 answers")
    routes = {o.routes_to for o in spec.options}
    bad = routes - {ROUTE_EXISTING, ROUTE_NEW}
    if bad:
        raise ExtensionError(f"answers may route to 'existing' or 'new', not {sorted(bad)}")
    if ROUTE_NEW not in routes:
        raise ExtensionError("no answer routes to the new visualization")
    if ROUTE_EXISTING not in routes:
        raise ExtensionError(f"no answer keeps {spec.target_leaf!r} reachable")
    values = [o.value for o in spec.options]
    if len(set(values)) != len(values):
        raise ExtensionError("answer values must be unique")
    if (spec.dont_know_routes_to is not None
            and spec.dont_know_routes_to not in {ROUTE_EXISTING, ROUTE_NEW}):
        raise ExtensionError("dontKnowRoutesTo must be 'existing' or 'new'")
    if spec.feature_parent is not None and spec.feature_parent not in tree.features:
        raise UnknownFeatureError(spec.feature_parent)


def _fresh_node_id(base: str, taken: set[str], counter: int) -> str:
    candidate = f"{base}-{counter}"
    while candidate in taken:
        counter += 1
        candidate = f"{base}-{counter}"
    return candidate


def insert_distinguishing_question(tree: DecisionTree,
                                   spec: ExtensionSpec) -> ExtensionResult:
    """Insert a distinguishing question above every occurrence of a leaf.

    Each edge that used to reach the target leaf is rewired to its own copy
    of the new question; the question's answers route to the existing leaf
    or the new one. The operation is atomic: the result is validated and any
    violation aborts it, leaving the input untouched.
    """
    _check_spec(tree, spec)

    features = tree.features.copy()
    added_features = []
    if spec.feature_key not in features:
        features.add(
            spec.feature_key,
            spec.feature_name or spec.feature_key.replace(".", " ").replace("-", " "),
            spec.feature_parent,
        )
        added_features.append(spec.feature_key)

    def resolve(route: str) -> Target:
        return Target.leaf(spec.target_leaf if route == ROUTE_EXISTING
                           else spec.new_leaf.id)

    base_id = "q-" + re.sub(r"[^a-z0-9]+", "-", spec.feature_key.lower()).strip("-")
    taken = set(tree.nodes) | set(tree.leaves) | {spec.new_leaf.id}
    new_nodes: dict[str, QuestionNode] = {}
    rewired: list[RewiredEdge] = []
    counter = 1

    def make_question(source: QuestionNode) -> str:
        nonlocal counter
        node_id = _fresh_node_id(base_id, taken, counter)
        counter += 1
        taken.add(node_id)
        new_nodes[node_id] = QuestionNode(
            id=node_id,
            text=spec.question_text,
            branch=source.branch,
            feature=spec.feature_key,
            options=tuple(
                AnswerOption(label=o.label, value=o.value, target=resolve(o.routes_to))
                for o in spec.options
            ),
            allows_dont_know=spec.dont_know_routes_to is not None,
            dont_know_target=(resolve(spec.dont_know_routes_to)
                              if spec.dont_know_routes_to is not None else None),
        )
        return node_id

    def hits_target(target: Target | None) -> bool:
        return target is not None and target.is_leaf and target.ref == spec.target_leaf

    rebuilt: dict[str, QuestionNode] = {}
    for node_id, node in tree.nodes.items():
        options = []
        changed = False
        for option in node.options:
            if hits_target(option.target):
                question_id = make_question(node)
                rewired.append(RewiredEdge(
                    source=node_id, kind="option", value=option.value,
                    old_target=spec.target_leaf, new_target=question_id,
                ))
                options.append(AnswerOption(option.label, option.value,
                                            Target.node(question_id)))
                changed = True
            else:
                options.append(option)
        dont_know_target = node.dont_know_target
        if hits_target(dont_know_target):
            question_id = make_question(node)
            rewired.append(RewiredEdge(
                source=node_id, kind="dont-know", value=None,
                old_target=spec.target_leaf, new_target=question_id,
            ))
            dont_know_target = Target.node(question_id)
            changed = True
        rebuilt[node_id] = (
            QuestionNode(
                id=node.id, text=node.text, branch=node.branch, feature=node.feature,
                options=tuple(options), allows_dont_know=node.allows_dont_know,
                dont_know_target=dont_know_target,
            ) if changed else node
        )

    if not rewired:
        raise ExtensionError(
            f"leaf {spec.target_leaf!r} has no incoming edges to insert above")

    rebuilt.update(new_nodes)
    leaves = dict(tree.leaves)
    leaves[spec.new_leaf.id] = spec.new_leaf

    extended = DecisionTree(
        version=bump_version(tree.version),
        root=tree.root,
        nodes=rebuilt,
        leaves=leaves,
        fallback_leaf=tree.fallback_leaf,
        features=features,
    )
    report = validate(extended)
    if not report.ok:
        raise ExtensionError(
            "insertion would produce an invalid tree: "
            + "; ".join(str(v) for v in report.violations))

    diff = TreeDiff(
        base_version=tree.version,
        new_version=extended.version,
        added_nodes=sorted(new_nodes),
        added_leaves=[spec.new_leaf.id],
        added_features=added_features,
        rewired_edges=rewired,
    )
    return ExtensionResult(tree=extended, diff=diff)


def parse_extension_spec(document: dict) -> ExtensionSpec:
    """Read an extension file (see the shipped sankey example) into a spec."""
    from .document import _parse_leaf  # shared leaf schema

    try:
        feature = document.get("feature", {})
        options = tuple(
            RouteOption(label=o["label"], value=o["value"], routes_to=o["routesTo"])
            for o in document["options"]
        )
        new_leaf_doc = dict(document["newLeaf"])
        leaf_id = new_leaf_doc.pop("id")
        return ExtensionSpec(
            target_leaf=document["targetLeaf"],
            question_text=document["question"],
            feature_key=feature["key"],
            feature_name=feature.get("name"),
            feature_parent=feature.get("parent"),
            new_leaf=_parse_leaf(leaf_id, new_leaf_doc),
            options=options,
            dont_know_routes_to=document.get("dontKnowRoutesTo"),
        )
    except KeyError as exc:
        raise ExtensionError(f"extension file is missing {exc}") from exc
