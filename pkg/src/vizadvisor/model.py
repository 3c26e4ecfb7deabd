"""Decision-tree domain model: question nodes, visualization leaves, validation.

A tree is a rooted acyclic graph. Internal nodes are questions whose answer
options (and optional don't-know edges) point at further questions or at
visualization leaves. A leaf may be reachable along several paths; each
root-to-leaf path induces a classification vector mapping the features tested
along the way to the answers that were given.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import UnknownLeafError, UnknownNodeError
from .features import FeatureHierarchy

ID_PATTERN = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")

FALLBACK_NAME = "table"

DONT_KNOW = "dont-know"


class Branch(str, Enum):
    TASK = "task"
    DATA = "data"


class TargetKind(str, Enum):
    NODE = "node"
    LEAF = "leaf"


@dataclass(frozen=True)
class Target:
    """Reference to either a question node or a visualization leaf."""

    kind: TargetKind
    ref: str

    @classmethod
    def node(cls, ref: str) -> "Target":
        return cls(TargetKind.NODE, ref)

    @classmethod
    def leaf(cls, ref: str) -> "Target":
        return cls(TargetKind.LEAF, ref)

    @property
    def is_leaf(self) -> bool:
        return self.kind is TargetKind.LEAF


@dataclass(frozen=True)
class AnswerOption:
    label: str
    value: str
    target: Target


@dataclass(frozen=True)
class QuestionNode:
    id: str
    text: str
    branch: Branch
    feature: str
    options: tuple[AnswerOption, ...]
    allows_dont_know: bool = False
    dont_know_target: Target | None = None

    def option_values(self) -> list[str]:
        return [o.value for o in self.options]

    def option(self, value: str) -> AnswerOption | None:
        for candidate in self.options:
            if candidate.value == value:
                return candidate
        return None

    def is_yes_no(self) -> bool:
        return {o.value for o in self.options} == {"yes", "no"}


class ConditionKind(str, Enum):
    ATTRIBUTE_COUNT = "attribute-count"
    MAX_CARDINALITY = "max-cardinality"
    REQUIRED_FLAG = "required-flag"


class StructuralFlag(str, Enum):
    HIERARCHY = "hierarchy"
    NETWORK = "network"
    GEOSPATIAL = "geospatial"
    TEMPORAL = "temporal"


@dataclass(frozen=True)
class EligibilityCondition:
    """Predicate a data profile must satisfy for a visualization to apply."""

    kind: ConditionKind
    attribute: str | None = None
    min_count: int | None = None
    max_count: int | None = None
    max_cardinality: int | None = None
    flag: StructuralFlag | None = None

    def describe(self) -> str:
        if self.kind is ConditionKind.ATTRIBUTE_COUNT:
            if self.min_count is not None and self.max_count is not None:
                span = f"{self.min_count} to {self.max_count}"
            elif self.min_count is not None:
                span = f"at least {self.min_count}"
            else:
                span = f"at most {self.max_count}"
            return f"requires {span} {self.attribute} attribute(s)"
        if self.kind is ConditionKind.MAX_CARDINALITY:
            return f"requires at most {self.max_cardinality} distinct parts"
        return f"requires {self.flag.value} structure in the data"


@dataclass(frozen=True)
class VisualizationLeaf:
    id: str
    name: str
    description: str
    aliases: tuple[str, ...] = ()
    advantages: tuple[str, ...] = ()
    disadvantages: tuple[str, ...] = ()
    eligibility: tuple[EligibilityCondition, ...] = ()
    sources_count: int | None = None
    source: str | None = None

    def all_names(self) -> set[str]:
        return {normalize_name(self.name)} | {normalize_name(a) for a in self.aliases}


def normalize_name(name: str) -> str:
    return re.sub(r"[\s_-]+", " ", name).strip().lower()


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


@dataclass
class TreeCounts:
    internal_nodes: int
    leaves: int
    max_depth: int | None
    visualization_types: int
    paths: int | None = None


@dataclass
class ValidationReport:
    violations: list[Violation]
    counts: TreeCounts

    @property
    def ok(self) -> bool:
        return not self.violations


class DecisionTree:
    """Validated, immutable question graph.

    Instances are safe to share across threads; traversal state lives in
    :class:`~vizadvisor.traversal.Session`, never here.
    """

    def __init__(
        self,
        version: str,
        root: str,
        nodes: dict[str, QuestionNode],
        leaves: dict[str, VisualizationLeaf],
        fallback_leaf: str,
        features: FeatureHierarchy,
    ):
        self.version = version
        self.root = root
        self.nodes = dict(nodes)
        self.leaves = dict(leaves)
        self.fallback_leaf = fallback_leaf
        self.features = features

    def node(self, node_id: str) -> QuestionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def leaf(self, leaf_id: str) -> VisualizationLeaf:
        try:
            return self.leaves[leaf_id]
        except KeyError:
            raise UnknownLeafError(leaf_id) from None

    def resolves(self, target: Target) -> bool:
        pool = self.leaves if target.is_leaf else self.nodes
        return target.ref in pool

    def edges(self, node_id: str, include_dont_know: bool = True):
        """Yield ``(token, target)`` pairs leaving a node, in document order."""
        node = self.nodes[node_id]
        for option in node.options:
            yield option.value, option.target
        if include_dont_know and node.dont_know_target is not None:
            yield DONT_KNOW, node.dont_know_target


def validate(tree: DecisionTree) -> ValidationReport:
    """Check every structural invariant; violations are data, not failures."""
    violations: list[Violation] = []

    def flag(code: str, subject: str, message: str) -> None:
        violations.append(Violation(code, subject, message))

    if tree.root not in tree.nodes:
        flag("missing-root", tree.root, "root node id is not defined")

    for node_id, node in tree.nodes.items():
        if not ID_PATTERN.match(node_id):
            flag("bad-id", node_id, "ids must be lowercase kebab-case")
        if len(node.options) < 2:
            flag("too-few-options", node_id, "internal nodes need at least 2 options")
        if node.feature not in tree.features:
            flag("unknown-feature", node_id,
                 f"feature {node.feature!r} is not in the feature hierarchy")
        seen_values: set[str] = set()
        seen_labels: set[str] = set()
        for option in node.options:
            if option.value in seen_values:
                flag("duplicate-option-value", node_id,
                     f"answer value {option.value!r} appears twice")
            if option.label in seen_labels:
                flag("duplicate-option-label", node_id,
                     f"answer label {option.label!r} appears twice")
            seen_values.add(option.value)
            seen_labels.add(option.label)
            if not tree.resolves(option.target):
                flag("missing-target", node_id,
                     f"option {option.value!r} targets unknown "
                     f"{option.target.kind.value} {option.target.ref!r}")
        if node.allows_dont_know and node.dont_know_target is None:
            flag("missing-dont-know-target", node_id,
                 "allows don't-know but defines no target for it")
        if node.dont_know_target is not None and not tree.resolves(node.dont_know_target):
            flag("missing-target", node_id,
                 f"don't-know targets unknown {node.dont_know_target.kind.value} "
                 f"{node.dont_know_target.ref!r}")

    for leaf_id, leaf in tree.leaves.items():
        if not ID_PATTERN.match(leaf_id):
            flag("bad-id", leaf_id, "ids must be lowercase kebab-case")
        for condition in leaf.eligibility:
            if (condition.min_count is not None and condition.max_count is not None
                    and condition.min_count > condition.max_count):
                flag("bad-eligibility", leaf_id, "min count exceeds max count")

    names_seen: dict[str, str] = {}
    for leaf_id, leaf in tree.leaves.items():
        for name in leaf.all_names():
            if name in names_seen and names_seen[name] != leaf_id:
                flag("duplicate-name", leaf_id,
                     f"name {name!r} already used by leaf {names_seen[name]!r}")
            names_seen.setdefault(name, leaf_id)

    if tree.fallback_leaf not in tree.leaves:
        flag("missing-fallback", tree.fallback_leaf, "fallback leaf is not defined")
    else:
        fallback = tree.leaves[tree.fallback_leaf]
        if FALLBACK_NAME not in fallback.all_names():
            flag("fallback-not-table", tree.fallback_leaf,
                 "the fallback leaf must name the table visualization")

    cyclic = _find_cycle(tree)
    if cyclic is not None:
        flag("cycle", " -> ".join(cyclic), "cycle detected among question nodes")

    reachable_nodes, reachable_leaves = _reachable(tree)
    if cyclic is None:
        for node_id in tree.nodes:
            if node_id not in reachable_nodes:
                flag("unreachable-node", node_id, "question is never asked")
        for leaf_id in tree.leaves:
            if leaf_id not in reachable_leaves:
                flag("unreachable-leaf", leaf_id, "leaf cannot be recommended")

    max_depth = None if cyclic else _max_depth(tree)
    path_count = None if cyclic else count_paths(tree)
    counts = TreeCounts(
        internal_nodes=len(tree.nodes),
        leaves=len(tree.leaves),
        max_depth=max_depth,
        visualization_types=len({normalize_name(l.name) for l in tree.leaves.values()}),
        paths=path_count,
    )
    return ValidationReport(violations=violations, counts=counts)


def _find_cycle(tree: DecisionTree) -> list[str] | None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node_id: WHITE for node_id in tree.nodes}
    stack: list[str] = []

    def visit(node_id: str) -> list[str] | None:
        color[node_id] = GRAY
        stack.append(node_id)
        for _, target in tree.edges(node_id):
            if target.is_leaf or target.ref not in tree.nodes:
                continue
            state = color[target.ref]
            if state == GRAY:
                return stack[stack.index(target.ref):] + [target.ref]
            if state == WHITE:
                found = visit(target.ref)
                if found:
                    return found
        stack.pop()
        color[node_id] = BLACK
        return None

    for node_id in tree.nodes:
        if color[node_id] == WHITE:
            found = visit(node_id)
            if found:
                return found
    return None


def _reachable(tree: DecisionTree) -> tuple[set[str], set[str]]:
    nodes: set[str] = set()
    leaves: set[str] = set()
    if tree.root not in tree.nodes:
        return nodes, leaves
    pending = [tree.root]
    while pending:
        node_id = pending.pop()
        if node_id in nodes:
            continue
        nodes.add(node_id)
        for _, target in tree.edges(node_id):
            if target.is_leaf:
                leaves.add(target.ref)
            elif target.ref in tree.nodes:
                pending.append(target.ref)
    return nodes, leaves


def _max_depth(tree: DecisionTree) -> int | None:
    """Longest root-to-leaf path, counted in questions answered."""
    if tree.root not in tree.nodes:
        return None
    memo: dict[str, int] = {}

    def depth(node_id: str) -> int:
        if node_id in memo:
            return memo[node_id]
        best = 0
        for _, target in tree.edges(node_id):
            if not target.is_leaf and target.ref in tree.nodes:
                best = max(best, depth(target.ref))
        memo[node_id] = best + 1
        return memo[node_id]

    return depth(tree.root)


def count_paths(tree: DecisionTree, include_dont_know: bool = True) -> int | None:
    """Number of distinct root-to-leaf paths (answer-token sequences)."""
    if tree.root not in tree.nodes:
        return None
    memo: dict[str, int] = {}

    def count(node_id: str) -> int:
        if node_id in memo:
            return memo[node_id]
        total = 0
        for _, target in tree.edges(node_id, include_dont_know):
            if target.is_leaf:
                total += 1
            elif target.ref in tree.nodes:
                total += count(target.ref)
        memo[node_id] = total
        return total

    return count(tree.root)


@dataclass(frozen=True)
class Path:
    """One root-to-leaf route: the answer tokens and the feature vector."""

    leaf: str
    steps: tuple[tuple[str, str], ...]  # (node id, answer token)

    @property
    def answers(self) -> tuple[str, ...]:
        return tuple(token for _, token in self.steps)


def enumerate_paths(tree: DecisionTree, include_dont_know: bool = False) -> list[Path]:
    """All root-to-leaf paths, in depth-first document order.

    Option edges only by default; pass ``include_dont_know`` to include
    don't-know routing in the enumeration.
    """
    paths: list[Path] = []
    if tree.root not in tree.nodes:
        return paths

    def walk(node_id: str, steps: list[tuple[str, str]]) -> None:
        for token, target in tree.edges(node_id, include_dont_know):
            steps.append((node_id, token))
            if target.is_leaf:
                paths.append(Path(leaf=target.ref, steps=tuple(steps)))
            elif target.ref in tree.nodes:
                walk(target.ref, steps)
            steps.pop()

    walk(tree.root, [])
    return paths


def path_vector(tree: DecisionTree, path: Path) -> dict[str, str]:
    """Feature -> answer-token mapping induced by one path."""
    return {tree.node(node_id).feature: token for node_id, token in path.steps}


def classification_vector(tree: DecisionTree, leaf_id: str) -> list[dict[str, str]]:
    """Per-path classification vectors for one leaf.

    Replaying any returned vector through a traversal reaches the same leaf;
    a leaf reachable along several routes yields several vectors.
    """
    if leaf_id not in tree.leaves:
        raise UnknownLeafError(leaf_id)
    return [path_vector(tree, p) for p in enumerate_paths(tree) if p.leaf == leaf_id]


def leaf_vectors(tree: DecisionTree) -> dict[str, list[dict[str, str]]]:
    """Classification vectors for every leaf in one pass."""
    out: dict[str, list[dict[str, str]]] = {leaf_id: [] for leaf_id in tree.leaves}
    for path in enumerate_paths(tree):
        out[path.leaf].append(path_vector(tree, path))
    return out
