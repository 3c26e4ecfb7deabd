"""Distinguishing-feature hierarchy.

Every question in a decision tree tests one feature. Features form a rooted
forest: task-intent features (``compare.over-time``, ``analyze.clusters``)
under the ``task`` root, data-characteristics features (``data.spatial``,
``data.quantitative.count``) under the ``data`` root. The hierarchy is what
ties questions, classification vectors and batch answering together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownFeatureError

DATA_ROOT = "data"
TASK_ROOT = "task"


@dataclass(frozen=True)
class Feature:
    key: str
    name: str
    parent: str | None = None


@dataclass
class FeatureHierarchy:
    """Rooted forest of feature keys with display names."""

    _features: dict[str, Feature] = field(default_factory=dict)
    _children: dict[str | None, list[str]] = field(default_factory=dict)

    @classmethod
    def from_document(cls, doc: dict) -> "FeatureHierarchy":
        """Build from the nested ``{key: {"name", "children": {...}}}`` form."""
        hierarchy = cls()

        def walk(items: dict, parent: str | None) -> None:
            for key, body in items.items():
                hierarchy.add(key, body["name"], parent)
                walk(body.get("children", {}), key)

        walk(doc, None)
        return hierarchy

    def to_document(self) -> dict:
        def build(parent: str | None) -> dict:
            out = {}
            for key in self._children.get(parent, []):
                node = {"name": self._features[key].name}
                children = build(key)
                if children:
                    node["children"] = children
                out[key] = node
            return out

        return build(None)

    def add(self, key: str, name: str, parent: str | None = None) -> None:
        if key in self._features:
            raise ValueError(f"duplicate feature key: {key!r}")
        if parent is not None and parent not in self._features:
            raise UnknownFeatureError(parent)
        self._features[key] = Feature(key, name, parent)
        self._children.setdefault(parent, []).append(key)

    def __contains__(self, key: str) -> bool:
        return key in self._features

    def __iter__(self):
        return iter(self._features.values())

    def __len__(self) -> int:
        return len(self._features)

    def get(self, key: str) -> Feature:
        try:
            return self._features[key]
        except KeyError:
            raise UnknownFeatureError(key) from None

    def children(self, key: str | None) -> list[Feature]:
        return [self._features[k] for k in self._children.get(key, [])]

    def root_of(self, key: str) -> str:
        """Top-level ancestor of ``key`` (e.g. ``task`` or ``data``)."""
        feature = self.get(key)
        while feature.parent is not None:
            feature = self._features[feature.parent]
        return feature.key

    def ancestry(self, key: str) -> set[str]:
        """The key itself plus every ancestor up to its root."""
        chain = {key}
        feature = self.get(key)
        while feature.parent is not None:
            chain.add(feature.parent)
            feature = self._features[feature.parent]
        return chain

    def is_data_key(self, key: str) -> bool:
        """True when ``key`` describes the data rather than the user's intent."""
        return self.root_of(key) == DATA_ROOT

    def task_keys(self) -> list[str]:
        """All keys under the task root, excluding the root itself."""
        return [f.key for f in self._features.values()
                if f.key != TASK_ROOT and self.root_of(f.key) == TASK_ROOT]

    def copy(self) -> "FeatureHierarchy":
        clone = FeatureHierarchy()
        clone._features = dict(self._features)
        clone._children = {k: list(v) for k, v in self._children.items()}
        return clone
