"""Bundled knowledge base: seed tree, visualization catalog, glossary.

The seed tree ships as a versioned JSON document inside the package and can
be overridden at runtime with a file path (or the VIZADVISOR_TREE
environment variable, handled by the CLI and service).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..document import load_tree
from ..model import DecisionTree, VisualizationLeaf

_SEED_CACHE: DecisionTree | None = None


def seed_tree_bytes() -> bytes:
    return resources.files(__name__).joinpath("seed_tree.json").read_bytes()


def seed_tree() -> DecisionTree:
    """The bundled, validated seed tree (cached; trees are immutable)."""
    global _SEED_CACHE
    if _SEED_CACHE is None:
        _SEED_CACHE = load_tree(seed_tree_bytes())
    return _SEED_CACHE


def load_tree_from(path: str | Path | None) -> DecisionTree:
    """Load a tree from a file path, or fall back to the bundled seed."""
    if path is None:
        return seed_tree()
    return load_tree(Path(path).read_bytes())


@dataclass(frozen=True)
class CatalogEntry:
    leaf: VisualizationLeaf
    is_fallback: bool

    def as_dict(self) -> dict:
        return {
            "id": self.leaf.id,
            "name": self.leaf.name,
            "aliases": list(self.leaf.aliases),
            "description": self.leaf.description,
            "advantages": list(self.leaf.advantages),
            "disadvantages": list(self.leaf.disadvantages),
            "isFallback": self.is_fallback,
        }


def catalog(tree: DecisionTree | None = None) -> list[CatalogEntry]:
    """Visualization metadata for every leaf, fallback marked."""
    tree = tree or seed_tree()
    return [
        CatalogEntry(leaf=leaf, is_fallback=leaf_id == tree.fallback_leaf)
        for leaf_id, leaf in tree.leaves.items()
    ]


def glossary() -> list[dict]:
    """Term definitions surfaced by user interfaces for unfamiliar wording."""
    text = resources.files(__name__).joinpath("glossary.json").read_text("utf-8")
    return json.loads(text)


def sankey_extension_document() -> dict:
    """The shipped example extension: a flow question above every tree map."""
    text = resources.files(__name__).joinpath("sankey_extension.json").read_text("utf-8")
    return json.loads(text)
