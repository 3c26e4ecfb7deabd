"""Question-based data visualization recommender.

A validated decision tree of questions leads every session to exactly one
visualization recommendation with a retraceable explanation. Datasets can be
profiled to answer the data-characteristics questions automatically, and the
tree can be extended with new visualization types without touching code.
"""

from .document import dump_tree, dumps_tree, load_tree, parse_tree
from .extension import (
    CandidateClassification,
    ExtensionSpec,
    classify_candidate,
    find_similar,
    insert_distinguishing_question,
)
from .features import FeatureHierarchy
from .knowledge import catalog, glossary, seed_tree
from .model import (
    AnswerOption,
    DecisionTree,
    EligibilityCondition,
    QuestionNode,
    ValidationReport,
    VisualizationLeaf,
    classification_vector,
    validate,
)
from .profiling import (
    AttributeType,
    DataProfile,
    Dataset,
    answer_from_profile,
    check_eligibility,
    infer_attribute_type,
    ingest_csv,
    profile,
)
from .traversal import (
    Prompt,
    Recommendation,
    Session,
    TraceStep,
    answer,
    current_prompt,
    dont_know,
    go_back,
    recommend_auto,
    replay,
    start_session,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerOption",
    "AttributeType",
    "CandidateClassification",
    "DataProfile",
    "Dataset",
    "DecisionTree",
    "EligibilityCondition",
    "ExtensionSpec",
    "FeatureHierarchy",
    "Prompt",
    "QuestionNode",
    "Recommendation",
    "Session",
    "TraceStep",
    "ValidationReport",
    "VisualizationLeaf",
    "answer",
    "answer_from_profile",
    "catalog",
    "check_eligibility",
    "classification_vector",
    "classify_candidate",
    "current_prompt",
    "dont_know",
    "dump_tree",
    "dumps_tree",
    "find_similar",
    "glossary",
    "go_back",
    "infer_attribute_type",
    "ingest_csv",
    "insert_distinguishing_question",
    "load_tree",
    "parse_tree",
    "profile",
    "recommend_auto",
    "replay",
    "seed_tree",
    "start_session",
    "validate",
]
