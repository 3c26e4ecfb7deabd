"""Traversal engine: interactive sessions, traces, batch recommendations.

A session walks one shared, immutable tree. Every answer is recorded as a
trace step so the final recommendation can explain itself and be replayed.
The walk always ends in exactly one visualization; the table leaf guarantees
an answer exists even when nothing else fits.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import (
    AtRootError,
    DontKnowNotAllowedError,
    InvalidAnswerError,
    SessionFinishedError,
    TaskFeatureError,
    UnknownTaskKeyError,
    VizAdvisorError,
)
from .features import TASK_ROOT
from .model import DONT_KNOW, DecisionTree, QuestionNode, Target
from .profiling import DataProfile, answer_from_profile

SOURCE_USER = "user"
SOURCE_AUTO = "auto-from-profile"
SOURCE_DONT_KNOW = "dont-know"


@dataclass(frozen=True)
class TraceStep:
    node_id: str
    question: str
    answer: str
    source: str

    def as_dict(self) -> dict:
        return {
            "nodeId": self.node_id,
            "question": self.question,
            "answer": self.answer,
            "source": self.source,
        }


@dataclass(frozen=True)
class Recommendation:
    """Exactly one visualization, with the trace that led to it."""

    leaf_id: str
    name: str
    description: str
    advantages: tuple[str, ...]
    disadvantages: tuple[str, ...]
    trace: tuple[TraceStep, ...]
    fallback_used: bool

    def as_dict(self) -> dict:
        return {
            "leafId": self.leaf_id,
            "name": self.name,
            "description": self.description,
            "advantages": list(self.advantages),
            "disadvantages": list(self.disadvantages),
            "trace": [step.as_dict() for step in self.trace],
            "fallbackUsed": self.fallback_used,
        }


@dataclass(frozen=True)
class Prompt:
    """What to ask next: question text plus the answers it accepts."""

    node_id: str
    question: str
    options: tuple[tuple[str, str], ...]  # (label, value) in document order
    allows_dont_know: bool

    def as_dict(self) -> dict:
        return {
            "nodeId": self.node_id,
            "question": self.question,
            "options": [{"label": label, "value": value} for label, value in self.options],
            "allowsDontKnow": self.allows_dont_know,
        }


@dataclass
class Session:
    """Mutable traversal state; one logical actor per session at a time."""

    tree: DecisionTree
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    cursor: str = ""
    finished_leaf: str | None = None
    history: list[TraceStep] = field(default_factory=list)
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def __post_init__(self):
        if not self.cursor:
            self.cursor = self.tree.root

    @property
    def tree_version(self) -> str:
        return self.tree.version

    @property
    def finished(self) -> bool:
        return self.finished_leaf is not None

    def current_node(self) -> QuestionNode:
        return self.tree.node(self.cursor)

    def recommendation(self) -> Recommendation:
        if self.finished_leaf is None:
            raise VizAdvisorError("session has not reached a recommendation yet")
        leaf = self.tree.leaf(self.finished_leaf)
        return Recommendation(
            leaf_id=leaf.id,
            name=leaf.name,
            description=leaf.description,
            advantages=leaf.advantages,
            disadvantages=leaf.disadvantages,
            trace=tuple(self.history),
            fallback_used=leaf.id == self.tree.fallback_leaf,
        )


def start_session(tree: DecisionTree) -> Session:
    """Open a fresh session at the root question with an empty history."""
    return Session(tree=tree)


def current_prompt(session: Session) -> Prompt | Recommendation:
    """The pending question, or the recommendation once finished."""
    if session.finished:
        return session.recommendation()
    node = session.current_node()
    return Prompt(
        node_id=node.id,
        question=node.text,
        options=tuple((o.label, o.value) for o in node.options),
        allows_dont_know=node.allows_dont_know,
    )


def _advance(session: Session, node: QuestionNode, answer_token: str,
             target: Target, source: str) -> None:
    session.history.append(TraceStep(
        node_id=node.id,
        question=node.text,
        answer=answer_token,
        source=source,
    ))
    if target.is_leaf:
        session.finished_leaf = target.ref
    else:
        session.cursor = target.ref


def answer(session: Session, value: str, source: str = SOURCE_USER) -> Prompt | Recommendation:
    """Record one answer and advance; returns the next prompt or the result."""
    if session.finished:
        raise SessionFinishedError()
    node = session.current_node()
    option = node.option(value)
    if option is None:
        valid = node.option_values()
        if node.allows_dont_know:
            valid.append(DONT_KNOW)
        raise InvalidAnswerError(value, valid)
    _advance(session, node, value, option.target, source)
    return current_prompt(session)


def dont_know(session: Session, source: str = SOURCE_DONT_KNOW) -> Prompt | Recommendation:
    """Take the question's don't-know route, where one is defined."""
    if session.finished:
        raise SessionFinishedError()
    node = session.current_node()
    if not node.allows_dont_know or node.dont_know_target is None:
        raise DontKnowNotAllowedError(node.id)
    _advance(session, node, DONT_KNOW, node.dont_know_target, source)
    return current_prompt(session)


def go_back(session: Session) -> Prompt:
    """Pop the last step; a finished session becomes answerable again."""
    if not session.history:
        raise AtRootError()
    last = session.history.pop()
    session.cursor = last.node_id
    session.finished_leaf = None
    return current_prompt(session)


def replay(tree: DecisionTree, answers, allow_dont_know: bool = True) -> Session:
    """Feed a token sequence into a fresh session (don't-know tokens included)."""
    session = start_session(tree)
    for token in answers:
        if token == DONT_KNOW and allow_dont_know:
            dont_know(session)
        else:
            answer(session, token)
    return session


def _match_task_option(tree: DecisionTree, node: QuestionNode,
                       task: str | None) -> str | None:
    """Pick the answer a task key implies at a task-intent question.

    Yes/no questions test whether the task sits at or below the node's
    feature in the hierarchy. Multi-choice questions match the option whose
    value names the task or one of its ancestors; an ``other`` option is
    the catch-all for tasks the question does not name.
    """
    ancestry = tree.features.ancestry(task) if task is not None else set()
    if node.is_yes_no():
        return "yes" if node.feature in ancestry else "no"
    for option in node.options:
        if option.value in ancestry:
            return option.value
    if node.option("other") is not None:
        return "other"
    return None


def recommend_auto(tree: DecisionTree, profile: DataProfile,
                   task: str | None = None) -> Recommendation:
    """Run a full traversal answered from a data profile and an optional task.

    Data-characteristics questions are answered from the profile,
    task-intent questions from the supplied task key; anything unanswerable
    falls back to don't-know routing. Always ends in one recommendation.
    """
    if task is not None:
        if task not in tree.features or task == TASK_ROOT:
            raise UnknownTaskKeyError(task)
        if tree.features.is_data_key(task):
            raise UnknownTaskKeyError(task)

    session = start_session(tree)
    while not session.finished:
        node = session.current_node()
        if tree.features.is_data_key(node.feature):
            try:
                token = answer_from_profile(node.feature, profile)
            except TaskFeatureError:  # pragma: no cover - guarded by is_data_key
                token = None
            if token is not None and node.option(token) is None:
                token = None
        else:
            token = _match_task_option(tree, node, task)
        if token is not None:
            answer(session, token, source=SOURCE_AUTO)
        elif node.allows_dont_know and node.dont_know_target is not None:
            dont_know(session)
        else:
            raise VizAdvisorError(
                f"question {node.id!r} is unanswerable from the profile and "
                "has no don't-know route")
    return session.recommendation()
