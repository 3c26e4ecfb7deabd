"""Dataset ingestion, attribute-type inference and profile-driven answers.

The profiler turns a delimited text file into a typed summary (a
:class:`DataProfile`) that can answer the data-characteristics questions of
a decision tree and evaluate per-visualization eligibility conditions.
Inference is a deterministic rule cascade over the raw text cells; there is
no sampling and no randomness, so the same cells always produce the same
profile.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from datetime import datetime
from functools import lru_cache
from importlib import resources

from .errors import (
    AllNullColumnError,
    CsvFormatError,
    TaskFeatureError,
    UnknownColumnError,
)
from .model import (
    ConditionKind,
    EligibilityCondition,
    StructuralFlag,
    VisualizationLeaf,
)

try:
    from enum import StrEnum
except ImportError:  # Python 3.10
    from enum import Enum

    class StrEnum(str, Enum):
        pass


class AttributeType(StrEnum):
    QUANTITATIVE = "quantitative"
    CATEGORICAL = "categorical"
    TEMPORAL = "temporal"
    GEOSPATIAL_LAT = "geospatial-lat"
    GEOSPATIAL_LON = "geospatial-lon"
    GEOSPATIAL_NAME = "geospatial-name"
    IDENTIFIER_TEXT = "identifier-text"
    BOOLEAN = "boolean"


GEOSPATIAL_TYPES = {
    AttributeType.GEOSPATIAL_LAT,
    AttributeType.GEOSPATIAL_LON,
    AttributeType.GEOSPATIAL_NAME,
}

# Discrete kinds usable as grouping attributes (cardinality, category counts,
# hierarchy/network detection).
GROUPING_TYPES = {
    AttributeType.CATEGORICAL,
    AttributeType.BOOLEAN,
    AttributeType.GEOSPATIAL_NAME,
}

NULL_TOKENS = {"", "na", "null"}
BOOLEAN_TOKENS = {"true", "false", "yes", "no", "0", "1"}

_LAT_NAME = re.compile(r"^lat(itude)?$", re.IGNORECASE)
_LON_NAME = re.compile(r"^(lon|lng|long(itude)?)$", re.IGNORECASE)

_NON_FINITE = {"nan", "inf", "-inf", "+inf", "infinity", "-infinity", "+infinity"}

_DATE_FORMATS = (
    "%Y-%m-%d", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M", "%Y-%m", "%Y/%m/%d",
    "%d/%m/%Y", "%d-%m-%Y", "%d.%m.%Y",
    "%m/%d/%Y", "%m-%d-%Y",
)


@dataclass(frozen=True)
class InferenceConfig:
    """Thresholds of the type-inference cascade."""

    numeric_ratio: float = 0.95
    temporal_ratio: float = 0.95
    gazetteer_ratio: float = 0.80
    categorical_floor: int = 20
    categorical_row_fraction: float = 0.10
    network_overlap: float = 0.50


DEFAULT_CONFIG = InferenceConfig()


@dataclass(frozen=True)
class Column:
    name: str
    cells: tuple[str, ...]

    def non_null(self) -> list[str]:
        return [c for c in self.cells if not is_null(c)]


@dataclass(frozen=True)
class Dataset:
    """Rectangular table of verbatim text cells."""

    columns: tuple[Column, ...]

    @property
    def row_count(self) -> int:
        return len(self.columns[0].cells) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for column in self.columns:
            if column.name == name:
                return column
        raise UnknownColumnError(name)


def is_null(cell: str) -> bool:
    return cell.strip().lower() in NULL_TOKENS


def ingest_csv(data: bytes | str, delimiter: str = ",",
               header_row: bool = True) -> Dataset:
    """Parse RFC-4180 delimited text into a Dataset.

    Cells stay verbatim text; a missing header row yields synthetic names
    col1..colN. Ragged rows are rejected with their 1-based row number.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    rows = [row for row in reader if row]
    if not rows:
        raise CsvFormatError("input contains no rows")

    if header_row:
        header = [name.strip() for name in rows[0]]
        body = rows[1:]
        first_data_row = 2
    else:
        header = [f"col{i + 1}" for i in range(len(rows[0]))]
        body = rows
        first_data_row = 1
    if not body:
        raise CsvFormatError("input contains a header but no data rows")

    width = len(header)
    for offset, row in enumerate(body):
        if len(row) != width:
            raise CsvFormatError(
                f"expected {width} cells, found {len(row)}",
                row=first_data_row + offset,
            )

    if len(set(header)) != len(header):
        duplicates = sorted({n for n in header if header.count(n) > 1})
        raise CsvFormatError(f"duplicate column names: {duplicates}")

    columns = tuple(
        Column(name=name, cells=tuple(row[i] for row in body))
        for i, name in enumerate(header)
    )
    return Dataset(columns=columns)


def _parses_numeric(cell: str) -> bool:
    token = cell.strip()
    if token.lower() in _NON_FINITE:
        return False
    try:
        float(token)
        return True
    except ValueError:
        return False


def _parses_date(cell: str) -> bool:
    token = cell.strip()
    for fmt in _DATE_FORMATS:
        try:
            datetime.strptime(token, fmt)
            return True
        except ValueError:
            continue
    return False


@lru_cache(maxsize=1)
def _gazetteer() -> frozenset[str]:
    text = resources.files("vizadvisor.knowledge").joinpath("gazetteer.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


def infer_attribute_type(column: Column,
                         config: InferenceConfig = DEFAULT_CONFIG) -> AttributeType:
    """Assign exactly one attribute type to a column.

    Rule cascade over non-null cells:

    1. boolean: every cell in {true,false,yes,no,0,1}, at most 2 distinct
    2. numeric parse ratio >= 95% -> quantitative, refined to
       geospatial-lat/-lon when the column name says so and the value
       range fits [-90, 90] / [-180, 180]
    3. date parse ratio >= 95% (ISO-8601, day-first, month-first) -> temporal
    4. >= 80% of cells found in the bundled place-name gazetteer ->
       geospatial-name
    5. distinct count <= max(20, 10% of rows) -> categorical
    6. identifier-text otherwise
    """
    values = column.non_null()
    if not values:
        raise AllNullColumnError(column.name)

    lowered = [v.strip().lower() for v in values]
    distinct = set(lowered)

    if len(distinct) <= 2 and distinct <= BOOLEAN_TOKENS:
        return AttributeType.BOOLEAN

    numeric_hits = sum(1 for v in values if _parses_numeric(v))
    if numeric_hits / len(values) >= config.numeric_ratio:
        numbers = [float(v) for v in values if _parses_numeric(v)]
        low, high = min(numbers), max(numbers)
        if _LAT_NAME.match(column.name.strip()) and -90 <= low and high <= 90:
            return AttributeType.GEOSPATIAL_LAT
        if _LON_NAME.match(column.name.strip()) and -180 <= low and high <= 180:
            return AttributeType.GEOSPATIAL_LON
        return AttributeType.QUANTITATIVE

    date_hits = sum(1 for v in values if _parses_date(v))
    if date_hits / len(values) >= config.temporal_ratio:
        return AttributeType.TEMPORAL

    gazetteer = _gazetteer()
    geo_hits = sum(1 for v in lowered if v in gazetteer)
    if geo_hits / len(values) >= config.gazetteer_ratio:
        return AttributeType.GEOSPATIAL_NAME

    threshold = max(config.categorical_floor,
                    int(len(column.cells) * config.categorical_row_fraction))
    if len(distinct) <= threshold:
        return AttributeType.CATEGORICAL

    return AttributeType.IDENTIFIER_TEXT


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    attribute_type: AttributeType | None
    distinct_count: int
    null_fraction: float


@dataclass(frozen=True)
class DataProfile:
    """Typed summary of a dataset restricted to the columns under analysis."""

    columns: tuple[ColumnProfile, ...]
    selected: tuple[str, ...]
    type_counts: dict[AttributeType, int] = field(default_factory=dict)
    has_geospatial: bool = False
    has_temporal: bool = False
    has_hierarchy: bool = False
    has_network_edges: bool = False
    max_categorical_cardinality: int = 0

    def selected_profiles(self) -> list[ColumnProfile]:
        by_name = {c.name: c for c in self.columns}
        return [by_name[name] for name in self.selected]

    def count(self, *types: AttributeType) -> int:
        return sum(self.type_counts.get(t, 0) for t in types)


def _column_profile(column: Column, selected: bool,
                    config: InferenceConfig) -> ColumnProfile:
    non_null = column.non_null()
    null_fraction = 1.0 - (len(non_null) / len(column.cells)) if column.cells else 1.0
    if not non_null:
        if selected:
            raise AllNullColumnError(column.name)
        return ColumnProfile(column.name, None, 0, 1.0)
    return ColumnProfile(
        name=column.name,
        attribute_type=infer_attribute_type(column, config),
        distinct_count=len({v.strip() for v in non_null}),
        null_fraction=null_fraction,
    )


def _edges_acyclic(pairs: list[tuple[str, str]]) -> bool:
    graph: dict[str, set[str]] = {}
    for child, parent in pairs:
        graph.setdefault(child, set()).add(parent)
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}

    def visit(node: str) -> bool:
        color[node] = GRAY
        for nxt in graph.get(node, ()):
            state = color.get(nxt, WHITE)
            if state == GRAY:
                return False
            if state == WHITE and not visit(nxt):
                return False
        color[node] = BLACK
        return True

    return all(visit(node) for node in graph if color.get(node, WHITE) == WHITE)


def _detect_hierarchy(columns: list[Column], types: dict[str, AttributeType]) -> bool:
    """Parent/child pair: one discrete column's values nest inside another's.

    The candidate parent column's non-null values must be a subset of the
    child column's values and the implied child -> parent references must
    not form a cycle.
    """
    discrete = [c for c in columns if types.get(c.name) in GROUPING_TYPES
                or types.get(c.name) == AttributeType.IDENTIFIER_TEXT]
    for parent_col in discrete:
        parents = {v.strip() for v in parent_col.non_null()}
        if not parents:
            continue
        for child_col in discrete:
            if child_col.name == parent_col.name:
                continue
            children = {v.strip() for v in child_col.non_null()}
            if not parents <= children:
                continue
            pairs = [
                (child.strip(), parent.strip())
                for child, parent in zip(child_col.cells, parent_col.cells)
                if not is_null(child) and not is_null(parent)
            ]
            if pairs and _edges_acyclic(pairs):
                return True
    return False


def _detect_network(columns: list[Column], types: dict[str, AttributeType],
                    config: InferenceConfig) -> bool:
    """Edge list: two discrete columns drawing from one shared value domain."""
    discrete = [c for c in columns if types.get(c.name) in GROUPING_TYPES
                or types.get(c.name) == AttributeType.IDENTIFIER_TEXT]
    for i, left in enumerate(discrete):
        left_values = {v.strip().lower() for v in left.non_null()}
        for right in discrete[i + 1:]:
            right_values = {v.strip().lower() for v in right.non_null()}
            if not left_values or not right_values:
                continue
            overlap = len(left_values & right_values)
            if overlap / min(len(left_values), len(right_values)) >= config.network_overlap:
                return True
    return False


def profile(dataset: Dataset, selected: list[str],
            config: InferenceConfig = DEFAULT_CONFIG) -> DataProfile:
    """Profile a dataset over a non-empty selection of its columns."""
    if not selected:
        raise ValueError("select at least one column")
    for name in selected:
        dataset.column(name)  # raises UnknownColumnError

    selected_set = set(selected)
    column_profiles = tuple(
        _column_profile(column, column.name in selected_set, config)
        for column in dataset.columns
    )
    types = {p.name: p.attribute_type for p in column_profiles
             if p.attribute_type is not None}
    selected_columns = [dataset.column(name) for name in selected]

    type_counts: dict[AttributeType, int] = {}
    for name in selected:
        attr = types[name]
        type_counts[attr] = type_counts.get(attr, 0) + 1

    cardinalities = [
        p.distinct_count for p in column_profiles
        if p.name in selected_set and p.attribute_type in GROUPING_TYPES
    ]
    return DataProfile(
        columns=column_profiles,
        selected=tuple(selected),
        type_counts=type_counts,
        has_geospatial=any(types[n] in GEOSPATIAL_TYPES for n in selected),
        has_temporal=any(types[n] is AttributeType.TEMPORAL for n in selected),
        has_hierarchy=_detect_hierarchy(selected_columns, types),
        has_network_edges=_detect_network(selected_columns, types, config),
        max_categorical_cardinality=max(cardinalities, default=0),
    )


# Groupings with more parts than this read poorly in part-of-whole charts.
FEW_PARTS_MAX = 7


def _yes_no(value: bool) -> str:
    return "yes" if value else "no"


def answer_from_profile(feature_key: str, data_profile: DataProfile) -> str | None:
    """Answer one data-characteristics question from a profile.

    Returns the answer token, or ``None`` when the profile cannot decide
    (the caller then falls back to don't-know routing). Task-intent keys
    are rejected: they describe what the user wants, not what the data is.
    """
    if feature_key != "data" and not feature_key.startswith("data."):
        raise TaskFeatureError(feature_key)

    p = data_profile
    quantitative = p.count(AttributeType.QUANTITATIVE)
    groupings = p.count(*GROUPING_TYPES)
    text = p.count(AttributeType.IDENTIFIER_TEXT)
    has_points = (p.count(AttributeType.GEOSPATIAL_LAT) >= 1
                  and p.count(AttributeType.GEOSPATIAL_LON) >= 1)

    if feature_key == "data.structure":
        if p.has_geospatial:
            return "spatial"
        if p.has_hierarchy:
            return "hierarchy"
        if p.has_network_edges:
            return "network"
        if p.has_temporal:
            return "over-time"
        return "plain"
    if feature_key == "data.spatial":
        return _yes_no(p.has_geospatial)
    if feature_key == "data.spatial.points":
        return _yes_no(has_points)
    if feature_key == "data.spatial.connections":
        return _yes_no(p.has_geospatial and p.has_network_edges)
    if feature_key == "data.over-time":
        return _yes_no(p.has_temporal)
    if feature_key == "data.network":
        return _yes_no(p.has_network_edges)
    if feature_key == "data.hierarchy":
        return _yes_no(p.has_hierarchy)
    if feature_key == "data.quantitative":
        return _yes_no(quantitative >= 1)
    if feature_key == "data.quantitative.count":
        if quantitative == 0:
            return "none"
        if quantitative == 1:
            return "one"
        if quantitative == 2:
            return "two"
        if quantitative <= 4:
            return "three-or-four"
        return "five-or-more"
    if feature_key == "data.categorical.count":
        if groupings == 0:
            return "none"
        if groupings == 1:
            return "one"
        return "several"
    if feature_key == "data.categorical.cardinality":
        return "few" if p.max_categorical_cardinality <= FEW_PARTS_MAX else "many"
    if feature_key == "data.text":
        return _yes_no(text >= 1 and quantitative == 0)
    return None


@dataclass(frozen=True)
class EligibilityReport:
    eligible: bool
    failed: tuple[EligibilityCondition, ...]

    def reasons(self) -> list[str]:
        return [condition.describe() for condition in self.failed]


def _condition_holds(condition: EligibilityCondition, data_profile: DataProfile) -> bool:
    if condition.kind is ConditionKind.ATTRIBUTE_COUNT:
        count = data_profile.count(AttributeType(condition.attribute))
        if condition.min_count is not None and count < condition.min_count:
            return False
        if condition.max_count is not None and count > condition.max_count:
            return False
        return True
    if condition.kind is ConditionKind.MAX_CARDINALITY:
        return data_profile.max_categorical_cardinality <= condition.max_cardinality
    flag = condition.flag
    if flag is StructuralFlag.HIERARCHY:
        return data_profile.has_hierarchy
    if flag is StructuralFlag.NETWORK:
        return data_profile.has_network_edges
    if flag is StructuralFlag.GEOSPATIAL:
        return data_profile.has_geospatial
    return data_profile.has_temporal


def check_eligibility(leaf: VisualizationLeaf,
                      data_profile: DataProfile) -> EligibilityReport:
    """Evaluate a leaf's eligibility conditions as a reported conjunction."""
    failed = tuple(c for c in leaf.eligibility
                   if not _condition_holds(c, data_profile))
    return EligibilityReport(eligible=not failed, failed=failed)
