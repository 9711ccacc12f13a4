"""Dataset representation, KEEL/CSV ingestion, encoding and standardization.

A LabeledDataset is an immutable feature matrix plus a binary class tag per
row. The smaller class is always the "minority"; loaders relabel on input
so downstream code never has to check which original label was which.
"""

import csv
import io
import re
import warnings
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ParseError",
    "ValidationError",
    "InfeasibleError",
    "LabeledDataset",
    "DatasetSummary",
    "Scaler",
    "parse_keel",
    "parse_csv",
    "encode_categoricals",
    "standardize",
    "summarize",
    "write_csv",
]

MINORITY = 1
MAJORITY = 0

NUMERIC = "numeric"
CATEGORICAL = "categorical"
CATEGORICAL_ENCODED = "categorical-encoded"

_MISSING_MARKERS = {"?", "<null>", ""}


class ParseError(ValueError):
    """Raised when an input file violates its format."""


class ValidationError(ValueError):
    """Raised when a parsed dataset violates a semantic requirement."""


class InfeasibleError(ValueError):
    """Raised when an operation is impossible for the given sizes/config."""


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with binary labels (1 = minority, 0 = majority).

    features is float64 once fully numeric; datasets carrying raw
    categorical values hold an object matrix until encode_categoricals
    runs. Arrays are read-only, so instances are safe to share across
    workers.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_kinds: tuple
    feature_names: tuple
    label_names: tuple = ("positive", "negative")  # (minority, majority)
    class_name: str = "class"

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ValidationError("features must be a 2-d matrix")
        if len(self.features) != len(self.labels):
            raise ValidationError(
                "row count mismatch: %d features vs %d labels"
                % (len(self.features), len(self.labels))
            )
        if len(self.feature_kinds) != self.features.shape[1]:
            raise ValidationError("feature_kinds length must match columns")
        n_min = int(np.sum(self.labels == MINORITY))
        n_maj = int(np.sum(self.labels == MAJORITY))
        if n_min == 0 or n_maj == 0:
            raise ValidationError("both classes must be present")
        if n_min > n_maj:
            raise ValidationError("minority class larger than majority")
        self.features.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_minority(self) -> int:
        return int(np.sum(self.labels == MINORITY))

    @property
    def n_majority(self) -> int:
        return int(np.sum(self.labels == MAJORITY))

    @property
    def imbalance_ratio(self) -> float:
        return self.n_majority / self.n_minority

    def minority_rows(self) -> np.ndarray:
        return self.features[self.labels == MINORITY]

    def majority_rows(self) -> np.ndarray:
        return self.features[self.labels == MAJORITY]


@dataclass(frozen=True)
class DatasetSummary:
    imbalance_ratio: float
    n_samples: int
    n_features: int


@dataclass(frozen=True)
class Scaler:
    """Fitted per-column centering/scaling, reapplicable to held-out rows."""

    mean: np.ndarray
    scale: np.ndarray

    def transform(self, features: np.ndarray) -> np.ndarray:
        return (np.asarray(features, dtype=float) - self.mean) / self.scale


def summarize(ds: LabeledDataset) -> DatasetSummary:
    return DatasetSummary(ds.imbalance_ratio, ds.n_samples, ds.n_features)


def _relabel(raw_labels, order, name):
    """Map raw class values to minority/majority by frequency.

    order: sequence of class values used to break an exact count tie
    (first entry wins minority).
    """
    counts = Counter(raw_labels)
    if len(counts) < 2:
        raise ValidationError("%s: only one class present" % name)
    if len(counts) > 2:
        raise ValidationError(
            "%s: %d classes found, binary data required" % (name, len(counts))
        )
    (a, ca), (b, cb) = counts.most_common()
    if ca == cb:
        first = next(v for v in order if v in counts)
        minority_value = first
    else:
        minority_value = b
    majority_value = a if minority_value == b else b
    labels = np.fromiter(
        (MINORITY if v == minority_value else MAJORITY for v in raw_labels),
        dtype=np.int8,
        count=len(raw_labels),
    )
    return labels, (str(minority_value), str(majority_value))


def _build_matrix(columns, kinds):
    if any(k == CATEGORICAL for k in kinds):
        mat = np.empty((len(columns[0]), len(columns)), dtype=object)
        for j, col in enumerate(columns):
            mat[:, j] = col
        return mat
    return np.column_stack([np.asarray(c, dtype=float) for c in columns])


def parse_keel(text: str, name: str = "") -> LabeledDataset:
    """Parse a KEEL .dat file into a LabeledDataset.

    Handles the format as found in the wild: optional @inputs/@outputs,
    ranges with or without spaces, nominal value lists, and '@relation'
    glued to its argument. The class attribute is the one named by
    @outputs, or the last declared attribute otherwise. Rows with missing
    values are rejected.
    """
    relation = name
    attributes = []  # (name, kind, nominal_values or None)
    outputs = None
    data_rows = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        low = line.lower()
        if not in_data and line.startswith("@"):
            if low.startswith("@relation"):
                relation = line[len("@relation"):].strip() or relation
            elif low.startswith("@attribute"):
                body = line[len("@attribute"):].strip()
                if "{" in body:
                    attr_name = body.split("{", 1)[0].strip().rstrip(",")
                    values = body[body.index("{") + 1 : body.rindex("}")]
                    nominal = tuple(v.strip() for v in values.split(","))
                    if not attr_name or not nominal:
                        raise ParseError("line %d: malformed attribute" % lineno)
                    attributes.append((attr_name, CATEGORICAL, nominal))
                else:
                    parts = body.split(None, 1)
                    if not parts:
                        raise ParseError("line %d: malformed attribute" % lineno)
                    m = re.match(r"([^\s\[]+)", parts[0])
                    attributes.append((m.group(1), NUMERIC, None))
            elif low.startswith("@outputs"):
                outputs = [t.strip() for t in line[len("@outputs"):].split(",") if t.strip()]
            elif low.startswith("@inputs") or low.startswith("@input"):
                pass
            elif low.startswith("@data"):
                in_data = True
            else:
                raise ParseError("line %d: unknown directive %r" % (lineno, line.split()[0]))
        elif in_data:
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != len(attributes):
                raise ParseError(
                    "line %d: expected %d fields, got %d"
                    % (lineno, len(attributes), len(fields))
                )
            if any(f in _MISSING_MARKERS for f in fields):
                raise ParseError("line %d: missing value" % lineno)
            data_rows.append(fields)
        else:
            raise ParseError("line %d: data before @data section" % lineno)
    if not attributes:
        raise ParseError("no @attribute declarations found")
    if not data_rows:
        raise ParseError("no data rows found")

    attr_names = [a[0] for a in attributes]
    if outputs:
        if len(outputs) != 1:
            raise ParseError("exactly one output attribute is supported")
        if outputs[0] not in attr_names:
            raise ParseError("@outputs names unknown attribute %r" % outputs[0])
        class_idx = attr_names.index(outputs[0])
    else:
        class_idx = len(attributes) - 1

    class_name, _, class_values = attributes[class_idx]
    raw_labels = [row[class_idx] for row in data_rows]
    if class_values is not None:
        known = set(class_values)
        for lineno_offset, value in enumerate(raw_labels):
            if value not in known:
                raise ParseError(
                    "unknown class label %r in data row %d" % (value, lineno_offset + 1)
                )
    labels, label_names = _relabel(
        raw_labels, class_values if class_values is not None else raw_labels, relation or "dataset"
    )

    feat_indices = [i for i in range(len(attributes)) if i != class_idx]
    feat_attrs = [attributes[i] for i in feat_indices]
    columns = []
    for src, (attr_name, kind, _) in zip(feat_indices, feat_attrs):
        raw = [row[src] for row in data_rows]
        if kind == NUMERIC:
            try:
                columns.append([float(v) for v in raw])
            except ValueError as exc:
                raise ParseError("attribute %s: %s" % (attr_name, exc)) from exc
        else:
            columns.append(raw)
    kinds = tuple(a[1] for a in feat_attrs)
    return LabeledDataset(
        name=relation or "dataset",
        features=_build_matrix(columns, kinds),
        labels=labels,
        feature_kinds=kinds,
        feature_names=tuple(a[0] for a in feat_attrs),
        label_names=label_names,
        class_name=class_name,
    )


def parse_csv(
    text: str,
    class_column: str,
    minority_label: str,
    name: str = "dataset",
) -> LabeledDataset:
    """Parse a headered CSV. Numeric columns are auto-detected; anything
    else is tagged categorical. minority_label must occur in the class
    column; it breaks exact count ties, but the smaller class always ends
    up as the minority (a warning is emitted if that contradicts the
    caller's label).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("%s: empty file" % name) from None
    header = [h.strip() for h in header]
    if class_column not in header:
        raise ValidationError("%s: class column %r not found" % (name, class_column))
    class_idx = header.index(class_column)

    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise ParseError(
                "%s line %d: expected %d fields, got %d" % (name, lineno, len(header), len(row))
            )
        fields = [f.strip() for f in row]
        if any(f in _MISSING_MARKERS for f in fields):
            raise ParseError("%s line %d: missing value" % (name, lineno))
        rows.append(fields)
    if not rows:
        raise ParseError("%s: no data rows" % name)

    raw_labels = [r[class_idx] for r in rows]
    if minority_label not in raw_labels:
        raise ValidationError(
            "%s: minority label %r never occurs in column %r"
            % (name, minority_label, class_column)
        )
    labels, label_names = _relabel(raw_labels, [minority_label], name)
    if label_names[0] != minority_label:
        warnings.warn(
            "%s: label %r is the larger class; relabelled %r as minority"
            % (name, minority_label, label_names[0])
        )

    columns, kinds, feat_names = [], [], []
    for j, col_name in enumerate(header):
        if j == class_idx:
            continue
        raw = [r[j] for r in rows]
        try:
            columns.append([float(v) for v in raw])
            kinds.append(NUMERIC)
        except ValueError:
            columns.append(raw)
            kinds.append(CATEGORICAL)
        feat_names.append(col_name)
    return LabeledDataset(
        name=name,
        features=_build_matrix(columns, tuple(kinds)),
        labels=labels,
        feature_kinds=tuple(kinds),
        feature_names=tuple(feat_names),
        label_names=label_names,
        class_name=class_column,
    )


def encode_categoricals(ds: LabeledDataset) -> LabeledDataset:
    """Replace each raw categorical column with integer codes.

    Codes are assigned in order of first appearance over the rows, which
    makes the encoding a pure function of the file bytes. Numeric columns
    pass through untouched.
    """
    if CATEGORICAL not in ds.feature_kinds:
        return ds
    out = np.empty(ds.features.shape, dtype=float)
    kinds = []
    for j, kind in enumerate(ds.feature_kinds):
        col = ds.features[:, j]
        if kind == CATEGORICAL:
            codes = {}
            encoded = np.empty(len(col), dtype=float)
            for i, v in enumerate(col):
                if v not in codes:
                    codes[v] = len(codes)
                encoded[i] = codes[v]
            out[:, j] = encoded
            kinds.append(CATEGORICAL_ENCODED)
        else:
            out[:, j] = col.astype(float)
            kinds.append(kind)
    return replace(ds, features=out, feature_kinds=tuple(kinds))


def standardize(ds: LabeledDataset):
    """Center each column to mean 0 and scale to unit population variance.

    Returns (standardized dataset, fitted Scaler). Zero-variance columns
    keep scale 1 (the column becomes all zeros) with a warning.
    """
    if CATEGORICAL in ds.feature_kinds:
        raise ValidationError("run encode_categoricals before standardize")
    X = np.asarray(ds.features, dtype=float)
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    degenerate = scale == 0.0
    if degenerate.any():
        cols = [ds.feature_names[j] for j in np.nonzero(degenerate)[0]]
        warnings.warn("%s: zero-variance column(s) %s" % (ds.name, ", ".join(cols)))
        scale = scale.copy()
        scale[degenerate] = 1.0
    scaler = Scaler(mean=mean, scale=scale)
    return replace(ds, features=scaler.transform(X)), scaler


def _format_value(v) -> str:
    if isinstance(v, str):
        return v
    f = float(v)
    if f.is_integer() and abs(f) < 1e16:
        return str(int(f))
    return repr(f)


def write_csv(ds: LabeledDataset) -> str:
    """Serialize to headered CSV that parse_csv round-trips exactly.

    Floats are written in shortest round-trip form; integral values drop
    the trailing '.0' so untouched rows match typical source files.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(ds.feature_names) + [ds.class_name])
    min_name, maj_name = ds.label_names
    for i in range(ds.n_samples):
        row = [_format_value(v) for v in ds.features[i]]
        row.append(min_name if ds.labels[i] == MINORITY else maj_name)
        writer.writerow(row)
    return buf.getvalue()
