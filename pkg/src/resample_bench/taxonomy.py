"""Minority-instance taxonomy: safe / borderline / rare / outlier.

Each minority row is categorized by how many of its 5 nearest neighbors
(among all other rows, both classes) share its class:
5 or 4 -> safe, 3 or 2 -> borderline, 1 -> rare, 0 -> outlier.
Run it on encoded, standardized data; the neighborhood is Euclidean.
"""

from dataclasses import dataclass

import numpy as np

from .core import CATEGORICAL, InfeasibleError, LabeledDataset, MINORITY
from .neighbors import order_by_distance

__all__ = ["CATEGORIES", "NEIGHBORHOOD_SIZE", "MinorityTypeReport", "categorize"]

CATEGORIES = ("safe", "borderline", "rare", "outlier")
NEIGHBORHOOD_SIZE = 5

_BY_COUNT = {5: "safe", 4: "safe", 3: "borderline", 2: "borderline", 1: "rare", 0: "outlier"}


@dataclass(frozen=True)
class MinorityTypeReport:
    """per_instance: (row id, category, same-class neighbor count) per
    minority row; proportions: fraction of minority rows per category."""

    per_instance: tuple
    proportions: dict

    def counts(self) -> dict:
        out = {c: 0 for c in CATEGORIES}
        for _, category, _ in self.per_instance:
            out[category] += 1
        return out


def categorize(ds: LabeledDataset) -> MinorityTypeReport:
    if CATEGORICAL in ds.feature_kinds:
        raise ValueError("categorize needs encoded features; run encode_categoricals")
    if ds.n_samples < NEIGHBORHOOD_SIZE + 1:
        raise InfeasibleError(
            "categorize needs at least %d rows, got %d"
            % (NEIGHBORHOOD_SIZE + 1, ds.n_samples)
        )
    X = np.asarray(ds.features, dtype=float)
    labels = ds.labels
    per_instance = []
    for i in np.nonzero(labels == MINORITY)[0]:
        order, _ = order_by_distance(X, X[i])
        order = order[order != i][:NEIGHBORHOOD_SIZE]
        same = int(np.sum(labels[order] == MINORITY))
        per_instance.append((int(i), _BY_COUNT[same], same))
    n_min = len(per_instance)
    proportions = {
        c: sum(1 for _, cat, _ in per_instance if cat == c) / n_min for c in CATEGORIES
    }
    return MinorityTypeReport(per_instance=tuple(per_instance), proportions=proportions)
