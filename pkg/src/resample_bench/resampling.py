"""SMOTE oversampling, SMUTE undersampling, their CSMOUTE combination,
and the random baselines (RUS/ROS).

All resamplers are pure functions of (input matrices, parameters, rng).
Row identity is tracked explicitly: within each class, original rows get
ids 0..m-1 and synthetic rows get fresh ids in creation order, so lineage
records stay valid even after SMUTE deletes rows.

The combined method derives one sub-stream per half from the run seed
(seed+"smote", seed+"smute"), which makes csmoute at ratio 1 bit-identical
to running smote alone under the same seed, and ratio 0 identical to
smute alone.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import InfeasibleError
from .neighbors import order_by_distance
from .rng import substream

__all__ = [
    "ResampleConfig",
    "Lineage",
    "ClassResample",
    "ResampleResult",
    "METHODS",
    "round_half_away",
    "smote",
    "smute",
    "rus",
    "ros",
    "csmoute",
    "apply_method",
]

METHODS = ("none", "rus", "ros", "smote", "smute", "csmoute")


@dataclass(frozen=True)
class ResampleConfig:
    """Everything that determines a csmoute run."""

    k_smote: int = 5
    k_smute: int = 5
    ratio: float = 0.5
    seed: int = 0
    smute_originals_only: bool = False

    def __post_init__(self):
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError("ratio must be in [0, 1], got %r" % (self.ratio,))
        if self.k_smote < 1 or self.k_smute < 1:
            raise ValueError("neighbor counts must be >= 1")


@dataclass(frozen=True)
class Lineage:
    """One synthetic row: its id, its two parent ids, and the coefficient r
    with synthetic = parent_a + r * (parent_b - parent_a)."""

    synthetic_id: int
    parents: tuple
    r: float


@dataclass(frozen=True)
class ClassResample:
    """Resampling outcome for one class.

    rows    output matrix
    ids     per-output-row id
    lineage one record per synthetic row created (creation order)
    removed ids deleted (SMUTE merges / RUS drops), in deletion order
    archive row coordinates for every id ever alive, indexed by id
    """

    rows: np.ndarray
    ids: np.ndarray
    lineage: tuple
    removed: tuple
    archive: np.ndarray


@dataclass(frozen=True)
class ResampleResult:
    majority: ClassResample
    minority: ClassResample

    @property
    def majority_out(self) -> np.ndarray:
        return self.majority.rows

    @property
    def minority_out(self) -> np.ndarray:
        return self.minority.rows

    @property
    def removed(self) -> tuple:
        return self.majority.removed + self.minority.removed


def round_half_away(x: float) -> int:
    """round() with halves going away from zero (0.5 -> 1), applied to the
    float product n*ratio; documented because it can change sizes by 1."""
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def _identity(rows: np.ndarray) -> ClassResample:
    rows = np.asarray(rows, dtype=float)
    return ClassResample(
        rows=rows,
        ids=np.arange(len(rows), dtype=np.int64),
        lineage=(),
        removed=(),
        archive=rows,
    )


def smote(minority: np.ndarray, k: int, n: int, rng) -> ClassResample:
    """Append n synthetic minority rows by segment interpolation.

    Each synthetic picks x1 uniformly from the original minority set, x2
    uniformly from the min(k, m-1) nearest minority neighbors of x1, and
    r uniform on [0, 1]. Originals are preserved verbatim as a prefix, so
    output ids coincide with row positions.
    """
    minority = np.asarray(minority, dtype=float)
    if n < 0:
        raise ValueError("n must be >= 0, got %d" % n)
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    if n == 0:
        return _identity(minority)
    m = len(minority)
    if m < 2:
        raise InfeasibleError(
            "SMOTE needs at least 2 minority rows to interpolate, got %d" % m
        )
    nn = min(k, m - 1)
    # the candidate set is static, so the neighbor table is computed once
    neighbor_table = np.empty((m, nn), dtype=np.int64)
    for i in range(m):
        order, _ = order_by_distance(minority, minority[i])
        order = order[order != i]
        neighbor_table[i] = order[:nn]

    idx1 = rng.integers(0, m, size=n)
    pick = rng.integers(0, nn, size=n)
    r = rng.random(size=n)
    idx2 = neighbor_table[idx1, pick]
    x1 = minority[idx1]
    synthetic = x1 + r[:, None] * (minority[idx2] - x1)

    rows = np.vstack([minority, synthetic])
    lineage = tuple(
        Lineage(synthetic_id=m + t, parents=(int(idx1[t]), int(idx2[t])), r=float(r[t]))
        for t in range(n)
    )
    return ClassResample(
        rows=rows,
        ids=np.arange(m + n, dtype=np.int64),
        lineage=lineage,
        removed=(),
        archive=rows,
    )


def smute(majority: np.ndarray, k: int, n: int, rng, originals_only: bool = False) -> ClassResample:
    """Shrink the majority by n via pairwise merges.

    Each of the n iterations picks x1 uniformly from the CURRENT set
    (synthetics included), x2 uniformly from the min(k, size-1) nearest
    current neighbors of x1, replaces both with x1 + r*(x2 - x1), for a
    net -1 per iteration. originals_only restricts the x2 candidate pool
    to surviving original rows (falling back to the full set if none are
    left to choose from).
    """
    majority = np.asarray(majority, dtype=float)
    if n < 0:
        raise ValueError("n must be >= 0, got %d" % n)
    if k < 1:
        raise ValueError("k must be >= 1, got %d" % k)
    if n == 0:
        return _identity(majority)
    m = len(majority)
    if m - n < 2:
        raise InfeasibleError(
            "cannot remove %d of %d majority rows (at least 2 must remain)" % (n, m)
        )

    archive = np.empty((m + n, majority.shape[1]), dtype=float)
    archive[:m] = majority
    alive = list(range(m))  # kept sorted: originals ascend, synthetics append at max
    lineage = []
    removed = []
    for t in range(n):
        ids = np.asarray(alive, dtype=np.int64)
        current = archive[ids]
        size = len(ids)
        pos1 = int(rng.integers(0, size))
        id1 = int(ids[pos1])

        if originals_only:
            cand_mask = ids < m
            cand_mask[pos1] = False
            if not cand_mask.any():
                cand_mask = np.ones(size, dtype=bool)
                cand_mask[pos1] = False
        else:
            cand_mask = np.ones(size, dtype=bool)
            cand_mask[pos1] = False
        cand_pos = np.nonzero(cand_mask)[0]
        order, _ = order_by_distance(current[cand_pos], current[pos1])
        nn = min(k, len(cand_pos))
        pick = int(rng.integers(0, nn))
        id2 = int(ids[cand_pos[order[pick]]])

        r = float(rng.random())
        new_id = m + t
        archive[new_id] = archive[id1] + r * (archive[id2] - archive[id1])
        alive.remove(id1)
        alive.remove(id2)
        alive.append(new_id)
        removed += [id1, id2]
        lineage.append(Lineage(synthetic_id=new_id, parents=(id1, id2), r=r))

    ids = np.asarray(alive, dtype=np.int64)
    return ClassResample(
        rows=archive[ids],
        ids=ids,
        lineage=tuple(lineage),
        removed=tuple(removed),
        archive=archive,
    )


def rus(majority: np.ndarray, n: int, rng) -> ClassResample:
    """Drop n majority rows uniformly without replacement, keeping the
    survivors in their original order."""
    majority = np.asarray(majority, dtype=float)
    m = len(majority)
    if not 0 <= n <= m - 1:
        raise InfeasibleError("cannot remove %d of %d majority rows" % (n, m))
    if n == 0:
        return _identity(majority)
    keep = np.sort(rng.permutation(m)[: m - n])
    dropped = tuple(sorted(set(range(m)) - set(int(i) for i in keep)))
    return ClassResample(
        rows=majority[keep],
        ids=keep.astype(np.int64),
        lineage=(),
        removed=dropped,
        archive=majority,
    )


def ros(minority: np.ndarray, n: int, rng) -> ClassResample:
    """Append n duplicates of uniformly drawn minority rows."""
    minority = np.asarray(minority, dtype=float)
    if n < 0:
        raise ValueError("n must be >= 0, got %d" % n)
    m = len(minority)
    if m == 0:
        raise InfeasibleError("cannot oversample an empty minority")
    if n == 0:
        return _identity(minority)
    picks = rng.integers(0, m, size=n)
    rows = np.vstack([minority, minority[picks]])
    lineage = tuple(
        Lineage(synthetic_id=m + t, parents=(int(picks[t]), int(picks[t])), r=0.0)
        for t in range(n)
    )
    return ClassResample(
        rows=rows,
        ids=np.arange(m + n, dtype=np.int64),
        lineage=lineage,
        removed=(),
        archive=rows,
    )


def csmoute(majority: np.ndarray, minority: np.ndarray, config: ResampleConfig) -> ResampleResult:
    """Split the class-size gap n between SMOTE and SMUTE.

    n_smote = round(n * ratio) (halves away from zero), n_smute is the
    remainder, so both output classes end up at exactly
    |minority| + n_smote rows.
    """
    majority = np.asarray(majority, dtype=float)
    minority = np.asarray(minority, dtype=float)
    if len(majority) < len(minority):
        raise InfeasibleError(
            "majority (%d) smaller than minority (%d)" % (len(majority), len(minority))
        )
    n = len(majority) - len(minority)
    n_smote = round_half_away(n * config.ratio)
    n_smute = n - n_smote
    minority_out = smote(minority, config.k_smote, n_smote, substream(config.seed, "smote"))
    majority_out = smute(
        majority,
        config.k_smute,
        n_smute,
        substream(config.seed, "smute"),
        originals_only=config.smute_originals_only,
    )
    return ResampleResult(majority=majority_out, minority=minority_out)


def apply_method(
    method: str,
    majority: np.ndarray,
    minority: np.ndarray,
    seed: int,
    k_smote: int = 5,
    k_smute: int = 5,
    ratio: float = 0.5,
    smute_originals_only: bool = False,
) -> ResampleResult:
    """Run a named resampler up to exact class balance.

    Every method closes the full gap n = |majority| - |minority|. Each
    consumes a sub-stream named after itself, so the same seed never
    couples two methods' draws.
    """
    majority = np.asarray(majority, dtype=float)
    minority = np.asarray(minority, dtype=float)
    if len(majority) < len(minority):
        raise InfeasibleError(
            "majority (%d) smaller than minority (%d)" % (len(majority), len(minority))
        )
    n = len(majority) - len(minority)
    if method == "none":
        return ResampleResult(majority=_identity(majority), minority=_identity(minority))
    if method == "rus":
        return ResampleResult(
            majority=rus(majority, n, substream(seed, "rus")),
            minority=_identity(minority),
        )
    if method == "ros":
        return ResampleResult(
            majority=_identity(majority),
            minority=ros(minority, n, substream(seed, "ros")),
        )
    if method == "smote":
        return ResampleResult(
            majority=_identity(majority),
            minority=smote(minority, k_smote, n, substream(seed, "smote")),
        )
    if method == "smute":
        return ResampleResult(
            majority=smute(
                majority, k_smute, n, substream(seed, "smute"),
                originals_only=smute_originals_only,
            ),
            minority=_identity(minority),
        )
    if method == "csmoute":
        return csmoute(
            majority,
            minority,
            ResampleConfig(
                k_smote=k_smote,
                k_smute=k_smute,
                ratio=ratio,
                seed=seed,
                smute_originals_only=smute_originals_only,
            ),
        )
    raise ValueError("unknown method %r (choose from %s)" % (method, ", ".join(METHODS)))
