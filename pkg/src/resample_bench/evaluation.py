"""5x2 cross-validation harness, imbalance-aware metrics, and the two
built-in classifiers (logistic regression, k-NN).

The minority class is the positive class everywhere. Classifiers emit a
real score per row (estimated minority probability); confusion-based
metrics threshold it, AUC consumes it directly.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .core import InfeasibleError, LabeledDataset, MINORITY, encode_categoricals, standardize, Scaler
from .resampling import apply_method
from .rng import derive_seed, substream

__all__ = [
    "METRICS",
    "MetricReport",
    "FoldPlan",
    "make_fold_plan",
    "confusion",
    "f_measure",
    "g_mean",
    "auc",
    "LogisticModel",
    "KnnModel",
    "train_logistic",
    "train_knn",
    "fit_classifier",
    "EvaluationReport",
    "evaluate",
]

METRICS = ("f_measure", "auc", "g_mean")


# ---------------------------------------------------------------------------
# metrics

@dataclass(frozen=True)
class MetricReport:
    tp: int
    fp: int
    tn: int
    fn: int
    f_measure: float
    auc: float  # None when the fold had a single class
    g_mean: float

    def value(self, metric: str):
        return getattr(self, metric)


def confusion(y_true, y_pred):
    """(tp, fp, tn, fn) with minority (label 1) as the positive class."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("length mismatch: %s vs %s" % (y_true.shape, y_pred.shape))
    t = y_true == MINORITY
    p = y_pred == MINORITY
    tp = int(np.sum(t & p))
    fp = int(np.sum(~t & p))
    tn = int(np.sum(~t & ~p))
    fn = int(np.sum(t & ~p))
    return tp, fp, tn, fn


def f_measure(tp: int, fp: int, fn: int) -> float:
    """Harmonic mean of precision and recall; 1 when nothing to find and
    nothing found, 0 when tp=0 with any error."""
    if tp == 0:
        return 1.0 if fp == 0 and fn == 0 else 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def g_mean(tp: int, fn: int, tn: int, fp: int) -> float:
    """sqrt(sensitivity * specificity). An absent class contributes a
    factor of 1 (with a warning); a fully misclassified class gives 0."""
    if tp + fn == 0:
        warnings.warn("g_mean: no positive rows in fold, sensitivity factor set to 1")
        sens = 1.0
    else:
        sens = tp / (tp + fn)
    if tn + fp == 0:
        warnings.warn("g_mean: no negative rows in fold, specificity factor set to 1")
        spec = 1.0
    else:
        spec = tn / (tn + fp)
    return float(np.sqrt(sens * spec))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks of values (ascending), ties sharing their mean rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(scores, y_true) -> float:
    """Rank-based ROC AUC: the fraction of (minority, majority) pairs where
    the minority row scores higher, ties counting one half."""
    scores = np.asarray(scores, dtype=float)
    y_true = np.asarray(y_true)
    pos = y_true == MINORITY
    n_pos = int(pos.sum())
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("auc undefined: a single class in y_true")
    ranks = _average_ranks(scores)
    r_pos = ranks[pos].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


# ---------------------------------------------------------------------------
# classifiers

def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    kind: str = "logistic-regression"

    def predict_scores(self, X) -> np.ndarray:
        return _sigmoid(np.asarray(X, dtype=float) @ self.weights + self.bias)


def train_logistic(X, y, l2: float = 1.0, learning_rate: float = 0.1, n_iter: int = 1000) -> LogisticModel:
    """Full-batch gradient descent on mean log-loss + 0.5*l2*||w||^2.

    Zero initialization and a fixed iteration count keep training fully
    deterministic. The penalty is not divided by n, so duplicating every
    row leaves the fitted decision function unchanged. The bias is not
    penalized.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature values")
    n = len(X)
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(n_iter):
        p = _sigmoid(X @ w + b)
        err = p - y
        grad_w = X.T @ err / n + l2 * w
        grad_b = float(err.mean())
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    return LogisticModel(weights=w, bias=b)


@dataclass(frozen=True)
class KnnModel:
    train_X: np.ndarray
    train_y: np.ndarray
    k: int
    kind: str = "knn-classifier"

    def predict_scores(self, X) -> np.ndarray:
        """Minority fraction among the k nearest training rows.

        Distance ties break by ascending training-row index, resolved
        within a bounded candidate window (k+64) so scoring stays linear
        in the training size.
        """
        X = np.asarray(X, dtype=float)
        n_train = len(self.train_X)
        k = min(self.k, n_train)
        window = min(n_train, k + 64)
        sq_t = np.einsum("ij,ij->i", self.train_X, self.train_X)
        scores = np.empty(len(X))
        chunk = max(1, int(2**21 // max(1, n_train)))
        for start in range(0, len(X), chunk):
            q = X[start : start + chunk]
            d = sq_t[None, :] + np.einsum("ij,ij->i", q, q)[:, None] - 2.0 * (q @ self.train_X.T)
            if window < n_train:
                cand = np.argpartition(d, window - 1, axis=1)[:, :window]
            else:
                cand = np.broadcast_to(np.arange(n_train), (len(q), n_train))
            for i in range(len(q)):
                ci = cand[i]
                order = np.lexsort((ci, d[i, ci]))
                scores[start + i] = float(self.train_y[ci[order[:k]]].mean())
        return scores


def train_knn(X, y, k: int = 5) -> KnnModel:
    X = np.asarray(X, dtype=float)
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature values")
    if k < 1:
        raise ValueError("k must be >= 1")
    return KnnModel(train_X=X, train_y=np.asarray(y), k=k)


def fit_classifier(name: str, X, y, params: dict = None):
    params = dict(params or {})
    if name == "lr":
        return train_logistic(X, y, **params)
    if name == "knn":
        return train_knn(X, y, **params)
    raise ValueError("unknown classifier %r (choose lr or knn)" % name)


# ---------------------------------------------------------------------------
# folds

@dataclass(frozen=True)
class FoldPlan:
    """Five seeded stratified half-splits; each used twice (train/test
    swapped) for ten evaluations."""

    splits: tuple  # ((fold_a_ids, fold_b_ids), ...) x 5
    seed: int

    def evaluations(self):
        for rep, (a, b) in enumerate(self.splits):
            yield rep, 0, a, b
            yield rep, 1, b, a


def make_fold_plan(ds: LabeledDataset, seed: int) -> FoldPlan:
    if ds.n_minority < 2:
        raise InfeasibleError(
            "5x2 CV needs at least 2 minority rows, got %d" % ds.n_minority
        )
    rng = substream(seed, "fold-plan")
    min_idx = np.nonzero(ds.labels == MINORITY)[0]
    maj_idx = np.nonzero(ds.labels != MINORITY)[0]
    splits = []
    for _ in range(5):
        pm = rng.permutation(min_idx)
        pj = rng.permutation(maj_idx)
        a = np.sort(np.concatenate([pm[: len(pm) // 2], pj[: len(pj) // 2]]))
        b = np.sort(np.concatenate([pm[len(pm) // 2 :], pj[len(pj) // 2 :]]))
        a.setflags(write=False)
        b.setflags(write=False)
        splits.append((a, b))
    return FoldPlan(splits=tuple(splits), seed=seed)


# ---------------------------------------------------------------------------
# harness

@dataclass(frozen=True)
class FoldMetrics:
    repetition: int
    fold: int
    report: MetricReport


@dataclass(frozen=True)
class EvaluationReport:
    dataset: str
    method: str
    classifier: str
    per_fold: tuple
    averages: dict


def _fold_metrics(scores, y_true, threshold):
    y_pred = (scores >= threshold).astype(np.int8)
    tp, fp, tn, fn = confusion(y_true, y_pred)
    try:
        auc_value = auc(scores, y_true)
    except ValueError:
        warnings.warn("single-class test fold: AUC reported as missing")
        auc_value = None
    return MetricReport(
        tp=tp, fp=fp, tn=tn, fn=fn,
        f_measure=f_measure(tp, fp, fn),
        auc=auc_value,
        g_mean=g_mean(tp, fn, tn, fp),
    )


def evaluate(
    ds: LabeledDataset,
    resampler,
    classifier,
    seed: int,
    threshold: float = 0.5,
    fold_safe_scaling: bool = False,
) -> EvaluationReport:
    """Run the full 5x2 protocol for one (resampler, classifier) pair.

    resampler: (method name, params dict); classifier: (name, params dict).
    Per fold: scale -> resample the TRAINING half only -> fit -> score the
    untouched test half. By default the scaler is fit once on the full
    dataset (matching the source protocol); fold_safe_scaling refits it on
    each training fold instead.
    """
    method, method_params = resampler
    clf_name, clf_params = classifier
    encoded = encode_categoricals(ds)
    plan = make_fold_plan(encoded, seed)
    if not fold_safe_scaling:
        standardized, _ = standardize(encoded)
        Z_full = standardized.features
    per_fold = []
    for rep, fold, train_ids, test_ids in plan.evaluations():
        assert len(np.intersect1d(train_ids, test_ids)) == 0, "train/test leak"
        if fold_safe_scaling:
            train_raw = np.asarray(encoded.features, dtype=float)[train_ids]
            mean = train_raw.mean(axis=0)
            scale = train_raw.std(axis=0)
            scale[scale == 0.0] = 1.0
            scaler = Scaler(mean=mean, scale=scale)
            Ztr = scaler.transform(encoded.features[train_ids])
            Zte = scaler.transform(encoded.features[test_ids])
        else:
            Ztr = Z_full[train_ids]
            Zte = Z_full[test_ids]
        ytr = encoded.labels[train_ids]
        yte = encoded.labels[test_ids]
        fold_seed = derive_seed(seed, "resample", rep, fold)
        try:
            result = apply_method(
                method, Ztr[ytr != MINORITY], Ztr[ytr == MINORITY],
                seed=fold_seed, **method_params,
            )
        except InfeasibleError as exc:
            raise InfeasibleError(
                "%s: resampling failed on repetition %d fold %d: %s"
                % (ds.name, rep, fold, exc)
            ) from exc
        X_train = np.vstack([result.majority_out, result.minority_out])
        y_train = np.concatenate([
            np.zeros(len(result.majority_out), dtype=np.int8),
            np.ones(len(result.minority_out), dtype=np.int8),
        ])
        model = fit_classifier(clf_name, X_train, y_train, clf_params)
        scores = model.predict_scores(Zte)
        per_fold.append(FoldMetrics(rep, fold, _fold_metrics(scores, yte, threshold)))

    averages = {}
    for metric in METRICS:
        values = [fm.report.value(metric) for fm in per_fold]
        present = [v for v in values if v is not None]
        if len(present) < len(values):
            warnings.warn(
                "%s: %d fold(s) missing %s, averaging the rest"
                % (ds.name, len(values) - len(present), metric)
            )
        averages[metric] = float(np.mean(present)) if present else None
    return EvaluationReport(
        dataset=ds.name,
        method=method,
        classifier=clf_name,
        per_fold=tuple(per_fold),
        averages=averages,
    )
