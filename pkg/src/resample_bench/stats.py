"""Nonparametric comparison machinery: Wilcoxon signed-rank (exact and
normal-approximated), Friedman ranks with a Holm step-down post-hoc,
Pearson correlation, and win/loss/tie tabulation.

Tail probabilities (chi-square, Student t, normal) are computed in-repo
from the regularized incomplete gamma/beta functions so the package has
no runtime dependency beyond numpy; the test suite checks them against
independent references.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TestResult",
    "ComparisonTable",
    "chi2_sf",
    "t_sf_two_sided",
    "t_ppf",
    "normal_sf",
    "rank_row",
    "wilcoxon_signed_rank",
    "friedman",
    "holm_posthoc",
    "pearson",
    "win_loss_tie",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n_effective: int


# ---------------------------------------------------------------------------
# tail probabilities

def _gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), series/continued fraction."""
    if x < 0 or a <= 0:
        raise ValueError("invalid arguments to incomplete gamma")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        # series representation
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(500):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    # continued fraction for Q(a, x), modified Lentz
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    q = h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    return 1.0 - q


def chi2_sf(x: float, df: int) -> float:
    """P(X >= x) for a chi-square variable with df degrees of freedom."""
    if x <= 0:
        return 1.0
    return min(1.0, max(0.0, 1.0 - _gamma_p(df / 2.0, x / 2.0)))


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h


def _beta_inc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t with df degrees of freedom."""
    if df < 1:
        raise ValueError("df must be >= 1")
    x = df / (df + t * t)
    return min(1.0, max(0.0, _beta_inc(df / 2.0, 0.5, x)))


def t_ppf(q: float, df: int) -> float:
    """Upper-q critical value: the t with P(T > t) = q (one-sided), found
    by bisection on the monotone tail function."""
    if not 0.0 < q < 0.5:
        raise ValueError("q must be in (0, 0.5)")
    lo, hi = 0.0, 1.0
    while t_sf_two_sided(hi, df) / 2.0 > q:
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_sf_two_sided(mid, df) / 2.0 > q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def normal_sf(z: float) -> float:
    """P(Z >= z) for the standard normal."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# ranks

def rank_row(values) -> np.ndarray:
    """Competition-free ranks for one dataset: the best (largest) value
    gets rank 1; ties share the average of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


@dataclass(frozen=True)
class ComparisonTable:
    """methods x datasets metric matrix plus per-dataset ranks (1 = best)."""

    methods: tuple
    datasets: tuple
    values: np.ndarray

    @property
    def ranks(self) -> np.ndarray:
        out = np.empty_like(self.values)
        for j in range(self.values.shape[1]):
            out[:, j] = rank_row(self.values[:, j])
        return out

    def average_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=1)


# ---------------------------------------------------------------------------
# tests

def _signed_ranks(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("samples must have equal length")
    d = a - b
    d = d[d != 0.0]  # zero differences dropped (Wilcoxon's treatment)
    if len(d) == 0:
        return None, None
    ranks = np.empty(len(d))
    absd = np.abs(d)
    order = np.argsort(absd, kind="stable")
    i = 0
    while i < len(d):
        j = i
        while j + 1 < len(d) and absd[order[j + 1]] == absd[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return d, ranks


_EXACT_LIMIT = 20


def wilcoxon_signed_rank(a, b) -> TestResult:
    """Two-sided paired Wilcoxon signed-rank test.

    Zero differences are dropped. With at most 20 effective pairs the
    p-value is exact (all 2^n sign assignments, tied ranks included);
    beyond that a tie-corrected normal approximation is used. Requires at
    least 5 effective pairs unless every difference is zero, which is the
    degenerate p=1 result.
    """
    d, ranks = _signed_ranks(a, b)
    if d is None:
        return TestResult(statistic=0.0, p_value=1.0, n_effective=0)
    n = len(d)
    if n < 5:
        raise ValueError(
            "only %d non-zero difference(s); at least 5 required" % n
        )
    w_plus = float(ranks[d > 0].sum())
    total = float(ranks.sum())
    w = min(w_plus, total - w_plus)
    if n <= _EXACT_LIMIT:
        # distribution of W+ over all 2^n equiprobable sign assignments;
        # ranks doubled so tied (half-integer) ranks stay integral
        scaled = np.rint(ranks * 2).astype(np.int64)
        dist = np.zeros(int(scaled.sum()) + 1, dtype=np.float64)
        dist[0] = 1.0
        top = 0
        for s in scaled:
            dist[s : top + s + 1] += dist[0 : top + 1]
            top += s
        dist /= 2.0**n
        w_scaled = int(np.rint(w * 2))
        p = 2.0 * float(dist[: w_scaled + 1].sum())
    else:
        mean = n * (n + 1) / 4.0
        # tie correction over groups of equal |d|
        _, counts = np.unique(ranks, return_counts=True)
        tie_term = float(np.sum(counts.astype(float) ** 3 - counts)) / 48.0
        var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
        z = (w_plus - mean) / math.sqrt(var)
        p = 2.0 * normal_sf(abs(z))
    return TestResult(statistic=w, p_value=min(1.0, p), n_effective=n)


def friedman(values) -> tuple:
    """Friedman test over a methods x datasets matrix (larger = better).

    Returns (average ranks per method, TestResult). The statistic is the
    classic chi-square form over average ranks; ties within a dataset get
    average ranks (no additional tie correction term).
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("values must be a methods x datasets matrix")
    m, n_data = values.shape
    if m < 2 or n_data < 2:
        raise ValueError("need at least 2 methods and 2 datasets")
    ranks = np.empty_like(values)
    for j in range(n_data):
        ranks[:, j] = rank_row(values[:, j])
    avg = ranks.mean(axis=1)
    stat = 12.0 * n_data / (m * (m + 1)) * float(np.sum((avg - (m + 1) / 2.0) ** 2))
    p = chi2_sf(stat, m - 1)
    return avg, TestResult(statistic=stat, p_value=p, n_effective=n_data)


def holm_posthoc(raw_p_values, alpha: float = 0.05):
    """Holm step-down adjustment.

    raw_p_values are the unadjusted pairwise p-values against the control.
    Returns (adjusted p-values, significance flags at alpha), original
    order preserved.
    """
    ps = np.asarray(raw_p_values, dtype=float)
    m = len(ps)
    order = np.argsort(ps, kind="stable")
    adjusted = np.empty(m)
    running = 0.0
    for rank, idx in enumerate(order):
        running = max(running, (m - rank) * ps[idx])
        adjusted[idx] = min(1.0, running)
    flags = adjusted <= alpha
    return adjusted, flags


def pearson(x, y) -> TestResult:
    """Sample Pearson correlation with a two-sided t-test p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("samples must have equal length")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 pairs, got %d" % n)
    sx = x.std()
    sy = y.std()
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for constant input")
    r = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = t_sf_two_sided(t, n - 2)
    return TestResult(statistic=r, p_value=p, n_effective=n)


def win_loss_tie(a, b, tolerance: float = 0.0) -> tuple:
    """(wins, losses, ties) of a over b, elementwise; |a-b| <= tolerance
    counts as a tie."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("samples must have equal length")
    diff = a - b
    ties = np.abs(diff) <= tolerance
    wins = int(np.sum(~ties & (diff > 0)))
    losses = int(np.sum(~ties & (diff < 0)))
    return wins, losses, int(ties.sum())
