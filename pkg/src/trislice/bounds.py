"""Exact counting bounds, the generating-function relaxation, and the growth constant.

Everything a certificate depends on is computed in exact integer or rational
arithmetic; the generating-function relaxation and the asymptotic optimization
run in decimal arithmetic at a configurable precision (default 50 digits).
Above a size threshold the per-weight tables switch to log-domain floats so
that million-dimensional scans stay sub-second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

from .tensors import TriangleParams, is_prime

DEFAULT_DIGITS = 50
LOG_MODE_THRESHOLD = 10_000


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k)."""
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"binomial needs 0 <= k <= n, got n={n} k={k}")
    return math.comb(n, k)


def count_low_weight(n: int, r: int) -> int:
    """Number of 0/1 vectors of length n with weight at most r, exactly."""
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    return sum(math.comb(n, j) for j in range(min(r, n) + 1))


def _to_decimal(t) -> Decimal:
    if isinstance(t, Decimal):
        return t
    if isinstance(t, Fraction):
        return Decimal(t.numerator) / Decimal(t.denominator)
    if isinstance(t, float):
        return Decimal(repr(t))
    return Decimal(t)


def gf_bound(n: int, r, t, digits: int = DEFAULT_DIGITS) -> Decimal:
    """(1+t)^n / t^r for t in (0,1): an upper bound on the weight-<=r count.

    Every term t^(j-r) of the expanded quotient is at least 1 for j <= r, so
    the value dominates count_low_weight(n, floor(r)) for any admissible t.
    """
    with localcontext() as ctx:
        ctx.prec = digits + 10
        td = _to_decimal(t)
        if not Decimal(0) < td < Decimal(1):
            raise ValueError(f"t must lie in (0,1), got {t}")
        rd = _to_decimal(r)
        value = (1 + td) ** n / td**rd
    return +value


def optimal_t(n: int, r: int) -> Fraction:
    """The minimizer t* = r/(n-r) of the generating-function bound.

    Verifies the stationary point by an exact sign change of the logarithmic
    derivative n/(1+t) - r/t across t*.
    """
    if not 0 < Fraction(r) < Fraction(n, 2):
        raise ValueError(f"need 0 < r < n/2, got n={n} r={r}")
    t_star = Fraction(r, n - r)

    def deriv(t: Fraction) -> Fraction:
        return Fraction(n, 1) / (1 + t) - Fraction(r, 1) / t

    left = t_star * Fraction(1023, 1024)
    right = t_star * Fraction(1025, 1024)
    if not (deriv(left) < 0 < deriv(right)):
        raise RuntimeError(f"derivative sign check failed at t* = {t_star}")
    return t_star


def rank_ceiling(params: TriangleParams, variant: str = "exact", digits: int = DEFAULT_DIGITS):
    """Ceiling on the size of any certified set: 3 * (weight-<=cap count).

    The exact variant counts the low-weight vectors outright; the gf variant
    evaluates the relaxation at the optimal t (falling back to the t->1 limit
    3 * 2^n when the cap reaches n/2, where the relaxation degenerates).
    """
    r = params.block_weight_cap
    n = params.n
    if variant == "exact":
        return 3 * count_low_weight(n, r)
    if variant == "gf":
        if 2 * r >= n:
            with localcontext() as ctx:
                ctx.prec = digits + 10
                return +(3 * Decimal(2) ** n)
        return +(3 * gf_bound(n, r, optimal_t(n, r), digits))
    raise ValueError(f"unknown variant {variant!r}")


def max_binomial_term(n: int, x) -> tuple[int, Fraction]:
    """Maximize C(n,k) x^k over 0 <= k <= n/2, exactly.

    Returns (k*, value); the value lies strictly between (1+x)^n/(n+1) and
    (1+x)^n for 0 < x < 1.
    """
    x = Fraction(x)
    if not 0 < x < 1:
        raise ValueError(f"x must lie in (0,1), got {x}")
    best_k, best_v = 0, Fraction(1)
    term = Fraction(1)
    for k in range(1, n // 2 + 1):
        term = term * x * (n - k + 1) / k  # C(n,k) x^k from C(n,k-1) x^(k-1)
        if term > best_v:
            best_k, best_v = k, term
    return best_k, best_v


def _advance_prime(p: int, k: int) -> int:
    # maintain the smallest odd prime p with 4p > k as k grows
    while 4 * p <= k:
        c = p + 2
        while not is_prime(c):
            c += 2
        p = c
    return p


@dataclass(frozen=True)
class BoundRow:
    """Lower-bound data for one (n, k): exact fields in exact mode, floats always.

    ratio is slice_size / rank_ceiling_exact as an exact rational and
    chromatic_lb its ceiling clamped at 1 (the raw rational stays visible, so
    vacuous small-n rows are not hidden). log_ratio and ratio_root use the
    generating-function ceiling and are comparable across both modes. eps0
    carries the n^0.525 error-term convention of the asymptotic analysis and
    eps0_correction the multiplicative o(1) it would cost the root.
    """

    n: int
    k: int
    p: int
    degree_bound: int
    block_weight_cap: int
    mode: str
    active_window: bool
    slice_size: int | None
    rank_ceiling_exact: int | None
    rank_ceiling_gf: Decimal | None
    t_star: Fraction | None
    ratio: Fraction | None
    chromatic_lb: int | None
    log_ratio: float
    ratio_root: float
    k_fraction: float
    eps0: float
    eps0_correction: float | None


@dataclass(frozen=True)
class BoundTable:
    n: int
    mode: str
    rows: tuple[BoundRow, ...]
    best: BoundRow


def _log_ceiling_and_t(n: int, r: int) -> tuple[float, float | None]:
    if 2 * r >= n:
        return math.log(3) + n * math.log(2), None
    t = r / (n - r)
    return math.log(3) + n * math.log1p(t) - r * math.log(t), t


def _row_exact(n: int, k: int, p: int, digits: int, ceiling: int | None = None) -> BoundRow:
    d = min(3 * n, n + 2 * (p - 1))
    r = d // 3
    params = TriangleParams(n=n, k=k, p=p, degree_bound=d, block_weight_cap=r)
    slice_size = math.comb(n, k)
    if ceiling is None:
        ceiling = 3 * count_low_weight(n, r)
    gf = rank_ceiling(params, "gf", digits)
    t_star = optimal_t(n, r) if 2 * r < n else None
    ratio = Fraction(slice_size, ceiling)
    log_ceiling, t_float = _log_ceiling_and_t(n, r)
    log_ratio = (
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) - log_ceiling
    )
    eps0 = float(n) ** 0.525
    eps0_corr = math.exp(-(eps0 / 3) * math.log(1 / t_float) / n) if t_float else None
    return BoundRow(
        n=n,
        k=k,
        p=p,
        degree_bound=d,
        block_weight_cap=r,
        mode="exact",
        active_window=2 * p <= k,
        slice_size=slice_size,
        rank_ceiling_exact=ceiling,
        rank_ceiling_gf=gf,
        t_star=t_star,
        ratio=ratio,
        chromatic_lb=max(1, math.ceil(ratio)),
        log_ratio=log_ratio,
        ratio_root=math.exp(log_ratio / n),
        k_fraction=k / n,
        eps0=eps0,
        eps0_correction=eps0_corr,
    )


def _row_log(n: int, k: int, p: int) -> BoundRow:
    d = min(3 * n, n + 2 * (p - 1))
    r = d // 3
    log_ceiling, t_float = _log_ceiling_and_t(n, r)
    log_ratio = (
        math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) - log_ceiling
    )
    eps0 = float(n) ** 0.525
    eps0_corr = math.exp(-(eps0 / 3) * math.log(1 / t_float) / n) if t_float else None
    return BoundRow(
        n=n,
        k=k,
        p=p,
        degree_bound=d,
        block_weight_cap=r,
        mode="log",
        active_window=2 * p <= k,
        slice_size=None,
        rank_ceiling_exact=None,
        rank_ceiling_gf=None,
        t_star=None,
        ratio=None,
        chromatic_lb=None,
        log_ratio=log_ratio,
        ratio_root=math.exp(log_ratio / n),
        k_fraction=k / n,
        eps0=eps0,
        eps0_correction=eps0_corr,
    )


def finite_lower_bound(
    n: int,
    ks: Iterable[int] | None = None,
    digits: int = DEFAULT_DIGITS,
    mode: str = "auto",
    log_threshold: int = LOG_MODE_THRESHOLD,
) -> BoundTable:
    """Per-weight lower-bound rows for dimension n, plus the best row.

    In exact mode (n <= log_threshold, or mode="exact") every field is
    computed in exact arithmetic for each requested k.  In log mode the scan
    runs in log-domain floats and only the best row (plus any explicitly
    requested ks) is materialized.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if mode == "auto":
        mode = "exact" if n <= log_threshold else "log"
    if mode not in ("exact", "log"):
        raise ValueError(f"unknown mode {mode!r}")

    wanted = sorted(set(ks)) if ks is not None else None
    if wanted is not None:
        for k in wanted:
            if not 1 <= k <= n // 2:
                raise ValueError(f"weight {k} outside 1..floor({n}/2)")

    if mode == "exact":
        rows = []
        p = 3
        # the cap r is nondecreasing in k, so the low-weight count rolls forward
        low_weight_sum = 1
        summed_to = 0
        for k in range(1, n // 2 + 1):
            p = _advance_prime(p, k)
            if wanted is None or k in wanted:
                r = min(3 * n, n + 2 * (p - 1)) // 3
                while summed_to < min(r, n):
                    summed_to += 1
                    low_weight_sum += math.comb(n, summed_to)
                rows.append(_row_exact(n, k, p, digits, 3 * low_weight_sum))
        if not rows:
            raise ValueError("no valid weights requested")
        best = max(rows, key=lambda row: row.ratio)
        return BoundTable(n=n, mode="exact", rows=tuple(rows), best=best)

    # log mode: scan all k with a rolling prime, materialize best + requested
    best_k, best_p, best_lr = None, None, -math.inf
    lgn = math.lgamma(n + 1)
    p = 3
    keep: dict[int, int] = {}
    for k in range(1, n // 2 + 1):
        p = _advance_prime(p, k)
        if wanted is not None and k in wanted:
            keep[k] = p
        d = min(3 * n, n + 2 * (p - 1))
        r = d // 3
        log_ceiling, _ = _log_ceiling_and_t(n, r)
        lr = lgn - math.lgamma(k + 1) - math.lgamma(n - k + 1) - log_ceiling
        if lr > best_lr:
            best_k, best_p, best_lr = k, p, lr
    rows = tuple(_row_log(n, k, kp) for k, kp in sorted(keep.items()))
    if rows:
        best = max(rows, key=lambda row: row.log_ratio)
    else:
        best = _row_log(n, best_k, best_p)
        rows = (best,)
    return BoundTable(n=n, mode="log", rows=rows, best=best)


def growth_trend(ns: Sequence[int]) -> list[BoundRow]:
    """Best row per dimension in log-domain mode, for trend studies over large n."""
    return [finite_lower_bound(n, mode="log").best for n in ns]


def _phi(t: Decimal) -> Decimal:
    s6 = t ** (Decimal(1) / 6)
    return s6 * s6 * (1 + s6) / (1 + t)


def _phi_logderiv_sign(t: Decimal) -> int:
    # d/dt log phi = 1/(3t) + t^(-5/6)/(6 (1 + t^(1/6))) - 1/(1+t)
    s6 = t ** (Decimal(1) / 6)
    val = 1 / (3 * t) + s6 / (6 * t * (1 + s6)) - 1 / (1 + t)
    return 0 if val == 0 else (1 if val > 0 else -1)


@dataclass(frozen=True)
class AsymptoticResult:
    """Maximizer data for the growth-rate function t^(1/3) (1 + t^(1/6)) / (1 + t)."""

    t_star: Decimal
    c: Decimal
    phi_value: Decimal
    digits: int
    bracket: Decimal
    grid_points: int
    bisection_steps: int

    def c_string(self) -> str:
        return str(self.c.quantize(Decimal(1).scaleb(-self.digits)))

    def t_string(self) -> str:
        return str(self.t_star.quantize(Decimal(1).scaleb(-self.digits)))

    @property
    def predicted_weight_fraction(self) -> Decimal:
        """Limit of the maximizing k/n: s/(1+s) with s = t*^(1/6)."""
        with localcontext() as ctx:
            ctx.prec = self.digits + 15
            s = self.t_star ** (Decimal(1) / 6)
            return +(s / (1 + s))


def asymptotic_constant(digits: int = 5, grid: int = 512) -> AsymptoticResult:
    """Maximize the growth-rate function over (0,1) to the requested precision.

    A grid pre-scan certifies empirical unimodality (a single rise-then-fall
    sign pattern); derivative-sign bisection then shrinks the bracket below
    10^-(digits+5).  The returned c is the maximum minus 1.  A final sanity
    assertion checks t*^(1/3) > 1/2, the regime the asymptotic argument
    requires.
    """
    if digits < 1:
        raise ValueError(f"digits must be >= 1, got {digits}")
    if grid < 8:
        raise ValueError(f"grid must be >= 8, got {grid}")
    with localcontext() as ctx:
        ctx.prec = digits + 20
        values = [_phi(Decimal(i) / grid) for i in range(1, grid)]
        rises = [values[i + 1] > values[i] for i in range(len(values) - 1)]
        flips = sum(1 for a, b in zip(rises, rises[1:]) if a != b)
        if flips != 1 or not rises[0] or rises[-1]:
            raise RuntimeError("grid pre-scan did not see a unimodal profile")
        best_i = max(range(len(values)), key=lambda i: values[i])

        lo = Decimal(best_i) / grid  # one grid step below the best point
        hi = Decimal(best_i + 2) / grid
        tol = Decimal(1).scaleb(-(digits + 5))
        steps = 0
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if _phi_logderiv_sign(mid) > 0:
                lo = mid
            else:
                hi = mid
            steps += 1
        t_star = (lo + hi) / 2
        phi_value = _phi(t_star)
        if t_star ** (Decimal(1) / 3) <= Decimal("0.5"):
            raise RuntimeError("maximizer violates the t^(1/3) > 1/2 side condition")
        if any(v > phi_value for v in values):
            raise RuntimeError("grid point dominates the bisection maximizer")
        result = AsymptoticResult(
            t_star=+t_star,
            c=+(phi_value - 1),
            phi_value=+phi_value,
            digits=digits,
            bracket=+(hi - lo),
            grid_points=grid - 1,
            bisection_steps=steps,
        )
    return result
