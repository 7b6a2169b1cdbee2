"""h-parametrized operator and vector families on (0, 1].

A family is a finite sum of catalog coefficient functions times constant
matrices (or vectors).  The catalog is closed under products: every product
of `const`, `pow p` (h**p) and `expinv a` (exp(-a/h)) is again of the form
h**p * exp(-a/h).  Catalog coefficients are continuous, nondecreasing in h,
and bounded by 1 on (0, 1], so every family is bounded; coefficients with
p > 0 or a > 0 carry a decay certificate (they vanish as h -> 0).

Arbitrary user coefficients are accepted in sampled-only mode: they carry
no certificate and limit verdicts involving them may come back
Inconclusive.

Limits at h -> 0 are estimated from a geometric sample grid; verdicts are
`ToZero`, `BoundedPositive`, `Unbounded` or `Inconclusive`, never an
asserted limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .bracket import (
    EquivalenceReport,
    QnParams,
    bracket_norm_sequence,
    combine_order_reports,
    root_test,
)
from .errors import DimensionMismatchError, InputError, OpfamError
from .linalg import as_matrix, as_vector, op_norm

EPS_TAIL = 1e-7
ZERO_FLOOR = 1e-10
TREND_FLAT_TOL = 0.01
TREND_GROWTH_TOL = 0.02
UNBOUNDED_MIN = 1e3
DECAY_CERT_SLOPE = -0.05
DECAY_CERT_FIT = 0.3

TO_ZERO = "ToZero"
BOUNDED_POSITIVE = "BoundedPositive"
UNBOUNDED = "Unbounded"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CoeffFn:
    """Scalar coefficient h -> h**exponent * exp(-rate/h) * prod(customs)."""

    exponent: float = 0.0
    rate: float = 0.0
    customs: tuple[Callable[[float], complex], ...] = ()

    @staticmethod
    def const() -> "CoeffFn":
        return CoeffFn()

    @staticmethod
    def pow_h(p: float) -> "CoeffFn":
        if p < 0:
            raise InputError("pow exponent must be >= 0")
        return CoeffFn(exponent=float(p))

    @staticmethod
    def exp_inv(a: float) -> "CoeffFn":
        if a <= 0:
            raise InputError("expinv rate must be > 0")
        return CoeffFn(rate=float(a))

    @staticmethod
    def custom(fn: Callable[[float], complex]) -> "CoeffFn":
        return CoeffFn(customs=(fn,))

    def __call__(self, h: float) -> complex:
        value = complex(h**self.exponent)
        if self.rate:
            value *= math.exp(-self.rate / h)
        for fn in self.customs:
            value *= fn(h)
        return value

    def eval_many(self, hs: np.ndarray) -> np.ndarray:
        value = np.asarray(hs, dtype=float) ** self.exponent
        value = value.astype(complex)
        if self.rate:
            value *= np.exp(-self.rate / np.asarray(hs, dtype=float))
        for fn in self.customs:
            value *= np.array([fn(float(h)) for h in hs], dtype=complex)
        return value

    def __mul__(self, other: "CoeffFn") -> "CoeffFn":
        return CoeffFn(
            exponent=self.exponent + other.exponent,
            rate=self.rate + other.rate,
            customs=self.customs + other.customs,
        )

    @property
    def is_null(self) -> bool | None:
        """True/False when the h->0 decay is decidable, None for sampled-only."""
        if self.customs:
            return None
        return self.exponent > 0 or self.rate > 0

    @property
    def sup_bound(self) -> float | None:
        """sup over (0,1] of |coefficient|; None for sampled-only."""
        if self.customs:
            return None
        return math.exp(-self.rate)

    def describe(self) -> str:
        parts = []
        if self.exponent:
            parts.append(f"pow {self.exponent:g}")
        if self.rate:
            parts.append(f"expinv {self.rate:g}")
        if self.customs:
            parts.append(f"sampled*{len(self.customs)}")
        return " * ".join(parts) if parts else "const"


def _merge_terms(terms, zero_norm):
    """Sum coefficient-equal terms, drop terms whose array is zero."""
    merged: dict[CoeffFn, np.ndarray] = {}
    order: list[CoeffFn] = []
    for coeff, arr in terms:
        if coeff in merged:
            merged[coeff] = merged[coeff] + arr
        else:
            merged[coeff] = arr
            order.append(coeff)
    out = []
    for coeff in order:
        arr = merged[coeff]
        if zero_norm(arr) > 0.0:
            out.append((coeff, arr))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """h |-> sum_j c_j(h) * A_j with constant square matrices A_j."""

    dim: int
    terms: tuple[tuple[CoeffFn, np.ndarray], ...]

    @staticmethod
    def from_terms(dim: int, terms) -> "OperatorFamily":
        checked = []
        for coeff, mat in terms:
            m = as_matrix(mat)
            if m.shape[0] != dim:
                raise DimensionMismatchError(
                    f"term matrix dim {m.shape[0]} != family dim {dim}"
                )
            m = m.copy()
            m.setflags(write=False)
            checked.append((coeff, m))
        if not checked:
            raise InputError("family needs at least one term")
        return OperatorFamily(dim=dim, terms=tuple(checked))

    @staticmethod
    def constant(a) -> "OperatorFamily":
        m = as_matrix(a)
        return OperatorFamily.from_terms(m.shape[0], [(CoeffFn.const(), m)])

    def __call__(self, h: float) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for coeff, mat in self.terms:
            out += coeff(h) * mat
        return out

    def eval_stack(self, hs: np.ndarray) -> np.ndarray:
        """Evaluate at many h values at once; returns shape (len(hs), d, d)."""
        hs = np.asarray(hs, dtype=float)
        out = np.zeros((hs.shape[0], self.dim, self.dim), dtype=complex)
        for coeff, mat in self.terms:
            out += coeff.eval_many(hs)[:, None, None] * mat
        return out

    def __add__(self, other: "OperatorFamily") -> "OperatorFamily":
        self._check_dim(other)
        return OperatorFamily.from_terms(self.dim, self.terms + other.terms)

    def __sub__(self, other: "OperatorFamily") -> "OperatorFamily":
        return self + (-other)

    def __neg__(self) -> "OperatorFamily":
        return OperatorFamily.from_terms(
            self.dim, [(c, -m) for c, m in self.terms]
        )

    def scaled(self, alpha: complex) -> "OperatorFamily":
        return OperatorFamily.from_terms(
            self.dim, [(c, alpha * m) for c, m in self.terms]
        )

    def canonical(self) -> "OperatorFamily":
        """Merge coefficient-equal terms and drop zero matrices."""
        merged = _merge_terms(self.terms, op_norm)
        if not merged:
            z = np.zeros((self.dim, self.dim), dtype=complex)
            merged = ((CoeffFn.const(), z),)
        return OperatorFamily(dim=self.dim, terms=merged)

    def drop_null_terms(self) -> "OperatorFamily":
        """Canonical representative with certified-null terms removed."""
        kept = [(c, m) for c, m in self.canonical().terms if c.is_null is not True]
        if not kept:
            z = np.zeros((self.dim, self.dim), dtype=complex)
            kept = [(CoeffFn.const(), z)]
        return OperatorFamily(dim=self.dim, terms=tuple(kept))

    def sup_bound(self) -> float | None:
        """Upper bound for sup_h ||F(h)||; None if a sampled-only term is present."""
        total = 0.0
        for coeff, mat in self.terms:
            b = coeff.sup_bound
            if b is None:
                return None
            total += b * op_norm(mat)
        return total

    def null_certificate(self) -> bool | None:
        """True: provably null; False: provably not; None: undecidable."""
        terms = self.canonical().terms
        flags = [c.is_null for c, m in terms if op_norm(m) > 0.0]
        if not flags:
            return True
        if any(f is None for f in flags):
            return None
        return all(flags)

    def _check_dim(self, other) -> None:
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"family dims differ: {self.dim} vs {other.dim}"
            )

    def describe(self) -> str:
        return " + ".join(f"[{c.describe()}]*A{j}" for j, (c, _) in enumerate(self.terms))


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """h |-> sum_j c_j(h) * x_j with constant vectors x_j."""

    dim: int
    terms: tuple[tuple[CoeffFn, np.ndarray], ...]

    @staticmethod
    def from_terms(dim: int, terms) -> "VectorFamily":
        checked = []
        for coeff, vec in terms:
            v = as_vector(vec, dim=dim)
            v = v.copy()
            v.setflags(write=False)
            checked.append((coeff, v))
        if not checked:
            raise InputError("vector family needs at least one term")
        return VectorFamily(dim=dim, terms=tuple(checked))

    @staticmethod
    def constant(x) -> "VectorFamily":
        v = as_vector(x)
        return VectorFamily.from_terms(v.shape[0], [(CoeffFn.const(), v)])

    def __call__(self, h: float) -> np.ndarray:
        out = np.zeros(self.dim, dtype=complex)
        for coeff, vec in self.terms:
            out += coeff(h) * vec
        return out

    def eval_stack(self, hs: np.ndarray) -> np.ndarray:
        hs = np.asarray(hs, dtype=float)
        out = np.zeros((hs.shape[0], self.dim), dtype=complex)
        for coeff, vec in self.terms:
            out += coeff.eval_many(hs)[:, None] * vec
        return out

    def __add__(self, other: "VectorFamily") -> "VectorFamily":
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"vector family dims differ: {self.dim} vs {other.dim}"
            )
        return VectorFamily.from_terms(self.dim, self.terms + other.terms)

    def __neg__(self) -> "VectorFamily":
        return VectorFamily.from_terms(self.dim, [(c, -v) for c, v in self.terms])

    def __sub__(self, other: "VectorFamily") -> "VectorFamily":
        return self + (-other)

    def canonical(self) -> "VectorFamily":
        merged = _merge_terms(self.terms, lambda v: float(np.linalg.norm(v)))
        if not merged:
            merged = ((CoeffFn.const(), np.zeros(self.dim, dtype=complex)),)
        return VectorFamily(dim=self.dim, terms=merged)

    def null_certificate(self) -> bool | None:
        terms = self.canonical().terms
        flags = [c.is_null for c, v in terms if np.linalg.norm(v) > 0.0]
        if not flags:
            return True
        if any(f is None for f in flags):
            return None
        return all(flags)


@dataclass(frozen=True)
class HGrid:
    """Geometric sample grid h_k = h0 * ratio**k, k = 0..count-1.

    The last `tail` samples stand in for the behavior at h -> 0.
    """

    h0: float = 1.0
    ratio: float = 0.5
    count: int = 40
    tail: int = 6

    def __post_init__(self):
        if not 0.0 < self.h0 <= 1.0:
            raise InputError("h0 must lie in (0, 1]")
        if not 0.0 < self.ratio < 1.0:
            raise InputError("ratio must lie in (0, 1)")
        if self.tail < 3:
            raise InputError("tail must be >= 3")
        if self.count < self.tail:
            raise InputError("count must be >= tail")

    def samples(self) -> np.ndarray:
        return self.h0 * self.ratio ** np.arange(self.count)

    def tail_samples(self) -> np.ndarray:
        return self.samples()[-self.tail :]

    @staticmethod
    def parse(text: str) -> "HGrid":
        parts = text.split(":")
        if len(parts) != 4:
            raise InputError(f"grid must be h0:ratio:count:tail, got {text!r}")
        try:
            return HGrid(float(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise InputError(f"bad grid spec {text!r}: {exc}") from exc


@dataclass(frozen=True)
class TailStats:
    """Finite-sample surrogate for lim / limsup at h -> 0.

    `tail_trend` is the least-squares slope of log10(value) per grid step
    over the tail; it is reported as -inf when the whole tail sits at or
    below the measurement floor `zero_floor` (values there are
    indistinguishable from zero).
    """

    values: np.ndarray
    tail: int
    eps_tail: float
    zero_floor: float
    tail_max: float
    tail_min: float
    tail_trend: float
    limit_verdict: str
    note: str = ""


def _slope_log10(values: np.ndarray) -> float:
    logs = np.log10(np.maximum(values, 1e-300))
    k = np.arange(len(values), dtype=float)
    return float(np.polyfit(k, logs, 1)[0])


def slopes_log10(values: np.ndarray) -> np.ndarray:
    """Least-squares slope of log10(values) per step, column-wise.

    values has shape (m, n): m tail samples of n independent sequences.
    """
    m = values.shape[0]
    k = np.arange(m, dtype=float)
    kc = k - k.mean()
    denom = float((kc**2).sum())
    logs = np.log10(np.maximum(values, 1e-300))
    return (kc[:, None] * (logs - logs.mean(axis=0))).sum(axis=0) / denom


def verdict_of(
    tail_max: float, tail_min: float, trend: float, eps_tail: float
) -> str:
    """The shared verdict rule behind every tail test."""
    if tail_max < eps_tail and trend < 0.0:
        return TO_ZERO
    if tail_min >= eps_tail and abs(trend) <= TREND_FLAT_TOL:
        return BOUNDED_POSITIVE
    if trend >= TREND_GROWTH_TOL and tail_max >= UNBOUNDED_MIN:
        return UNBOUNDED
    return INCONCLUSIVE


def verdict_arrays(
    values: np.ndarray, eps_tail: float, zero_floor: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized tail verdicts for many sequences at once.

    values has shape (m, n); returns (codes, tail_max, tail_min, trend)
    with codes 0=ToZero, 1=BoundedPositive, 2=Unbounded, 3=Inconclusive,
    matching `verdict_of` exactly.
    """
    tail_max = values.max(axis=0)
    tail_min = values.min(axis=0)
    trend = slopes_log10(values)
    trend = np.where(tail_max <= zero_floor, -np.inf, trend)
    codes = np.full(values.shape[1], 3, dtype=np.int8)
    codes[(trend >= TREND_GROWTH_TOL) & (tail_max >= UNBOUNDED_MIN)] = 2
    codes[(tail_min >= eps_tail) & (np.abs(trend) <= TREND_FLAT_TOL)] = 1
    codes[(tail_max < eps_tail) & (trend < 0.0)] = 0
    return codes, tail_max, tail_min, trend


VERDICT_CODES = {0: TO_ZERO, 1: BOUNDED_POSITIVE, 2: UNBOUNDED, 3: INCONCLUSIVE}


def tail_stats(
    values,
    tail: int,
    eps_tail: float = EPS_TAIL,
    zero_floor: float = ZERO_FLOOR,
    note: str = "",
) -> TailStats:
    """Classify the h -> 0 behavior of sampled nonnegative values."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) < tail or tail < 3:
        raise InputError("need a 1-d sample array with at least `tail` >= 3 entries")
    t = v[-tail:]
    tail_max = float(t.max())
    tail_min = float(t.min())
    if tail_max <= zero_floor:
        trend = float("-inf")
    else:
        trend = _slope_log10(t)
    verdict = verdict_of(tail_max, tail_min, trend, eps_tail)
    return TailStats(
        values=v,
        tail=tail,
        eps_tail=eps_tail,
        zero_floor=zero_floor,
        tail_max=tail_max,
        tail_min=tail_min,
        tail_trend=trend,
        limit_verdict=verdict,
        note=note,
    )


def norm_samples(fam: OperatorFamily, grid: HGrid) -> np.ndarray:
    """||F(h_k)|| over the whole grid."""
    stack = fam.eval_stack(grid.samples())
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def limsup_norm(fam: OperatorFamily, grid: HGrid) -> float:
    """Tail maximum of ||F(h_k)||: the sampled stand-in for limsup at 0."""
    return float(norm_samples(fam, grid)[-grid.tail :].max())


def is_null_family(fam: OperatorFamily, grid: HGrid) -> TailStats:
    """Decide membership in the null ideal (norm -> 0 at h -> 0).

    ToZero requires both the sampled tail test and the catalog decay
    certificate; when the two disagree, or no certificate exists, the
    verdict degrades to Inconclusive (BoundedPositive survives on a
    positive certificate).
    """
    stats = tail_stats(norm_samples(fam, grid), grid.tail)
    cert = fam.null_certificate()
    if cert is True:
        if stats.limit_verdict == TO_ZERO:
            return replace(stats, note="certified null; tail test agrees")
        return replace(
            stats,
            limit_verdict=INCONCLUSIVE,
            note=f"certified null but tail verdict was {stats.limit_verdict}",
        )
    if cert is False:
        if stats.limit_verdict == TO_ZERO:
            return replace(
                stats,
                limit_verdict=INCONCLUSIVE,
                note="certificate says limit is positive but tail test saw decay",
            )
        return replace(
            stats,
            limit_verdict=BOUNDED_POSITIVE,
            note="certificate: non-null constant part persists",
        )
    if stats.limit_verdict == TO_ZERO:
        return replace(
            stats,
            limit_verdict=INCONCLUSIVE,
            note="sampled-only terms: decay observed but uncertified",
        )
    return replace(stats, note="sampled-only terms: no certificate")


def asymptotically_equivalent(
    f: OperatorFamily, g: OperatorFamily, grid: HGrid
) -> TailStats:
    """Tail test for ||F(h) - G(h)|| -> 0."""
    f._check_dim(g)
    return is_null_family((f - g).canonical(), grid)


def commute_in_limit(f: OperatorFamily, g: OperatorFamily, grid: HGrid) -> TailStats:
    """Tail test for ||F(h)G(h) - G(h)F(h)|| -> 0."""
    f._check_dim(g)
    hs = grid.samples()
    fs = f.eval_stack(hs)
    gs = g.eval_stack(hs)
    comm = fs @ gs - gs @ fs
    vals = np.linalg.svd(comm, compute_uv=False)[:, 0]
    return tail_stats(vals, grid.tail)


@dataclass(frozen=True)
class QuotientBounds:
    """Two-sided bracket for the quotient norm of a family's class.

    lower = tail limsup estimate of ||F(h)||; upper = sampled sup of the
    canonical representative with certified-null terms dropped.  The class
    infimum itself is not computable; these bounds sandwich it.
    """

    lower: float
    upper: float
    raw_upper: float

    def __iter__(self):
        return iter((self.lower, self.upper))


def quotient_norm_bounds(fam: OperatorFamily, grid: HGrid) -> QuotientBounds:
    lower = limsup_norm(fam, grid)
    raw_upper = float(norm_samples(fam, grid).max())
    refined = fam.drop_null_terms()
    upper = float(norm_samples(refined, grid).max())
    if lower > upper + EPS_TAIL and lower > raw_upper:
        raise OpfamError("quotient bounds inverted beyond tolerance")
    return QuotientBounds(lower=lower, upper=upper, raw_upper=raw_upper)


def module_action(
    f: OperatorFamily, v: VectorFamily, grid: HGrid | None = None
) -> VectorFamily:
    """The product family h |-> F(h) x(h), expanded term by term.

    The coefficient catalog is closed under the products, so the result is
    again a finite-term family; on representatives the action satisfies
    limsup||F x|| <= limsup||F|| * limsup||x|| up to the tail tolerance.
    """
    if f.dim != v.dim:
        raise DimensionMismatchError(f"dims differ: {f.dim} vs {v.dim}")
    terms = []
    for cf, mat in f.terms:
        for cv, vec in v.terms:
            terms.append((cf * cv, mat @ vec))
    out = VectorFamily.from_terms(v.dim, terms).canonical()
    if grid is not None:
        hs = grid.tail_samples()
        left = float(np.linalg.norm(out.eval_stack(hs), axis=1).max())
        f_lim = limsup_norm(f, grid)
        v_lim = float(np.linalg.norm(v.eval_stack(grid.samples()), axis=1)[-grid.tail :].max())
        if left > f_lim * v_lim + EPS_TAIL:
            raise OpfamError(
                f"module action bound violated: {left:.3e} > {f_lim:.3e} * {v_lim:.3e}"
            )
    return out


def vector_norm_samples(v: VectorFamily, grid: HGrid) -> np.ndarray:
    return np.linalg.norm(v.eval_stack(grid.samples()), axis=1)


def is_null_vector_family(v: VectorFamily, grid: HGrid) -> TailStats:
    """Null test for vector families, certificate-aware like is_null_family."""
    stats = tail_stats(vector_norm_samples(v, grid), grid.tail)
    cert = v.null_certificate()
    if cert is True and stats.limit_verdict == TO_ZERO:
        return replace(stats, note="certified null; tail test agrees")
    if cert is True:
        return replace(
            stats,
            limit_verdict=INCONCLUSIVE,
            note=f"certified null but tail verdict was {stats.limit_verdict}",
        )
    if cert is False and stats.limit_verdict != TO_ZERO:
        return replace(stats, limit_verdict=BOUNDED_POSITIVE,
                       note="certificate: non-null constant part persists")
    if cert is False:
        return replace(stats, limit_verdict=INCONCLUSIVE,
                       note="certificate says positive but tail decayed")
    return replace(stats, limit_verdict=INCONCLUSIVE, note="sampled-only terms")


def _inner_limit_estimate(vals: np.ndarray, zero_floor: float) -> tuple[float, str]:
    """Estimate limsup_{h->0} of one sampled tail sequence.

    Returns 0 when the tail sits at the floor or decays geometrically with
    a clean log-linear fit; otherwise returns the tail max (conservative).
    """
    vmax = float(vals.max())
    if vmax <= zero_floor:
        return 0.0, "floor"
    logs = np.log10(np.maximum(vals, 1e-300))
    k = np.arange(len(vals), dtype=float)
    coef = np.polyfit(k, logs, 1)
    slope = float(coef[0])
    fit_dev = float(np.abs(logs - np.polyval(coef, k)).max())
    if slope < DECAY_CERT_SLOPE and fit_dev <= DECAY_CERT_FIT:
        return 0.0, "decay"
    return vmax, "flat"


def asym_qn_equivalent(
    f: OperatorFamily,
    g: OperatorFamily,
    grid: HGrid,
    params: QnParams = QnParams(),
) -> EquivalenceReport:
    """Asymptotic quasinilpotent equivalence test for two families.

    For each bracket order n the inner limsup over h is estimated from the
    tail samples (a tail that decays geometrically, or underflows, counts
    as 0: the limit in h is taken before the limit in n).  The n-th root
    sequence of the estimates then goes through the same root test as the
    single-operator case, in both operand orders.
    """
    f._check_dim(g)
    hs = grid.tail_samples()
    fs = f.eval_stack(hs)
    gs = g.eval_stack(hs)

    reports = []
    for left, right, tag in ((fs, gs, "F,G"), (gs, fs, "G,F")):
        per_h = np.empty((len(hs), params.n_max))
        overflow = False
        for i in range(len(hs)):
            norms, ok = bracket_norm_sequence(left[i], right[i], params.n_max)
            per_h[i] = norms
            overflow = overflow or not ok
        if overflow:
            reports.append(
                EquivalenceReport(
                    verdict=INCONCLUSIVE,
                    final_root=float("inf"),
                    trend=float("inf"),
                    diagnostics=f"order ({tag}): bracket norms overflow",
                )
            )
            continue
        sigmas = np.empty(params.n_max)
        labels = []
        for n in range(params.n_max):
            sigmas[n], label = _inner_limit_estimate(per_h[:, n], ZERO_FLOOR)
            labels.append(label)
        roots = np.where(
            sigmas > 0.0,
            np.maximum(sigmas, 1e-300) ** (1.0 / np.arange(1, params.n_max + 1)),
            0.0,
        )
        rep = root_test(roots, params)
        zero_by = {"floor": labels.count("floor"), "decay": labels.count("decay")}
        reports.append(
            replace(
                rep,
                diagnostics=f"order ({tag}): {rep.diagnostics}; inner limits "
                f"{zero_by['floor']} at floor, {zero_by['decay']} decay-certified",
            )
        )

    return combine_order_reports(reports[0], reports[1])
