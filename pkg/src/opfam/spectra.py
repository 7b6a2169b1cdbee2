"""Spectrum and resolvent set of an operator family via tail invertibility.

A point lambda belongs to the family resolvent set when the shifted family
admits a bounded family of approximate inverses with two-sided residuals
vanishing at h -> 0.  The computable surrogate used here: the smallest
singular value of (lambda I - F(h)) stays bounded below along the grid
tail (sufficient: the exact inverses then form a bounded family), while a
tail of singular values vanishing at h -> 0 certifies spectrum membership
(necessary direction).  Points that resolve neither way are Undetermined.

Grid scans classify cell centers.  Because a point test cannot see a
measure-zero spectrum from a generic cell center, grids additionally mark
cells whose sigma tail sits flat below the cell radius and is a local
minimum of the sigma field: the pseudospectral reading of "the spectrum
meets this cell" at the grid's resolution.  All thresholds are recorded on
the grid, and classification is deterministic given family, grid,
rectangle, resolution and thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, OpfamError, PreconditionError
from .families import (
    TO_ZERO,
    TREND_FLAT_TOL,
    UNBOUNDED,
    CoeffFn,
    HGrid,
    OperatorFamily,
    TailStats,
    asymptotically_equivalent,
    limsup_norm,
    norm_samples,
    slopes_log10,
    tail_stats,
)
from .linalg import as_matrix

RESOLVENT = "Resolvent"
SPECTRUM = "Spectrum"
UNDETERMINED = "Undetermined"

CLS_SPECTRUM = 0
CLS_UNDETERMINED = 1
CLS_RESOLVENT = 2
CLASS_CHARS = {CLS_SPECTRUM: "S", CLS_UNDETERMINED: "U", CLS_RESOLVENT: "R"}

DELTA_RES = 1e-6
NEUMANN_MARGIN = 1e-6
SIGMA_FLOOR_REL = 1e-10
DIP_MIN_SLACK = 0.05
DIP_MEDIAN_BETA = 0.6

_CHUNK = 8192


@dataclass(frozen=True)
class GridThresholds:
    """Classification thresholds; sigma_spec is the pseudospectral cell test."""

    delta_res: float = DELTA_RES
    sigma_spec: float = 0.0
    dip_min_slack: float = DIP_MIN_SLACK
    dip_median_beta: float = DIP_MEDIAN_BETA


@dataclass(frozen=True, eq=False)
class ResolventProbe:
    """Point classification of one lambda for a family."""

    lam: complex
    tail_sigma: np.ndarray
    tail_resnorm: np.ndarray
    classification: str
    scale: float
    sigma_stats: TailStats
    neumann: bool
    max_inverse_residual: float


def family_scale(fam: OperatorFamily, grid: HGrid) -> float:
    """max(1, tail limsup of the family norm); normalizes delta_res."""
    return max(1.0, limsup_norm(fam, grid))


def _sigma_tail_stack(fam: OperatorFamily, lams: np.ndarray, grid: HGrid) -> np.ndarray:
    """Smallest singular values of (lam I - F(h)) over the grid tail.

    Returns shape (tail, len(lams)); chunked to bound memory.
    """
    hs = grid.tail_samples()
    d = fam.dim
    mats = fam.eval_stack(hs)
    ident = np.eye(d, dtype=complex)
    out = np.empty((len(hs), len(lams)))
    for lo in range(0, len(lams), _CHUNK):
        lam_chunk = lams[lo : lo + _CHUNK]
        shifted = lam_chunk[:, None, None] * ident
        for i in range(len(hs)):
            sig = np.linalg.svd(shifted - mats[i], compute_uv=False)
            out[i, lo : lo + _CHUNK] = sig[:, -1]
    return out


def probe_resolvent(
    fam: OperatorFamily,
    lam: complex,
    grid: HGrid,
    delta_res: float = DELTA_RES,
) -> ResolventProbe:
    """Classify one lambda as Resolvent / Spectrum / Undetermined.

    Resolvent either by the Neumann certificate (tail norms strictly below
    |lambda|) or by a sigma tail bounded below by delta_res * scale, in
    which case the exact inverses are constructed and their residuals
    checked.  Spectrum when the sigma tail vanishes.  Undetermined absorbs
    the rest.
    """
    scale = family_scale(fam, grid)
    hs = grid.tail_samples()
    sig = _sigma_tail_stack(fam, np.array([lam], dtype=complex), grid)[:, 0]
    stats = tail_stats(
        sig,
        tail=grid.tail,
        eps_tail=delta_res * scale,
        zero_floor=SIGMA_FLOOR_REL * scale,
    )
    tail_norms = norm_samples(fam, grid)[-grid.tail :]
    neumann = bool(tail_norms.max() < abs(lam) * (1.0 - NEUMANN_MARGIN))

    mats = fam.eval_stack(hs)
    ident = np.eye(fam.dim, dtype=complex)
    shifted = lam * ident - mats
    resnorm = np.full(len(hs), np.nan)
    max_residual = np.nan
    invs = None
    if sig.min() > 0.0:
        try:
            invs = np.linalg.solve(shifted, np.broadcast_to(ident, shifted.shape))
            resnorm = np.linalg.svd(invs, compute_uv=False)[:, 0]
            residuals = shifted @ invs - ident
            max_residual = float(np.linalg.svd(residuals, compute_uv=False)[:, 0].max())
        except np.linalg.LinAlgError:
            invs = None

    if neumann:
        cls = RESOLVENT
    elif stats.limit_verdict == TO_ZERO:
        cls = SPECTRUM
    elif sig.min() >= delta_res * scale and invs is not None:
        cls = RESOLVENT
    else:
        cls = UNDETERMINED
    return ResolventProbe(
        lam=complex(lam),
        tail_sigma=sig,
        tail_resnorm=resnorm,
        classification=cls,
        scale=scale,
        sigma_stats=stats,
        neumann=neumann,
        max_inverse_residual=max_residual,
    )


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """Rectangular scan of the complex plane with per-cell classification.

    classes: (ny, nx) int8 with 0=Spectrum, 1=Undetermined, 2=Resolvent
    (for local-spectrum grids, 0 means LocalSpectrum and 2 LocalResolvent).
    score: the per-cell scalar that drove classification (min tail sigma
    for spectrum grids; the distance-like local score for local grids).
    Cells are indexed [iy, ix] with im ascending in iy and re in ix;
    centers sit at the cell midpoints.
    """

    kind: str
    rect: tuple[float, float, float, float]
    nx: int
    ny: int
    classes: np.ndarray
    score: np.ndarray
    scale: float
    thresholds: GridThresholds
    grid: HGrid

    def cell_size(self) -> tuple[float, float]:
        re_min, re_max, im_min, im_max = self.rect
        return (re_max - re_min) / self.nx, (im_max - im_min) / self.ny

    def centers(self) -> np.ndarray:
        re_min, re_max, im_min, im_max = self.rect
        w, h = self.cell_size()
        res = re_min + (np.arange(self.nx) + 0.5) * w
        ims = im_min + (np.arange(self.ny) + 0.5) * h
        return res[None, :] + 1j * ims[:, None]

    def cells_with_class(self, cls: int) -> np.ndarray:
        """Centers of all cells carrying the given class code."""
        return self.centers()[self.classes == cls]

    def counts(self) -> dict[str, int]:
        return {
            CLASS_CHARS[c]: int((self.classes == c).sum())
            for c in (CLS_SPECTRUM, CLS_UNDETERMINED, CLS_RESOLVENT)
        }


def _validate_rect(rect) -> tuple[float, float, float, float]:
    re_min, re_max, im_min, im_max = (float(v) for v in rect)
    if not (re_min < re_max and im_min < im_max):
        raise InputError(f"empty rectangle {rect}")
    return re_min, re_max, im_min, im_max


def _dip_mask(score: np.ndarray) -> np.ndarray:
    """Cells whose score dips sharply below the surrounding field.

    A dip must not exceed its smallest 8-neighbor by more than
    DIP_MIN_SLACK (rules out saddles and gently sloped plateaus, keeps
    exact ties) and must stay below DIP_MEDIAN_BETA times the neighbor
    median (a tie cluster at a point of the spectrum occupies at most 4
    cells, so the median still sees the surrounding plateau).  Boundary
    cells, lacking full neighborhoods, never qualify.
    """
    ny, nx = score.shape
    mask = np.zeros((ny, nx), dtype=bool)
    if ny < 3 or nx < 3:
        return mask
    center = score[1:-1, 1:-1]
    neighbors = np.stack(
        [
            score[1 + dy : ny - 1 + dy, 1 + dx : nx - 1 + dx]
            for dy in (-1, 0, 1)
            for dx in (-1, 0, 1)
            if (dy, dx) != (0, 0)
        ],
        axis=-1,
    )
    neighbors.sort(axis=-1)
    nb_min = neighbors[..., 0]
    nb_median = 0.5 * (neighbors[..., 3] + neighbors[..., 4])
    mask[1:-1, 1:-1] = (center <= nb_min * (1.0 + DIP_MIN_SLACK) + 1e-300) & (
        center <= nb_median * DIP_MEDIAN_BETA + 1e-300
    )
    return mask


def family_spectrum_grid(
    fam: OperatorFamily,
    rect,
    nx: int,
    ny: int,
    grid: HGrid,
    delta_res: float = DELTA_RES,
) -> RegionGrid:
    """Classify every cell center of an nx-by-ny scan over `rect`.

    A cell is Spectrum when its sigma tail vanishes, or when the tail sits
    flat at or below the cell half-diagonal and the cell is a local
    minimum of the sigma field (the spectrum, if any, meets this cell at
    the scan's resolution).  Resolvent requires the Neumann certificate or
    a sigma tail bounded below by delta_res * scale.  Rest: Undetermined.
    """
    rect = _validate_rect(rect)
    if nx < 8 or ny < 8:
        raise InputError("need nx, ny >= 8")
    scale = family_scale(fam, grid)
    re_min, re_max, im_min, im_max = rect
    w = (re_max - re_min) / nx
    h = (im_max - im_min) / ny
    rcell = 0.5 * float(np.hypot(w, h))
    thresholds = GridThresholds(delta_res=delta_res, sigma_spec=rcell)

    res = re_min + (np.arange(nx) + 0.5) * w
    ims = im_min + (np.arange(ny) + 0.5) * h
    lams = (res[None, :] + 1j * ims[:, None]).ravel()

    sig = _sigma_tail_stack(fam, lams, grid)
    tail_max = sig.max(axis=0)
    tail_min = sig.min(axis=0)
    floor = SIGMA_FLOOR_REL * scale
    trend = slopes_log10(sig)
    trend = np.where(tail_max <= floor, -np.inf, trend)

    to_zero = (tail_max < delta_res * scale) & (trend < 0.0)
    flat_low = (tail_max <= rcell) & (trend <= TREND_FLAT_TOL)
    score = tail_min.reshape(ny, nx)
    dip = _dip_mask(score).ravel()
    spectrum_mark = to_zero | (flat_low & dip)

    tail_norms = norm_samples(fam, grid)[-grid.tail :]
    neumann = np.abs(lams) * (1.0 - NEUMANN_MARGIN) > tail_norms.max()
    resolvent_mark = neumann | (tail_min >= delta_res * scale)

    classes = np.full(lams.shape, CLS_UNDETERMINED, dtype=np.int8)
    classes[resolvent_mark] = CLS_RESOLVENT
    classes[spectrum_mark] = CLS_SPECTRUM

    out = RegionGrid(
        kind="spectrum",
        rect=rect,
        nx=nx,
        ny=ny,
        classes=classes.reshape(ny, nx),
        score=score,
        scale=scale,
        thresholds=thresholds,
        grid=grid,
    )
    spec_cells = np.abs(lams[classes == CLS_SPECTRUM])
    if spec_cells.size and spec_cells.max() > tail_norms.max() + 2.0 * rcell + 1e-9:
        raise OpfamError(
            "spectrum cell found outside the norm-bound disk; "
            "classification is inconsistent"
        )
    return out


@dataclass(frozen=True)
class RadiusBound:
    """Growth-rate bound for the family spectrum radius.

    value approximates limsup_n of (lim_h ||F(h)^n||)^(1/n) by the maximum
    root over the trailing orders; inner_verdicts carry the per-order tail
    verdicts of ||F(h)^n|| at h -> 0.
    """

    value: float
    roots: np.ndarray
    inner_verdicts: tuple[str, ...]

    def __float__(self) -> float:
        return self.value


def spectral_radius_bound(
    fam: OperatorFamily, grid: HGrid, n_max: int = 16
) -> RadiusBound:
    """Root-growth bound: every spectrum point satisfies |lambda| <= value."""
    if n_max < 8:
        raise InputError("n_max must be >= 8")
    hs = grid.tail_samples()
    mats = fam.eval_stack(hs)
    power = mats.copy()
    roots = np.empty(n_max)
    verdicts = []
    for n in range(1, n_max + 1):
        if n > 1:
            power = power @ mats
        norms = np.linalg.svd(power, compute_uv=False)[:, 0]
        if not np.all(np.isfinite(norms)) or norms.max() > 1e300:
            return RadiusBound(
                value=float("inf"),
                roots=np.full(n_max, np.inf),
                inner_verdicts=tuple(verdicts) + (UNBOUNDED,),
            )
        stats = tail_stats(norms, tail=grid.tail)
        verdicts.append(stats.limit_verdict)
        roots[n - 1] = stats.tail_max ** (1.0 / n) if stats.tail_max > 0 else 0.0
    window = min(5, n_max)
    return RadiusBound(
        value=float(roots[-window:].max()),
        roots=roots,
        inner_verdicts=tuple(verdicts),
    )


def _tail_inverses(fam: OperatorFamily, lam: complex, grid: HGrid) -> np.ndarray:
    hs = grid.tail_samples()
    ident = np.eye(fam.dim, dtype=complex)
    shifted = lam * ident - fam.eval_stack(hs)
    return np.linalg.solve(shifted, np.broadcast_to(ident, shifted.shape))


def resolvent_identity_residual(
    fam: OperatorFamily, lam: complex, mu: complex, grid: HGrid
) -> TailStats:
    """Tail test of the first resolvent identity along h -> 0.

    Both points must classify Resolvent; the residual
    R(lam,h) - R(mu,h) - (mu - lam) R(lam,h) R(mu,h) then vanishes.
    """
    for point in (lam, mu):
        probe = probe_resolvent(fam, point, grid)
        if probe.classification != RESOLVENT:
            raise PreconditionError(
                f"{point} classified {probe.classification}, needs Resolvent"
            )
    r_lam = _tail_inverses(fam, lam, grid)
    r_mu = _tail_inverses(fam, mu, grid)
    resid = r_lam - r_mu - (mu - lam) * (r_lam @ r_mu)
    vals = np.linalg.svd(resid, compute_uv=False)[:, 0]
    return tail_stats(vals, tail=grid.tail)


@dataclass(frozen=True)
class ResidualCheck:
    """Outcome of a residual tail test with precondition bookkeeping."""

    stats: TailStats
    precondition_ok: bool
    notes: str


def resolvent_uniqueness_residual(
    fam: OperatorFamily,
    lam: complex,
    r1: OperatorFamily,
    r2: OperatorFamily,
    grid: HGrid,
    delta_res: float = DELTA_RES,
) -> ResidualCheck:
    """Tail test of ||R1(h) - R2(h)|| for two approximate resolvents.

    Preconditions (two-sided approximate-inverse residual tails below
    delta_res * scale) are verified first; on violation the op still runs
    and reports it via the precondition flag.
    """
    fam._check_dim(r1)
    fam._check_dim(r2)
    scale = family_scale(fam, grid)
    hs = grid.tail_samples()
    ident = np.eye(fam.dim, dtype=complex)
    shifted = lam * ident - fam.eval_stack(hs)
    notes = []
    ok = True
    for name, cand in (("R1", r1), ("R2", r2)):
        stack = cand.eval_stack(hs)
        right = np.linalg.svd(shifted @ stack - ident, compute_uv=False)[:, 0]
        left = np.linalg.svd(stack @ shifted - ident, compute_uv=False)[:, 0]
        worst = max(right.max(), left.max())
        if worst > delta_res * scale:
            ok = False
            notes.append(
                f"{name} residual tail {worst:.3e} exceeds {delta_res * scale:.3e}"
            )
    diff = r1.eval_stack(hs) - r2.eval_stack(hs)
    vals = np.linalg.svd(diff, compute_uv=False)[:, 0]
    stats = tail_stats(vals, tail=grid.tail)
    return ResidualCheck(
        stats=stats,
        precondition_ok=ok,
        notes="; ".join(notes) if notes else "approximate-inverse preconditions hold",
    )


def truncated_resolvent_family(a, b, lam: complex, order: int = 3) -> OperatorFamily:
    """Catalog approximate resolvent for F(h) = A + h B at lam.

    R(h) = sum_{j<=order} h**j C_j with C_0 = (lam I - A)^-1 and
    C_j = C_0 B C_{j-1}; the two-sided residuals are O(h**(order+1)), so
    the family is a certified approximate inverse along the tail whenever
    lam lies outside the spectrum of A.
    """
    am = as_matrix(a)
    bm = as_matrix(b)
    d = am.shape[0]
    ident = np.eye(d, dtype=complex)
    c0 = np.linalg.solve(lam * ident - am, ident)
    terms = [(CoeffFn.const(), c0)]
    prev = c0
    for j in range(1, order + 1):
        prev = c0 @ bm @ prev
        terms.append((CoeffFn.pow_h(float(j)), prev))
    return OperatorFamily.from_terms(d, terms)


@dataclass(frozen=True)
class InvarianceReport:
    """Cell-by-cell comparison of two classification grids."""

    n_cells: int
    disagreements: tuple[tuple[int, int], ...]
    n_undetermined_first: int
    n_undetermined_second: int
    identical: bool


def compare_grids(a: RegionGrid, b: RegionGrid) -> InvarianceReport:
    if a.classes.shape != b.classes.shape:
        raise InputError("grids have different resolutions")
    und = (a.classes == CLS_UNDETERMINED) | (b.classes == CLS_UNDETERMINED)
    diff = (a.classes != b.classes) & ~und
    cells = tuple((int(iy), int(ix)) for iy, ix in np.argwhere(diff))
    return InvarianceReport(
        n_cells=a.classes.size,
        disagreements=cells,
        n_undetermined_first=int((a.classes == CLS_UNDETERMINED).sum()),
        n_undetermined_second=int((b.classes == CLS_UNDETERMINED).sum()),
        identical=not cells,
    )


def class_invariance_check(
    f: OperatorFamily,
    g: OperatorFamily,
    rect,
    nx: int,
    ny: int,
    grid: HGrid,
) -> InvarianceReport:
    """Spectrum grids of two certified asymptotically equivalent families.

    Rejects pairs whose difference is not a certified null family; the
    grids are then expected to agree cell by cell outside Undetermined.
    """
    verdict = asymptotically_equivalent(f, g, grid).limit_verdict
    if verdict != TO_ZERO:
        raise PreconditionError(
            f"families are not certified asymptotically equivalent ({verdict})"
        )
    ga = family_spectrum_grid(f, rect, nx, ny, grid)
    gb = family_spectrum_grid(g, rect, nx, ny, grid)
    return compare_grids(ga, gb)
