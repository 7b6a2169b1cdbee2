"""Local resolvent sets, local spectra and local spectral spaces.

For a single matrix the local spectrum at x is computed exactly: in finite
dimension every operator has the single-valued extension property and the
support of x across the spectral projections decides membership, so
lambda_i belongs to the local spectrum iff P_i x != 0.  The maximal
extension of the local resolvent is the explicit partial-fraction sum over
the supported clusters.

For a family the computable surrogate probes a point lambda0 together
with a small circle around it: at every probe point the minimum-norm
least-squares solutions of (lambda I - F(h)) y = x must have residual
tails vanishing at h -> 0 and norm tails bounded (the finite stand-in for
"a bounded analytic solution family exists on a neighborhood").  Grid
scans add the same geometric calibration as the spectrum grids: a cell
whose best probe still needs solutions of size ||x|| / score with score
flat below a few cell radii, at a local minimum of the score field, is
marked as carrying local spectrum at that resolution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, PoleProximityError, PreconditionError
from .families import (
    BOUNDED_POSITIVE,
    EPS_TAIL,
    INCONCLUSIVE,
    TO_ZERO,
    TREND_FLAT_TOL,
    UNBOUNDED,
    VERDICT_CODES,
    ZERO_FLOOR,
    HGrid,
    OperatorFamily,
    VectorFamily,
    tail_stats,
    verdict_arrays,
)
from .linalg import (
    DEFAULT_CLUSTER_TOL,
    SpectralDecomp,
    as_matrix,
    as_vector,
    spectral_decomp,
)
from .spectra import (
    CLS_RESOLVENT,
    CLS_SPECTRUM,
    CLS_UNDETERMINED,
    GridThresholds,
    RegionGrid,
    _dip_mask,
    _validate_rect,
    family_scale,
    spectral_radius_bound,
)
from .regions import Region, parse_region

LOCAL_RESOLVENT = "LocalResolvent"
LOCAL_SPECTRUM = "LocalSpectrum"
UNDETERMINED = "Undetermined"

TOL_LOC = 1e-8
TOL_EXT = 1e-6
B_MAX_FACTOR = 1e8
LOCAL_CAL_FACTOR = 8.0


@dataclass(frozen=True, eq=False)
class LocalSpectrumReport:
    """Support of the local spectrum of one operator or family at x."""

    subject: str
    x: np.ndarray
    support: tuple[tuple[complex, float], ...]
    method: str
    zero_vector: bool = False

    def support_points(self) -> np.ndarray:
        return np.array([p for p, _ in self.support])


def local_spectrum_exact(
    a,
    x,
    tol_loc: float = TOL_LOC,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    decomp: SpectralDecomp | None = None,
) -> LocalSpectrumReport:
    """Exact local spectrum of a matrix at x via spectral projections.

    The support is the set of cluster centers with ||P_i x|| above
    tol_loc * ||x||.  The zero vector has empty local spectrum by
    convention and is flagged.
    """
    m = as_matrix(a)
    v = as_vector(x, dim=m.shape[0])
    xnorm = float(np.linalg.norm(v))
    if xnorm == 0.0:
        return LocalSpectrumReport(
            subject=f"matrix dim {m.shape[0]}",
            x=v,
            support=(),
            method="ExactProjection",
            zero_vector=True,
        )
    if decomp is None:
        decomp = spectral_decomp(m, cluster_tol=cluster_tol)
    support = []
    for cluster in decomp.clusters:
        weight = float(np.linalg.norm(cluster.projection @ v))
        if weight > tol_loc * xnorm:
            support.append((cluster.center, weight))
    return LocalSpectrumReport(
        subject=f"matrix dim {m.shape[0]}",
        x=v,
        support=tuple(support),
        method="ExactProjection",
    )


@dataclass(frozen=True, eq=False)
class ExtensionEval:
    """One evaluation of the maximal analytic extension of R(., A) x."""

    lam: complex
    value: np.ndarray
    pole_data: tuple[tuple[complex, tuple[float, ...]], ...]


def maximal_extension_eval(
    a,
    x,
    lam: complex,
    tol_loc: float = TOL_LOC,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
    decomp: SpectralDecomp | None = None,
) -> ExtensionEval:
    """Evaluate the partial-fraction extension of the local resolvent.

    value = sum over supported clusters of
    (lam - c_i)**-(j+1) N_i**j P_i x, j < m_i.  Away from the supported
    discs this agrees with the direct solve of (lam I - A) y = x; the
    point may sit inside discs of unsupported clusters, which is what
    makes it the maximal extension.
    """
    m = as_matrix(a)
    v = as_vector(x, dim=m.shape[0])
    xnorm = float(np.linalg.norm(v))
    if decomp is None:
        decomp = spectral_decomp(m, cluster_tol=cluster_tol)
    value = np.zeros(m.shape[0], dtype=complex)
    pole_data = []
    for cluster in decomp.clusters:
        px = cluster.projection @ v
        weight = float(np.linalg.norm(px))
        if xnorm == 0.0 or weight <= tol_loc * xnorm:
            continue
        dist = abs(lam - cluster.center)
        if dist <= cluster.radius:
            raise PoleProximityError(
                f"{lam} within radius {cluster.radius:.3e} of supported "
                f"cluster at {cluster.center}"
            )
        term = px
        norms = []
        for j in range(cluster.multiplicity):
            norms.append(float(np.linalg.norm(term)))
            value += term / (lam - cluster.center) ** (j + 1)
            term = cluster.nilpotent @ term
        pole_data.append((cluster.center, tuple(norms)))
    return ExtensionEval(lam=complex(lam), value=value, pole_data=tuple(pole_data))


def _ring_offsets(radius: float) -> np.ndarray:
    """The probe stencil: the center plus 8 points on a circle."""
    angles = 2.0 * np.pi * np.arange(8) / 8
    return np.concatenate(([0.0 + 0.0j], radius * np.exp(1j * angles)))


def _min_norm_solve_stack(mats: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Least-residual minimum-norm solutions of M y = x for stacked M."""
    n, d, _ = mats.shape
    rhs = np.broadcast_to(x[:, None], (n, d, 1))
    try:
        y = np.linalg.solve(mats, rhs)[..., 0]
        if np.all(np.isfinite(y.real)) and np.all(np.isfinite(y.imag)):
            return y
    except np.linalg.LinAlgError:
        pass
    pinv = np.linalg.pinv(mats, rcond=1e-13)
    return (pinv @ rhs)[..., 0]


_CHUNK = 4096


def _probe_samples(
    fam: OperatorFamily, x: np.ndarray, points: np.ndarray, grid: HGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Solution norms and residuals at every probe point over the tail.

    Returns (norms, residuals), each of shape (tail, len(points)).
    """
    hs = grid.tail_samples()
    d = fam.dim
    mats = fam.eval_stack(hs)
    ident = np.eye(d, dtype=complex)
    norms = np.empty((len(hs), len(points)))
    resids = np.empty((len(hs), len(points)))
    for lo in range(0, len(points), _CHUNK):
        pts = points[lo : lo + _CHUNK]
        shifted_base = pts[:, None, None] * ident
        for i in range(len(hs)):
            stack = shifted_base - mats[i]
            y = _min_norm_solve_stack(stack, x)
            norms[i, lo : lo + _CHUNK] = np.linalg.norm(y, axis=1)
            resids[i, lo : lo + _CHUNK] = np.linalg.norm(
                (stack @ y[..., None])[..., 0] - x, axis=1
            )
    return norms, resids


def _point_flags(
    norms: np.ndarray,
    resids: np.ndarray,
    xnorm: float,
    b_max: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Classify probe points: (good, bad, res_codes, norm_codes, norm_max)."""
    eps_res = EPS_TAIL * max(1.0, xnorm)
    floor_res = ZERO_FLOOR * max(1.0, xnorm)
    res_codes, _, _, _ = verdict_arrays(resids, eps_res, floor_res)
    norm_codes, norm_max, _, norm_trend = verdict_arrays(
        norms, EPS_TAIL * max(1.0, xnorm), floor_res
    )
    good = (res_codes == 0) & (norm_max <= b_max) & (norm_trend <= TREND_FLAT_TOL)
    bad = np.isin(res_codes, (1, 2)) | (norm_codes == 2) | (norm_max > b_max)
    return good, bad, res_codes, norm_codes, norm_max


@dataclass(frozen=True, eq=False)
class LocalProbe:
    """Neighborhood probe of one lambda0 for the family local resolvent."""

    lam: complex
    nbhd_r: float
    classification: str
    good_points: int
    bad_points: int
    score: float
    b_max: float
    point_norm_max: np.ndarray
    point_res_verdicts: tuple[str, ...]


def family_local_probe(
    fam: OperatorFamily,
    x,
    lam0: complex,
    nbhd_r: float,
    grid: HGrid,
    b_max: float | None = None,
) -> LocalProbe:
    """Probe lambda0 and its surrounding circle for local-resolvent membership.

    LocalResolvent: at every probe point the least-squares solutions have
    vanishing residual tails and bounded, non-increasing norm tails.
    LocalSpectrum: some probe point definitely fails (persistent residual
    or norm blowup).  Undetermined absorbs the mixed cases.
    """
    if nbhd_r <= 0:
        raise InputError("nbhd_r must be > 0")
    v = as_vector(x, dim=fam.dim)
    xnorm = float(np.linalg.norm(v))
    scale = family_scale(fam, grid)
    if b_max is None:
        b_max = B_MAX_FACTOR * max(xnorm, 1e-300) / scale
    points = lam0 + _ring_offsets(nbhd_r)
    if xnorm == 0.0:
        return LocalProbe(
            lam=complex(lam0),
            nbhd_r=nbhd_r,
            classification=LOCAL_RESOLVENT,
            good_points=len(points),
            bad_points=0,
            score=float("inf"),
            b_max=b_max,
            point_norm_max=np.zeros(len(points)),
            point_res_verdicts=tuple([TO_ZERO] * len(points)),
        )
    norms, resids = _probe_samples(fam, v, points, grid)
    good, bad, res_codes, _, norm_max = _point_flags(norms, resids, xnorm, b_max)
    if bad.any():
        cls = LOCAL_SPECTRUM
    elif good.all():
        cls = LOCAL_RESOLVENT
    else:
        cls = UNDETERMINED
    tau = float((xnorm / np.maximum(norm_max, 1e-300)).max())
    return LocalProbe(
        lam=complex(lam0),
        nbhd_r=nbhd_r,
        classification=cls,
        good_points=int(good.sum()),
        bad_points=int(bad.sum()),
        score=tau,
        b_max=b_max,
        point_norm_max=norm_max,
        point_res_verdicts=tuple(VERDICT_CODES[int(c)] for c in res_codes),
    )


def family_local_spectrum_grid(
    fam: OperatorFamily,
    x,
    rect,
    nx: int,
    ny: int,
    grid: HGrid,
    b_max: float | None = None,
) -> RegionGrid:
    """Per-cell local probes over a rectangle.

    A cell is LocalSpectrum when a probe point definitely fails, or when
    its distance-like score (||x|| over the largest solution norm among
    its probe points) sits below LOCAL_CAL_FACTOR cell radii at a local
    minimum of the score field.  LocalResolvent requires every probe point
    to pass; the rest is Undetermined.
    """
    rect = _validate_rect(rect)
    if nx < 8 or ny < 8:
        raise InputError("need nx, ny >= 8")
    v = as_vector(x, dim=fam.dim)
    xnorm = float(np.linalg.norm(v))
    scale = family_scale(fam, grid)
    if b_max is None:
        b_max = B_MAX_FACTOR * max(xnorm, 1e-300) / scale
    re_min, re_max, im_min, im_max = rect
    w = (re_max - re_min) / nx
    h = (im_max - im_min) / ny
    rcell = 0.5 * float(np.hypot(w, h))
    ring_r = 0.5 * min(w, h)
    thresholds = GridThresholds(sigma_spec=LOCAL_CAL_FACTOR * rcell)

    if xnorm == 0.0:
        return RegionGrid(
            kind="local",
            rect=rect,
            nx=nx,
            ny=ny,
            classes=np.full((ny, nx), CLS_RESOLVENT, dtype=np.int8),
            score=np.full((ny, nx), np.inf),
            scale=scale,
            thresholds=thresholds,
            grid=grid,
        )

    res = re_min + (np.arange(nx) + 0.5) * w
    ims = im_min + (np.arange(ny) + 0.5) * h
    centers = (res[None, :] + 1j * ims[:, None]).ravel()
    offsets = _ring_offsets(ring_r)
    points = (centers[:, None] + offsets[None, :]).ravel()

    norms, resids = _probe_samples(fam, v, points, grid)
    good, bad, _, _, norm_max = _point_flags(norms, resids, xnorm, b_max)

    n_cells = len(centers)
    good = good.reshape(n_cells, len(offsets))
    bad = bad.reshape(n_cells, len(offsets))
    # Median over the stencil: robust against isolated zeros of the local
    # extension, which can make single probe points look deceptively tame.
    tau = np.median(
        (xnorm / np.maximum(norm_max, 1e-300)).reshape(n_cells, len(offsets)), axis=1
    )
    score = tau.reshape(ny, nx)
    detected = bad.any(axis=1)
    all_good = good.all(axis=1)
    dip = _dip_mask(score).ravel()
    marked = detected | ((tau <= LOCAL_CAL_FACTOR * rcell) & dip)

    classes = np.full(n_cells, CLS_UNDETERMINED, dtype=np.int8)
    classes[all_good] = CLS_RESOLVENT
    classes[marked] = CLS_SPECTRUM
    return RegionGrid(
        kind="local",
        rect=rect,
        nx=nx,
        ny=ny,
        classes=classes.reshape(ny, nx),
        score=score,
        scale=scale,
        thresholds=thresholds,
        grid=grid,
    )


def report_from_grid(grid_result: RegionGrid, subject: str, x) -> LocalSpectrumReport:
    """Summarize a local grid as a support report (method FamilyProbe)."""
    marked = grid_result.classes == CLS_SPECTRUM
    centers = grid_result.centers()[marked]
    scores = grid_result.score[marked]
    support = tuple(
        (complex(c), float(s)) for c, s in zip(centers.ravel(), scores.ravel())
    )
    return LocalSpectrumReport(
        subject=subject,
        x=as_vector(x),
        support=support,
        method="FamilyProbe",
        zero_vector=float(np.linalg.norm(np.asarray(x))) == 0.0,
    )


@dataclass(frozen=True)
class MembershipAnswer:
    """Answer of a local-spectral-space membership test.

    Truthiness is the membership verdict; `inconclusive` is set when
    Undetermined cells outside the region leave the answer unproven.
    """

    member: bool
    inconclusive: bool
    n_support_cells: int
    offenders: tuple[complex, ...]
    note: str = ""

    def __bool__(self) -> bool:
        return self.member


def local_spectral_space_member(
    fam: OperatorFamily,
    x,
    region: Region | str,
    rect,
    grid: HGrid,
    nx: int = 64,
    ny: int = 64,
    cached_grid: RegionGrid | None = None,
) -> MembershipAnswer:
    """Does the family local spectrum of x lie inside the region?

    The scan rectangle must cover the spectral-radius disk of the family;
    membership is tested at cell centers of the local grid.
    """
    if isinstance(region, str):
        region = parse_region(region)
    rect = _validate_rect(rect)
    bound = spectral_radius_bound(fam, grid)
    if not np.isfinite(bound.value):
        raise InputError("spectral radius bound diverged; cannot validate rect")
    re_min, re_max, im_min, im_max = rect
    r = bound.value
    if re_min > -r or re_max < r or im_min > -r or im_max < r:
        raise InputError(
            f"rect {rect} does not cover the spectral-radius disk (radius {r:.3e})"
        )
    v = as_vector(x, dim=fam.dim)
    if float(np.linalg.norm(v)) == 0.0:
        return MembershipAnswer(
            member=True,
            inconclusive=False,
            n_support_cells=0,
            offenders=(),
            note="zero vector: empty local spectrum",
        )
    g = cached_grid
    if g is None:
        g = family_local_spectrum_grid(fam, v, rect, nx, ny, grid)
    centers = g.centers()
    marked = g.classes == CLS_SPECTRUM
    undet = g.classes == CLS_UNDETERMINED
    inside = region.contains(centers)
    offenders = tuple(complex(c) for c in centers[marked & ~inside].ravel())
    inconclusive = bool((undet & ~inside).any())
    return MembershipAnswer(
        member=not offenders,
        inconclusive=inconclusive,
        n_support_cells=int(marked.sum()),
        offenders=offenders,
        note="" if not inconclusive else "undetermined cells outside the region",
    )


@dataclass(frozen=True)
class Witness:
    """A sampled analytic candidate lambda -> {f_h(lambda)} for SVEP probes."""

    name: str
    fn: Callable[[complex], VectorFamily]


@dataclass(frozen=True)
class WitnessResult:
    name: str
    status: str  # "consistent" | "falsifies" | "inconclusive"
    residual_all_to_zero: bool
    norm_positive_somewhere: bool
    bounded_pointwise: bool
    note: str = ""


@dataclass(frozen=True)
class SvepReport:
    """Outcome of a falsification probe; absence of a hit proves nothing."""

    falsified: bool
    results: tuple[WitnessResult, ...]
    note: str


def _family_tail_values(
    fam: OperatorFamily, vf: VectorFamily, lam: complex, grid: HGrid
) -> tuple[np.ndarray, np.ndarray]:
    """(residual, norm) tails of one witness at one lambda."""
    hs = grid.tail_samples()
    mats = fam.eval_stack(hs)
    ident = np.eye(fam.dim, dtype=complex)
    vals = vf.eval_stack(hs)
    resid = ((lam * ident - mats) @ vals[..., None])[..., 0]
    return np.linalg.norm(resid, axis=1), np.linalg.norm(vals, axis=1)


def svep_falsification_probe(
    fam: OperatorFamily,
    witnesses: Sequence[Witness],
    mesh: Sequence[complex],
    grid: HGrid,
) -> SvepReport:
    """Search the witnesses for a single-valued-extension-property violation.

    A witness falsifies when its residual tails vanish at every mesh point
    while its norm tail stays definitely positive somewhere.  No witness
    hitting is reported as "not falsified", never as a proof.
    """
    mesh = [complex(z) for z in mesh]
    if not mesh:
        raise InputError("empty lambda mesh")
    results = []
    for w in witnesses:
        res_verdicts = []
        norm_verdicts = []
        for lam in mesh:
            vf = w.fn(lam)
            if vf.dim != fam.dim:
                raise InputError(f"witness {w.name} has dim {vf.dim} != {fam.dim}")
            rvals, nvals = _family_tail_values(fam, vf, lam, grid)
            res_verdicts.append(tail_stats(rvals, tail=grid.tail).limit_verdict)
            norm_verdicts.append(tail_stats(nvals, tail=grid.tail).limit_verdict)
        res_ok = all(v == TO_ZERO for v in res_verdicts)
        positive = any(v in (BOUNDED_POSITIVE, UNBOUNDED) for v in norm_verdicts)
        undecided = any(v == INCONCLUSIVE for v in norm_verdicts)
        bounded = all(v != UNBOUNDED for v in norm_verdicts)
        if res_ok and positive:
            status = "falsifies"
            note = "vanishing residuals with persistent norm"
        elif res_ok and undecided:
            status = "inconclusive"
            note = "vanishing residuals, norm tail undecided"
        else:
            status = "consistent"
            note = ""
        results.append(
            WitnessResult(
                name=w.name,
                status=status,
                residual_all_to_zero=res_ok,
                norm_positive_somewhere=positive,
                bounded_pointwise=bounded,
                note=note,
            )
        )
    falsified = any(r.status == "falsifies" for r in results)
    return SvepReport(
        falsified=falsified,
        results=tuple(results),
        note="falsified" if falsified else "not falsified (no proof implied)",
    )


@dataclass(frozen=True)
class UniquenessReport:
    """Per-mesh-point comparison of two local solution families."""

    verdicts: tuple[str, ...]
    all_to_zero: bool
    worst_tail_max: float


def local_extension_uniqueness_check(
    fam: OperatorFamily,
    x,
    sol1: Callable[[complex], VectorFamily],
    sol2: Callable[[complex], VectorFamily],
    mesh: Sequence[complex],
    grid: HGrid,
) -> UniquenessReport:
    """Two admissible local solution families must merge at h -> 0.

    Rejects (PreconditionError) unless both candidates have vanishing
    residual tails ||(lambda I - F(h)) y_h(lambda) - x|| at every mesh
    point; then tests ||x_h(lambda) - y_h(lambda)|| -> 0 pointwise.
    """
    v = as_vector(x, dim=fam.dim)
    mesh = [complex(z) for z in mesh]
    if not mesh:
        raise InputError("empty lambda mesh")
    hs = grid.tail_samples()
    mats = fam.eval_stack(hs)
    ident = np.eye(fam.dim, dtype=complex)
    eps_res = EPS_TAIL * max(1.0, float(np.linalg.norm(v)))
    for name, sol in (("first", sol1), ("second", sol2)):
        for lam in mesh:
            vals = sol(lam).eval_stack(hs)
            resid = ((lam * ident - mats) @ vals[..., None])[..., 0] - v
            stats = tail_stats(
                np.linalg.norm(resid, axis=1), tail=grid.tail, eps_tail=eps_res
            )
            if stats.limit_verdict != TO_ZERO:
                raise PreconditionError(
                    f"{name} candidate violates the residual condition at "
                    f"{lam}: verdict {stats.limit_verdict}, "
                    f"tail max {stats.tail_max:.3e}"
                )
    verdicts = []
    worst = 0.0
    for lam in mesh:
        diff = sol1(lam).eval_stack(hs) - sol2(lam).eval_stack(hs)
        stats = tail_stats(np.linalg.norm(diff, axis=1), tail=grid.tail)
        verdicts.append(stats.limit_verdict)
        worst = max(worst, stats.tail_max)
    return UniquenessReport(
        verdicts=tuple(verdicts),
        all_to_zero=all(v == TO_ZERO for v in verdicts),
        worst_tail_max=worst,
    )
