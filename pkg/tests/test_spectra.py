import numpy as np
import pytest

from opfam.errors import InputError, PreconditionError
from opfam.families import (
    TO_ZERO,
    BOUNDED_POSITIVE,
    CoeffFn,
    OperatorFamily,
)
from opfam.linalg import op_norm
from opfam.spectra import (
    CLS_RESOLVENT,
    CLS_SPECTRUM,
    RESOLVENT,
    SPECTRUM,
    UNDETERMINED,
    class_invariance_check,
    compare_grids,
    family_spectrum_grid,
    probe_resolvent,
    resolvent_identity_residual,
    resolvent_uniqueness_residual,
    spectral_radius_bound,
    truncated_resolvent_family,
)

SEED = 2718


def flip_family():
    top = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    bot = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    return OperatorFamily.from_terms(
        2, [(CoeffFn.const(), top), (CoeffFn.pow_h(1.0), bot)]
    )


def test_probe_examples(grid):
    const = OperatorFamily.constant(np.diag([1.0, 2.0]))
    assert probe_resolvent(const, 0.0, grid).classification == RESOLVENT

    fam = flip_family()
    p = probe_resolvent(fam, 0.0, grid)
    assert p.classification == SPECTRUM
    assert p.sigma_stats.limit_verdict == TO_ZERO
    p1 = probe_resolvent(fam, 1.0, grid)
    assert p1.classification == RESOLVENT
    assert np.all(np.isfinite(p1.tail_resnorm))


def test_probe_neumann_certificate(grid):
    rng = np.random.default_rng(SEED)
    a = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
    fam = OperatorFamily.constant(a)
    lam = op_norm(a) * 1.01
    p = probe_resolvent(fam, lam, grid)
    assert p.classification == RESOLVENT
    assert p.neumann


def test_grid_constant_diag(grid):
    fam = OperatorFamily.constant(np.diag([1.0, 2.0]))
    g = family_spectrum_grid(fam, (-3, 3, -3, 3), 64, 64, grid)
    marked = g.cells_with_class(CLS_SPECTRUM).ravel()
    # Real eigenvalues sit on the horizontal cell boundary: the tie pair
    # above/below the axis is marked for each of 1 and 2.
    assert len(marked) > 0
    for z in marked:
        assert min(abs(z - 1.0), abs(z - 2.0)) <= np.hypot(*g.cell_size())
    for target in (1.0, 2.0):
        assert min(abs(marked - target)) <= np.hypot(*g.cell_size())
    assert g.counts()["U"] == 0


def test_grid_flip_family_spectrum_only_at_origin(grid):
    fam = flip_family()
    g = family_spectrum_grid(fam, (-2, 2, -2, 2), 64, 64, grid)
    marked = g.cells_with_class(CLS_SPECTRUM).ravel()
    diag = np.hypot(*g.cell_size())
    assert len(marked) >= 1
    assert np.all(np.abs(marked) <= diag)


def test_grid_nilpotent_spectrum_only_at_origin(grid):
    fam = OperatorFamily.constant(np.eye(3, k=1))
    g = family_spectrum_grid(fam, (-2, 2, -2, 2), 64, 64, grid)
    marked = g.cells_with_class(CLS_SPECTRUM).ravel()
    assert len(marked) >= 1
    assert np.all(np.abs(marked) <= np.hypot(*g.cell_size()))


def test_grid_validation(grid):
    fam = OperatorFamily.constant(np.eye(2))
    with pytest.raises(InputError):
        family_spectrum_grid(fam, (1, 1, -1, 1), 16, 16, grid)
    with pytest.raises(InputError):
        family_spectrum_grid(fam, (-1, 1, -1, 1), 4, 16, grid)


def test_grid_deterministic(grid):
    fam = flip_family()
    a = family_spectrum_grid(fam, (-2, 2, -2, 2), 32, 32, grid)
    b = family_spectrum_grid(fam, (-2, 2, -2, 2), 32, 32, grid)
    assert np.array_equal(a.classes, b.classes)
    assert np.array_equal(a.score, b.score)


def test_spectral_radius_examples(grid):
    assert spectral_radius_bound(
        OperatorFamily.constant(np.diag([1.0, 2.0])), grid
    ).value == pytest.approx(2.0, abs=1e-6)
    assert spectral_radius_bound(flip_family(), grid).value <= 1e-3
    j = OperatorFamily.constant(np.eye(2, k=1))
    assert spectral_radius_bound(j, grid).value == 0.0
    with pytest.raises(InputError):
        spectral_radius_bound(j, grid, n_max=4)


def test_resolvent_identity(grid):
    fam = OperatorFamily.constant(np.diag([1.0, 2.0]))
    stats = resolvent_identity_residual(fam, 0.0, 5.0, grid)
    assert stats.limit_verdict == TO_ZERO
    assert stats.tail_max <= 1e-12
    same = resolvent_identity_residual(fam, 4.0, 4.0, grid)
    assert same.tail_max == 0.0
    with pytest.raises(PreconditionError):
        resolvent_identity_residual(fam, 1.0, 5.0, grid)


def test_resolvent_uniqueness(grid):
    rng = np.random.default_rng(SEED)
    a = rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3))
    b = 0.4 * (rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)))
    fam = OperatorFamily.from_terms(3, [(CoeffFn.const(), a), (CoeffFn.pow_h(1.0), b)])
    lam = fam.sup_bound() * 1.5
    r1 = truncated_resolvent_family(a, b, lam, order=3)

    same = resolvent_uniqueness_residual(fam, lam, r1, r1, grid)
    assert same.precondition_ok
    assert same.stats.limit_verdict == TO_ZERO

    r2 = r1 + OperatorFamily.from_terms(3, [(CoeffFn.pow_h(1.0), 0.2 * a)])
    chk = resolvent_uniqueness_residual(fam, lam, r1, r2, grid)
    assert chk.precondition_ok
    assert chk.stats.limit_verdict == TO_ZERO

    c = np.eye(3, dtype=complex)
    r3 = r1 + OperatorFamily.constant(c)
    chk3 = resolvent_uniqueness_residual(fam, lam, r1, r3, grid)
    assert not chk3.precondition_ok
    assert chk3.stats.limit_verdict == BOUNDED_POSITIVE
    assert chk3.stats.tail_max == pytest.approx(op_norm(c), rel=1e-9)


def test_class_invariance(grid):
    rng = np.random.default_rng(SEED)
    a = rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2))
    f = OperatorFamily.constant(a)
    g = f + OperatorFamily.from_terms(2, [(CoeffFn.exp_inv(1.0), a)])
    rep = class_invariance_check(f, g, (-3, 3, -3, 3), 32, 32, grid)
    assert rep.identical
    with pytest.raises(PreconditionError):
        class_invariance_check(
            f, f + OperatorFamily.constant(np.eye(2)), (-3, 3, -3, 3), 32, 32, grid
        )


def test_compare_grids_ignores_undetermined(grid):
    fam = flip_family()
    a = family_spectrum_grid(fam, (-2, 2, -2, 2), 16, 16, grid)
    b = family_spectrum_grid(fam, (-2, 2, -2, 2), 16, 16, grid)
    rep = compare_grids(a, b)
    assert rep.identical
    assert rep.n_cells == 256
