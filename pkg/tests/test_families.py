import numpy as np
import pytest

from opfam.bracket import EQUIVALENT, NOT_EQUIVALENT
from opfam.errors import DimensionMismatchError, InputError
from opfam.families import (
    BOUNDED_POSITIVE,
    INCONCLUSIVE,
    TO_ZERO,
    UNBOUNDED,
    CoeffFn,
    HGrid,
    OperatorFamily,
    VectorFamily,
    asym_qn_equivalent,
    asymptotically_equivalent,
    commute_in_limit,
    is_null_family,
    is_null_vector_family,
    limsup_norm,
    module_action,
    norm_samples,
    quotient_norm_bounds,
    tail_stats,
)

SEED = 31415


def _rand(rng, d):
    return rng.uniform(-1, 1, (d, d)) + 1j * rng.uniform(-1, 1, (d, d))


def test_coeff_catalog():
    assert CoeffFn.pow_h(0.0) == CoeffFn.const()
    c = CoeffFn.pow_h(2.0) * CoeffFn.exp_inv(1.0)
    assert c(0.5) == pytest.approx(0.25 * np.exp(-2.0))
    assert c.is_null is True
    assert CoeffFn.const().is_null is False
    assert CoeffFn.custom(lambda h: h).is_null is None
    # Catalog functions all bounded by 1 on (0, 1].
    for fn in (CoeffFn.const(), CoeffFn.pow_h(3.0), CoeffFn.exp_inv(0.5)):
        assert fn.sup_bound <= 1.0
    with pytest.raises(InputError):
        CoeffFn.pow_h(-1.0)
    with pytest.raises(InputError):
        CoeffFn.exp_inv(0.0)


def test_hgrid_validation_and_parse():
    g = HGrid()
    assert len(g.samples()) == 40
    assert np.all(np.diff(g.samples()) < 0)
    assert HGrid.parse("1:0.5:40:6") == g
    with pytest.raises(InputError):
        HGrid(tail=2)
    with pytest.raises(InputError):
        HGrid(ratio=1.5)
    with pytest.raises(InputError):
        HGrid.parse("1:0.5:40")


def test_tail_stats_verdicts(grid):
    k = np.arange(40)
    decaying = 0.5**k
    assert tail_stats(decaying, 6).limit_verdict == TO_ZERO
    flat = np.full(40, 2.0)
    assert tail_stats(flat, 6).limit_verdict == BOUNDED_POSITIVE
    growing = 2.0**k
    assert tail_stats(growing, 6).limit_verdict == UNBOUNDED
    # Flat but tiny: cannot distinguish a small positive limit from decay.
    assert tail_stats(np.full(40, 1e-9), 6).limit_verdict == INCONCLUSIVE
    # Exactly zero tails are at the floor: trend reported as -inf.
    zeros = tail_stats(np.zeros(40), 6)
    assert zeros.limit_verdict == TO_ZERO
    assert zeros.tail_trend == float("-inf")


def test_tail_stats_invariant(grid):
    rng = np.random.default_rng(SEED)
    for _ in range(200):
        vals = np.abs(rng.normal(size=40)) * 10.0 ** rng.integers(-12, 2)
        st = tail_stats(vals, 6)
        if st.limit_verdict == TO_ZERO:
            assert st.tail_max < st.eps_tail
            assert st.tail_trend < 0


def test_limsup_norm_examples(grid):
    a = np.array([[1.0, 2.0], [0.0, 1.0]], dtype=complex)
    assert limsup_norm(OperatorFamily.constant(a), grid) == pytest.approx(
        np.linalg.norm(a, 2)
    )
    ident = np.eye(2, dtype=complex)
    fam = OperatorFamily.from_terms(
        2, [(CoeffFn.const(), ident), (CoeffFn.exp_inv(1.0), ident)]
    )
    assert limsup_norm(fam, grid) == pytest.approx(1.0, abs=1e-9)
    n = np.array([[0.0, 1.0], [0.0, 0.0]])
    hn = OperatorFamily.from_terms(2, [(CoeffFn.pow_h(1.0), n)])
    tail_first = grid.samples()[-grid.tail]
    assert limsup_norm(hn, grid) == pytest.approx(tail_first, rel=1e-12)


def test_limsup_monotone_in_tail(grid):
    rng = np.random.default_rng(SEED)
    fam = OperatorFamily.from_terms(
        3,
        [(CoeffFn.const(), _rand(rng, 3)), (CoeffFn.pow_h(1.0), _rand(rng, 3))],
    )
    samples = norm_samples(fam, grid)
    estimates = [samples[-m:].max() for m in range(3, 20)]
    assert all(b >= a for a, b in zip(estimates, estimates[1:]))
    assert max(estimates) <= samples.max()


def test_is_null_family(grid):
    rng = np.random.default_rng(SEED)
    a = _rand(rng, 3)
    assert (
        is_null_family(
            OperatorFamily.from_terms(3, [(CoeffFn.pow_h(1.0), a)]), grid
        ).limit_verdict
        == TO_ZERO
    )
    assert (
        is_null_family(OperatorFamily.constant(a), grid).limit_verdict
        == BOUNDED_POSITIVE
    )
    assert (
        is_null_family(
            OperatorFamily.from_terms(3, [(CoeffFn.exp_inv(3.0), a)]), grid
        ).limit_verdict
        == TO_ZERO
    )
    # Cancelling constant terms merge away, so the certificate is honest.
    cancel = OperatorFamily.from_terms(
        3, [(CoeffFn.const(), a), (CoeffFn.const(), -a), (CoeffFn.pow_h(1.0), a)]
    )
    assert is_null_family(cancel, grid).limit_verdict == TO_ZERO
    # Sampled-only coefficients decay but carry no certificate.
    sampled = OperatorFamily.from_terms(3, [(CoeffFn.custom(lambda h: h), a)])
    assert is_null_family(sampled, grid).limit_verdict == INCONCLUSIVE


def test_asymptotic_equivalence_examples(grid):
    rng = np.random.default_rng(SEED)
    a, b, c, n = (_rand(rng, 3) for _ in range(4))
    f = OperatorFamily.constant(a)
    g = f + OperatorFamily.from_terms(3, [(CoeffFn.pow_h(1.0), b)])
    assert asymptotically_equivalent(f, g, grid).limit_verdict == TO_ZERO
    g2 = f + OperatorFamily.constant(n)
    assert asymptotically_equivalent(f, g2, grid).limit_verdict == BOUNDED_POSITIVE
    f3 = f + OperatorFamily.from_terms(3, [(CoeffFn.exp_inv(1.0), b)])
    g3 = f + OperatorFamily.from_terms(3, [(CoeffFn.pow_h(2.0), c)])
    assert asymptotically_equivalent(f3, g3, grid).limit_verdict == TO_ZERO
    with pytest.raises(DimensionMismatchError):
        asymptotically_equivalent(f, OperatorFamily.constant(np.eye(2)), grid)


def test_asym_qn_equivalent_examples(grid):
    f = OperatorFamily.constant(2.0 * np.eye(3))
    g = OperatorFamily.constant(2.0 * np.eye(3) + np.eye(3, k=1))
    assert asym_qn_equivalent(f, g, grid).verdict == EQUIVALENT
    d1 = OperatorFamily.constant(np.diag([0.0, 1.0]))
    d2 = OperatorFamily.constant(np.diag([0.0, 2.0]))
    assert asym_qn_equivalent(d1, d2, grid).verdict == NOT_EQUIVALENT
    # Bounded asymptotically equivalent families are qn equivalent.
    rng = np.random.default_rng(SEED)
    a, b = _rand(rng, 4), _rand(rng, 4)
    fa = OperatorFamily.constant(a)
    fb = fa + OperatorFamily.from_terms(4, [(CoeffFn.pow_h(1.0), b)])
    assert asym_qn_equivalent(fa, fb, grid).verdict == EQUIVALENT


def test_quotient_norm_bounds(grid):
    rng = np.random.default_rng(SEED)
    a = _rand(rng, 3)
    qb = quotient_norm_bounds(OperatorFamily.constant(a), grid)
    assert qb.lower == pytest.approx(qb.upper, abs=1e-12)
    assert qb.lower == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)

    ident = np.eye(2, dtype=complex)
    fam = OperatorFamily.from_terms(
        2, [(CoeffFn.const(), ident), (CoeffFn.exp_inv(1.0), ident)]
    )
    qb = quotient_norm_bounds(fam, grid)
    assert (qb.lower, qb.upper) == (pytest.approx(1.0, abs=1e-9), pytest.approx(1.0, abs=1e-9))
    assert qb.raw_upper == pytest.approx(1.0 + np.exp(-1.0), abs=1e-9)
    lower, upper = qb
    assert (lower, upper) == (qb.lower, qb.upper)

    n = np.array([[0.0, 1.0], [0.0, 0.0]])
    qb = quotient_norm_bounds(OperatorFamily.from_terms(2, [(CoeffFn.pow_h(1.0), n)]), grid)
    assert qb.upper == 0.0
    assert qb.lower <= 1e-7


def test_commute_in_limit_examples(grid):
    rng = np.random.default_rng(SEED)
    a = _rand(rng, 3)
    p = OperatorFamily.constant(a @ a + 2 * a + np.eye(3))
    assert commute_in_limit(OperatorFamily.constant(a), p, grid).limit_verdict == TO_ZERO
    d1 = OperatorFamily.constant(np.diag([1.0, 2.0, 3.0]))
    d2 = OperatorFamily.constant(np.diag([0.0, 1.0, -1.0]))
    assert commute_in_limit(d1, d2, grid).limit_verdict == TO_ZERO
    j = OperatorFamily.constant(np.eye(2, k=1))
    d = OperatorFamily.constant(np.diag([1.0, 2.0]))
    stats = commute_in_limit(j, d, grid)
    assert stats.limit_verdict == BOUNDED_POSITIVE
    assert stats.tail_max == pytest.approx(1.0)


def test_module_action(grid):
    rng = np.random.default_rng(SEED)
    f = OperatorFamily.constant(2.0 * np.eye(2))
    v = VectorFamily.constant(np.array([1.0, 0.0]))
    out = module_action(f, v, grid)
    assert np.allclose(out(0.25), [2.0, 0.0])

    hi = OperatorFamily.from_terms(2, [(CoeffFn.pow_h(1.0), np.eye(2))])
    out = module_action(hi, v, grid)
    assert is_null_vector_family(out, grid).limit_verdict == TO_ZERO

    # Well-definedness under representative change of the vector argument.
    a, b = _rand(rng, 2), _rand(rng, 2)
    fam = OperatorFamily.from_terms(2, [(CoeffFn.const(), a), (CoeffFn.pow_h(1.0), b)])
    w = rng.normal(size=2) + 1j * rng.normal(size=2)
    pert = VectorFamily.from_terms(2, [(CoeffFn.pow_h(1.0), w)])
    diff = module_action(fam, v + pert, grid) - module_action(fam, v, grid)
    assert is_null_vector_family(diff, grid).limit_verdict == TO_ZERO


def test_module_action_submultiplicative(grid):
    rng = np.random.default_rng(SEED + 7)
    for _ in range(200):
        d = int(rng.integers(2, 5))
        f = OperatorFamily.from_terms(
            d,
            [
                (CoeffFn.const(), _rand(rng, d)),
                (CoeffFn.pow_h(float(rng.integers(1, 3))), _rand(rng, d)),
            ],
        )
        x = rng.normal(size=d) + 1j * rng.normal(size=d)
        v = VectorFamily.from_terms(
            d, [(CoeffFn.const(), x), (CoeffFn.exp_inv(1.0), x)]
        )
        # The bound is asserted inside the operation; it raising would fail here.
        module_action(f, v, grid)


def test_family_eval_against_direct_sum(grid):
    rng = np.random.default_rng(SEED)
    a, b = _rand(rng, 3), _rand(rng, 3)
    fam = OperatorFamily.from_terms(
        3, [(CoeffFn.const(), a), (CoeffFn.exp_inv(2.0), b)]
    )
    for h in (1.0, 0.3, 0.05):
        assert np.allclose(fam(h), a + np.exp(-2.0 / h) * b)
    stack = fam.eval_stack(np.array([1.0, 0.3]))
    assert np.allclose(stack[1], fam(0.3))
