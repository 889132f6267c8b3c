import itertools

import numpy as np
import pytest

from entropic_nc.exceptions import ExclusivityViolation, InvalidDistribution, MalformedTargets
from entropic_nc.inequality import evaluate_m, pair_distribution
from entropic_nc.model import normalize
from entropic_nc.oracle import (
    EXCLUSIVE_SUPPORT,
    OUTCOMES,
    JointDistribution5,
    check_joint_extension,
    classical_m,
    classical_m_batch,
    marginalize_pair,
    pair_table,
    run_classical_oracle,
    sample_joint_distributions,
    single_marginal,
)


def _brute_pair_table(atoms, i):
    """Sum atoms by explicit enumeration of all 32 outcome tuples."""
    j = i % 5
    t = np.zeros((2, 2))
    flat = np.asarray(atoms).reshape(32)
    for k, x in enumerate(itertools.product((-1, 1), repeat=5)):
        t[(x[i - 1] + 1) // 2, (x[j] + 1) // 2] += flat[k]
    return t


def test_exclusive_support_is_independent_sets_of_c5():
    # independent sets of the 5-cycle on the +1 labels, counted by brute force
    count = sum(
        1
        for x in itertools.product((0, 1), repeat=5)
        if all(not (x[i] and x[(i + 1) % 5]) for i in range(5))
    )
    assert len(EXCLUSIVE_SUPPORT) == count
    for k in EXCLUSIVE_SUPPORT:
        x = OUTCOMES[k]
        assert not any(x[i] == 1 and x[(i + 1) % 5] == 1 for i in range(5))


def test_joint_distribution_validation():
    with pytest.raises(InvalidDistribution):
        JointDistribution5(np.full(32, 0.1))
    with pytest.raises(InvalidDistribution):
        JointDistribution5(np.r_[2.0, -1.0, np.zeros(30)])


def test_uniform_marginals():
    jd = JointDistribution5.uniform()
    for i in range(1, 6):
        np.testing.assert_allclose(marginalize_pair(jd, i, exclusive=False), np.full((2, 2), 0.25))
        with pytest.raises(ExclusivityViolation):
            marginalize_pair(jd, i)


def test_point_mass_marginals():
    jd = JointDistribution5.point_mass((-1,) * 5)
    for i in range(1, 6):
        pd = marginalize_pair(jd, i)
        assert (pd.p_mm, pd.p_mp, pd.p_pm) == (1.0, 0.0, 0.0)


@pytest.mark.parametrize("exclusive", [False, True])
def test_pair_tables_match_enumeration(exclusive):
    rng = np.random.default_rng(3)
    for atoms in sample_joint_distributions(rng, 20, 1.0, exclusive):
        jd = JointDistribution5(atoms)
        for i in range(1, 6):
            np.testing.assert_allclose(pair_table(jd, i), _brute_pair_table(atoms, i), atol=1e-15)
            if exclusive:
                pd = marginalize_pair(jd, i)
                assert pd.p_pp == 0


def test_single_marginal_consistent_with_pairs():
    rng = np.random.default_rng(4)
    jd = JointDistribution5(sample_joint_distributions(rng, 1, 0.5)[0])
    for i in range(1, 6):
        assert single_marginal(jd, i) == pytest.approx(pair_table(jd, i)[1].sum(), abs=1e-15)
        prev = (i - 2) % 5 + 1
        assert single_marginal(jd, i) == pytest.approx(pair_table(jd, prev)[:, 1].sum(), abs=1e-15)


def test_classical_m_point_mass_exactly_zero():
    for x in OUTCOMES:
        assert classical_m(JointDistribution5.point_mass(x)) == 0.0


def test_classical_m_uniform():
    # pair entropies 2 bits, single entropies 1 bit: 2 - 4*2 + 3 = -3
    assert classical_m(JointDistribution5.uniform()) == pytest.approx(-3.0, abs=1e-14)


def test_classical_m_batch_matches_scalar():
    rng = np.random.default_rng(8)
    atoms = sample_joint_distributions(rng, 50, 0.3)
    batch = classical_m_batch(atoms)
    for a, m in zip(atoms, batch):
        assert classical_m(JointDistribution5(a)) == m


@pytest.mark.parametrize("exclusive", [False, True])
@pytest.mark.parametrize("concentration", [0.1, 1.0, 10.0])
def test_classical_bound_on_random_joints(exclusive, concentration):
    rng = np.random.default_rng(int(concentration * 10) + exclusive)
    m = classical_m_batch(sample_joint_distributions(rng, 20_000, concentration, exclusive))
    assert m.max() <= 1e-12


def test_oracle_summary_independent_of_workers():
    a = run_classical_oracle(30_000, seed=7, workers=1)
    b = run_classical_oracle(30_000, seed=7, workers=4)
    assert a == b
    assert a.violations_found == 0
    assert a.point_masses == 32
    assert set(a.to_dict()) >= {"samples", "max_m_observed", "violations_found", "seed"}


def test_oracle_exclusive_mode():
    s = run_classical_oracle(9_000, seed=1, exclusive=True)
    assert s.point_masses == len(EXCLUSIVE_SUPPORT)
    assert s.violations_found == 0


# -- joint extension ----------------------------------------------------------------


def test_extension_of_explicit_joint_is_feasible():
    rng = np.random.default_rng(21)
    for atoms in sample_joint_distributions(rng, 10, 0.7, exclusive=True):
        jd = JointDistribution5(atoms)
        targets = [marginalize_pair(jd, i) for i in range(1, 6)]
        v = check_joint_extension(targets)
        assert v.feasible and v.witness is not None
        for i in range(1, 6):
            got = marginalize_pair(v.witness, i)
            want = targets[i - 1]
            assert np.max(np.abs(got.as_array() - want.as_array())) <= 1e-7


def test_entangled_violation_has_no_extension(obs, ent_state):
    v = check_joint_extension([pair_distribution(obs, i, ent_state) for i in range(1, 6)])
    assert not v.feasible
    assert v.witness is None
    assert v.residual > 1e-6


def test_v3_eigenstate_extension_logged_only(obs):
    s = normalize(obs.direction(3))
    v = check_joint_extension([pair_distribution(obs, i, s) for i in range(1, 6)])
    print(f"v3 eigenstate: M={evaluate_m(obs, s).m_value:.4f} feasible={v.feasible} residual={v.residual:.2e}")


def test_violation_implies_infeasible(obs):
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(400):
        x = rng.normal(size=4)
        s = normalize(x)
        if evaluate_m(obs, s).m_value > 1e-6:
            v = check_joint_extension([pair_distribution(obs, i, s) for i in range(1, 6)])
            assert not v.feasible
            checked += 1
    # pad with known violators in case random draws found few
    from entropic_nc.model import entangled_state

    for a, b in [(3.4899, 2.9012), (3.40, 2.95), (0.35, 6.04)]:
        s = entangled_state(a, b)
        assert evaluate_m(obs, s).m_value > 1e-6
        assert not check_joint_extension([pair_distribution(obs, i, s) for i in range(1, 6)]).feasible
        checked += 1
    assert checked >= 3


@pytest.mark.parametrize(
    "targets",
    [
        [(1, 0, 0)] * 4,
        [(0.5, 0.5, 0.5)] * 5,
        [("a", 0, 1)] * 5,
    ],
)
def test_malformed_targets(targets):
    with pytest.raises(MalformedTargets):
        check_joint_extension(targets)


def test_targets_as_plain_triples():
    v = check_joint_extension([(1.0, 0.0, 0.0)] * 5)
    assert v.feasible
    assert v.witness.flat()[0] == pytest.approx(1.0)
