import math

import pytest

import fedlinucb as fl


def test_run_and_bookkeeping():
    inst = fl.gen_instance(dim=3, arms_per_round=6, seed=5)
    sched = fl.gen_schedule("round-robin", num_agents=4, horizon=400)
    hp = fl.HyperParams.defaults_for(4, 1.0)
    tr = fl.run_fedlinucb(inst, sched, hp)
    assert tr.horizon == 400
    assert len(tr.rewards) == 400
    assert sum(tr.comm) == tr.comm_count == 2 * tr.switch_count
    assert tr.comm_count <= fl.theoretical_comm_bound(3, 4, hp.alpha, hp.lam, 1.0, 400)
    assert tr.epoch_starts[0] == 1
    assert all(b >= a for a, b in zip(tr.cum_regret, tr.cum_regret[1:]))
    assert tr.total_regret == pytest.approx(sum(tr.inst_regret))


def test_deterministic():
    inst = fl.gen_instance(dim=4, seed=9)
    sched = fl.gen_schedule("iid-uniform", num_agents=3, horizon=300, seed=2)
    hp = fl.HyperParams(lam=1.0, alpha=0.1)
    a = fl.run_fedlinucb(inst, sched, hp)
    b = fl.run_fedlinucb(inst, sched, hp)
    assert a.rewards == b.rewards and a.arm_indices == b.arm_indices


def test_beta_and_bounds():
    inst = fl.gen_instance(dim=2, seed=0)
    hp = fl.HyperParams(lam=1.0, alpha=1 / 16, delta=0.1)
    beta = fl.compute_beta(inst, hp, 4, 100)
    assert beta == pytest.approx(14.6746943204319, abs=1e-9)
    assert fl.theoretical_regret_bound(inst, hp, 4, 100, beta) == pytest.approx(2067.68320412945, abs=1e-6)
    assert fl.theoretical_comm_bound(2, 4, 1 / 16, 1.0, 1.0, 100) == pytest.approx(218.026708142095)


def test_bias_demo_modes():
    eager = fl.bias_demo(10000, 0.5, 10.5, 7, "eager")
    lazy = fl.bias_demo(10000, 0.5, 10.5, 7, "lazy")
    assert abs(eager.predicted_reward_a - 0.5) <= 0.05
    assert abs(lazy.predicted_reward_a) <= 0.05
    assert lazy.upload_fraction == 1.0
    with pytest.raises(ValueError):
        fl.bias_demo(10, 1.5, 10.5, 7)


def test_episodic_matches_flattened():
    inst = fl.gen_instance(dim=3, seed=4)
    sched = fl.gen_schedule("iid-uniform", num_agents=3, horizon=200, seed=8)
    hp = fl.HyperParams(alpha=0.2)
    a = fl.run_episodic(inst, [[m] for m in sched.agents], 3, hp)
    b = fl.run_fedlinucb(inst, sched, hp)
    assert a.rewards == b.rewards and a.det_server == b.det_server


def test_baseline_and_invariants():
    inst = fl.gen_instance(dim=4, seed=1)
    sched = fl.gen_schedule("round-robin", num_agents=4, horizon=600)
    hp = fl.HyperParams.defaults_for(4, 1.0)
    assert fl.run_independent_oful(inst, sched, hp).comm_count == 0
    checks = fl.run_invariant_suite(inst, sched, hp)
    assert checks and all(c.passed for c in checks), [(c.name, c.detail) for c in checks if not c.passed]
    tr = fl.run_fedlinucb(inst, sched, hp)
    assert fl.elliptical_potential_sum(tr, 1.0) <= 2 * 4 * math.log(1 + 600)


def test_invalid_params():
    with pytest.raises(ValueError):
        fl.HyperParams(delta=1.5)
    with pytest.raises(ValueError):
        fl.gen_schedule("block", num_agents=3, horizon=10)
