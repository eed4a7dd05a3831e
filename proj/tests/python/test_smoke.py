"""Smoke tests for the python module: formulas, generation, platoon + FD."""

import math
import os

import pytest

import platoonlab as pl


def test_kinematic_step():
    s = pl.KinematicState(v=10.0, dv=0.0, gap=20.0, time_gap=1.5)
    n = pl.step(s, pl.Action(1.0), 10.0, 0.1)
    assert n.v == pytest.approx(10.1)
    assert n.dv == pytest.approx(-0.1)
    assert n.gap == pytest.approx(20.0)


def test_action_clamps():
    assert pl.Action(9.0).accel == 2.0
    assert pl.Action(-9.0).accel == -4.0


def test_ttc_and_collision():
    assert pl.time_to_collision(pl.KinematicState(15.0, -5.0, 20.0, 1.5)) == pytest.approx(4.0)
    assert math.isinf(pl.time_to_collision(pl.KinematicState(10.0, 2.0, 20.0, 1.5)))
    assert pl.detect_collision(pl.KinematicState(5.0, 0.0, 0.0, 1.5))


def test_reward_components():
    cfg = pl.RewardConfig()
    assert pl.f_ttc(0.0, cfg) == pytest.approx(-1.0)
    assert pl.f_ttc(cfg.ttc_threshold, cfg) == 0.0
    s_star = pl.desired_gap(10.0, 1.5, cfg)
    assert pl.f_eff(s_star, 10.0, 1.5, cfg) == pytest.approx(1.0)
    assert pl.f_eff(s_star * math.e, 10.0, 1.5, cfg) == pytest.approx(math.exp(-0.5))
    assert pl.f_fuel(99.0, 1.0, cfg) == pytest.approx(32.0)


def test_fuel_model_values():
    p = pl.FuelParams()
    assert pl.fuel_rate(0.0) == pytest.approx(0.000341)
    assert pl.resistance(0.0, p) == pytest.approx(157.018575)
    assert pl.driveline_power(20.0, 0.0, p) == pytest.approx(7.912134208695652)


def test_idm_equilibrium():
    idm = pl.IdmParams()
    gap = pl.idm_equilibrium_gap(15.0, idm)
    assert pl.idm_accel(15.0, 0.0, gap, idm) == pytest.approx(0.0, abs=1e-9)


def test_ou_leader_reproducible():
    cfg = pl.OuLeaderConfig()
    cfg.seed = 7
    cfg.total_duration_s = 60.0
    a = pl.generate_ou_leader(cfg)
    b = pl.generate_ou_leader(cfg)
    assert a.speeds() == b.speeds()
    assert max(a.speeds()) <= 25.0 + 1e-12
    assert len(a) == 601


def test_idm_platoon_fd_roundtrip():
    leader_cfg = pl.OuLeaderConfig()
    leader_cfg.seed = 33
    leader_cfg.total_duration_s = 1800.0
    leader_cfg.phase_min_s = 45.0
    leader_cfg.phase_max_s = 120.0
    leader = pl.generate_ou_leader(leader_cfg)

    spec = pl.CompositionSpec()
    spec.n_followers = 45
    spec.entries = [pl.CompositionEntry(pl.ControllerKind.IDM, 1.5, 1.0)]
    spec.seed = 4
    platoon = pl.build_platoon(leader, spec)
    assert len(platoon.followers) == 45
    assert not platoon.collisions

    curve = pl.fd_curve(platoon.all_trajectories(), pl.FdGeometry())
    assert len(curve.groups) >= 1
    summary = pl.fd_summary(curve)
    assert summary.capacity_veh_h > 0.0


def test_micro_fd():
    k, v, q = pl.micro_fd(20.0, 36.0)
    assert (k, v, q) == (pytest.approx(50.0), 36.0, pytest.approx(1800.0))


def test_tiny_training_and_policy_io(tmp_path):
    leader_cfg = pl.OuLeaderConfig()
    leader_cfg.total_duration_s = 20.0
    leader_cfg.phase_min_s = 8.0
    leader_cfg.phase_max_s = 15.0
    leaders = []
    for seed in range(3):
        leader_cfg.seed = seed
        leaders.append(pl.generate_ou_leader(leader_cfg))

    trainer = pl.TrainerConfig()
    trainer.hidden_units = 16
    trainer.batch_size = 32
    trainer.episodes = 3
    trainer.start_steps = 100
    trainer.buffer_capacity = 10000
    trainer.seed = 1

    policy, rewards, rolling = pl.train_policy(leaders, trainer)
    assert len(rewards) == 3
    assert all(0.0 <= r <= 1.0 for r in rolling)

    path = str(tmp_path / "policy.json")
    pl.save_policy(path, policy)
    loaded = pl.load_policy(path)
    state = pl.KinematicState(10.0, 0.0, 30.0, 1.5)
    assert loaded.act(state) == policy.act(state)
    assert -4.0 <= loaded.act(state) <= 2.0


def test_fixture_events():
    data_dir = os.environ.get("PLATOONLAB_DATA_DIR")
    if not data_dir:
        pytest.skip("PLATOONLAB_DATA_DIR not set")
    fixture = os.path.join(data_dir, "ngsim_fixture.csv")
    events = pl.parse_ngsim_events(fixture)
    assert len(events) >= 9
    train, test = pl.split_train_test(events, 0.7, 1)
    assert len(train) + len(test) == len(events)
