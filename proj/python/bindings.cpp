#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "platoonlab/data_io.hpp"
#include "platoonlab/edie.hpp"
#include "platoonlab/experiments.hpp"
#include "platoonlab/fuel_model.hpp"
#include "platoonlab/idm.hpp"
#include "platoonlab/ou_leader.hpp"
#include "platoonlab/platoon.hpp"
#include "platoonlab/reward.hpp"
#include "platoonlab/td3.hpp"
#include "platoonlab/vehicle_dynamics.hpp"

namespace py = pybind11;
using namespace platoonlab;

namespace {

std::vector<double> column(const Trajectory& traj, double TrajectorySample::*field) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.samples) out.push_back(s.*field);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "car-following RL platoon laboratory (C++ core)";

  // --- trajectories -------------------------------------------------------
  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def(py::init<>())
      .def(py::init([](double t, double x, double v, double a) {
             return TrajectorySample{t, x, v, a};
           }),
           py::arg("t"), py::arg("x"), py::arg("v"), py::arg("a"))
      .def_readwrite("t", &TrajectorySample::t)
      .def_readwrite("x", &TrajectorySample::x)
      .def_readwrite("v", &TrajectorySample::v)
      .def_readwrite("a", &TrajectorySample::a);

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init<>())
      .def_readwrite("samples", &Trajectory::samples)
      .def_readwrite("dt", &Trajectory::dt)
      .def("__len__", &Trajectory::size)
      .def("duration", &Trajectory::duration)
      .def("validate", &Trajectory::validate)
      .def("times", [](const Trajectory& t) { return column(t, &TrajectorySample::t); })
      .def("positions", [](const Trajectory& t) { return column(t, &TrajectorySample::x); })
      .def("speeds", [](const Trajectory& t) { return column(t, &TrajectorySample::v); })
      .def("accels", [](const Trajectory& t) { return column(t, &TrajectorySample::a); });

  // --- vehicle dynamics ---------------------------------------------------
  py::class_<KinematicState>(m, "KinematicState")
      .def(py::init([](double v, double dv, double gap, double time_gap) {
             return KinematicState{v, dv, gap, time_gap};
           }),
           py::arg("v"), py::arg("dv"), py::arg("gap"), py::arg("time_gap") = 1.5)
      .def_readwrite("v", &KinematicState::v)
      .def_readwrite("dv", &KinematicState::dv)
      .def_readwrite("gap", &KinematicState::gap)
      .def_readwrite("time_gap", &KinematicState::time_gap);

  py::class_<Action>(m, "Action")
      .def(py::init<double>(), py::arg("accel"))
      .def_readonly("accel", &Action::accel)
      .def_readonly_static("MIN", &Action::kMin)
      .def_readonly_static("MAX", &Action::kMax);

  m.def("step", &step, py::arg("state"), py::arg("action"), py::arg("leader_v_next"),
        py::arg("dt") = 0.1);
  m.def("time_to_collision", &time_to_collision);
  m.def("jerk", &jerk, py::arg("a_curr"), py::arg("a_prev"), py::arg("dt") = 0.1);
  m.def("detect_collision", &detect_collision);

  // --- reward -------------------------------------------------------------
  py::class_<RewardWeights>(m, "RewardWeights")
      .def(py::init<>())
      .def_readwrite("w_ttc", &RewardWeights::w_ttc)
      .def_readwrite("w_eff", &RewardWeights::w_eff)
      .def_readwrite("w_jerk", &RewardWeights::w_jerk)
      .def_readwrite("w_speed", &RewardWeights::w_speed)
      .def_readwrite("w_fuel", &RewardWeights::w_fuel)
      .def_readwrite("w_collision", &RewardWeights::w_collision);

  py::class_<RewardConfig>(m, "RewardConfig")
      .def(py::init<>())
      .def_readwrite("ttc_threshold", &RewardConfig::ttc_threshold)
      .def_readwrite("s0", &RewardConfig::s0)
      .def_readwrite("v_limit", &RewardConfig::v_limit)
      .def_readwrite("log_base_m", &RewardConfig::log_base_m)
      .def_readwrite("sigma", &RewardConfig::sigma)
      .def_readwrite("weights", &RewardConfig::weights)
      .def_readwrite("collision_penalty", &RewardConfig::collision_penalty)
      .def_readwrite("a_min", &RewardConfig::a_min)
      .def_readwrite("a_max", &RewardConfig::a_max)
      .def_readwrite("dt", &RewardConfig::dt);

  py::class_<RewardBreakdown>(m, "RewardBreakdown")
      .def_readonly("f_ttc", &RewardBreakdown::f_ttc)
      .def_readonly("f_eff", &RewardBreakdown::f_eff)
      .def_readonly("f_jerk", &RewardBreakdown::f_jerk)
      .def_readonly("f_speed", &RewardBreakdown::f_speed)
      .def_readonly("f_fuel", &RewardBreakdown::f_fuel)
      .def_readonly("total", &RewardBreakdown::total)
      .def_readonly("collided", &RewardBreakdown::collided);

  m.def("f_ttc", &f_ttc);
  m.def("f_jerk", &f_jerk);
  m.def("desired_gap", &desired_gap);
  m.def("f_eff", &f_eff);
  m.def("f_speed", &f_speed);
  m.def("f_fuel", &f_fuel);
  m.def("total_reward", &total_reward, py::arg("f_ttc"), py::arg("f_eff"),
        py::arg("f_jerk"), py::arg("f_speed"), py::arg("f_fuel"), py::arg("collided"),
        py::arg("cfg"));

  // --- fuel ----------------------------------------------------------------
  py::class_<FuelParams>(m, "FuelParams")
      .def(py::init<>())
      .def_readwrite("rho", &FuelParams::rho)
      .def_readwrite("c_d", &FuelParams::c_d)
      .def_readwrite("c_h", &FuelParams::c_h)
      .def_readwrite("a_f", &FuelParams::a_f)
      .def_readwrite("g", &FuelParams::g)
      .def_readwrite("c_r", &FuelParams::c_r)
      .def_readwrite("c1", &FuelParams::c1)
      .def_readwrite("c2", &FuelParams::c2)
      .def_readwrite("mass", &FuelParams::mass)
      .def_readwrite("eta_d", &FuelParams::eta_d)
      .def_readwrite("grade", &FuelParams::grade);

  py::class_<FuelRecord>(m, "FuelRecord")
      .def_readonly("bin_lo_kmh", &FuelRecord::bin_lo_kmh)
      .def_readonly("bin_hi_kmh", &FuelRecord::bin_hi_kmh)
      .def_readonly("distance_km", &FuelRecord::distance_km)
      .def_readonly("fuel_l", &FuelRecord::fuel_l)
      .def_readonly("efficiency_km_per_l", &FuelRecord::efficiency_km_per_l);

  py::class_<AccelFractionRecord>(m, "AccelFractionRecord")
      .def_readonly("bin_lo_kmh", &AccelFractionRecord::bin_lo_kmh)
      .def_readonly("bin_hi_kmh", &AccelFractionRecord::bin_hi_kmh)
      .def_readonly("fraction", &AccelFractionRecord::fraction)
      .def_readonly("n_samples", &AccelFractionRecord::n_samples);

  m.def("resistance", &resistance);
  m.def("driveline_power", &driveline_power);
  m.def("fuel_rate", &fuel_rate);
  m.def("trajectory_fuel", &trajectory_fuel);
  m.def("fuel_efficiency_by_bin", &fuel_efficiency_by_bin, py::arg("trajectories"),
        py::arg("bin_width_kmh") = 10.0, py::arg("params") = FuelParams{});
  m.def("positive_accel_fraction_by_bin", &positive_accel_fraction_by_bin,
        py::arg("trajectories"), py::arg("bin_width_kmh") = 10.0,
        py::arg("threshold") = 0.0);

  // --- baselines ------------------------------------------------------------
  py::class_<IdmParams>(m, "IdmParams")
      .def(py::init<>())
      .def_readwrite("v0", &IdmParams::v0)
      .def_readwrite("T", &IdmParams::T)
      .def_readwrite("s0", &IdmParams::s0)
      .def_readwrite("a", &IdmParams::a)
      .def_readwrite("b", &IdmParams::b)
      .def_readwrite("delta", &IdmParams::delta);

  m.def("idm_accel", &idm_accel);
  m.def("idm_equilibrium_gap", &idm_equilibrium_gap);

  py::class_<OuLeaderConfig>(m, "OuLeaderConfig")
      .def(py::init<>())
      .def_readwrite("v_min_kmh", &OuLeaderConfig::v_min_kmh)
      .def_readwrite("v_max_kmh", &OuLeaderConfig::v_max_kmh)
      .def_readwrite("speed_step_kmh", &OuLeaderConfig::speed_step_kmh)
      .def_readwrite("phase_min_s", &OuLeaderConfig::phase_min_s)
      .def_readwrite("phase_max_s", &OuLeaderConfig::phase_max_s)
      .def_readwrite("theta", &OuLeaderConfig::theta)
      .def_readwrite("sigma", &OuLeaderConfig::sigma)
      .def_readwrite("total_duration_s", &OuLeaderConfig::total_duration_s)
      .def_readwrite("dt", &OuLeaderConfig::dt)
      .def_readwrite("seed", &OuLeaderConfig::seed);

  m.def("generate_ou_leader", &generate_ou_leader);

  // --- policy & platoon -----------------------------------------------------
  py::class_<Policy>(m, "Policy")
      .def("act", &Policy::act)
      .def_readonly("config_fingerprint", &Policy::config_fingerprint);

  m.def("load_policy", &load_policy);
  m.def("save_policy", &save_policy);

  py::enum_<ControllerKind>(m, "ControllerKind")
      .value("RL", ControllerKind::Rl)
      .value("IDM", ControllerKind::Idm);

  py::class_<CompositionEntry>(m, "CompositionEntry")
      .def(py::init([](ControllerKind kind, double time_gap, double share) {
             return CompositionEntry{kind, time_gap, share};
           }),
           py::arg("controller"), py::arg("time_gap"), py::arg("share"))
      .def_readwrite("controller", &CompositionEntry::controller)
      .def_readwrite("time_gap", &CompositionEntry::time_gap)
      .def_readwrite("share", &CompositionEntry::share);

  py::class_<CompositionSpec>(m, "CompositionSpec")
      .def(py::init<>())
      .def_readwrite("n_followers", &CompositionSpec::n_followers)
      .def_readwrite("entries", &CompositionSpec::entries)
      .def_readwrite("seed", &CompositionSpec::seed);

  py::class_<FollowerInit>(m, "FollowerInit")
      .def(py::init([](double gap, double v, double a) {
             return FollowerInit{gap, v, a};
           }),
           py::arg("gap"), py::arg("v"), py::arg("a") = 0.0)
      .def_readwrite("gap", &FollowerInit::gap)
      .def_readwrite("v", &FollowerInit::v)
      .def_readwrite("a", &FollowerInit::a);

  py::class_<CollisionEvent>(m, "CollisionEvent")
      .def_readonly("follower_index", &CollisionEvent::follower_index)
      .def_readonly("t", &CollisionEvent::t);

  py::class_<FollowerRecord>(m, "FollowerRecord")
      .def_readonly("trajectory", &FollowerRecord::trajectory)
      .def_readonly("controller", &FollowerRecord::controller)
      .def_readonly("time_gap", &FollowerRecord::time_gap);

  py::class_<PlatoonResult>(m, "PlatoonResult")
      .def_readonly("leader", &PlatoonResult::leader)
      .def_readonly("followers", &PlatoonResult::followers)
      .def_readonly("collisions", &PlatoonResult::collisions)
      .def("all_trajectories", &PlatoonResult::all_trajectories);

  m.def(
      "rollout_follower",
      [](const Policy& policy, const Trajectory& leader, double time_gap,
         const FollowerInit& init) {
        auto r = rollout_follower(policy, leader, time_gap, init);
        return py::make_tuple(r.trajectory, r.collided, r.collision_time);
      },
      py::arg("policy"), py::arg("leader"), py::arg("time_gap"), py::arg("init"));
  m.def(
      "rollout_follower_idm",
      [](const IdmParams& idm, const Trajectory& leader, double time_gap,
         const FollowerInit& init) {
        auto r = rollout_follower(idm, leader, time_gap, init);
        return py::make_tuple(r.trajectory, r.collided, r.collision_time);
      },
      py::arg("idm"), py::arg("leader"), py::arg("time_gap"), py::arg("init"));
  m.def(
      "build_platoon",
      [](const Trajectory& leader, const CompositionSpec& spec, const Policy* policy,
         const IdmParams& idm, bool abort_on_collision) {
        return build_platoon(leader, spec, policy, idm, abort_on_collision);
      },
      py::arg("leader"), py::arg("spec"), py::arg("policy") = nullptr,
      py::arg("idm") = IdmParams{}, py::arg("abort_on_collision") = true);

  // --- fundamental diagram ---------------------------------------------------
  py::class_<Parallelogram>(m, "Parallelogram")
      .def(py::init<>())
      .def_readwrite("t0", &Parallelogram::t0)
      .def_readwrite("x0", &Parallelogram::x0)
      .def_readwrite("w_kmh", &Parallelogram::w_kmh)
      .def_readwrite("v_star_kmh", &Parallelogram::v_star_kmh)
      .def_readwrite("extent_w_m", &Parallelogram::extent_w_m)
      .def_readwrite("extent_v_s", &Parallelogram::extent_v_s)
      .def("area", &Parallelogram::area)
      .def("contains", &Parallelogram::contains);

  py::class_<FdGeometry>(m, "FdGeometry")
      .def(py::init<>())
      .def_readwrite("shockwave_kmh", &FdGeometry::shockwave_kmh)
      .def_readwrite("extent_w_m", &FdGeometry::extent_w_m)
      .def_readwrite("extent_v_s", &FdGeometry::extent_v_s)
      .def_readwrite("min_vehicles", &FdGeometry::min_vehicles)
      .def_readwrite("speed_tol_kmh", &FdGeometry::speed_tol_kmh)
      .def_readwrite("anchor_dt_s", &FdGeometry::anchor_dt_s)
      .def_readwrite("anchor_dx_m", &FdGeometry::anchor_dx_m)
      .def_readwrite("v_star_min_kmh", &FdGeometry::v_star_min_kmh)
      .def_readwrite("v_star_max_kmh", &FdGeometry::v_star_max_kmh)
      .def_readwrite("v_star_step_kmh", &FdGeometry::v_star_step_kmh);

  py::class_<FDPoint>(m, "FDPoint")
      .def_readonly("k_veh_km", &FDPoint::k_veh_km)
      .def_readonly("q_veh_h", &FDPoint::q_veh_h)
      .def_readonly("v_kmh", &FDPoint::v_kmh)
      .def_readonly("n_vehicles", &FDPoint::n_vehicles)
      .def_readonly("region", &FDPoint::region);

  py::class_<FDGroup>(m, "FDGroup")
      .def_readonly("v_star_kmh", &FDGroup::v_star_kmh)
      .def_readonly("mean_k_veh_km", &FDGroup::mean_k_veh_km)
      .def_readonly("mean_q_veh_h", &FDGroup::mean_q_veh_h)
      .def_readonly("n_regions", &FDGroup::n_regions);

  py::class_<FDCurve>(m, "FDCurve").def_readonly("groups", &FDCurve::groups);

  py::class_<FDSummary>(m, "FDSummary")
      .def_readonly("optimal_density_veh_km", &FDSummary::optimal_density_veh_km)
      .def_readonly("capacity_veh_h", &FDSummary::capacity_veh_h);

  m.def("micro_fd", &micro_fd, py::arg("spacing_m"), py::arg("v_e_kmh"));
  m.def("generate_regions", &generate_regions, py::arg("trajectories"),
        py::arg("v_star_kmh"), py::arg("geometry") = FdGeometry{});
  m.def("measure_exact", &measure_exact);
  m.def("measure_approx", &measure_approx);
  m.def("fd_curve", &fd_curve, py::arg("trajectories"), py::arg("geometry") = FdGeometry{});
  m.def("fd_summary", &fd_summary);

  // --- training ---------------------------------------------------------------
  py::class_<TrainerConfig>(m, "TrainerConfig")
      .def(py::init<>())
      .def_readwrite("gamma", &TrainerConfig::gamma)
      .def_readwrite("tau", &TrainerConfig::tau)
      .def_readwrite("policy_delay", &TrainerConfig::policy_delay)
      .def_readwrite("explore_sigma", &TrainerConfig::explore_sigma)
      .def_readwrite("smooth_sigma", &TrainerConfig::smooth_sigma)
      .def_readwrite("smooth_clip", &TrainerConfig::smooth_clip)
      .def_readwrite("batch_size", &TrainerConfig::batch_size)
      .def_readwrite("buffer_capacity", &TrainerConfig::buffer_capacity)
      .def_readwrite("episodes", &TrainerConfig::episodes)
      .def_readwrite("lr_actor", &TrainerConfig::lr_actor)
      .def_readwrite("lr_critic", &TrainerConfig::lr_critic)
      .def_readwrite("hidden_units", &TrainerConfig::hidden_units)
      .def_readwrite("start_steps", &TrainerConfig::start_steps)
      .def_readwrite("update_every", &TrainerConfig::update_every)
      .def_readwrite("train_time_gaps", &TrainerConfig::train_time_gaps)
      .def_readwrite("runaway_gap", &TrainerConfig::runaway_gap)
      .def_readwrite("seed", &TrainerConfig::seed);

  m.def(
      "train_policy",
      [](const std::vector<Trajectory>& leaders, const TrainerConfig& trainer,
         const RewardConfig& reward, const FuelParams& fuel) {
        Td3Trainer t(trainer, reward, fuel);
        TrainResult r = t.train(leaders);
        return py::make_tuple(r.policy, r.episode_rewards, r.normalized_rolling);
      },
      py::arg("leader_episodes"), py::arg("trainer") = TrainerConfig{},
      py::arg("reward") = RewardConfig{}, py::arg("fuel") = FuelParams{});

  py::class_<EvalMetrics>(m, "EvalMetrics")
      .def_readonly("episodes", &EvalMetrics::episodes)
      .def_readonly("collision_count", &EvalMetrics::collision_count)
      .def_readonly("mean_reward", &EvalMetrics::mean_reward)
      .def_readonly("mean_ttc_margin", &EvalMetrics::mean_ttc_margin);

  m.def("evaluate_policy", &evaluate, py::arg("policy"), py::arg("test_episodes"),
        py::arg("reward") = RewardConfig{}, py::arg("fuel") = FuelParams{},
        py::arg("time_gap") = 1.5, py::arg("seed") = 0);

  // --- data io / experiments ---------------------------------------------------
  py::class_<CfEvent>(m, "CfEvent")
      .def_readonly("leader_id", &CfEvent::leader_id)
      .def_readonly("follower_id", &CfEvent::follower_id)
      .def_readonly("lane", &CfEvent::lane)
      .def_readonly("t_start", &CfEvent::t_start)
      .def_readonly("t_end", &CfEvent::t_end)
      .def_readonly("leader", &CfEvent::leader)
      .def_readonly("follower", &CfEvent::follower);

  m.def("parse_ngsim_events",
        [](const std::string& path, double min_duration, double max_gap) {
          CfCriteria criteria{min_duration, max_gap};
          return extract_cf_events(parse_ngsim(path), criteria);
        },
        py::arg("path"), py::arg("min_duration_s") = 30.0, py::arg("max_gap_m") = 120.0);
  m.def("split_train_test", &split_train_test, py::arg("events"), py::arg("ratio") = 0.7,
        py::arg("seed") = 0);
  m.def("write_trajectory_csv", &write_trajectory_csv);
  m.def("read_trajectory_csv", &read_trajectory_csv);

  py::class_<ResultTable>(m, "ResultTable")
      .def_readonly("scenario", &ResultTable::scenario)
      .def_readonly("fingerprint", &ResultTable::fingerprint)
      .def_readonly("seed", &ResultTable::seed)
      .def_readonly("columns", &ResultTable::columns)
      .def_readonly("rows", &ResultTable::rows);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("preset", &make_preset, py::arg("name") = "desk")
      .def_static("from_json", &ExperimentConfig::from_json_string)
      .def("to_json", &ExperimentConfig::to_json_string)
      .def("fingerprint", &ExperimentConfig::fingerprint)
      .def_readwrite("scenario", &ExperimentConfig::scenario)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("policy_file", &ExperimentConfig::policy_file)
      .def_readwrite("ngsim_file", &ExperimentConfig::ngsim_file)
      .def_readwrite("trajectory_dir", &ExperimentConfig::trajectory_dir)
      .def_readwrite("n_followers", &ExperimentConfig::n_followers)
      .def_readwrite("reward", &ExperimentConfig::reward)
      .def_readwrite("trainer", &ExperimentConfig::trainer)
      .def_readwrite("idm", &ExperimentConfig::idm)
      .def_readwrite("fd", &ExperimentConfig::fd)
      .def_readwrite("leader", &ExperimentConfig::leader)
      .def_readwrite("train_leader", &ExperimentConfig::train_leader);

  m.def("run_scenario", &run_scenario);
}
