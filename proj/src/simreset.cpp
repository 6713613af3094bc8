#include "fracreset/simreset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace fracreset {

void validate(const SimulationConfig& cfg) {
  if (!(cfg.h > 0.0) || !(cfg.h < cfg.horizon)) {
    throw DimensionMismatch("simulation config: need 0 < h < horizon");
  }
  if (cfg.horizon / cfg.h > 1e7) {
    throw DimensionMismatch("simulation config: horizon/h exceeds 1e7 steps");
  }
}

Trajectory simulate(const ClosedLoopResetSystem& sys,
                    const SimulationConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = sys.order();
  const std::size_t steps = static_cast<std::size_t>(
      std::llround(cfg.horizon / cfg.h));

  auto weights = std::make_shared<const GLWeights>(
      gl_weights(sys.alpha, cfg.max_memory > 0 ? cfg.max_memory : steps + 1));
  GLState state(weights, cfg.h, Vector::Zero(n), cfg.max_memory);

  StateSpaceModel flow{sys.a_cl, sys.b_cl, sys.c_cl, sys.alpha};
  const std::vector<Eigen::Index> reset_idx = sys.reset_indices();
  const Vector u_row = sys.reset_output_row();
  const bool can_reset = !reset_idx.empty();

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.output.reserve(steps + 1);
  traj.control.reserve(steps + 1);

  Vector x = Vector::Zero(n);
  auto record = [&](double t, const Vector& xs) {
    traj.times.push_back(t);
    traj.states.push_back(xs);
    traj.output.push_back((sys.c_cl * xs)(0, 0));
    traj.control.push_back(u_row.dot(xs));
  };
  record(0.0, x);

  double e_prev = cfg.reference.value(0.0) - traj.output.back();
  int guard = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_k = static_cast<double>(k) * cfg.h;
    const double t_next = static_cast<double>(k + 1) * cfg.h;
    Vector x_next = gl_step(flow, state, cfg.reference.value(t_k));
    const double e_next =
        cfg.reference.value(t_next) - (sys.c_cl * x_next)(0, 0);

    bool fired = false;
    if (can_reset && guard == 0) {
      const bool crossing =
          e_prev * e_next < 0.0 || std::abs(e_next) <= cfg.detection_tol;
      double jump_size = 0.0;
      for (Eigen::Index idx : reset_idx) {
        jump_size = std::max(jump_size, std::abs(x_next[idx]));
      }
      if (crossing && jump_size > cfg.detection_tol) {
        state.reset_components(reset_idx, cfg.memory_mode);
        x_next = state.current();
        traj.reset_instants.push_back(t_next);
        fired = true;
      }
    }
    guard = fired ? 1 : std::max(0, guard - 1);

    record(t_next, x_next);
    e_prev = cfg.reference.value(t_next) - traj.output.back();

    if (x_next.cwiseAbs().maxCoeff() > 1e12) {
      traj.diverged = true;
      break;
    }
  }
  return traj;
}

StepMetrics step_metrics(const Trajectory& traj, double r) {
  if (traj.size() == 0) throw EmptyTrajectory("step_metrics: no samples");
  const std::size_t n = traj.size();
  const std::size_t tail = std::max<std::size_t>(1, n / 20);

  double y_final = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) y_final += traj.output[i];
  y_final /= static_cast<double>(tail);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (traj.output[i] > traj.output[peak]) peak = i;
  }

  StepMetrics m;
  m.y_final = y_final;
  m.overshoot = y_final != 0.0
                    ? (traj.output[peak] - y_final) / y_final
                    : 0.0;
  m.peak_time = traj.times[peak];
  m.steady_state_error = r - y_final;

  const double band = 0.02 * std::abs(y_final);
  std::size_t settle = n;  // first index from which y stays inside the band
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(traj.output[i] - y_final) > band) {
      settle = i + 1;
      break;
    }
    settle = i;
  }
  if (settle < n) {
    m.settling_time = traj.times[settle];
  }
  return m;
}

namespace {

void print_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::string body = "t,y,u_r";
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    body += ",x_" + std::to_string(i);
  }
  body += "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    print_g17(body, traj.times[k]);
    body += ',';
    print_g17(body, traj.output[k]);
    body += ',';
    print_g17(body, traj.control[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      body += ',';
      print_g17(body, traj.states[k][i]);
    }
    body += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IOError", "cannot open " + path);
  f << body;
}

void write_resets_json(const Trajectory& traj, const std::string& path) {
  std::string body = "[";
  for (std::size_t i = 0; i < traj.reset_instants.size(); ++i) {
    if (i) body += ", ";
    print_g17(body, traj.reset_instants[i]);
  }
  body += "]\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IOError", "cannot open " + path);
  f << body;
}

}  // namespace fracreset
