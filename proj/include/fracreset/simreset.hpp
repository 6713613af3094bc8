#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracreset/fode.hpp"
#include "fracreset/models.hpp"

namespace fracreset {

/// Constant or sinusoidal reference signal.
struct Reference {
  double amplitude = 1.0;
  double omega = 0.0;  // 0 -> constant reference

  double value(double t) const {
    return omega == 0.0 ? amplitude : amplitude * std::sin(omega * t);
  }
};

struct SimulationConfig {
  double h = 1e-3;                 // step, seconds
  double horizon = 30.0;           // seconds
  Reference reference{};
  MemoryMode memory_mode = MemoryMode::ClearMemory;
  double detection_tol = 1e-9;     // |e| threshold for a grid-exact crossing
  std::size_t max_memory = 0;      // 0 = full history
};

/// Validates 0 < h < horizon and horizon/h <= 1e7; throws DimensionMismatch
/// on violation of either bound.
void validate(const SimulationConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;         // post-reset values on the grid
  std::vector<double> output;         // y = C_cl x
  std::vector<double> control;        // u_r, the reset element's output
  std::vector<double> reset_instants;
  bool diverged = false;              // ||x||_inf exceeded 1e12; trajectory is
                                      // truncated at the offending step
  std::size_t size() const { return times.size(); }
};

/// Fixed-step closed-loop simulation. Between resets states advance by
/// gl_step; a reset fires at the first grid point after a sign change of
/// e = r - y (or where |e| <= detection_tol), provided (I - A_R)x != 0 and no
/// reset fired at the previous grid point (one-step re-fire guard). On
/// firing, x <- A_R x and the reset states' memory is handled per
/// cfg.memory_mode. Divergence (||x||_inf > 1e12) stops the run and returns
/// the partial trajectory with the `diverged` flag set.
Trajectory simulate(const ClosedLoopResetSystem& sys,
                    const SimulationConfig& cfg);

struct StepMetrics {
  double overshoot = 0.0;                  // (max y - y_inf)/y_inf
  double peak_time = 0.0;                  // seconds
  std::optional<double> settling_time;     // 2% band; nullopt = unattained
  double steady_state_error = 0.0;         // r - y_inf
  double y_final = 0.0;                    // trailing-mean estimate of y_inf
};

/// Step-response metrics for a constant reference r. y_inf is the mean of the
/// final 5% of samples; all metrics are evaluated on the stored grid without
/// interpolation. A trajectory that never stays inside the 2% band reports
/// settling_time as unattained rather than failing.
/// Throws EmptyTrajectory.
StepMetrics step_metrics(const Trajectory& traj, double r);

/// CSV export: header `t,y,u_r,x_0..x_{n-1}`, one row per grid point, IEEE
/// doubles printed with 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Sidecar JSON array of reset instants.
void write_resets_json(const Trajectory& traj, const std::string& path);

}  // namespace fracreset
