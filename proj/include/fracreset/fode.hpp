#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fracreset/numcore.hpp"

namespace fracreset {

/// Grünwald–Letnikov binomial weights w_i = (-1)^i * C(alpha, i), generated
/// by the stable recursion w_0 = 1, w_i = w_{i-1} * (1 - (alpha+1)/i).
/// For alpha == 1 the recursion yields w = [1, -1, 0, 0, ...] exactly, so the
/// scheme degenerates to the forward Euler first difference.
struct GLWeights {
  double alpha = 1.0;
  std::vector<double> w;  // length L + 1

  std::size_t length() const { return w.size(); }
};

/// Throws InvalidOrder unless 0 < alpha <= 1; requires L >= 1.
GLWeights gl_weights(double alpha, std::size_t L);

/// How the fractional memory of a state is treated when that state is reset.
enum class MemoryMode {
  ClearMemory,  // zero the component in every stored sample: the fractional
                // integral restarts from the reset instant
  KeepMemory,   // zero only the newest sample; older history still feeds the
                // convolution tail
};

/// Fixed-step propagation state for D^alpha x = A x + B u: the step size, the
/// weight table, and the ring of past state samples feeding the memory sum.
/// The buffer belongs to a single simulation run and is mutated in place.
class GLState {
 public:
  /// max_memory == 0 keeps the entire history (exact scheme); a positive
  /// value truncates the convolution to the newest max_memory samples
  /// (short-memory principle, O(t^-alpha) tail error).
  GLState(std::shared_ptr<const GLWeights> weights, double h, const Vector& x0,
          std::size_t max_memory = 0);

  double h() const { return h_; }
  double alpha() const { return weights_->alpha; }
  Eigen::Index dim() const { return buffer_.rows(); }
  std::size_t size() const { return size_; }
  const GLWeights& weights() const { return *weights_; }

  /// Newest stored sample.
  Vector current() const;

  /// Appends a sample (drops the oldest first when truncated).
  void push(const Vector& x);

  /// The memory sum  sum_{i=1}^{min(k+1, L)} w_i x_{k+1-i}  for the upcoming
  /// step, where x_k is the newest stored sample.
  Vector memory_sum() const;

  /// Overwrites the newest sample in place (used when a reset rewrites the
  /// state at the current grid point).
  void overwrite_newest(const Vector& x);

  /// Applies a reset to the listed state components.
  /// Throws IndexOutOfRange.
  void reset_components(const std::vector<Eigen::Index>& indices,
                        MemoryMode mode);

 private:
  std::shared_ptr<const GLWeights> weights_;
  double h_;
  std::size_t max_memory_;  // 0 = unbounded
  Matrix buffer_;           // dim x capacity, columns are samples oldest->newest
  std::size_t size_ = 0;
};

struct StateSpaceModel;  // defined in models.hpp

/// One Grünwald–Letnikov step of D^alpha x = A x + B u:
///   x_{k+1} = h^alpha (A x_k + B u_k) - sum_{i>=1} w_i x_{k+1-i}.
/// The new sample is appended to the state's history and also returned.
/// Throws HistoryMismatch when the buffer's order or dimension differs from
/// the model, or when the buffer holds no initial sample.
Vector gl_step(const StateSpaceModel& model, GLState& state, double u);

/// Free-function form of GLState::reset_components, matching the module's
/// operation set. Throws IndexOutOfRange.
void reset_history(GLState& state, const std::vector<Eigen::Index>& indices,
                   MemoryMode mode);

}  // namespace fracreset
