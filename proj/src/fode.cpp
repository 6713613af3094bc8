#include "fracreset/fode.hpp"

#include <algorithm>
#include <cmath>

#include "fracreset/models.hpp"

namespace fracreset {

GLWeights gl_weights(double alpha, std::size_t L) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidOrder("gl_weights: order must lie in (0, 1]");
  }
  if (L < 1) throw InvalidOrder("gl_weights: need at least one weight");
  GLWeights out;
  out.alpha = alpha;
  out.w.resize(L + 1);
  out.w[0] = 1.0;
  for (std::size_t i = 1; i <= L; ++i) {
    out.w[i] = out.w[i - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(i));
  }
  return out;
}

GLState::GLState(std::shared_ptr<const GLWeights> weights, double h,
                 const Vector& x0, std::size_t max_memory)
    : weights_(std::move(weights)), h_(h), max_memory_(max_memory) {
  if (!weights_ || weights_->w.empty()) {
    throw HistoryMismatch("GLState: missing weight table");
  }
  if (h <= 0.0) throw HistoryMismatch("GLState: nonpositive step");
  const std::size_t cap = max_memory_ > 0 ? max_memory_ : 256;
  buffer_.resize(x0.size(), static_cast<Eigen::Index>(cap));
  buffer_.col(0) = x0;
  size_ = 1;
}

Vector GLState::current() const {
  return buffer_.col(static_cast<Eigen::Index>(size_ - 1));
}

void GLState::push(const Vector& x) {
  if (x.size() != buffer_.rows()) {
    throw HistoryMismatch("GLState::push: sample dimension differs");
  }
  if (max_memory_ > 0 && size_ == max_memory_) {
    // Truncated memory: slide the window (drop the oldest sample).
    buffer_.leftCols(static_cast<Eigen::Index>(size_ - 1)) =
        buffer_.rightCols(static_cast<Eigen::Index>(size_ - 1)).eval();
    buffer_.col(static_cast<Eigen::Index>(size_ - 1)) = x;
    return;
  }
  if (size_ == static_cast<std::size_t>(buffer_.cols())) {
    Matrix grown(buffer_.rows(), buffer_.cols() * 2);
    grown.leftCols(buffer_.cols()) = buffer_;
    buffer_.swap(grown);
  }
  buffer_.col(static_cast<Eigen::Index>(size_)) = x;
  ++size_;
}

Vector GLState::memory_sum() const {
  const std::vector<double>& w = weights_->w;
  // Newest sample pairs with w_1, the oldest retained one with w_m.
  std::size_t m = std::min(size_, w.size() - 1);
  if (alpha() == 1.0) m = std::min<std::size_t>(m, 1);  // w_i = 0 for i >= 2
  Vector acc = Vector::Zero(buffer_.rows());
  if (m == 0) return acc;
  const Eigen::Index first = static_cast<Eigen::Index>(size_ - m);
  // Column j of the block holds x_{k+1-(m-j)}, which multiplies w_{m-j}.
  Vector wrev(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    wrev[static_cast<Eigen::Index>(j)] = w[m - j];
  }
  acc.noalias() =
      buffer_.middleCols(first, static_cast<Eigen::Index>(m)) * wrev;
  return acc;
}

void GLState::overwrite_newest(const Vector& x) {
  if (x.size() != buffer_.rows()) {
    throw HistoryMismatch("GLState::overwrite_newest: dimension differs");
  }
  buffer_.col(static_cast<Eigen::Index>(size_ - 1)) = x;
}

void GLState::reset_components(const std::vector<Eigen::Index>& indices,
                               MemoryMode mode) {
  for (Eigen::Index idx : indices) {
    if (idx < 0 || idx >= buffer_.rows()) {
      throw IndexOutOfRange("reset_components: state index out of range");
    }
    if (mode == MemoryMode::ClearMemory) {
      buffer_.row(idx).head(static_cast<Eigen::Index>(size_)).setZero();
    } else {
      buffer_(idx, static_cast<Eigen::Index>(size_ - 1)) = 0.0;
    }
  }
}

Vector gl_step(const StateSpaceModel& model, GLState& state, double u) {
  if (state.size() == 0) {
    throw HistoryMismatch("gl_step: no initial sample in the buffer");
  }
  if (state.dim() != model.order()) {
    throw HistoryMismatch("gl_step: buffer dimension differs from the model");
  }
  if (state.alpha() != model.alpha) {
    throw HistoryMismatch("gl_step: weight order differs from the model");
  }
  const double ha =
      model.alpha == 1.0 ? state.h() : std::pow(state.h(), model.alpha);
  const Vector x = state.current();
  Vector next = ha * (model.a * x + model.b.col(0) * u) - state.memory_sum();
  state.push(next);
  return next;
}

void reset_history(GLState& state, const std::vector<Eigen::Index>& indices,
                   MemoryMode mode) {
  state.reset_components(indices, mode);
}

}  // namespace fracreset
