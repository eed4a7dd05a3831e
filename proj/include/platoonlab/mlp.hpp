#pragma once

#include <Eigen/Dense>
#include <vector>

#include "platoonlab/rng.hpp"

namespace platoonlab {

/// Fully connected network with rectified-linear hidden layers. Inputs and
/// outputs are column-per-sample matrices so batches go through as GEMMs.
class Mlp {
 public:
  enum class Output { Linear, Tanh };

  Mlp() = default;
  /// layer_sizes = {in, hidden..., out}. Weights are He-uniform, the output
  /// layer small-uniform (3e-3) to start near zero.
  Mlp(const std::vector<int>& layer_sizes, Output output, RandomStream& rng);

  int input_size() const { return w_.empty() ? 0 : static_cast<int>(w_.front().cols()); }
  int output_size() const { return w_.empty() ? 0 : static_cast<int>(w_.back().rows()); }
  int layer_count() const { return static_cast<int>(w_.size()); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;

  struct Cache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // post-activation per layer
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache& cache) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
  };
  Gradients zero_gradients() const;

  /// Backpropagates dLoss/dOutput; accumulates into grads (if non-null) and
  /// returns dLoss/dInput.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                           Gradients* grads) const;

  /// Same, but grad_pre is with respect to the final layer's pre-activation
  /// (the output-activation chain rule is the caller's responsibility).
  Eigen::MatrixXd backward_pre(const Cache& cache, const Eigen::MatrixXd& grad_pre,
                               Gradients* grads) const;

  long parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);

  /// In-place target update: this = tau * online + (1 - tau) * this.
  void polyak_from(const Mlp& online, double tau);

  const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }
  std::vector<Eigen::MatrixXd>& mutable_weights() { return w_; }
  std::vector<Eigen::VectorXd>& mutable_biases() { return b_; }
  Output output_activation() const { return output_; }

 private:
  std::vector<Eigen::MatrixXd> w_;  // per layer, out x in
  std::vector<Eigen::VectorXd> b_;
  Output output_ = Output::Linear;
};

/// Adaptive moment estimation with the standard coefficients.
class Adam {
 public:
  Adam() = default;
  Adam(const Mlp& net, double lr);
  void step(Mlp& net, const Mlp::Gradients& grads);

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

}  // namespace platoonlab
