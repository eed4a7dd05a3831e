#include "platoonlab/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace platoonlab {

Mlp::Mlp(const std::vector<int>& layer_sizes, Output output, RandomStream& rng)
    : output_(output) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("mlp needs at least input and output sizes");
  }
  const int n_layers = static_cast<int>(layer_sizes.size()) - 1;
  w_.reserve(n_layers);
  b_.reserve(n_layers);
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const bool last = l == n_layers - 1;
    const double bound = last ? 3e-3 : std::sqrt(6.0 / fan_in);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    w_.push_back(std::move(w));
    b_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  Eigen::MatrixXd h = input;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    h = (w_[l] * h).colwise() + b_[l];
    if (l + 1 < w_.size()) {
      h = h.cwiseMax(0.0);
    } else if (output_ == Output::Tanh) {
      h = h.array().tanh();
    }
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache& cache) const {
  cache.input = input;
  cache.pre.resize(w_.size());
  cache.post.resize(w_.size());
  Eigen::MatrixXd h = input;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    cache.pre[l] = (w_[l] * h).colwise() + b_[l];
    if (l + 1 < w_.size()) {
      cache.post[l] = cache.pre[l].cwiseMax(0.0);
    } else if (output_ == Output::Tanh) {
      cache.post[l] = cache.pre[l].array().tanh();
    } else {
      cache.post[l] = cache.pre[l];
    }
    h = cache.post[l];
  }
  return h;
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  g.w.reserve(w_.size());
  g.b.reserve(b_.size());
  for (std::size_t l = 0; l < w_.size(); ++l) {
    g.w.push_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(b_[l].size()));
  }
  return g;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                              Gradients* grads) const {
  Eigen::MatrixXd delta = grad_output;
  if (output_ == Output::Tanh) {
    delta.array() *= 1.0 - cache.post.back().array().square();
  }
  return backward_pre(cache, delta, grads);
}

Eigen::MatrixXd Mlp::backward_pre(const Cache& cache, const Eigen::MatrixXd& grad_pre,
                                  Gradients* grads) const {
  const int n_layers = static_cast<int>(w_.size());
  Eigen::MatrixXd delta = grad_pre;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& below = l == 0 ? cache.input : cache.post[l - 1];
    if (grads) {
      grads->w[l].noalias() += delta * below.transpose();
      grads->b[l].noalias() += delta.rowwise().sum();
    }
    if (l > 0) {
      delta = (w_[l].transpose() * delta)
                  .cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = w_[0].transpose() * delta;
    }
  }
  return delta;
}

long Mlp::parameter_count() const {
  long n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    n += w_[l].size() + b_[l].size();
  }
  return n;
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd out(parameter_count());
  long pos = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    out.segment(pos, w_[l].size()) = Eigen::Map<const Eigen::VectorXd>(w_[l].data(), w_[l].size());
    pos += w_[l].size();
    out.segment(pos, b_[l].size()) = b_[l];
    pos += b_[l].size();
  }
  return out;
}

void Mlp::unflatten(const Eigen::VectorXd& params) {
  if (params.size() != parameter_count()) {
    throw std::invalid_argument("unflatten: parameter count mismatch");
  }
  long pos = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(w_[l].data(), w_[l].size()) = params.segment(pos, w_[l].size());
    pos += w_[l].size();
    b_[l] = params.segment(pos, b_[l].size());
    pos += b_[l].size();
  }
}

void Mlp::polyak_from(const Mlp& online, double tau) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    w_[l] = tau * online.w_[l] + (1.0 - tau) * w_[l];
    b_[l] = tau * online.b_[l] + (1.0 - tau) * b_[l];
  }
}

Adam::Adam(const Mlp& net, double lr) : lr_(lr) {
  for (const auto& w : net.weights()) {
    m_w_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    v_w_.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases()) {
    m_b_.push_back(Eigen::VectorXd::Zero(b.size()));
    v_b_.push_back(Eigen::VectorXd::Zero(b.size()));
  }
}

void Adam::step(Mlp& net, const Mlp::Gradients& grads) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  auto& w = net.mutable_weights();
  auto& b = net.mutable_biases();
  for (std::size_t l = 0; l < w.size(); ++l) {
    m_w_[l] = beta1_ * m_w_[l] + (1.0 - beta1_) * grads.w[l];
    v_w_[l] = beta2_ * v_w_[l].array() + (1.0 - beta2_) * grads.w[l].array().square();
    w[l].array() -=
        lr_ * (m_w_[l].array() / bc1) / ((v_w_[l].array() / bc2).sqrt() + eps_);
    m_b_[l] = beta1_ * m_b_[l] + (1.0 - beta1_) * grads.b[l];
    v_b_[l] = beta2_ * v_b_[l].array() + (1.0 - beta2_) * grads.b[l].array().square();
    b[l].array() -=
        lr_ * (m_b_[l].array() / bc1) / ((v_b_[l].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace platoonlab
