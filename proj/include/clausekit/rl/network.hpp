#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace clausekit::rl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Dense {
  Matrix w;  // out x in
  Vector b;  // out
};

/// Random matrix with orthonormal rows or columns (whichever is shorter),
/// scaled by `gain`. Signs are fixed against the R diagonal so the result is
/// a function of the generator state only.
inline Matrix orthogonal(Eigen::Index rows, Eigen::Index cols, double gain, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index big = std::max(rows, cols), small = std::min(rows, cols);
  Matrix a(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    for (Eigen::Index i = 0; i < big; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(big, small);
  for (Eigen::Index j = 0; j < small; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  if (rows >= cols) return gain * q;
  return gain * q.transpose();
}

/// Fully connected network, tanh on every hidden layer, linear output.
class Mlp {
 public:
  struct Cache {
    std::vector<Matrix> activations;  // input, hidden outputs..., output
  };

  Mlp() = default;

  /// `sizes` = {input, hidden..., output}; `gains` has one entry per layer.
  Mlp(const std::vector<Eigen::Index>& sizes, const std::vector<double>& gains, std::mt19937_64& rng) {
    if (sizes.size() < 2 || gains.size() != sizes.size() - 1) throw std::invalid_argument("mlp: bad layer spec");
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k)
      layers_.push_back({orthogonal(sizes[k + 1], sizes[k], gains[k], rng), Vector::Zero(sizes[k + 1])});
  }

  [[nodiscard]] std::vector<Dense>& layers() { return layers_; }
  [[nodiscard]] const std::vector<Dense>& layers() const { return layers_; }
  [[nodiscard]] Eigen::Index input_size() const { return layers_.front().w.cols(); }
  [[nodiscard]] Eigen::Index output_size() const { return layers_.back().w.rows(); }

  [[nodiscard]] std::vector<Eigen::Index> sizes() const {
    std::vector<Eigen::Index> s{input_size()};
    for (const auto& l : layers_) s.push_back(l.w.rows());
    return s;
  }

  /// Columns of `x` are samples.
  Matrix forward(const Matrix& x, Cache* cache = nullptr) const {
    Matrix h = x;
    if (cache) {
      cache->activations.clear();
      cache->activations.push_back(x);
    }
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      Matrix z = layers_[k].w * h;
      z.colwise() += layers_[k].b;
      if (k + 1 < layers_.size()) z = z.array().tanh().matrix();
      h = std::move(z);
      if (cache) cache->activations.push_back(h);
    }
    return h;
  }

  Vector forward(const Vector& x) const {
    Vector h = x;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      Vector z = layers_[k].w * h + layers_[k].b;
      if (k + 1 < layers_.size()) z = z.array().tanh().matrix();
      h = std::move(z);
    }
    return h;
  }

  /// Gradients of a scalar loss given d(loss)/d(output) for the batch in `cache`.
  [[nodiscard]] std::vector<Dense> backward(const Cache& cache, const Matrix& d_out) const {
    std::vector<Dense> grads(layers_.size());
    Matrix delta = d_out;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      const Matrix& input = cache.activations[k];
      grads[k].w = delta * input.transpose();
      grads[k].b = delta.rowwise().sum();
      if (k > 0) {
        Matrix back = layers_[k].w.transpose() * delta;
        delta = (back.array() * (1.0 - input.array().square())).matrix();
      }
    }
    return grads;
  }

  [[nodiscard]] std::size_t num_parameters() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
    return n;
  }

  /// Visits every parameter in serialization order: per layer, weights in
  /// column-major order, then biases.
  template <class F>
  void for_each_parameter(F&& f) {
    for (auto& l : layers_) {
      for (Eigen::Index i = 0; i < l.w.size(); ++i) f(l.w.data()[i]);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) f(l.b.data()[i]);
    }
  }
  template <class F>
  void for_each_parameter(F&& f) const {
    for (const auto& l : layers_) {
      for (Eigen::Index i = 0; i < l.w.size(); ++i) f(l.w.data()[i]);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) f(l.b.data()[i]);
    }
  }

  bool operator==(const Mlp& o) const {
    if (layers_.size() != o.layers_.size()) return false;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto &a = layers_[k], &b = o.layers_[k];
      if (a.w.rows() != b.w.rows() || a.w.cols() != b.w.cols() || a.w != b.w || a.b != b.b) return false;
    }
    return true;
  }

 private:
  std::vector<Dense> layers_;
};

inline double squared_norm(const std::vector<Dense>& g) {
  double s = 0;
  for (const auto& l : g) s += l.w.squaredNorm() + l.b.squaredNorm();
  return s;
}

inline bool all_finite(const std::vector<Dense>& g) {
  for (const auto& l : g)
    if (!l.w.allFinite() || !l.b.allFinite()) return false;
  return true;
}

/// Adam moments for one network.
struct AdamState {
  std::vector<Dense> m, v;
  std::uint64_t t = 0;

  void reset(const Mlp& net) {
    m.clear();
    v.clear();
    for (const auto& l : net.layers()) {
      m.push_back({Matrix::Zero(l.w.rows(), l.w.cols()), Vector::Zero(l.b.size())});
      v.push_back({Matrix::Zero(l.w.rows(), l.w.cols()), Vector::Zero(l.b.size())});
    }
    t = 0;
  }
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adam_step(Mlp& net, AdamState& st, const std::vector<Dense>& grads, double lr, const AdamConfig& cfg = {}) {
  if (lr == 0.0) return;
  if (st.m.size() != grads.size()) st.reset(net);
  ++st.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v.array() = cfg.beta2 * v.array() + (1.0 - cfg.beta2) * g.array().square();
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  };
  for (std::size_t k = 0; k < grads.size(); ++k) {
    update(net.layers()[k].w, st.m[k].w, st.v[k].w, grads[k].w);
    update(net.layers()[k].b, st.m[k].b, st.v[k].b, grads[k].b);
  }
}

}  // namespace clausekit::rl
