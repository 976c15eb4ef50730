#include "terragym/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace terragym {

MlpLayout::MlpLayout(const MlpSpec& spec, int param_offset) : spec_(spec), offset_(param_offset) {
  if (!spec.valid()) throw std::invalid_argument("invalid mlp spec");
  int at = param_offset;
  for (size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    Layer layer;
    layer.cols = spec.widths[l];
    layer.rows = spec.widths[l + 1];
    layer.weight_offset = at;
    at += layer.rows * layer.cols;
    layer.bias_offset = at;
    at += layer.rows;
    layers_.push_back(layer);
  }
  count_ = at - param_offset;
}

Eigen::MatrixXd MlpLayout::forward(const double* params, const Eigen::MatrixXd& input,
                                   Cache* cache) const {
  if (input.rows() != input_dim()) throw std::invalid_argument("mlp forward: input dim mismatch");
  const auto batch = input.cols();
  if (cache) {
    cache->pre.resize(layers_.size());
    cache->act.assign(1, input);
  }
  Eigen::MatrixXd a = input;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& ly = layers_[l];
    Eigen::Map<const Eigen::MatrixXd> W(params + ly.weight_offset, ly.rows, ly.cols);
    Eigen::Map<const Eigen::VectorXd> b(params + ly.bias_offset, ly.rows);
    Eigen::MatrixXd z = (W * a).colwise() + b;
    const bool hidden = l + 1 < layers_.size();
    if (cache) cache->pre[l] = z;
    a = hidden ? z.cwiseMax(0.0).eval() : z;
    if (cache && l + 1 < layers_.size()) cache->act.push_back(a);
    (void)batch;
  }
  return a;
}

Eigen::MatrixXd MlpLayout::backward(const double* params, const Cache& cache,
                                    const Eigen::MatrixXd& output_grad, double* grad) const {
  Eigen::MatrixXd dz = output_grad;  // identity output layer
  for (size_t li = layers_.size(); li-- > 0;) {
    const Layer& ly = layers_[li];
    Eigen::Map<const Eigen::MatrixXd> W(params + ly.weight_offset, ly.rows, ly.cols);
    Eigen::Map<Eigen::MatrixXd> dW(grad + ly.weight_offset, ly.rows, ly.cols);
    Eigen::Map<Eigen::VectorXd> db(grad + ly.bias_offset, ly.rows);
    dW.noalias() += dz * cache.act[li].transpose();
    db.noalias() += dz.rowwise().sum();
    Eigen::MatrixXd da = W.transpose() * dz;
    if (li == 0) return da;
    // ReLU gate of the previous hidden layer.
    dz = (cache.pre[li - 1].array() > 0.0).select(da, 0.0);
  }
  return dz;
}

void MlpLayout::initialize(double* params, Rng& rng, double final_scale) const {
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& ly = layers_[l];
    const double bound = std::sqrt(6.0 / ly.cols) * (l + 1 == layers_.size() ? final_scale : 1.0);
    for (int k = 0; k < ly.rows * ly.cols; ++k) {
      params[ly.weight_offset + k] = rng.uniform(-bound, bound);
    }
    for (int k = 0; k < ly.rows; ++k) params[ly.bias_offset + k] = 0.0;
  }
}

}  // namespace terragym
