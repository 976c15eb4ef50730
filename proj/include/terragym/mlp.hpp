#pragma once

#include <Eigen/Core>
#include <vector>

#include "terragym/rng.hpp"

namespace terragym {

// Dense network: ReLU on hidden layers, identity output. Parameters live in
// a caller-owned flat vector; the layout places, per layer, the column-major
// weight matrix (out x in) followed by the bias.
struct MlpSpec {
  std::vector<int> widths;  // {input, hidden..., output}

  bool valid() const {
    if (widths.size() < 2) return false;
    for (int w : widths)
      if (w < 1) return false;
    return true;
  }
};

class MlpLayout {
 public:
  MlpLayout() = default;
  MlpLayout(const MlpSpec& spec, int param_offset);

  const MlpSpec& spec() const { return spec_; }
  int param_offset() const { return offset_; }
  int param_count() const { return count_; }
  int input_dim() const { return spec_.widths.front(); }
  int output_dim() const { return spec_.widths.back(); }
  int layer_count() const { return static_cast<int>(spec_.widths.size()) - 1; }

  struct Layer {
    int weight_offset;
    int bias_offset;
    int rows;  // fan-out
    int cols;  // fan-in
  };
  const std::vector<Layer>& layers() const { return layers_; }

  // Per-layer pre-activations and activations for a batch (columns = samples).
  struct Cache {
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> act;  // act[0] is the input
  };

  Eigen::MatrixXd forward(const double* params, const Eigen::MatrixXd& input,
                          Cache* cache = nullptr) const;

  // Accumulates parameter gradients into `grad` (same layout as params) and
  // returns the gradient with respect to the input batch.
  Eigen::MatrixXd backward(const double* params, const Cache& cache,
                           const Eigen::MatrixXd& output_grad, double* grad) const;

  // He fan-in uniform init; biases zero. `final_scale` shrinks the last
  // layer's weights.
  void initialize(double* params, Rng& rng, double final_scale = 1.0) const;

 private:
  MlpSpec spec_;
  int offset_ = 0;
  int count_ = 0;
  std::vector<Layer> layers_;
};

}  // namespace terragym
