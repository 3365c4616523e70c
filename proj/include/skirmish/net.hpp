#pragma once

#include <span>
#include <vector>

#include "skirmish/rng.hpp"

namespace skirmish {

// Fully-connected network with ReLU hidden layers and a linear output.
// Parameters live in one flat vector (per layer: W row-major, then b) so
// optimizer state, serialization and finite-difference checks can treat the
// network as a plain array of doubles.
struct Mlp {
  std::vector<int> dims;     // e.g. {37, 64, 64, 8}
  std::vector<double> w;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int layer_count() const { return static_cast<int>(dims.size()) - 1; }
  int n_params() const;
  int layer_offset(int layer) const;

  static Mlp he_init(std::vector<int> dims, Rng& rng);
  static Mlp zeros(std::vector<int> dims);

  // Reusable forward scratch: input copy + per-layer pre-activations and
  // activations.
  struct Cache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
  };

  void forward(std::span<const double> x, Cache& cache) const;
  std::span<const double> output(const Cache& cache) const {
    return cache.act.back();
  }

  // Accumulates dLoss/dparams into grad (size n_params()); writes
  // dLoss/dinput into dx when non-empty.
  void backward(const Cache& cache, std::span<const double> dout,
                std::span<double> grad, std::span<double> dx) const;
};

// argmax with lowest-index tie break.
int argmax(std::span<const double> v);

}  // namespace skirmish
