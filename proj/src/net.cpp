#include "skirmish/net.hpp"

#include <cmath>
#include <stdexcept>

namespace skirmish {

int Mlp::n_params() const {
  int total = 0;
  for (int l = 0; l < layer_count(); ++l) total += dims[l + 1] * dims[l] + dims[l + 1];
  return total;
}

int Mlp::layer_offset(int layer) const {
  int off = 0;
  for (int l = 0; l < layer; ++l) off += dims[l + 1] * dims[l] + dims[l + 1];
  return off;
}

Mlp Mlp::he_init(std::vector<int> dims, Rng& rng) {
  Mlp net;
  net.dims = std::move(dims);
  net.w.assign(net.n_params(), 0.0);
  for (int l = 0; l < net.layer_count(); ++l) {
    int in = net.dims[l], out = net.dims[l + 1];
    double scale = std::sqrt(2.0 / in);
    double* W = net.w.data() + net.layer_offset(l);
    for (int i = 0; i < out * in; ++i) W[i] = rng.normal() * scale;
    // biases stay zero
  }
  return net;
}

Mlp Mlp::zeros(std::vector<int> dims) {
  Mlp net;
  net.dims = std::move(dims);
  net.w.assign(net.n_params(), 0.0);
  return net;
}

void Mlp::forward(std::span<const double> x, Cache& cache) const {
  if (static_cast<int>(x.size()) != input_dim()) {
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  }
  int L = layer_count();
  cache.input.assign(x.begin(), x.end());
  cache.pre.resize(L);
  cache.act.resize(L);
  const double* prev = cache.input.data();
  for (int l = 0; l < L; ++l) {
    int in = dims[l], out = dims[l + 1];
    const double* W = w.data() + layer_offset(l);
    const double* b = W + out * in;
    cache.pre[l].resize(out);
    cache.act[l].resize(out);
    for (int i = 0; i < out; ++i) {
      double acc = b[i];
      const double* row = W + i * in;
      for (int j = 0; j < in; ++j) acc += row[j] * prev[j];
      cache.pre[l][i] = acc;
      cache.act[l][i] = (l == L - 1) ? acc : (acc > 0.0 ? acc : 0.0);
    }
    prev = cache.act[l].data();
  }
}

void Mlp::backward(const Cache& cache, std::span<const double> dout,
                   std::span<double> grad, std::span<double> dx) const {
  int L = layer_count();
  std::vector<double> delta(dout.begin(), dout.end());
  std::vector<double> dprev;
  for (int l = L - 1; l >= 0; --l) {
    int in = dims[l], out = dims[l + 1];
    const double* a_prev = l == 0 ? cache.input.data() : cache.act[l - 1].data();
    double* gW = grad.data() + layer_offset(l);
    double* gb = gW + out * in;
    const double* W = w.data() + layer_offset(l);
    dprev.assign(in, 0.0);
    for (int i = 0; i < out; ++i) {
      double d = delta[i];
      gb[i] += d;
      double* grow = gW + i * in;
      const double* wrow = W + i * in;
      for (int j = 0; j < in; ++j) {
        grow[j] += d * a_prev[j];
        dprev[j] += wrow[j] * d;
      }
    }
    if (l > 0) {
      for (int j = 0; j < in; ++j) {
        if (cache.pre[l - 1][j] <= 0.0) dprev[j] = 0.0;
      }
      delta = dprev;
    }
  }
  if (!dx.empty()) {
    for (size_t j = 0; j < dx.size(); ++j) dx[j] = dprev[j];
  }
}

int argmax(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace skirmish
