#pragma once

#include <array>
#include <deque>
#include <string>
#include <vector>

#include "skirmish/env.hpp"
#include "skirmish/net.hpp"

namespace skirmish {

enum class Algo { iql, vdn, qmix };

Algo algo_from_string(const std::string& s);  // throws on unknown
std::string to_string(Algo a);

struct Hyper {
  double gamma = 0.99;
  double lr = 5e-4;
  int batch_size = 64;
  int buffer_capacity = 50000;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_anneal_steps = 50000;
  int target_interval = 200;  // hard target copy period, in train steps
  int warmup_steps = 1000;    // env steps before training starts
  int hidden = 64;
  int mixer_embed = 32;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

double epsilon_at(const Hyper& hp, long env_steps);

// Monotone state-conditioned mixer: Q_tot = |w2(s)|' elu(|W1(s)| q + b1(s)) + b2(s).
// Each hypernetwork is a single linear layer on the global state.
struct QmixMixer {
  int n_agents = 0;
  int state_dim = 0;
  int embed = 0;
  Mlp hyper_w1, hyper_b1, hyper_w2, hyper_b2;

  static QmixMixer make(int n_agents, int state_dim, int embed, Rng& rng);

  struct Cache {
    Mlp::Cache w1, b1, w2, b2;
    std::vector<double> q;
    std::vector<double> h_pre, h;
  };

  double forward(std::span<const double> q, std::span<const double> state,
                 Cache& cache) const;
  // d_q_tot is dLoss/dQ_tot; gradients are accumulated into the per-hypernet
  // slices; dq receives dLoss/dq_i for backprop into the agent networks.
  void backward(const Cache& cache, double d_q_tot, std::span<double> grad_w1,
                std::span<double> grad_b1, std::span<double> grad_w2,
                std::span<double> grad_b2, std::span<double> dq) const;
};

double vdn_mix(std::span<const double> q_chosen);

struct Transition {
  std::array<std::vector<double>, kTeamSize> obs;
  std::array<int, kTeamSize> actions{};
  double reward = 0.0;
  std::array<std::vector<double>, kTeamSize> next_obs;
  bool done = false;
  // the shared global state is obs[0] / next_obs[0]
};

// FIFO ring buffer with seeded uniform without-replacement sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return data_[i]; }

  // Throws std::invalid_argument when n > size.
  std::vector<const Transition*> sample(size_t n, Rng& rng) const;

 private:
  size_t capacity_;
  std::deque<Transition> data_;
};

// Per-agent Q networks plus the optional mixer and Adam state.
struct Learner {
  Algo algo = Algo::vdn;
  Hyper hp;
  int obs_dim = kObsDim;
  int n_actions = kNumActions;
  int n_agents = kTeamSize;
  int state_dim = kObsDim;

  std::vector<Mlp> nets, target_nets;
  QmixMixer mixer, target_mixer;  // valid iff algo == qmix

  std::vector<double> adam_m, adam_v;
  uint64_t adam_t = 0;
  uint64_t train_count = 0;

  static Learner make(Algo algo, int obs_dim, int n_actions, int n_agents,
                      int state_dim, const Hyper& hp, uint64_t seed);

  // Flat parameter view over everything the optimizer touches, in a fixed
  // order: agent nets, then the mixer hypernetworks.
  struct Block {
    double* data;
    size_t size;
  };
  std::vector<Block> param_blocks();
  std::vector<Block> param_blocks() const;  // const variant (casts away for FD probes)
  int total_params() const;

  void copy_to_targets();
};

// Epsilon-greedy over one agent's action values.
int epsilon_greedy(std::span<const double> q, double eps, Rng& rng);

// Mean squared TD error of a batch (pure; no state change).
double td_loss(const Learner& learner, std::span<const Transition* const> batch);

// Analytic gradient of td_loss into a flat vector of total_params() doubles.
// Returns the loss.
double td_loss_grad(const Learner& learner, std::span<const Transition* const> batch,
                    std::span<double> grad);

// One Adam update on the batch; hard-copies targets every target_interval
// steps. Throws std::runtime_error on a non-finite loss.
double train_step(Learner& learner, std::span<const Transition* const> batch);

}  // namespace skirmish
