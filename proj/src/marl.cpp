#include "skirmish/marl.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace skirmish {

Algo algo_from_string(const std::string& s) {
  if (s == "iql") return Algo::iql;
  if (s == "vdn") return Algo::vdn;
  if (s == "qmix") return Algo::qmix;
  throw std::invalid_argument("unknown algo: " + s);
}

std::string to_string(Algo a) {
  switch (a) {
    case Algo::iql: return "iql";
    case Algo::vdn: return "vdn";
    case Algo::qmix: return "qmix";
  }
  return "?";
}

double epsilon_at(const Hyper& hp, long env_steps) {
  if (env_steps >= hp.eps_anneal_steps) return hp.eps_end;
  double frac = static_cast<double>(env_steps) / hp.eps_anneal_steps;
  return hp.eps_start + (hp.eps_end - hp.eps_start) * frac;
}

QmixMixer QmixMixer::make(int n_agents, int state_dim, int embed, Rng& rng) {
  QmixMixer m;
  m.n_agents = n_agents;
  m.state_dim = state_dim;
  m.embed = embed;
  m.hyper_w1 = Mlp::he_init({state_dim, embed * n_agents}, rng);
  m.hyper_b1 = Mlp::he_init({state_dim, embed}, rng);
  m.hyper_w2 = Mlp::he_init({state_dim, embed}, rng);
  m.hyper_b2 = Mlp::he_init({state_dim, 1}, rng);
  return m;
}

namespace {

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }
inline double elu_grad(double x) { return x > 0.0 ? 1.0 : std::exp(x); }
inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double QmixMixer::forward(std::span<const double> q, std::span<const double> state,
                          Cache& cache) const {
  hyper_w1.forward(state, cache.w1);
  hyper_b1.forward(state, cache.b1);
  hyper_w2.forward(state, cache.w2);
  hyper_b2.forward(state, cache.b2);
  cache.q.assign(q.begin(), q.end());
  auto w1 = hyper_w1.output(cache.w1);
  auto b1 = hyper_b1.output(cache.b1);
  auto w2 = hyper_w2.output(cache.w2);
  auto b2 = hyper_b2.output(cache.b2);
  cache.h_pre.resize(embed);
  cache.h.resize(embed);
  double q_tot = b2[0];
  for (int e = 0; e < embed; ++e) {
    double acc = b1[e];
    for (int a = 0; a < n_agents; ++a) acc += std::abs(w1[e * n_agents + a]) * q[a];
    cache.h_pre[e] = acc;
    cache.h[e] = elu(acc);
    q_tot += std::abs(w2[e]) * cache.h[e];
  }
  return q_tot;
}

void QmixMixer::backward(const Cache& cache, double d_q_tot, std::span<double> grad_w1,
                         std::span<double> grad_b1, std::span<double> grad_w2,
                         std::span<double> grad_b2, std::span<double> dq) const {
  auto w1 = hyper_w1.output(cache.w1);
  auto w2 = hyper_w2.output(cache.w2);

  std::vector<double> d_b2{d_q_tot};
  hyper_b2.backward(cache.b2, d_b2, grad_b2, {});

  std::vector<double> d_w2(embed), d_hpre(embed);
  for (int e = 0; e < embed; ++e) {
    d_w2[e] = d_q_tot * cache.h[e] * sign0(w2[e]);
    d_hpre[e] = d_q_tot * std::abs(w2[e]) * elu_grad(cache.h_pre[e]);
  }
  hyper_w2.backward(cache.w2, d_w2, grad_w2, {});
  hyper_b1.backward(cache.b1, d_hpre, grad_b1, {});

  std::vector<double> d_w1(embed * n_agents);
  for (int e = 0; e < embed; ++e) {
    for (int a = 0; a < n_agents; ++a) {
      d_w1[e * n_agents + a] = d_hpre[e] * cache.q[a] * sign0(w1[e * n_agents + a]);
    }
  }
  hyper_w1.backward(cache.w1, d_w1, grad_w1, {});

  for (int a = 0; a < n_agents; ++a) {
    double acc = 0.0;
    for (int e = 0; e < embed; ++e) acc += d_hpre[e] * std::abs(w1[e * n_agents + a]);
    dq[a] = acc;
  }
}

double vdn_mix(std::span<const double> q_chosen) {
  double s = 0.0;
  for (double q : q_chosen) s += q;
  return s;
}

void ReplayBuffer::push(Transition t) {
  if (data_.size() == capacity_) data_.pop_front();
  data_.push_back(std::move(t));
}

std::vector<const Transition*> ReplayBuffer::sample(size_t n, Rng& rng) const {
  if (n > data_.size()) throw std::invalid_argument("ReplayBuffer::sample: not enough data");
  // Floyd's algorithm: n distinct indices, uniform without replacement
  std::unordered_set<size_t> picked;
  std::vector<const Transition*> out;
  out.reserve(n);
  for (size_t j = data_.size() - n; j < data_.size(); ++j) {
    size_t t = static_cast<size_t>(rng.uniform_int(static_cast<int>(j) + 1));
    size_t idx = picked.count(t) ? j : t;
    picked.insert(idx);
    out.push_back(&data_[idx]);
  }
  return out;
}

Learner Learner::make(Algo algo, int obs_dim, int n_actions, int n_agents,
                      int state_dim, const Hyper& hp, uint64_t seed) {
  Learner l;
  l.algo = algo;
  l.hp = hp;
  l.obs_dim = obs_dim;
  l.n_actions = n_actions;
  l.n_agents = n_agents;
  l.state_dim = state_dim;
  Rng rng(derive_seed(seed, 0x11E7));
  for (int i = 0; i < n_agents; ++i) {
    l.nets.push_back(Mlp::he_init({obs_dim, hp.hidden, hp.hidden, n_actions}, rng));
  }
  if (algo == Algo::qmix) {
    l.mixer = QmixMixer::make(n_agents, state_dim, hp.mixer_embed, rng);
  }
  l.target_nets = l.nets;
  l.target_mixer = l.mixer;
  l.adam_m.assign(l.total_params(), 0.0);
  l.adam_v.assign(l.total_params(), 0.0);
  return l;
}

std::vector<Learner::Block> Learner::param_blocks() {
  std::vector<Block> blocks;
  for (auto& net : nets) blocks.push_back({net.w.data(), net.w.size()});
  if (algo == Algo::qmix) {
    blocks.push_back({mixer.hyper_w1.w.data(), mixer.hyper_w1.w.size()});
    blocks.push_back({mixer.hyper_b1.w.data(), mixer.hyper_b1.w.size()});
    blocks.push_back({mixer.hyper_w2.w.data(), mixer.hyper_w2.w.size()});
    blocks.push_back({mixer.hyper_b2.w.data(), mixer.hyper_b2.w.size()});
  }
  return blocks;
}

std::vector<Learner::Block> Learner::param_blocks() const {
  return const_cast<Learner*>(this)->param_blocks();
}

int Learner::total_params() const {
  int total = 0;
  for (const auto& b : param_blocks()) total += static_cast<int>(b.size);
  return total;
}

void Learner::copy_to_targets() {
  target_nets = nets;
  if (algo == Algo::qmix) target_mixer = mixer;
}

int epsilon_greedy(std::span<const double> q, double eps, Rng& rng) {
  if (eps > 0.0 && rng.uniform() < eps) {
    return rng.uniform_int(static_cast<int>(q.size()));
  }
  return argmax(q);
}

namespace {

// Shared loss/gradient core. grad may be empty for loss-only evaluation.
double td_core(const Learner& learner, std::span<const Transition* const> batch,
               std::span<double> grad) {
  if (batch.empty()) throw std::invalid_argument("td loss: empty batch");
  const bool want_grad = !grad.empty();
  const int n_agents = learner.n_agents;
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  // grad slices in param_blocks order
  std::vector<std::span<double>> slices;
  if (want_grad) {
    size_t off = 0;
    for (const auto& b : learner.param_blocks()) {
      slices.push_back(grad.subspan(off, b.size));
      off += b.size;
    }
  }

  std::vector<Mlp::Cache> caches(n_agents);
  Mlp::Cache scratch;
  QmixMixer::Cache mix_cache, target_mix_cache;
  std::vector<double> chosen(n_agents), next_max(n_agents), dout, dq(n_agents);

  double loss = 0.0;
  for (const Transition* t : batch) {
    for (int i = 0; i < n_agents; ++i) {
      learner.nets[i].forward(t->obs[i], caches[i]);
      chosen[i] = learner.nets[i].output(caches[i])[t->actions[i]];
      learner.target_nets[i].forward(t->next_obs[i], scratch);
      auto qn = learner.target_nets[i].output(scratch);
      next_max[i] = qn[argmax(qn)];
    }
    double not_done = t->done ? 0.0 : 1.0;

    if (learner.algo == Algo::iql) {
      for (int i = 0; i < n_agents; ++i) {
        double y = t->reward + learner.hp.gamma * not_done * next_max[i];
        double e = chosen[i] - y;
        loss += e * e * inv_b / n_agents;
        if (want_grad) {
          dout.assign(learner.n_actions, 0.0);
          dout[t->actions[i]] = 2.0 * e * inv_b / n_agents;
          learner.nets[i].backward(caches[i], dout, slices[i], {});
        }
      }
    } else if (learner.algo == Algo::vdn) {
      double q_tot = vdn_mix(chosen);
      double y = t->reward + learner.hp.gamma * not_done * vdn_mix(next_max);
      double e = q_tot - y;
      loss += e * e * inv_b;
      if (want_grad) {
        for (int i = 0; i < n_agents; ++i) {
          dout.assign(learner.n_actions, 0.0);
          dout[t->actions[i]] = 2.0 * e * inv_b;
          learner.nets[i].backward(caches[i], dout, slices[i], {});
        }
      }
    } else {  // qmix
      double q_tot = learner.mixer.forward(chosen, t->obs[0], mix_cache);
      double y_next = learner.target_mixer.forward(next_max, t->next_obs[0], target_mix_cache);
      double y = t->reward + learner.hp.gamma * not_done * y_next;
      double e = q_tot - y;
      loss += e * e * inv_b;
      if (want_grad) {
        double d_q_tot = 2.0 * e * inv_b;
        learner.mixer.backward(mix_cache, d_q_tot, slices[n_agents], slices[n_agents + 1],
                               slices[n_agents + 2], slices[n_agents + 3], dq);
        for (int i = 0; i < n_agents; ++i) {
          dout.assign(learner.n_actions, 0.0);
          dout[t->actions[i]] = dq[i];
          learner.nets[i].backward(caches[i], dout, slices[i], {});
        }
      }
    }
  }
  return loss;
}

}  // namespace

double td_loss(const Learner& learner, std::span<const Transition* const> batch) {
  return td_core(learner, batch, {});
}

double td_loss_grad(const Learner& learner, std::span<const Transition* const> batch,
                    std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  return td_core(learner, batch, grad);
}

double train_step(Learner& learner, std::span<const Transition* const> batch) {
  std::vector<double> grad(learner.total_params());
  double loss = td_loss_grad(learner, batch, grad);
  if (!std::isfinite(loss)) throw std::runtime_error("train_step: non-finite loss");

  learner.adam_t += 1;
  double bc1 = 1.0 - std::pow(learner.hp.adam_beta1, static_cast<double>(learner.adam_t));
  double bc2 = 1.0 - std::pow(learner.hp.adam_beta2, static_cast<double>(learner.adam_t));
  size_t k = 0;
  for (auto& block : learner.param_blocks()) {
    for (size_t i = 0; i < block.size; ++i, ++k) {
      double g = grad[k];
      learner.adam_m[k] = learner.hp.adam_beta1 * learner.adam_m[k] + (1.0 - learner.hp.adam_beta1) * g;
      learner.adam_v[k] = learner.hp.adam_beta2 * learner.adam_v[k] + (1.0 - learner.hp.adam_beta2) * g * g;
      double m_hat = learner.adam_m[k] / bc1;
      double v_hat = learner.adam_v[k] / bc2;
      block.data[i] -= learner.hp.lr * m_hat / (std::sqrt(v_hat) + learner.hp.adam_eps);
    }
  }

  learner.train_count += 1;
  if (learner.train_count % learner.hp.target_interval == 0) learner.copy_to_targets();
  return loss;
}

}  // namespace skirmish
