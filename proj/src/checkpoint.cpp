#include "skirmish/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace skirmish {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'C', 'P'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_mlp(std::ostream& out, const Mlp& net) {
  put_u32(out, static_cast<uint32_t>(net.dims.size()));
  for (int d : net.dims) put_u32(out, static_cast<uint32_t>(d));
  for (double v : net.w) put_f64(out, v);
}

Mlp get_mlp(std::istream& in) {
  uint32_t ndims = get_u32(in);
  if (ndims < 2 || ndims > 64) throw std::runtime_error("checkpoint: bad layer count");
  std::vector<int> dims(ndims);
  for (auto& d : dims) d = static_cast<int>(get_u32(in));
  Mlp net = Mlp::zeros(dims);
  for (auto& v : net.w) v = get_f64(in);
  return net;
}

}  // namespace

void save_checkpoint(const Learner& learner, const std::string& path,
                     const std::string& metadata_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  out.put(static_cast<char>(learner.algo));
  put_u32(out, static_cast<uint32_t>(learner.n_agents));
  put_u32(out, static_cast<uint32_t>(learner.obs_dim));
  put_u32(out, static_cast<uint32_t>(learner.n_actions));
  put_u32(out, static_cast<uint32_t>(learner.state_dim));
  for (const auto& net : learner.nets) put_mlp(out, net);
  if (learner.algo == Algo::qmix) {
    put_u32(out, static_cast<uint32_t>(learner.mixer.embed));
    put_mlp(out, learner.mixer.hyper_w1);
    put_mlp(out, learner.mixer.hyper_b1);
    put_mlp(out, learner.mixer.hyper_w2);
    put_mlp(out, learner.mixer.hyper_b2);
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);

  std::ofstream meta(path + ".json");
  if (!meta) throw std::runtime_error("cannot write checkpoint sidecar: " + path + ".json");
  meta << metadata_json;
  if (!metadata_json.empty() && metadata_json.back() != '\n') meta << '\n';
}

Learner load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("bad checkpoint magic: " + path);
  }
  uint32_t version = get_u32(in);
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version");
  int algo_tag = in.get();
  if (algo_tag < 0 || algo_tag > 2) throw std::runtime_error("bad checkpoint algo tag");

  Learner l;
  l.algo = static_cast<Algo>(algo_tag);
  l.n_agents = static_cast<int>(get_u32(in));
  l.obs_dim = static_cast<int>(get_u32(in));
  l.n_actions = static_cast<int>(get_u32(in));
  l.state_dim = static_cast<int>(get_u32(in));
  if (l.n_agents < 1 || l.n_agents > 16) throw std::runtime_error("bad checkpoint agent count");
  for (int i = 0; i < l.n_agents; ++i) l.nets.push_back(get_mlp(in));
  if (l.algo == Algo::qmix) {
    l.mixer.n_agents = l.n_agents;
    l.mixer.state_dim = l.state_dim;
    l.mixer.embed = static_cast<int>(get_u32(in));
    l.mixer.hyper_w1 = get_mlp(in);
    l.mixer.hyper_b1 = get_mlp(in);
    l.mixer.hyper_w2 = get_mlp(in);
    l.mixer.hyper_b2 = get_mlp(in);
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  l.target_nets = l.nets;
  l.target_mixer = l.mixer;
  l.adam_m.assign(l.total_params(), 0.0);
  l.adam_v.assign(l.total_params(), 0.0);
  return l;
}

std::string checkpoint_metadata(const std::string& path) {
  std::ifstream meta(path + ".json");
  if (!meta) throw std::runtime_error("missing checkpoint sidecar: " + path + ".json");
  std::string text((std::istreambuf_iterator<char>(meta)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace skirmish
