#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clausekit/rl/policy.hpp"

namespace clausekit::rl {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'C', 'K', 'P', 'O', 'L', 'I', 'C', 'Y'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
void put_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_raw(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw CorruptCheckpoint(std::string("checkpoint truncated in ") + what);
  return v;
}

inline nlohmann::json config_to_json(const PpoConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"clip_epsilon", c.clip_epsilon},
          {"gamma", c.gamma},
          {"gae_lambda", c.gae_lambda},
          {"epochs", c.epochs},
          {"minibatch_size", c.minibatch_size},
          {"rollout_window", c.rollout_window},
          {"entropy_coef", c.entropy_coef},
          {"value_coef", c.value_coef},
          {"max_grad_norm", c.max_grad_norm},
          {"normalize_advantages", c.normalize_advantages},
          {"hidden_size", c.hidden_size},
          {"hidden_layers", c.hidden_layers},
          {"max_episode_decisions", c.max_episode_decisions},
          {"reward_mode", to_string(c.reward_mode)}};
}

inline PpoConfig config_from_json(const nlohmann::json& j) {
  PpoConfig c;
  c.learning_rate = j.at("learning_rate");
  c.clip_epsilon = j.at("clip_epsilon");
  c.gamma = j.at("gamma");
  c.gae_lambda = j.at("gae_lambda");
  c.epochs = j.at("epochs");
  c.minibatch_size = j.at("minibatch_size");
  c.rollout_window = j.at("rollout_window");
  c.entropy_coef = j.at("entropy_coef");
  c.value_coef = j.at("value_coef");
  c.max_grad_norm = j.at("max_grad_norm");
  c.normalize_advantages = j.at("normalize_advantages");
  c.hidden_size = j.at("hidden_size");
  c.hidden_layers = j.at("hidden_layers");
  c.max_episode_decisions = j.at("max_episode_decisions");
  c.reward_mode = reward_mode_from_string(j.at("reward_mode"));
  return c;
}

}  // namespace detail

/// Layout: magic, u32 version, u64 metadata length, metadata JSON, u64
/// parameter count, then actor and critic parameters as raw doubles.
/// Doubles are written bit-exact, including in the JSON (17 significant
/// digits round-trip).
inline void save_policy(const Policy& p, std::ostream& out) {
  nlohmann::json meta = {{"num_vars", p.shape().num_vars},
                         {"num_clauses", p.shape().num_clauses},
                         {"seed", p.seed()},
                         {"feature_schema", kFeatureSchemaVersion},
                         {"config", detail::config_to_json(p.config())}};
  const std::string text = meta.dump();
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::put_raw(out, kCheckpointVersion);
  detail::put_raw(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  detail::put_raw(out, static_cast<std::uint64_t>(p.actor().num_parameters() + p.critic().num_parameters()));
  auto put = [&](double d) { detail::put_raw(out, d); };
  p.actor().for_each_parameter(put);
  p.critic().for_each_parameter(put);
  if (!out) throw std::runtime_error("checkpoint write failed");
}

inline std::string save_policy(const Policy& p) {
  std::ostringstream out(std::ios::binary);
  save_policy(p, out);
  return out.str();
}

inline void save_policy_file(const Policy& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_policy(p, out);
}

/// Never returns a partially filled policy. `expected` rejects policies of
/// another problem shape.
inline Policy load_policy(std::istream& in, std::optional<ProblemShape> expected = std::nullopt) {
  char magic[sizeof kCheckpointMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw VersionMismatch("not a policy checkpoint (bad magic)");
  auto version = detail::get_raw<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion)
    throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
  auto len = detail::get_raw<std::uint64_t>(in, "metadata length");
  if (len > (1u << 20)) throw CorruptCheckpoint("checkpoint metadata too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw CorruptCheckpoint("checkpoint truncated in metadata");

  ProblemShape shape;
  PpoConfig cfg;
  std::uint64_t seed = 0;
  try {
    auto meta = nlohmann::json::parse(text);
    shape = {meta.at("num_vars").get<std::size_t>(), meta.at("num_clauses").get<std::size_t>()};
    seed = meta.at("seed");
    if (meta.at("feature_schema").get<int>() != kFeatureSchemaVersion)
      throw VersionMismatch("checkpoint feature schema differs from this build");
    cfg = detail::config_from_json(meta.at("config"));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("checkpoint metadata: ") + e.what());
  }
  if (expected && *expected != shape) throw ShapeMismatch(*expected, shape);

  Policy p(shape, cfg, seed);
  auto count = detail::get_raw<std::uint64_t>(in, "parameter count");
  if (count != p.actor().num_parameters() + p.critic().num_parameters())
    throw CorruptCheckpoint("checkpoint parameter count does not match its shape");
  std::vector<double> raw(count);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(double))))
    throw CorruptCheckpoint("checkpoint truncated in parameters");
  std::size_t k = 0;
  auto get = [&](double& d) { d = raw[k++]; };
  p.actor().for_each_parameter(get);
  p.critic().for_each_parameter(get);
  return p;
}

inline Policy load_policy(const std::string& bytes, std::optional<ProblemShape> expected = std::nullopt) {
  std::istringstream in(bytes, std::ios::binary);
  return load_policy(in, expected);
}

inline Policy load_policy_file(const std::string& path, std::optional<ProblemShape> expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open policy file " + path);
  return load_policy(in, expected);
}

}  // namespace clausekit::rl
