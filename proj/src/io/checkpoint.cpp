#include "platoon/io/checkpoint.hpp"

namespace platoon::io {

namespace detail {

void put_f64(std::string& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw ConfigError("checkpoint: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += 8;
  return std::bit_cast<double>(bits);
}

double count_field(double x, const char* what) {
  if (!(x >= 0) || x != std::floor(x) || x > 9.007199254740992e15)
    throw ConfigError(std::string("checkpoint: invalid ") + what);
  return x;
}

}  // namespace detail

std::string encode_checkpoint(const Checkpoint& ck) {
  const auto& pol = ck.policy;
  const std::size_t p = pol.dim();
  std::string out(kCheckpointMagic.begin(), kCheckpointMagic.end());
  detail::put_f64(out, kCheckpointVersion);
  detail::put_f64(out, static_cast<double>(p));
  detail::put_f64(out, static_cast<double>(ck.platoon_size));
  for (double x : pol.theta) detail::put_f64(out, x);
  for (double x : pol.norm_mean()) detail::put_f64(out, x);
  for (double x : pol.norm_var()) detail::put_f64(out, x);
  detail::put_f64(out, static_cast<double>(pol.obs_count()));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic.data(), 8) != 0)
    throw ConfigError("checkpoint: not a policy checkpoint (bad magic)");
  std::size_t pos = 8;
  const double version = detail::get_f64(bytes, pos);
  if (version != kCheckpointVersion)
    throw ConfigError("checkpoint: unsupported format version " + format_double(version));
  const auto p = static_cast<std::size_t>(detail::count_field(detail::get_f64(bytes, pos), "dimension p"));
  const auto n = static_cast<int>(detail::count_field(detail::get_f64(bytes, pos), "platoon size n"));
  const std::size_t expected = 8 + 8 * (3 + 3 * p + 1);
  if (bytes.size() != expected)
    throw ConfigError("checkpoint: size " + std::to_string(bytes.size()) + " bytes does not match p=" +
                      std::to_string(p) + " (expected " + std::to_string(expected) + ")");
  Checkpoint ck;
  ck.platoon_size = n;
  ck.policy = ars::LinearPolicy(p);
  for (auto& x : ck.policy.theta) x = detail::get_f64(bytes, pos);
  std::vector<double> mean(p), var(p);
  for (auto& x : mean) x = detail::get_f64(bytes, pos);
  for (auto& x : var) x = detail::get_f64(bytes, pos);
  const auto count = static_cast<std::uint64_t>(detail::count_field(detail::get_f64(bytes, pos), "obs_count"));
  for (double v : var)
    if (!(v >= 0)) throw ConfigError("checkpoint: negative state variance");
  ck.policy.normalizer = count == 0 ? ars::RunningStats(p) : ars::RunningStats::from_moments(mean, var, count);
  return ck;
}

nlohmann::json checkpoint_sidecar(const Checkpoint& ck, const Scenario& sc) {
  nlohmann::json j;
  j["format"] = "platoon-policy";
  j["version"] = kCheckpointVersion;
  j["p"] = ck.policy.dim();
  j["n"] = ck.platoon_size;
  j["obs_count"] = ck.policy.obs_count();
  j["config"] = scenario_entries(sc);
  return j;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck, const Scenario& sc) {
  write_file(path, encode_checkpoint(ck));
  write_file(sidecar_path(path), checkpoint_sidecar(ck, sc).dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace platoon::io
