#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "platoon/ars/linear_policy.hpp"
#include "platoon/common.hpp"
#include "platoon/io/config.hpp"

namespace platoon::io {

// Binary layout: the 8 ASCII bytes "PLTNCKPT", then little-endian IEEE-754 doubles
//   version, p, n, theta[p], sigma[p] (state mean), Sigma[p] (state variance), obs_count
inline constexpr std::array<char, 8> kCheckpointMagic{'P', 'L', 'T', 'N', 'C', 'K', 'P', 'T'};
inline constexpr double kCheckpointVersion = 1.0;

struct Checkpoint {
  ars::LinearPolicy policy;
  int platoon_size = 0;
};

std::string encode_checkpoint(const Checkpoint& ck);
// Throws ConfigError on bad magic, unknown version or a size that does not match p.
Checkpoint decode_checkpoint(const std::string& bytes);

inline std::string sidecar_path(const std::string& checkpoint_path) { return checkpoint_path + ".json"; }
nlohmann::json checkpoint_sidecar(const Checkpoint& ck, const Scenario& sc);

// Writes the binary checkpoint and its JSON sidecar.
void save_checkpoint(const std::string& path, const Checkpoint& ck, const Scenario& sc);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace platoon::io
