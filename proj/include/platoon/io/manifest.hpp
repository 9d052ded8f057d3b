#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include <json.hpp>

#include "platoon/io/config.hpp"

namespace platoon::io {

std::string sha1_hex(const std::string& data);

// Same id `git hash-object` would assign to a file with this content.
std::string git_blob_hash(const std::string& content);

std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string resolved_config;  // format_scenario() text
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string started_at;
  std::string finished_at;
  nlohmann::json extra = nlohmann::json::object();

  std::string config_hash() const { return git_blob_hash(resolved_config); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["arguments"] = arguments;
    j["config_hash"] = config_hash();
    j["config"] = resolved_config;
    j["seeds"] = seeds;
    j["out_dir"] = out_dir;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    if (!extra.empty()) j["artifacts"] = extra;
    return j;
  }
};

}  // namespace platoon::io
