#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace platoon {

// Raised when two vehicles overlap or a follower sees a non-positive gap.
// Never expected in a correct simulation; tests treat it as a failure.
class CollisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or mismatched artifact dimensions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of an episode lifecycle (e.g. stepping a finished episode).
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DimensionMismatch : public ConfigError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t found, const std::string& what)
      : ConfigError(what + ": expected p=" + std::to_string(expected) +
                    " but found p=" + std::to_string(found)),
        expected_(expected),
        found_(found) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t expected_;
  std::size_t found_;
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed derivation from a base seed and a tuple of indices.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = mix64(base);
  for (auto p : parts) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace platoon
