#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sectorize {

using Index = Eigen::Index;

// Thrown when input data (files, records, CLI arguments) is unusable.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when two datasets that must agree (e.g. prediction vs truth node
// sets) do not.
struct DataMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Derives an independent child seed from a base seed and up to two stream
// indices. Used to split one user-facing seed into per-population and
// per-generation RNG streams that do not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  using detail::splitmix64;
  return splitmix64(splitmix64(base ^ splitmix64(a + 0x51ed270b7a1fca5dULL)) ^
                    splitmix64(b + 0x9f347c95d1a2b6e3ULL));
}

// Splits a line on commas. No quoting: none of the file formats used here
// embed commas in fields.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace sectorize
