#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rst {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// deterministic stream seeded by (master, index)
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + index * 0x1f83d9abfb41bd6bULL);
  splitmix64(s);
  return splitmix64(s);
}

// uniform double in [0,1)
inline double uniform01(std::uint64_t& state) {
  return double(splitmix64(state) >> 11) * (1.0 / 9007199254740992.0);
}

// standard normal via Box-Muller (platform-independent)
double normal_sample(std::uint64_t& state);

inline std::uint64_t fnv1a(const std::string& data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

// trims ASCII whitespace on both sides
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

// fixed-format float printing used by all CSV writers (byte-reproducible)
std::string format_double(double v);

// simple least-squares line fit; returns (slope, intercept, slope_stderr)
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rst
