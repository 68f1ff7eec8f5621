#ifndef WETE_RNG_HPP
#define WETE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace wete {

// All randomness in the library flows through these helpers rather than
// std::*_distribution so that a given seed reproduces the same stream on any
// standard library.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named sub-streams derived from one master seed.
enum class SeedStream : std::uint64_t {
  word_init = 1,
  topic_init = 2,
  encoder_init = 3,
  shuffle = 4,
  noise = 5,
  oov = 6,
  kmeans = 7,
  split = 8,
};

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) {
  std::uint64_t s = master ^ (0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(stream));
  splitmix64(s);
  return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, bias-free.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

template <typename T>
void shuffle_indices(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

// Box-Muller pair; consumes two uniforms, yields two independent N(0,1).
inline void gaussian_pair(Rng& rng, double& z0, double& z1) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * M_PI * u2;
  z0 = r * std::cos(phi);
  z1 = r * std::sin(phi);
}

// Fills in row-major order so the stream consumed is independent of the
// expression's storage layout.
template <typename Derived>
void fill_gaussian(Eigen::DenseBase<Derived>& m, double stddev, Rng& rng) {
  bool cached = false;
  double cache = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (cached) {
        m(i, j) = stddev * cache;
        cached = false;
      } else {
        double z0, z1;
        gaussian_pair(rng, z0, z1);
        m(i, j) = stddev * z0;
        cache = z1;
        cached = true;
      }
    }
  }
}

template <typename Derived>
void fill_gaussian(Eigen::DenseBase<Derived>&& m, double stddev, Rng& rng) {
  fill_gaussian(m, stddev, rng);
}

}  // namespace wete

#endif  // WETE_RNG_HPP
