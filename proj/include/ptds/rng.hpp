#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace ptds {

/// Deterministic uniform generator. Draws are produced from raw mt19937_64
/// words rather than std distributions, so streams are identical across
/// standard libraries and across runs with the same seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  Eigen::VectorXd uniform_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd x(lo.size());
    for (int i = 0; i < lo.size(); ++i) x(i) = uniform(lo(i), hi(i));
    return x;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd u(n);
    double norm = 0.0;
    do {
      for (int i = 0; i < n; ++i) u(i) = normal();
      norm = u.norm();
    } while (norm < 1e-12);
    return u / norm;
  }

  /// Uniform draw from the closed unit ball.
  Eigen::VectorXd ball(int n) {
    return unit_vector(n) * std::pow(uniform01(), 1.0 / double(n));
  }

private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable per-index seed derivation (splitmix64 mix), so sample i gets the
/// same stream no matter how work is chunked across threads.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace ptds
