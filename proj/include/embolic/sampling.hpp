#pragma once

// Random variate generation for the Moebius family of distributions on the
// Poincare disc: inverse-CDF draws at the center, Moebius transport to the
// prescribed mean.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "embolic/disc_geometry.hpp"
#include "embolic/util.hpp"

namespace embolic {

/// Deterministic seeded generator. The algorithm name is part of the
/// artifact's reproducibility contract: identical seed, identical stream.
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/v1";

  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (fixed algorithm, platform-independent).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return mag * std::cos(kTwoPi * u2);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Unimodal density ((s-1)/pi) * [(1-|z|^2)(1-|a|^2)/|1-conj(a)z|^2]^s on the
/// disc, with hyperbolic mean a and concentration s > 1.
class MoebiusDistribution {
 public:
  MoebiusDistribution(DiscPoint mean, double concentration)
      : mean_(mean), s_(concentration) {
    if (!(concentration > 1.0)) {
      throw DomainError("MoebiusDistribution: concentration must be > 1");
    }
  }

  const DiscPoint& mean() const { return mean_; }
  double concentration() const { return s_; }

 private:
  DiscPoint mean_;
  double s_;
};

inline double density(const MoebiusDistribution& dist, const DiscPoint& z) {
  double s = dist.concentration();
  const complexd a = dist.mean().value();
  double bracket = (1.0 - std::norm(z.value())) * (1.0 - std::norm(a)) /
                   std::norm(1.0 - std::conj(a) * z.value());
  return (s - 1.0) / kPi * std::pow(bracket, s);
}

/// Radial CDF at mean 0: F(R) = 1 - (1 - R^2)^(s-1), obtained by integrating
/// the density against the hyperbolic area element.
inline double radial_cdf(double s, double radius) {
  if (!(s > 1.0)) throw DomainError("radial_cdf: s must be > 1");
  if (radius < 0.0 || radius >= 1.0) {
    throw DomainError("radial_cdf: R must lie in [0, 1)");
  }
  return 1.0 - std::pow(1.0 - radius * radius, s - 1.0);
}

/// Draws n points: phi = 2 pi gamma, R = sqrt(1 - (1-kappa)^(1/(s-1))) with
/// gamma, kappa uniform, then transports by g_a with theta = 0 so the mean
/// point maps to a.
inline std::vector<DiscPoint> sample(const MoebiusDistribution& dist,
                                     std::size_t n, SeededRng& rng) {
  double s = dist.concentration();
  MoebiusTransform transport(dist.mean(), 0.0);
  bool centered = std::abs(dist.mean().value()) == 0.0;
  std::vector<DiscPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double gamma = rng.uniform();
    double kappa = rng.uniform();
    double phi = kTwoPi * gamma;
    double radius = std::sqrt(1.0 - std::pow(1.0 - kappa, 1.0 / (s - 1.0)));
    DiscPoint z = DiscPoint::clamped(std::polar(radius, phi));
    out.push_back(centered ? z : transport.apply(z));
  }
  return out;
}

}  // namespace embolic
