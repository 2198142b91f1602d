#pragma once

// Arithmetic of the Poincare disc and multi-disc: distances, disc-preserving
// Moebius transformations, Busemann energies and Poisson-kernel scores.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "embolic/util.hpp"

namespace embolic {

using complexd = std::complex<double>;

/// A strictly interior point of the unit disc, |z| < 1 - kBoundaryEps.
class DiscPoint {
 public:
  DiscPoint() : z_(0.0, 0.0) {}

  explicit DiscPoint(complexd z) : z_(z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        std::abs(z) >= 1.0 - kBoundaryEps) {
      throw DomainError("DiscPoint: modulus must be < 1 - 1e-7");
    }
  }

  DiscPoint(double re, double im) : DiscPoint(complexd(re, im)) {}

  /// Radially clamps onto modulus 1 - kBoundaryEps instead of throwing.
  /// For operations whose exact result is interior but can graze the
  /// boundary in floating point (Moebius images, solver iterates).
  static DiscPoint clamped(complexd z) {
    double r = std::abs(z);
    double rmax = 1.0 - kBoundaryEps;
    if (r >= rmax) z *= rmax / r;
    DiscPoint p;
    p.z_ = z;
    return p;
  }

  complexd value() const { return z_; }
  double re() const { return z_.real(); }
  double im() const { return z_.imag(); }
  double modulus() const { return std::abs(z_); }
  double arg() const { return std::arg(z_); }

  friend bool operator==(const DiscPoint& a, const DiscPoint& b) {
    return a.z_ == b.z_;
  }

 private:
  complexd z_;
};

/// A point xi = e^{i psi} of the boundary circle, stored as the reduced angle.
class BoundaryDirection {
 public:
  explicit BoundaryDirection(double psi) : psi_(reduce_angle(psi)) {}

  double psi() const { return psi_; }
  complexd unit() const { return std::polar(1.0, psi_); }

 private:
  double psi_;
};

/// A point of the product of k Poincare discs.
class MultiDiscPoint {
 public:
  explicit MultiDiscPoint(std::vector<DiscPoint> coords)
      : coords_(std::move(coords)) {
    if (coords_.empty()) {
      throw DimensionError("MultiDiscPoint: k must be >= 1");
    }
  }

  std::size_t k() const { return coords_.size(); }
  const DiscPoint& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<DiscPoint>& coords() const { return coords_; }

 private:
  std::vector<DiscPoint> coords_;
};

/// Hyperbolic distance, arccosh((|z1-z2|^2 + 2(1-|z1|^2)(1-|z2|^2)) /
/// (2(1-|z1|^2)(1-|z2|^2))).
inline double disc_distance(const DiscPoint& z1, const DiscPoint& z2) {
  double a = 1.0 - std::norm(z1.value());
  double b = 1.0 - std::norm(z2.value());
  double d2 = std::norm(z1.value() - z2.value());
  double gamma = 1.0 + d2 / (2.0 * a * b);
  if (gamma < 1.0) gamma = 1.0;  // rounding at coincident points
  return std::acosh(gamma);
}

/// Multi-disc distance: mean of the per-disc distances.
inline double multidisc_distance(const MultiDiscPoint& z,
                                 const MultiDiscPoint& xi) {
  if (z.k() != xi.k()) {
    throw DimensionError("multidisc_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < z.k(); ++i) sum += disc_distance(z[i], xi[i]);
  return sum / static_cast<double>(z.k());
}

/// Disc isometry g(z) = e^{i theta} (a - z) / (1 - conj(a) z).
class MoebiusTransform {
 public:
  MoebiusTransform() : a_(), theta_(0.0) {}

  MoebiusTransform(DiscPoint a, double theta)
      : a_(a), theta_(reduce_angle(theta)) {}

  const DiscPoint& a() const { return a_; }
  double theta() const { return theta_; }

  DiscPoint apply(const DiscPoint& z) const {
    complexd num = a_.value() - z.value();
    complexd den = 1.0 - std::conj(a_.value()) * z.value();
    complexd w = std::polar(1.0, theta_) * num / den;
    return DiscPoint::clamped(w);
  }

  /// g^{-1} stays inside the family: (e^{i theta} a, -theta).
  MoebiusTransform inverse() const {
    complexd a_inv = std::polar(1.0, theta_) * a_.value();
    return MoebiusTransform(DiscPoint::clamped(a_inv), -theta_);
  }

 private:
  DiscPoint a_;
  double theta_;
};

inline DiscPoint moebius_apply(const MoebiusTransform& g, const DiscPoint& z) {
  return g.apply(z);
}

inline MoebiusTransform moebius_inverse(const MoebiusTransform& g) {
  return g.inverse();
}

/// Composition g2 after g1, refit into (a, theta) form. The composed a is the
/// preimage of 0; theta is recovered from the action on a probe point.
inline MoebiusTransform moebius_compose(const MoebiusTransform& g2,
                                        const MoebiusTransform& g1) {
  DiscPoint a = g1.inverse().apply(g2.a());
  auto act = [&](complexd z) {
    DiscPoint p = g2.apply(g1.apply(DiscPoint::clamped(z)));
    return p.value();
  };
  complexd phase;
  if (std::abs(a.value()) > 1e-12) {
    phase = act(complexd(0.0, 0.0)) / a.value();
  } else {
    complexd p(0.5, 0.0);
    phase = act(p) * (1.0 - std::conj(a.value()) * p) / (a.value() - p);
  }
  return MoebiusTransform(a, std::arg(phase));
}

/// Poisson kernel (1 - r^2) / (1 - 2 r cos(psi - Phi) + r^2) for z = r e^{i Phi}.
inline double poisson_score(const DiscPoint& z, const BoundaryDirection& xi) {
  double r = z.modulus();
  double num = 1.0 - r * r;
  double den = 1.0 - 2.0 * r * std::cos(xi.psi() - z.arg()) + r * r;
  return num / den;
}

/// Log of the Poisson kernel; zero at the disc center.
inline double busemann_energy(const DiscPoint& z, const BoundaryDirection& xi) {
  return std::log(poisson_score(z, xi));
}

}  // namespace embolic
