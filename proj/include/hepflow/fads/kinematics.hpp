#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace hepflow::fads {

inline constexpr double pi = std::numbers::pi;

// Wraps an angle into (-pi, pi].
inline double wrap_phi(double phi) {
  double d = std::remainder(phi, 2 * pi);  // exact, in [-pi, pi]
  if (d <= -pi) d += 2 * pi;
  return d;
}

inline double delta_phi(double phi_a, double phi_b) { return wrap_phi(phi_a - phi_b); }

inline double delta_r2(double eta_a, double phi_a, double eta_b, double phi_b) {
  const double de = eta_a - eta_b;
  const double dp = delta_phi(phi_a, phi_b);
  return de * de + dp * dp;
}

inline double delta_r(double eta_a, double phi_a, double eta_b, double phi_b) {
  return std::sqrt(delta_r2(eta_a, phi_a, eta_b, phi_b));
}

struct FourMomentum {
  double px = 0, py = 0, pz = 0, e = 0;  // GeV

  static FourMomentum from_pt_eta_phi_m(double pt, double eta, double phi, double m) {
    const double pz = pt * std::sinh(eta);
    const double p = pt * std::cosh(eta);
    return {pt * std::cos(phi), pt * std::sin(phi), pz, std::sqrt(p * p + m * m)};
  }

  double pt2() const { return px * px + py * py; }
  double pt() const { return std::sqrt(pt2()); }
  double p() const { return std::sqrt(pt2() + pz * pz); }

  // asinh(pz/pt) equals -ln tan(theta/2); infinite along the beam.
  double eta() const {
    const double t = pt();
    if (t == 0) return pz == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), pz);
    return std::asinh(pz / t);
  }

  double phi() const {
    if (px == 0 && py == 0) return 0.0;
    const double a = std::atan2(py, px);
    return a <= -pi ? pi : a;
  }

  double m2() const { return e * e - (pt2() + pz * pz); }
  double mass() const { return std::sqrt(std::max(0.0, m2())); }

  FourMomentum& operator+=(const FourMomentum& o) {
    px += o.px;
    py += o.py;
    pz += o.pz;
    e += o.e;
    return *this;
  }
  friend FourMomentum operator+(FourMomentum a, const FourMomentum& b) { return a += b; }
  FourMomentum& operator*=(double s) {
    px *= s;
    py *= s;
    pz *= s;
    e *= s;
    return *this;
  }
  friend bool operator==(const FourMomentum&, const FourMomentum&) = default;
};

inline double delta_r(const FourMomentum& a, const FourMomentum& b) {
  return delta_r(a.eta(), a.phi(), b.eta(), b.phi());
}

}  // namespace hepflow::fads
