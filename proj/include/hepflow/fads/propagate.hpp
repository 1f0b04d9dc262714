#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hepflow/error.hpp"
#include "hepflow/fads/candidate.hpp"
#include "hepflow/fads/detector.hpp"

namespace hepflow::fads {

class VertexOutsideDetector : public Error {
 public:
  explicit VertexOutsideDetector(int uid)
      : Error("propagator: production vertex of particle " + std::to_string(uid) + " is outside the tracker") {}
};

// GeV / (T m) per unit charge
inline constexpr double c_light = 0.299792458;

inline double gyroradius(double pt, int charge, double B) { return pt / (c_light * std::abs(charge) * B); }

namespace detail {

// Smallest t >= 0 with |(x0,y0) + t (ux,uy)| = R, for a start inside.
inline double straight_barrel(double x0, double y0, double ux, double uy, double R) {
  const double a = ux * ux + uy * uy;
  if (a == 0) return std::numeric_limits<double>::infinity();
  const double b = x0 * ux + y0 * uy;
  const double c = x0 * x0 + y0 * y0 - R * R;  // <= 0
  const double disc = std::sqrt(std::max(0.0, b * b - a * c));
  // the two forms avoid cancellation
  return b > 0 ? -c / (b + disc) : (disc - b) / a;
}

// Angle opposite side c in a triangle with sides a, b, c, using Kahan's
// area formula so needle-like triangles stay accurate.
inline double triangle_angle(double a, double b, double c) {
  double x = a, y = b, z = c;
  if (x < y) std::swap(x, y);
  if (y < z) std::swap(y, z);
  if (x < y) std::swap(x, y);
  const double q = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
  const double area4 = std::sqrt(std::max(0.0, q));  // 4 * area
  return std::atan2(area4, (a - b) * (a - b) + 2 * a * b - c * c);
}

inline double mod_two_pi(double x) {
  double r = std::fmod(x, 2 * pi);
  if (r < 0) r += 2 * pi;
  return r;
}

}  // namespace detail

/// Moves the candidate from its production vertex to where it leaves the
/// tracker cylinder (radius, +-half_length). Neutral particles and B = 0 go
/// straight; charged particles follow a helix around z. Particles that can
/// never leave (pt > 0 loopers with pz = 0, or zero momentum) are flagged
/// unpropagated and left in place.
inline Candidate propagate(Candidate c, const DetectorConfig& det) {
  const double R = det.radius, L = det.half_length;
  const double x0 = c.position.x, y0 = c.position.y, z0 = c.position.z;
  if (x0 * x0 + y0 * y0 > R * R || std::abs(z0) > L) throw VertexOutsideDetector(c.uid);

  const auto& p = c.momentum;
  const double pt = p.pt();
  if (pt == 0 && p.pz == 0) {
    c.set(unpropagated);
    return c;
  }
  // transverse path length to the endcap
  const double s_end = p.pz == 0 ? std::numeric_limits<double>::infinity()
                                 : (std::copysign(L, p.pz) - z0) * pt / p.pz;

  if (c.charge == 0 || det.B == 0 || pt == 0) {
    if (pt == 0) {
      c.position.z = std::copysign(L, p.pz);
      return c;
    }
    const double ux = p.px / pt, uy = p.py / pt;
    const double s_bar = detail::straight_barrel(x0, y0, ux, uy, R);
    if (s_end < s_bar) {
      c.position = {x0 + ux * s_end, y0 + uy * s_end, std::copysign(L, p.pz)};
    } else {
      c.position = {x0 + ux * s_bar, y0 + uy * s_bar, z0 + p.pz / pt * s_bar};
    }
    return c;
  }

  // helix: phi(s) = phi0 + h s / r, with h = -sign(q) for B along +z
  const double r = gyroradius(pt, c.charge, det.B);
  const double h = c.charge > 0 ? -1.0 : 1.0;
  const double phi0 = std::atan2(p.py, p.px);
  const double ux = p.px / pt, uy = p.py / pt;
  const double xc = x0 - h * r * uy, yc = y0 + h * r * ux;
  const double d = std::hypot(xc, yc);
  // angle of the position around the center: theta = phi - h pi/2
  const double theta0 = std::atan2(y0 - yc, x0 - xc);

  double s_bar = std::numeric_limits<double>::infinity();
  if (d > 0) {
    // crossing angles theta_c +- delta, where pi - delta is the angle at
    // the center in the triangle (origin, center, exit point)
    if (std::abs(d - r) <= R && R <= d + r) {
      const double theta_c = std::atan2(yc, xc);
      const double delta = pi - detail::triangle_angle(d, r, R);
      for (double target : {theta_c + delta, theta_c - delta}) {
        const double s = r * detail::mod_two_pi(h * (target - theta0));
        s_bar = std::min(s_bar, s);
      }
    }
  } else if (r >= R) {
    // centered on the axis: the whole circle has radius r
    s_bar = r == R ? 0.0 : std::numeric_limits<double>::infinity();
  }

  const double s = std::min(s_bar, s_end);
  if (!std::isfinite(s)) {
    c.set(unpropagated);
    return c;
  }
  const double phi = phi0 + h * s / r;
  const double theta = theta0 + h * s / r;
  c.position = {xc + r * std::cos(theta), yc + r * std::sin(theta),
                s == s_end ? std::copysign(L, p.pz) : z0 + p.pz / pt * s};
  c.momentum.px = pt * std::cos(phi);
  c.momentum.py = pt * std::sin(phi);
  return c;
}

}  // namespace hepflow::fads
