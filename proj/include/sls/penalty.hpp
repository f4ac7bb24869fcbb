#pragma once

#include "sls/types.hpp"

#include <algorithm>
#include <cmath>

namespace sls {

enum class PenaltyKind { MCP, SCAD, L1 };

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::MCP;
  double lambda1 = 0.0;
  double gamma = 3.0;  // MCP: > 1, SCAD: > 2, ignored for L1

  void validate() const {
    if (!(lambda1 >= 0.0) || !std::isfinite(lambda1))
      throw ValidationError("penalty: lambda1 must be finite and >= 0");
    if (kind == PenaltyKind::MCP && !(gamma > 1.0))
      throw ValidationError("penalty: MCP requires gamma > 1");
    if (kind == PenaltyKind::SCAD && !(gamma > 2.0))
      throw ValidationError("penalty: SCAD requires gamma > 2");
  }
};

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

/// Penalty rho(t). MCP: lambda1*|t| - t^2/(2 gamma) for |t| <= gamma*lambda1,
/// constant gamma*lambda1^2/2 beyond. SCAD: the usual quadratic spline. L1:
/// lambda1*|t|. Even in t and nondecreasing in |t| for all three.
inline double penalty_value(double t, const PenaltyConfig& cfg) {
  const double a = std::abs(t);
  const double l = cfg.lambda1;
  switch (cfg.kind) {
    case PenaltyKind::L1:
      return l * a;
    case PenaltyKind::MCP: {
      const double g = cfg.gamma;
      if (a <= g * l) return l * a - t * t / (2.0 * g);
      return 0.5 * g * l * l;
    }
    case PenaltyKind::SCAD: {
      const double g = cfg.gamma;
      if (a <= l) return l * a;
      if (a <= g * l) return (2.0 * g * l * a - a * a - l * l) / (2.0 * (g - 1.0));
      return 0.5 * l * l * (g + 1.0);
    }
  }
  return 0.0;
}

/// Signed derivative of rho at t. At t = 0 the subgradient bound lambda1 is
/// returned, which is what KKT checks need there.
inline double penalty_derivative(double t, const PenaltyConfig& cfg) {
  const double l = cfg.lambda1;
  if (t == 0.0) return l;
  const double a = std::abs(t);
  const double s = t > 0.0 ? 1.0 : -1.0;
  switch (cfg.kind) {
    case PenaltyKind::L1:
      return l * s;
    case PenaltyKind::MCP: {
      const double g = cfg.gamma;
      return l * std::max(0.0, 1.0 - a / (g * l)) * s;
    }
    case PenaltyKind::SCAD: {
      const double g = cfg.gamma;
      if (a <= l) return l * s;
      if (a <= g * l) return (g * l - a) / (g - 1.0) * s;
      return 0.0;
    }
  }
  return 0.0;
}

namespace detail {
inline double univariate_objective(double b, double z, double v, const PenaltyConfig& cfg) {
  return 0.5 * v * b * b - z * b + penalty_value(b, cfg);
}
}  // namespace detail

/// Exact minimizer of h(b) = (v/2) b^2 - z b + rho(|b|), the one-dimensional
/// problem each coordinate-descent step solves. Closed-form branches where the
/// problem is convex; otherwise the global minimizer is picked by comparing
/// h at the candidate stationary points, so a step never increases h.
inline double univariate_minimize(double z, double v, const PenaltyConfig& cfg) {
  if (!(v > 0.0)) throw ValidationError("univariate_minimize: v must be > 0");
  const double l = cfg.lambda1;
  if (l == 0.0) return z / v;

  switch (cfg.kind) {
    case PenaltyKind::L1:
      return soft_threshold(z, l) / v;

    case PenaltyKind::MCP: {
      const double g = cfg.gamma;
      if (std::abs(z) > v * g * l) return z / v;  // beyond gamma*lambda1: no shrinkage
      const double d = v - 1.0 / g;
      if (d > 0.0) return soft_threshold(z, l) / d;
      // Nonconvex inner region: compare h at the candidate stationary points.
      double best = 0.0;
      double best_val = 0.0;
      auto consider = [&](double b) {
        const double val = detail::univariate_objective(b, z, v, cfg);
        if (val < best_val) {
          best_val = val;
          best = b;
        }
      };
      consider(z / v);
      if (d != 0.0) {
        const double inner = soft_threshold(z, l) / d;
        if (std::abs(inner) <= g * l) consider(inner);
      }
      return best;
    }

    case PenaltyKind::SCAD: {
      const double g = cfg.gamma;
      const double az = std::abs(z);
      const double d2 = v - 1.0 / (g - 1.0);
      if (d2 > 0.0) {
        if (az <= l * (v + 1.0)) return soft_threshold(z, l) / v;
        if (az <= v * g * l) return soft_threshold(z, g * l / (g - 1.0)) / d2;
        return z / v;
      }
      if (az > v * g * l) return z / v;
      double best = 0.0;
      double best_val = 0.0;
      auto consider = [&](double b) {
        const double val = detail::univariate_objective(b, z, v, cfg);
        if (val < best_val) {
          best_val = val;
          best = b;
        }
      };
      consider(z / v);
      const double b1 = soft_threshold(z, l) / v;
      if (std::abs(b1) <= l) consider(b1);
      if (d2 != 0.0) {
        const double b2 = soft_threshold(z, g * l / (g - 1.0)) / d2;
        if (std::abs(b2) > l && std::abs(b2) <= g * l) consider(b2);
      }
      return best;
    }
  }
  return 0.0;
}

}  // namespace sls
