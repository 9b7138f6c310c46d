#pragma once

// Floating-point side: fixed-step RK4 for x' = y, y' = z, z' = x^3 - a^2 x - y - b z,
// and numeric symmetry residuals of concrete generators at sampled jet points.
// Residuals evaluate the cleared polynomial condition.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "liesym/jet.hpp"
#include "liesym/lie.hpp"
#include "liesym/ode.hpp"

namespace liesym {

struct State3 {
  double t = 0, x = 0, y = 0, z = 0;
  bool finite() const { return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

struct NumericParams {
  double a = 1;
  double b = 1;
  double step = 1e-3;
  double t_end = 1;

  void validate() const {
    if (!(a > 0) || !std::isfinite(a)) throw InputError("parameter a must be positive");
    if (!(b >= 0) || !std::isfinite(b)) throw InputError("parameter b must be nonnegative");
    if (!(step > 0) || !std::isfinite(step)) throw InputError("step must be positive");
    if (!(t_end >= 0) || !std::isfinite(t_end)) throw InputError("t_end must be nonnegative");
  }
  /// Number of RK4 steps; the step actually used is t_end / steps().
  std::size_t steps() const { return t_end == 0 ? 0 : std::max<long long>(1, std::llround(t_end / step)); }
};

inline std::array<double, 3> silnikov_rhs(double a, double b, double x, double y, double z) {
  return {y, z, x * (x * x - a * a) - y - b * z};
}

struct Trajectory {
  std::vector<State3> states;  ///< includes the initial state
  bool truncated = false;
  std::string reason;
};

inline constexpr double divergence_bound = 1e12;

inline Trajectory integrate(const NumericParams& p, const State3& init) {
  p.validate();
  if (!init.finite()) throw InputError("initial state must be finite");
  Trajectory out;
  out.states.push_back(init);
  const std::size_t n = p.steps();
  const double h = n ? p.t_end / static_cast<double>(n) : 0.0;
  std::array<double, 3> u{init.x, init.y, init.z};
  auto f = [&](const std::array<double, 3>& v) { return silnikov_rhs(p.a, p.b, v[0], v[1], v[2]); };
  auto shifted = [](const std::array<double, 3>& v, const std::array<double, 3>& k, double s) {
    return std::array<double, 3>{v[0] + s * k[0], v[1] + s * k[1], v[2] + s * k[2]};
  };
  for (std::size_t i = 1; i <= n; ++i) {
    const auto k1 = f(u);
    const auto k2 = f(shifted(u, k1, h / 2));
    const auto k3 = f(shifted(u, k2, h / 2));
    const auto k4 = f(shifted(u, k3, h));
    std::array<double, 3> next;
    for (int j = 0; j < 3; ++j) next[j] = u[j] + h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    const State3 s{init.t + static_cast<double>(i) * h, next[0], next[1], next[2]};
    if (!s.finite()) {
      out.truncated = true;
      out.reason = "non-finite value at t=" + std::to_string(s.t);
      break;
    }
    if (std::abs(s.x) > divergence_bound || std::abs(s.y) > divergence_bound || std::abs(s.z) > divergence_bound) {
      out.truncated = true;
      out.reason = "diverged beyond 1e12 at t=" + std::to_string(s.t);
      break;
    }
    out.states.push_back(s);
    u = next;
  }
  return out;
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,x,y,z\n";
  for (const auto& s : tr.states)
    out += format_g17(s.t) + "," + format_g17(s.x) + "," + format_g17(s.y) + "," + format_g17(s.z) + "\n";
  return out;
}

/// Point of the jet space of a second-order equation.
struct JetSample {
  double t = 0, x = 0, xdot = 0;
};

inline constexpr double default_x_floor = 1e-6;

/// Polynomial in t, x, x' with coefficients evaluated at fixed parameter values.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::map<std::string, double>& params) {
    for (const auto& [m, c] : e.terms()) {
      Term term;
      const double den = c.den().evaluate(params);
      if (den == 0)
        throw GenericityViolation("parameter assignment makes the divisor " + c.den().to_string() + " vanish");
      term.coeff = c.num().evaluate(params) / den;
      for (const auto& [a, p] : m.factors()) {
        if (std::holds_alternative<IndependentVar>(a))
          term.pt = p;
        else if (a == jet(0))
          term.px = p;
        else if (a == jet(1))
          term.pxd = p;
        else
          throw InputError("numeric evaluation supports t, x, x' only");
      }
      terms_.push_back(term);
    }
  }

  double operator()(const JetSample& s) const {
    double sum = 0, scale = 0;
    accumulate(s, sum, scale);
    return sum;
  }

  void accumulate(const JetSample& s, double& sum, double& scale) const {
    for (const auto& term : terms_) {
      const double v = term.coeff * ipow(s.t, term.pt) * ipow(s.x, term.px) * ipow(s.xdot, term.pxd);
      sum += v;
      scale += std::abs(v);
    }
  }

 private:
  struct Term {
    double coeff = 0;
    unsigned pt = 0, px = 0, pxd = 0;
  };
  static double ipow(double v, unsigned n) {
    double r = 1;
    for (unsigned i = 0; i < n; ++i) r *= v;
    return r;
  }
  std::vector<Term> terms_;
};

struct ResidualValue {
  double value = 0;  ///< cleared residual
  double scale = 0;  ///< sum of magnitudes of its terms
};

/// The cleared symmetry condition of a concrete generator, compiled for
/// repeated evaluation.
class ResidualEvaluator {
 public:
  ResidualEvaluator(const OdeSpec& ode, const Generator& g, const std::map<std::string, double>& params) {
    g.check_point();
    if (g.has_unknowns()) throw InputError("residual needs a concrete generator");
    for (const auto& p : ode.params)
      if (!params.count(p)) throw InputError("parameter '" + p + "' is unbound");
    const ClearedCondition cond = symmetry_condition(ode, g);
    condition_ = CompiledExpr(cond.numerator, params);
    den_ = CompiledExpr(ode.rhs_den, params);
  }

  ResidualValue operator()(const JetSample& s) const {
    if (den_(s) == 0) throw InputError("sample lies on the singular set of the equation");
    ResidualValue out;
    condition_.accumulate(s, out.value, out.scale);
    return out;
  }

 private:
  CompiledExpr condition_, den_;
};

inline double residual(const OdeSpec& ode, const Generator& g, const JetSample& s,
                       const std::map<std::string, double>& params, double x_floor = default_x_floor) {
  if (std::abs(s.x) < x_floor) throw InputError("sample violates the |x| floor");
  return ResidualEvaluator(ode, g, params)(s).value;
}

struct SampleBox {
  double t_lo = -2, t_hi = 2;
  double x_lo = -2, x_hi = 2;
  double xdot_lo = -2, xdot_hi = 2;
  double x_floor = default_x_floor;

  void validate() const {
    if (!(t_lo <= t_hi && x_lo <= x_hi && xdot_lo <= xdot_hi)) throw InputError("sample box bounds are inverted");
    if (std::max(std::abs(x_lo), std::abs(x_hi)) < x_floor) throw InputError("sample box lies inside the |x| floor");
  }
};

struct SweepReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double max_abs = 0;
  double mean_abs = 0;
  double max_rel = 0;  ///< largest |value| / scale (0 when scale is 0)
  JetSample worst_sample;
};

/// Deterministic for a given seed: uniform doubles are built from the top 53
/// bits of mt19937_64 output.
inline SweepReport sample_sweep(const OdeSpec& ode, const Generator& g, std::size_t n, std::uint64_t seed,
                                const SampleBox& box, const std::map<std::string, double>& params) {
  box.validate();
  const ResidualEvaluator eval(ode, g, params);
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  SweepReport out;
  out.n = n;
  out.seed = seed;
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    JetSample s;
    s.t = uniform(box.t_lo, box.t_hi);
    do s.x = uniform(box.x_lo, box.x_hi);
    while (std::abs(s.x) < box.x_floor);
    s.xdot = uniform(box.xdot_lo, box.xdot_hi);
    const ResidualValue r = eval(s);
    const double a = std::abs(r.value);
    sum += a;
    if (i == 0 || a > out.max_abs) {
      out.max_abs = a;
      out.worst_sample = s;
    }
    if (r.scale > 0) out.max_rel = std::max(out.max_rel, a / r.scale);
  }
  out.mean_abs = n ? sum / static_cast<double>(n) : 0.0;
  return out;
}

inline nlohmann::ordered_json sweep_json(const SweepReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["max_abs"] = r.max_abs;
  j["mean_abs"] = r.mean_abs;
  j["worst_sample"] = {{"t", r.worst_sample.t}, {"x", r.worst_sample.x}, {"xdot", r.worst_sample.xdot}};
  return j;
}

}  // namespace liesym
