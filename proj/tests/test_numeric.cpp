#include <catch2/catch_amalgamated.hpp>

#include "liesym/analysis.hpp"
#include "liesym/numeric.hpp"
#include "support.hpp"

using namespace liesym;
using testing::load_ode;

namespace {

// Endpoint at t = 1 of a = b = 1, (x, y, z)(0) = (0.1, 0, 0), from a 30-digit
// Taylor-series integration (mpmath odefun).
constexpr std::array<double, 3> smoke_endpoint{0.087604886065158758571, -0.03313416580159621761,
                                               -0.050260239866112201495};

std::array<double, 3> endpoint(const Trajectory& tr) {
  const State3& s = tr.states.back();
  return {s.x, s.y, s.z};
}

double max_diff(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  double m = 0;
  for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(u[i] - v[i]));
  return m;
}

/// Kutta's 3/8-rule, fixed step; distinct from the library's classical RK4.
std::array<double, 3> three_eighths(double a, double b, std::array<double, 3> u, double t_end, long n) {
  const double h = t_end / static_cast<double>(n);
  auto f = [&](const std::array<double, 3>& v) {
    return std::array<double, 3>{v[1], v[2], v[0] * v[0] * v[0] - a * a * v[0] - v[1] - b * v[2]};
  };
  auto at = [](std::array<double, 3> v, std::initializer_list<std::pair<double, std::array<double, 3>>> ks) {
    for (const auto& [c, k] : ks)
      for (int i = 0; i < 3; ++i) v[i] += c * k[i];
    return v;
  };
  for (long s = 0; s < n; ++s) {
    const auto k1 = f(u);
    const auto k2 = f(at(u, {{h / 3, k1}}));
    const auto k3 = f(at(u, {{-h / 3, k1}, {h, k2}}));
    const auto k4 = f(at(u, {{h, k1}, {-h, k2}, {h, k3}}));
    for (int i = 0; i < 3; ++i) u[i] += h / 8 * (k1[i] + 3 * k2[i] + 3 * k3[i] + k4[i]);
  }
  return u;
}

/// Closed-form route: factor * (eta2 - xi f_t - eta f_x - eta1 f_x') with f = N / D,
/// from numeric partials. Independent of the symbolic condition builder.
struct ClosedFormResidual {
  ClosedFormResidual(const OdeSpec& ode, const Generator& g, const Expr& factor, std::map<std::string, double> params)
      : params_(std::move(params)) {
    const Atom t = indep(), x = jet(0), xd = jet(1);
    auto c = [&](const Expr& e) { return CompiledExpr(e, params_); };
    xi = c(g.xi), eta = c(g.eta);
    xi_t = c(partial(g.xi, t)), xi_x = c(partial(g.xi, x));
    xi_tt = c(partial(partial(g.xi, t), t)), xi_tx = c(partial(partial(g.xi, t), x));
    xi_xx = c(partial(partial(g.xi, x), x));
    eta_t = c(partial(g.eta, t)), eta_x = c(partial(g.eta, x));
    eta_tt = c(partial(partial(g.eta, t), t)), eta_tx = c(partial(partial(g.eta, t), x));
    eta_xx = c(partial(partial(g.eta, x), x));
    n = c(ode.rhs_num), d = c(ode.rhs_den);
    n_t = c(partial(ode.rhs_num, t)), n_x = c(partial(ode.rhs_num, x)), n_p = c(partial(ode.rhs_num, xd));
    d_t = c(partial(ode.rhs_den, t)), d_x = c(partial(ode.rhs_den, x)), d_p = c(partial(ode.rhs_den, xd));
    k = c(factor);
  }

  double operator()(const JetSample& s) const {
    const double N = n(s), D = d(s), f = N / D, p = s.xdot;
    auto q = [&](const CompiledExpr& dn, const CompiledExpr& dd) { return (dn(s) * D - N * dd(s)) / (D * D); };
    const double eta1 = eta_t(s) + (eta_x(s) - xi_t(s)) * p - xi_x(s) * p * p;
    const double eta2 = eta_tt(s) + (2 * eta_tx(s) - xi_tt(s)) * p + (eta_xx(s) - 2 * xi_tx(s)) * p * p -
                        xi_xx(s) * p * p * p + (eta_x(s) - 2 * xi_t(s)) * f - 3 * xi_x(s) * p * f;
    return k(s) * (eta2 - xi(s) * q(n_t, d_t) - eta(s) * q(n_x, d_x) - eta1 * q(n_p, d_p));
  }

  std::map<std::string, double> params_;
  CompiledExpr xi, eta, xi_t, xi_x, xi_tt, xi_tx, xi_xx, eta_t, eta_x, eta_tt, eta_tx, eta_xx;
  CompiledExpr n, d, n_t, n_x, n_p, d_t, d_x, d_p, k;
};

const ParseContext& ctx() {
  static const ParseContext c = testing::kernel_context();
  return c;
}
Expr E(const std::string& s) { return parse_expr(s, ctx()); }

const std::map<std::string, double> ab11{{"a", 1.0}, {"b", 1.0}};

}  // namespace

TEST_CASE("equilibria stay put over t in [0, 100]", "[numeric]") {
  struct Case {
    double a, b;
    State3 init;
  };
  for (const Case& c : {Case{2, 0.5, {0, 2, 0, 0}}, Case{2, 0.5, {0, -2, 0, 0}}, Case{1, 1, {0, 0, 0, 0}},
                        Case{1, 1, {0, 1, 0, 0}}, Case{1, 1, {0, -1, 0, 0}}, Case{1.5, 0, {0, 1.5, 0, 0}}}) {
    const Trajectory tr = integrate({c.a, c.b, 1e-2, 100}, c.init);
    REQUIRE_FALSE(tr.truncated);
    CHECK(tr.states.size() == 10001);
    CHECK(tr.states.back().t == Catch::Approx(100.0));
    double drift = 0;
    for (const auto& s : tr.states)
      drift = std::max({drift, std::abs(s.x - c.init.x), std::abs(s.y - c.init.y), std::abs(s.z - c.init.z)});
    CHECK(drift <= 1e-10);
  }
}

TEST_CASE("vector field vanishes exactly at the three equilibria", "[numeric]") {
  for (double a : {0.5, 1.0, 2.0}) {
    const double grid[] = {-2 * a, -a, -a / 2, 0, a / 2, a, 2 * a};
    for (double x : grid)
      for (double y : grid)
        for (double z : grid) {
          const auto r = silnikov_rhs(a, 0.7, x, y, z);
          const bool zero = r[0] == 0 && r[1] == 0 && r[2] == 0;
          const bool equilibrium = y == 0 && z == 0 && (x == 0 || x == a || x == -a);
          CHECK(zero == equilibrium);
        }
  }
}

TEST_CASE("smoke trajectory endpoint", "[numeric]") {
  const Trajectory tr = integrate({1, 1, 1e-3, 1}, {0, 0.1, 0, 0});
  CHECK(tr.states.size() == 1001);
  CHECK(tr.states.back().t == 1.0);
  CHECK(max_diff(endpoint(tr), smoke_endpoint) < 1e-12);
}

TEST_CASE("reference integrator agrees with the pinned endpoint", "[numeric]") {
  const auto fine = three_eighths(1, 1, {0.1, 0, 0}, 1, 100000);
  const auto coarse = three_eighths(1, 1, {0.1, 0, 0}, 1, 50000);
  std::array<double, 3> richardson;
  for (int i = 0; i < 3; ++i) richardson[i] = fine[i] + (fine[i] - coarse[i]) / 15;
  CHECK(max_diff(richardson, smoke_endpoint) < 1e-13);
}

TEST_CASE("step halving shows fourth-order convergence", "[numeric]") {
  const double e1 = max_diff(endpoint(integrate({1, 1, 0.05, 1}, {0, 0.1, 0, 0})), smoke_endpoint);
  const double e2 = max_diff(endpoint(integrate({1, 1, 0.025, 1}, {0, 0.1, 0, 0})), smoke_endpoint);
  const double ratio = e1 / e2;
  INFO("errors " << e1 << " " << e2 << " ratio " << ratio);
  CHECK(ratio >= 12);
  CHECK(ratio <= 20);
}

TEST_CASE("divergence truncates the trajectory", "[numeric]") {
  const Trajectory tr = integrate({1, 1, 1e-2, 50}, {0, 3, 0, 0});
  CHECK(tr.truncated);
  CHECK(tr.reason.find("diverged") != std::string::npos);
  for (const auto& s : tr.states) CHECK(std::abs(s.x) <= divergence_bound);
  CHECK(tr.states.back().t < 50);
}

TEST_CASE("integrator input validation", "[numeric]") {
  CHECK_THROWS_AS(integrate({0, 1, 1e-3, 1}, {}), InputError);
  CHECK_THROWS_AS(integrate({1, -1, 1e-3, 1}, {}), InputError);
  CHECK_THROWS_AS(integrate({1, 1, 0, 1}, {}), InputError);
  CHECK_THROWS_AS(integrate({1, 1, 1e-3, 1}, {0, std::nan(""), 0, 0}), InputError);
  CHECK(integrate({1, 1, 1e-3, 0}, {0, 1, 2, 3}).states.size() == 1);
}

TEST_CASE("trajectory CSV", "[numeric]") {
  const Trajectory tr = integrate({2, 1, 0.5, 1}, {0, 2, 0, 0});
  CHECK(trajectory_csv(tr) == "t,x,y,z\n0,2,0,0\n0.5,2,0,0\n1,2,0,0\n");
  Trajectory one;
  one.states.push_back({0.1, 1.0 / 3, -2e-20, 5});
  CHECK(trajectory_csv(one) == "t,x,y,z\n0.10000000000000001,0.33333333333333331,-1.9999999999999999e-20,5\n");
}

TEST_CASE("residual examples on the reduced Silnikov equation", "[numeric]") {
  const OdeSpec ode = load_ode("silnikov.ode");
  CHECK(residual(ode, Generator::concrete(E("0"), E("0")), {1, 1, 0}, ab11) == 0);
  CHECK(residual(ode, Generator::concrete(E("1"), E("0")), {1, 1, 0}, ab11) == -2);
  CHECK(residual(ode, Generator::concrete(E("1"), E("0")), {2, 0.5, 3}, {{"a", 3.0}, {"b", 0.0}}) ==
        Catch::Approx(-(3 * 4 - 9) * 0.5));
  CHECK_THROWS_AS(residual(ode, Generator::concrete(E("1"), E("0")), {1, 1e-9, 0}, ab11), InputError);
  CHECK_THROWS_AS(residual(ode, Generator::concrete(E("1"), E("0")), {1, 1, 0}, {{"a", 1.0}}), InputError);
}

TEST_CASE("residual refuses a parameter value that kills a divisor", "[numeric]") {
  const OdeSpec ode = load_ode("silnikov.ode");
  const Generator g = Generator::concrete(E("t/b"), E("0"));
  CHECK_THROWS_AS(residual(ode, g, {1, 1, 0}, {{"a", 1.0}, {"b", 0.0}}), GenericityViolation);
  CHECK_THROWS_WITH(residual(ode, g, {1, 1, 0}, {{"a", 1.0}, {"b", 0.0}}),
                    Catch::Matchers::ContainsSubstring("divisor b"));
}

TEST_CASE("free-particle basis has vanishing residuals", "[numeric]") {
  const OdeSpec ode = load_ode("free_particle.ode");
  const Analysis an = analyze(ode, {2, 2, {}});
  REQUIRE(an.solution.basis.generators.size() == 8);
  for (const auto& g : an.solution.basis.generators) {
    const SweepReport r = sample_sweep(ode, g, 100, 5, {}, {});
    CHECK(r.max_abs < 1e-10);
    const SweepReport big = sample_sweep(ode, g, 1000, 11, {}, {});
    CHECK(big.max_abs < 1e-10);
  }
}

TEST_CASE("sweeps of the zero and the time-translation generator", "[numeric]") {
  const OdeSpec ode = load_ode("silnikov.ode");
  const SweepReport zero = sample_sweep(ode, Generator::concrete(E("0"), E("0")), 1000, 1, {}, ab11);
  CHECK(zero.max_abs == 0);
  CHECK(zero.mean_abs == 0);
  const SweepReport shift = sample_sweep(ode, Generator::concrete(E("1"), E("0")), 1000, 1, {}, ab11);
  CHECK(shift.max_abs >= 1);
  // |(3t^2 - a^2) x| <= 11 * 2 on the default box.
  CHECK(shift.max_abs <= 22);
  CHECK(shift.worst_sample.x != 0);
}

TEST_CASE("sweep is deterministic and reports the JSON fields", "[numeric]") {
  const OdeSpec ode = load_ode("silnikov.ode");
  const Generator g = Generator::concrete(E("t"), E("x"));
  const SweepReport one = sample_sweep(ode, g, 200, 99, {}, ab11);
  const SweepReport two = sample_sweep(ode, g, 200, 99, {}, ab11);
  CHECK(sweep_json(one).dump() == sweep_json(two).dump());
  CHECK(sweep_json(one).dump() != sweep_json(sample_sweep(ode, g, 200, 100, {}, ab11)).dump());
  const auto j = sweep_json(one);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"n", "seed", "max_abs", "mean_abs", "worst_sample"});
  CHECK(j["n"] == 200);
  CHECK(j["seed"] == 99);
}

TEST_CASE("sample box validation", "[numeric]") {
  const OdeSpec ode = load_ode("silnikov.ode");
  SampleBox inside;
  inside.x_lo = -1e-7;
  inside.x_hi = 1e-7;
  CHECK_THROWS_AS(sample_sweep(ode, Generator::concrete(E("0"), E("0")), 10, 1, inside, ab11), InputError);
  SampleBox inverted;
  inverted.t_lo = 1;
  inverted.t_hi = 0;
  CHECK_THROWS_AS(sample_sweep(ode, Generator::concrete(E("0"), E("0")), 10, 1, inverted, ab11), InputError);
}

TEST_CASE("cleared-form residual agrees with the closed-form route", "[numeric][property]") {
  const OdeSpec sil = load_ode("silnikov.ode");
  const OdeSpec free = load_ode("free_particle.ode");
  testing::Gen gen(4242);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    auto point_part = [](const Expr& e) {
      Expr out;
      for (const auto& [m, c] : e.terms())
        if (e.max_jet_order().value_or(0) == 0 || (!m.exponent_of(jet(1)) && !m.exponent_of(jet(2))))
          out.add_term(m, c);
      return out;
    };
    const Generator g = Generator::concrete(point_part(gen.expr(4, 3, false)), point_part(gen.expr(4, 3, false)));
    const std::map<std::string, double> params{{"a", 1.3}, {"b", 0.6}};
    const ClosedFormResidual sil_oracle(sil, g, E("x^3"), params);
    const ClosedFormResidual free_oracle(free, g, E("1"), params);
    const ResidualEvaluator sil_eval(sil, g, params), free_eval(free, g, params);
    for (int k = 0; k < 5; ++k) {
      JetSample s{u(rng), u(rng), u(rng)};
      if (std::abs(s.x) < 0.1) continue;
      const ResidualValue a = sil_eval(s), b = free_eval(s);
      CHECK(std::abs(a.value - sil_oracle(s)) <= 1e-9 * std::max(1.0, a.scale));
      CHECK(std::abs(b.value - free_oracle(s)) <= 1e-9 * std::max(1.0, b.scale));
    }
  }
}

TEST_CASE("symbolically zero conditions sample to zero, a corrupted one does not", "[numeric]") {
  const OdeSpec free = load_ode("free_particle.ode");
  const Generator projective = Generator::concrete(E("t*x"), E("x^2"));
  REQUIRE(symmetry_condition(free, projective).numerator.is_zero());
  CHECK(sample_sweep(free, projective, 1000, 3, {}, {}).max_rel <= 1e-9);
  const OdeSpec sil = load_ode("silnikov.ode");
  CHECK(sample_sweep(sil, Generator::concrete(E("1"), E("0")), 1000, 3, {}, ab11).max_abs > 1e-3);
}
