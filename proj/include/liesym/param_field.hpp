#pragma once

// Coefficient field of the symbolic kernel: quotients of integer polynomials
// in the declared equation parameters (a, b, ...), kept reduced by gcd.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "liesym/errors.hpp"

namespace liesym {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Power product of named parameters. Sorted by name; all exponents positive.
using ParamMonomial = std::vector<std::pair<std::string, unsigned>>;

namespace detail {

inline unsigned total_degree(const ParamMonomial& m) {
  unsigned d = 0;
  for (const auto& [name, e] : m) d += e;
  return d;
}

/// Graded lexicographic comparison. Among equal degrees, a variable whose name
/// sorts first counts as the larger variable (a > b).
inline int grlex_compare(const ParamMonomial& lhs, const ParamMonomial& rhs) {
  const unsigned dl = total_degree(lhs), dr = total_degree(rhs);
  if (dl != dr) return dl < dr ? -1 : 1;
  std::size_t i = 0, j = 0;
  while (i < lhs.size() && j < rhs.size()) {
    if (lhs[i].first == rhs[j].first) {
      if (lhs[i].second != rhs[j].second) return lhs[i].second < rhs[j].second ? -1 : 1;
      ++i;
      ++j;
    } else {
      return lhs[i].first < rhs[j].first ? 1 : -1;
    }
  }
  if (i < lhs.size()) return 1;
  if (j < rhs.size()) return -1;
  return 0;
}

struct ParamMonomialDesc {
  bool operator()(const ParamMonomial& lhs, const ParamMonomial& rhs) const {
    return grlex_compare(lhs, rhs) > 0;
  }
};

inline ParamMonomial multiply(const ParamMonomial& lhs, const ParamMonomial& rhs) {
  ParamMonomial out;
  out.reserve(lhs.size() + rhs.size());
  std::size_t i = 0, j = 0;
  while (i < lhs.size() || j < rhs.size()) {
    if (j == rhs.size() || (i < lhs.size() && lhs[i].first < rhs[j].first)) {
      out.push_back(lhs[i++]);
    } else if (i == lhs.size() || rhs[j].first < lhs[i].first) {
      out.push_back(rhs[j++]);
    } else {
      out.emplace_back(lhs[i].first, lhs[i].second + rhs[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

inline std::string integer_string(const Integer& v) { return v.str(); }

}  // namespace detail

/// Multivariate polynomial with arbitrary-precision integer coefficients.
class ParamPoly {
 public:
  using Terms = std::map<ParamMonomial, Integer, detail::ParamMonomialDesc>;

  ParamPoly() = default;
  ParamPoly(const Integer& c) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.emplace(ParamMonomial{}, c);
  }
  ParamPoly(int c) : ParamPoly(Integer(c)) {}  // NOLINT(google-explicit-constructor)

  static ParamPoly variable(const std::string& name, unsigned power = 1) {
    ParamPoly p;
    if (power == 0) return ParamPoly(1);
    p.terms_.emplace(ParamMonomial{{name, power}}, Integer(1));
    return p;
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  bool is_one() const noexcept {
    return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1;
  }
  Integer constant_value() const {
    if (terms_.empty()) return 0;
    auto it = terms_.find(ParamMonomial{});
    return it == terms_.end() ? Integer(0) : it->second;
  }
  /// Coefficient of the grlex-largest monomial. Zero for the zero polynomial.
  Integer leading_coefficient() const { return terms_.empty() ? Integer(0) : terms_.begin()->second; }
  const ParamMonomial& leading_monomial() const { return terms_.begin()->first; }

  std::set<std::string> variables() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [name, e] : m) out.insert(name);
    return out;
  }

  unsigned degree_in(const std::string& var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_)
      for (const auto& [name, e] : m)
        if (name == var) d = std::max(d, e);
    return d;
  }

  /// Non-negative gcd of the integer coefficients.
  Integer content() const {
    Integer g = 0;
    for (const auto& [m, c] : terms_) {
      g = boost::multiprecision::gcd(g, c);
      if (g == 1) break;
    }
    return g;
  }

  void add_term(const ParamMonomial& m, const Integer& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  ParamPoly operator-() const {
    ParamPoly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }
  ParamPoly& operator+=(const ParamPoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
  }
  ParamPoly& operator-=(const ParamPoly& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
  }
  friend ParamPoly operator+(ParamPoly lhs, const ParamPoly& rhs) { return lhs += rhs; }
  friend ParamPoly operator-(ParamPoly lhs, const ParamPoly& rhs) { return lhs -= rhs; }
  friend ParamPoly operator*(const ParamPoly& lhs, const ParamPoly& rhs) {
    ParamPoly out;
    if (lhs.is_zero() || rhs.is_zero()) return out;
    if (rhs.is_constant()) return lhs.scaled(rhs.constant_value());
    if (lhs.is_constant()) return rhs.scaled(lhs.constant_value());
    for (const auto& [ml, cl] : lhs.terms_)
      for (const auto& [mr, cr] : rhs.terms_) out.add_term(detail::multiply(ml, mr), cl * cr);
    return out;
  }
  ParamPoly& operator*=(const ParamPoly& rhs) { return *this = *this * rhs; }

  ParamPoly scaled(const Integer& k) const {
    if (k == 0) return {};
    ParamPoly out = *this;
    for (auto& [m, c] : out.terms_) c *= k;
    return out;
  }

  /// Exact division of every coefficient by k. Throws on a nonzero remainder.
  ParamPoly divided_by(const Integer& k) const {
    ParamPoly out = *this;
    for (auto& [m, c] : out.terms_) {
      Integer q, r;
      boost::multiprecision::divide_qr(c, k, q, r);
      if (r != 0) throw InvariantViolation("inexact integer division of parameter polynomial");
      c = q;
    }
    return out;
  }

  ParamPoly pow(unsigned n) const {
    ParamPoly out(1), base = *this;
    while (n) {
      if (n & 1u) out *= base;
      n >>= 1u;
      if (n) base *= base;
    }
    return out;
  }

  friend bool operator==(const ParamPoly& lhs, const ParamPoly& rhs) { return lhs.terms_ == rhs.terms_; }

  double evaluate(const std::map<std::string, double>& values) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = static_cast<double>(c);
      for (const auto& [name, e] : m) {
        auto it = values.find(name);
        if (it == values.end()) throw InputError("unbound parameter '" + name + "'");
        term *= std::pow(it->second, static_cast<int>(e));
      }
      sum += term;
    }
    return sum;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Integer mag = c < 0 ? Integer(-c) : c;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      if (m.empty()) {
        os << mag;
        continue;
      }
      if (mag != 1) os << mag << "*";
      bool first_factor = true;
      for (const auto& [name, e] : m) {
        if (!first_factor) os << "*";
        first_factor = false;
        os << name;
        if (e > 1) os << "^" << e;
      }
    }
    return os.str();
  }

  std::string to_latex() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Integer mag = c < 0 ? Integer(-c) : c;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      if (m.empty()) {
        os << mag;
        continue;
      }
      if (mag != 1) os << mag << " ";
      bool first_factor = true;
      for (const auto& [name, e] : m) {
        if (!first_factor) os << " ";
        first_factor = false;
        os << name;
        if (e > 1) os << "^{" << e << "}";
      }
    }
    return os.str();
  }

 private:
  Terms terms_;
};

// Recursive (main variable + coefficient ring) machinery for gcd and exact division.
namespace detail {

using UniPoly = std::vector<ParamPoly>;  // index = degree in the main variable

inline UniPoly to_univariate(const ParamPoly& p, const std::string& var) {
  UniPoly out(p.degree_in(var) + 1);
  for (const auto& [m, c] : p.terms()) {
    unsigned e = 0;
    ParamMonomial rest;
    rest.reserve(m.size());
    for (const auto& f : m) {
      if (f.first == var)
        e = f.second;
      else
        rest.push_back(f);
    }
    out[e].add_term(rest, c);
  }
  return out;
}

inline ParamPoly from_univariate(const UniPoly& u, const std::string& var) {
  ParamPoly out;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k].is_zero()) continue;
    out += u[k] * ParamPoly::variable(var, static_cast<unsigned>(k));
  }
  return out;
}

inline void trim(UniPoly& u) {
  while (!u.empty() && u.back().is_zero()) u.pop_back();
}

inline ParamPoly sign_normalized(ParamPoly p) {
  if (!p.is_zero() && p.leading_coefficient() < 0) return -p;
  return p;
}

}  // namespace detail

inline ParamPoly gcd(const ParamPoly& p, const ParamPoly& q);

/// p / q where q is known to divide p. Throws InvariantViolation otherwise.
inline ParamPoly divide_exact(const ParamPoly& p, const ParamPoly& q) {
  if (q.is_zero()) throw InvariantViolation("division by zero parameter polynomial");
  if (p.is_zero()) return {};
  if (q.is_constant()) return p.divided_by(q.constant_value());
  const std::string var = *q.variables().begin();
  detail::UniPoly rem = detail::to_univariate(p, var);
  const detail::UniPoly div = detail::to_univariate(q, var);
  if (rem.size() < div.size()) throw InvariantViolation("inexact parameter polynomial division");
  detail::UniPoly quot(rem.size() - div.size() + 1);
  const std::size_t dq = div.size() - 1;
  for (std::size_t k = rem.size(); k-- > dq;) {
    if (rem[k].is_zero()) continue;
    ParamPoly coef = divide_exact(rem[k], div.back());
    for (std::size_t j = 0; j < div.size(); ++j) rem[k - dq + j] -= coef * div[j];
    quot[k - dq] = std::move(coef);
  }
  for (const auto& r : rem)
    if (!r.is_zero()) throw InvariantViolation("inexact parameter polynomial division");
  return detail::from_univariate(quot, var);
}

namespace detail {

inline ParamPoly univariate_content(const UniPoly& u) {
  ParamPoly g;
  for (const auto& c : u) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

inline void make_primitive(UniPoly& u) {
  ParamPoly c = univariate_content(u);
  if (c.is_zero() || c.is_one()) return;
  for (auto& k : u) k = divide_exact(k, c);
}

/// lc(b)^k * a mod b, computed by repeated leading-term cancellation.
inline UniPoly pseudo_remainder(UniPoly a, const UniPoly& b) {
  const ParamPoly& lb = b.back();
  while (!a.empty() && a.size() >= b.size()) {
    const ParamPoly la = a.back();
    const std::size_t shift = a.size() - b.size();
    for (auto& k : a) k *= lb;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= la * b[j];
    trim(a);
  }
  return a;
}

}  // namespace detail

/// Greatest common divisor over Z[params], normalized to a positive leading coefficient.
inline ParamPoly gcd(const ParamPoly& p, const ParamPoly& q) {
  if (p.is_zero()) return detail::sign_normalized(q);
  if (q.is_zero()) return detail::sign_normalized(p);
  if (p.is_constant() || q.is_constant())
    return ParamPoly(boost::multiprecision::gcd(p.content(), q.content()));
  if (p == q) return detail::sign_normalized(p);

  std::set<std::string> vars = p.variables();
  for (const auto& v : q.variables()) vars.insert(v);
  const std::string var = *vars.begin();

  detail::UniPoly a = detail::to_univariate(p, var);
  detail::UniPoly b = detail::to_univariate(q, var);
  const ParamPoly content = gcd(detail::univariate_content(a), detail::univariate_content(b));
  detail::make_primitive(a);
  detail::make_primitive(b);
  if (a.size() == 1 || b.size() == 1) return content;
  if (a.size() < b.size()) std::swap(a, b);
  while (true) {
    detail::UniPoly r = detail::pseudo_remainder(a, b);
    if (r.empty()) break;
    if (r.size() == 1) {
      b = {ParamPoly(1)};
      break;
    }
    detail::make_primitive(r);
    a = std::move(b);
    b = std::move(r);
  }
  return detail::sign_normalized(content * detail::from_univariate(b, var));
}

/// Element of the fraction field Q(params): num/den with gcd(num, den) = 1 and
/// den carrying a positive leading coefficient.
class ParamField {
 public:
  ParamField() = default;
  ParamField(int c) : num_(c) {}             // NOLINT(google-explicit-constructor)
  ParamField(const Integer& c) : num_(c) {}  // NOLINT(google-explicit-constructor)
  ParamField(const Rational& r)              // NOLINT(google-explicit-constructor)
      : num_(Integer(boost::multiprecision::numerator(r))),
        den_(Integer(boost::multiprecision::denominator(r))) {}
  ParamField(ParamPoly num, ParamPoly den = ParamPoly(1)) : num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  static ParamField variable(const std::string& name) { return ParamField(ParamPoly::variable(name)); }

  const ParamPoly& num() const noexcept { return num_; }
  const ParamPoly& den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_.is_zero(); }
  bool is_one() const noexcept { return num_.is_one() && den_.is_one(); }
  /// True when no parameter symbol occurs (a plain rational).
  bool is_rational() const noexcept { return num_.is_constant() && den_.is_constant(); }
  Rational rational_value() const {
    if (!is_rational()) throw InvariantViolation("coefficient is not a plain rational");
    return Rational(num_.constant_value(), den_.constant_value());
  }
  /// Sign of the leading numerator coefficient (used for printing).
  bool leading_negative() const { return !num_.is_zero() && num_.leading_coefficient() < 0; }

  std::set<std::string> variables() const {
    auto v = num_.variables();
    for (const auto& s : den_.variables()) v.insert(s);
    return v;
  }

  ParamField operator-() const {
    ParamField out = *this;
    out.num_ = -out.num_;
    return out;
  }

  friend ParamField operator+(const ParamField& lhs, const ParamField& rhs) {
    if (lhs.is_zero()) return rhs;
    if (rhs.is_zero()) return lhs;
    if (lhs.den_ == rhs.den_) {
      ParamField out;
      out.num_ = lhs.num_ + rhs.num_;
      out.den_ = lhs.den_;
      if (!out.den_.is_one()) out.normalize();
      else if (out.num_.is_zero()) out.den_ = ParamPoly(1);
      return out;
    }
    return ParamField(lhs.num_ * rhs.den_ + rhs.num_ * lhs.den_, lhs.den_ * rhs.den_);
  }
  friend ParamField operator-(const ParamField& lhs, const ParamField& rhs) { return lhs + (-rhs); }

  friend ParamField operator*(const ParamField& lhs, const ParamField& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return {};
    if (lhs.den_.is_one() && rhs.den_.is_one()) {
      ParamField out;
      out.num_ = lhs.num_ * rhs.num_;
      return out;
    }
    if (lhs.is_one()) return rhs;
    if (rhs.is_one()) return lhs;
    // Cross-cancel before multiplying to keep the gcd inputs small.
    const ParamPoly g1 = gcd(lhs.num_, rhs.den_);
    const ParamPoly g2 = gcd(rhs.num_, lhs.den_);
    ParamField out;
    out.num_ = divide_exact(lhs.num_, g1) * divide_exact(rhs.num_, g2);
    out.den_ = divide_exact(lhs.den_, g2) * divide_exact(rhs.den_, g1);
    if (out.den_.leading_coefficient() < 0) {
      out.num_ = -out.num_;
      out.den_ = -out.den_;
    }
    return out;
  }

  ParamField inverse() const {
    if (is_zero()) throw InvariantViolation("inverse of zero coefficient");
    ParamField out;
    out.num_ = den_;
    out.den_ = num_;
    if (out.den_.leading_coefficient() < 0) {
      out.num_ = -out.num_;
      out.den_ = -out.den_;
    }
    return out;
  }
  friend ParamField operator/(const ParamField& lhs, const ParamField& rhs) { return lhs * rhs.inverse(); }

  ParamField& operator+=(const ParamField& rhs) { return *this = *this + rhs; }
  ParamField& operator-=(const ParamField& rhs) { return *this = *this - rhs; }
  ParamField& operator*=(const ParamField& rhs) { return *this = *this * rhs; }

  /// Canonical form makes structural equality coincide with cross-multiplied equality.
  friend bool operator==(const ParamField& lhs, const ParamField& rhs) {
    return lhs.num_ == rhs.num_ && lhs.den_ == rhs.den_;
  }

  double evaluate(const std::map<std::string, double>& values) const {
    return num_.evaluate(values) / den_.evaluate(values);
  }

  /// Substitutes rational values for some parameters. Throws GenericityViolation
  /// if the denominator vanishes under the assignment.
  ParamField specialize(const std::map<std::string, Rational>& values) const {
    if (values.empty()) return *this;
    ParamField n = substitute_poly(num_, values);
    ParamField d = substitute_poly(den_, values);
    if (d.is_zero())
      throw GenericityViolation("assignment annihilates coefficient denominator " + den_.to_string());
    return n / d;
  }

  static ParamField substitute_poly(const ParamPoly& p, const std::map<std::string, Rational>& values) {
    ParamPoly num;
    Integer den = 1;
    // Accumulate as (sum of integer polys) / common integer denominator.
    std::vector<std::pair<ParamPoly, Integer>> parts;
    for (const auto& [m, c] : p.terms()) {
      Rational scale = Rational(c);
      ParamMonomial rest;
      for (const auto& [name, e] : m) {
        auto it = values.find(name);
        if (it == values.end()) {
          rest.emplace_back(name, e);
        } else {
          Rational v = 1;
          for (unsigned k = 0; k < e; ++k) v *= it->second;
          scale *= v;
        }
      }
      if (scale == 0) continue;
      ParamPoly term;
      term.add_term(rest, Integer(boost::multiprecision::numerator(scale)));
      parts.emplace_back(std::move(term), Integer(boost::multiprecision::denominator(scale)));
      den = boost::multiprecision::lcm(den, parts.back().second);
    }
    for (auto& [poly, d] : parts) num += poly.scaled(den / d);
    return ParamField(num, ParamPoly(den));
  }

  std::string to_string() const {
    if (den_.is_one()) return num_.to_string();
    return wrap_num(num_.to_string(), num_) + "/" + wrap_den(den_.to_string(), den_);
  }

  std::string to_latex() const {
    if (den_.is_one()) return num_.to_latex();
    return "\\frac{" + num_.to_latex() + "}{" + den_.to_latex() + "}";
  }

 private:
  static std::string wrap_num(const std::string& s, const ParamPoly& p) {
    return p.terms().size() > 1 ? "(" + s + ")" : s;
  }
  static std::string wrap_den(const std::string& s, const ParamPoly& p) {
    if (p.is_constant()) return s;
    const auto& [m, c] = *p.terms().begin();
    if (p.terms().size() == 1 && c == 1 && m.size() == 1) return s;
    return "(" + s + ")";
  }

  void normalize() {
    if (den_.is_zero()) throw InvariantViolation("zero denominator in coefficient");
    if (num_.is_zero()) {
      den_ = ParamPoly(1);
      return;
    }
    if (!den_.is_one()) {
      const ParamPoly g = gcd(num_, den_);
      if (!g.is_one()) {
        num_ = divide_exact(num_, g);
        den_ = divide_exact(den_, g);
      }
    }
    if (den_.leading_coefficient() < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  ParamPoly num_;
  ParamPoly den_{1};
};

}  // namespace liesym
