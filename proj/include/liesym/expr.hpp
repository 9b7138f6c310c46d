#pragma once

// Canonical multivariate polynomials over ParamField in jet-space atoms.
//
// Atom order (fixed; drives monomial sorting and printing):
//   t  <  x  <  x'  <  x''  < ...  <  unknown-function derivatives  <  ansatz constants
// Unknown-function derivatives order by (name, argument signature, derivative
// multi-index); ansatz constants by index. Monomials are compared graded
// lexicographically, a smaller atom acting as the larger variable, and Expr
// terms are stored in descending monomial order.

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "liesym/errors.hpp"
#include "liesym/param_field.hpp"

namespace liesym {

/// Runtime bound on any single exponent, to fail fast on runaway expansion.
struct KernelLimits {
  static inline std::atomic<unsigned> max_exponent{64};
};

/// Argument slot of an unknown function: the independent or dependent variable.
enum class BaseVar : std::uint8_t { T = 0, X = 1 };

struct IndependentVar {
  auto operator<=>(const IndependentVar&) const = default;
};

/// x^(order): order 0 is the dependent variable itself.
struct JetVar {
  unsigned order = 0;
  auto operator<=>(const JetVar&) const = default;
};

/// Derivative of an unknown function, e.g. xi_tx = FnDeriv{"xi", {T, X}, {1, 1}}.
struct FnDeriv {
  std::string name;
  std::vector<BaseVar> args;
  std::vector<unsigned> orders;
  auto operator<=>(const FnDeriv&) const = default;

  unsigned total_order() const {
    unsigned n = 0;
    for (unsigned o : orders) n += o;
    return n;
  }
};

/// Undetermined constant introduced by an ansatz. Ordered by index.
struct AnsatzConst {
  unsigned index = 0;
  std::string name;
  auto operator<=>(const AnsatzConst&) const = default;
};

using Atom = std::variant<IndependentVar, JetVar, FnDeriv, AnsatzConst>;

inline Atom indep() { return IndependentVar{}; }
inline Atom jet(unsigned order) { return JetVar{order}; }

inline FnDeriv unknown_fn(std::string name, std::vector<BaseVar> args) {
  std::vector<unsigned> orders(args.size(), 0);
  return FnDeriv{std::move(name), std::move(args), std::move(orders)};
}

inline bool is_jet_or_indep(const Atom& a) {
  return std::holds_alternative<IndependentVar>(a) || std::holds_alternative<JetVar>(a);
}

/// Jet order of an atom: x^(k) -> k, everything else -> nullopt.
inline std::optional<unsigned> jet_order(const Atom& a) {
  if (const auto* j = std::get_if<JetVar>(&a)) return j->order;
  return std::nullopt;
}

/// Sorted power product of atoms; exponents are positive.
class Monomial {
 public:
  using Factor = std::pair<Atom, unsigned>;

  Monomial() = default;
  explicit Monomial(const Atom& a, unsigned power = 1) {
    if (power > 0) {
      check_exponent(power);
      factors_.emplace_back(a, power);
      degree_ = power;
    }
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  unsigned degree() const noexcept { return degree_; }
  bool empty() const noexcept { return factors_.empty(); }

  unsigned exponent_of(const Atom& a) const {
    for (const auto& [atom, e] : factors_)
      if (atom == a) return e;
    return 0;
  }

  friend Monomial operator*(const Monomial& lhs, const Monomial& rhs) {
    Monomial out;
    out.factors_.reserve(lhs.factors_.size() + rhs.factors_.size());
    std::size_t i = 0, j = 0;
    while (i < lhs.factors_.size() || j < rhs.factors_.size()) {
      if (j == rhs.factors_.size() || (i < lhs.factors_.size() && lhs.factors_[i].first < rhs.factors_[j].first)) {
        out.factors_.push_back(lhs.factors_[i++]);
      } else if (i == lhs.factors_.size() || rhs.factors_[j].first < lhs.factors_[i].first) {
        out.factors_.push_back(rhs.factors_[j++]);
      } else {
        const unsigned e = lhs.factors_[i].second + rhs.factors_[j].second;
        check_exponent(e);
        out.factors_.emplace_back(lhs.factors_[i].first, e);
        ++i;
        ++j;
      }
    }
    out.degree_ = lhs.degree_ + rhs.degree_;
    return out;
  }

  /// Monomial with the given atom removed entirely.
  Monomial without(const Atom& a) const {
    Monomial out;
    for (const auto& f : factors_)
      if (!(f.first == a)) {
        out.factors_.push_back(f);
        out.degree_ += f.second;
      }
    return out;
  }

  /// Divides by `d`; nullopt when `d` does not divide this monomial.
  std::optional<Monomial> divided_by(const Monomial& d) const {
    Monomial out;
    std::size_t j = 0;
    for (const auto& [atom, e] : factors_) {
      unsigned sub = 0;
      if (j < d.factors_.size() && d.factors_[j].first == atom) sub = d.factors_[j++].second;
      if (sub > e) return std::nullopt;
      if (e > sub) {
        out.factors_.emplace_back(atom, e - sub);
        out.degree_ += e - sub;
      }
    }
    if (j != d.factors_.size()) return std::nullopt;
    return out;
  }

  /// Componentwise minimum of exponents.
  static Monomial gcd(const Monomial& lhs, const Monomial& rhs) {
    Monomial out;
    std::size_t j = 0;
    for (const auto& [atom, e] : lhs.factors_) {
      while (j < rhs.factors_.size() && rhs.factors_[j].first < atom) ++j;
      if (j < rhs.factors_.size() && rhs.factors_[j].first == atom) {
        const unsigned m = std::min(e, rhs.factors_[j].second);
        out.factors_.emplace_back(atom, m);
        out.degree_ += m;
      }
    }
    return out;
  }

  friend bool operator==(const Monomial& lhs, const Monomial& rhs) { return lhs.factors_ == rhs.factors_; }

  /// Graded lex; returns <0, 0, >0.
  static int compare(const Monomial& lhs, const Monomial& rhs) {
    if (lhs.degree_ != rhs.degree_) return lhs.degree_ < rhs.degree_ ? -1 : 1;
    std::size_t i = 0, j = 0;
    while (i < lhs.factors_.size() && j < rhs.factors_.size()) {
      const auto& [la, le] = lhs.factors_[i];
      const auto& [ra, re] = rhs.factors_[j];
      if (la == ra) {
        if (le != re) return le < re ? -1 : 1;
        ++i;
        ++j;
      } else {
        return la < ra ? 1 : -1;
      }
    }
    if (i < lhs.factors_.size()) return 1;
    if (j < rhs.factors_.size()) return -1;
    return 0;
  }

  static void check_exponent(unsigned e) {
    if (e > KernelLimits::max_exponent.load(std::memory_order_relaxed))
      throw ExponentOverflow("exponent " + std::to_string(e) + " exceeds kernel limit " +
                             std::to_string(KernelLimits::max_exponent.load()));
  }

 private:
  std::vector<Factor> factors_;
  unsigned degree_ = 0;
};

struct MonomialDesc {
  bool operator()(const Monomial& lhs, const Monomial& rhs) const { return Monomial::compare(lhs, rhs) > 0; }
};

/// Canonical polynomial: no zero coefficients, terms in descending monomial order.
class Expr {
 public:
  using Terms = std::map<Monomial, ParamField, MonomialDesc>;

  Expr() = default;
  Expr(int c) : Expr(ParamField(c)) {}  // NOLINT(google-explicit-constructor)
  Expr(const ParamField& c) {           // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }
  Expr(const Atom& a, unsigned power = 1) {  // NOLINT(google-explicit-constructor)
    terms_.emplace(Monomial(a, power), ParamField(1));
  }
  Expr(const Monomial& m, const ParamField& c) {
    if (!c.is_zero()) terms_.emplace(m, c);
  }

  static Expr param(const std::string& name) { return Expr(ParamField::variable(name)); }

  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// True for a coefficient-only expression (no atoms).
  bool is_constant() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  ParamField constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? ParamField() : it->second;
  }

  void add_term(const Monomial& m, const ParamField& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Expr operator-() const {
    Expr out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }
  Expr& operator+=(const Expr& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
  }
  Expr& operator-=(const Expr& rhs) {
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
  }
  friend Expr operator+(Expr lhs, const Expr& rhs) { return lhs += rhs; }
  friend Expr operator-(Expr lhs, const Expr& rhs) { return lhs -= rhs; }
  friend Expr operator*(const Expr& lhs, const Expr& rhs) {
    Expr out;
    if (lhs.is_zero() || rhs.is_zero()) return out;
    if (rhs.is_constant()) return lhs.scaled(rhs.constant_value());
    if (lhs.is_constant()) return rhs.scaled(lhs.constant_value());
    for (const auto& [ml, cl] : lhs.terms_)
      for (const auto& [mr, cr] : rhs.terms_) out.add_term(ml * mr, cl * cr);
    return out;
  }
  Expr& operator*=(const Expr& rhs) { return *this = *this * rhs; }

  Expr scaled(const ParamField& k) const {
    if (k.is_zero()) return {};
    if (k.is_one()) return *this;
    Expr out = *this;
    for (auto& [m, c] : out.terms_) c *= k;
    return out;
  }

  Expr pow(unsigned n) const {
    if (n > 1 && !is_constant() && terms_.size() == 1) {
      // Single term: only the exponent check matters.
      const auto& [m, c] = *terms_.begin();
      Monomial mm;
      for (unsigned k = 0; k < n; ++k) mm = mm * m;
      ParamField cc = 1;
      for (unsigned k = 0; k < n; ++k) cc *= c;
      return Expr(mm, cc);
    }
    Expr out(1), base = *this;
    while (n) {
      if (n & 1u) out *= base;
      n >>= 1u;
      if (n) base *= base;
    }
    return out;
  }

  friend bool operator==(const Expr& lhs, const Expr& rhs) { return lhs.terms_ == rhs.terms_; }

  unsigned degree_in(const Atom& a) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exponent_of(a));
    return d;
  }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  std::set<Atom> atoms() const {
    std::set<Atom> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [a, e] : m.factors()) out.insert(a);
    return out;
  }

  bool contains(const Atom& a) const {
    for (const auto& [m, c] : terms_)
      if (m.exponent_of(a) > 0) return true;
    return false;
  }

  template <class Pred>
  bool any_atom(Pred pred) const {
    for (const auto& [m, c] : terms_)
      for (const auto& [a, e] : m.factors())
        if (pred(a)) return true;
    return false;
  }

  /// Highest jet order present (x -> 0, x' -> 1, ...); nullopt if no jet variable.
  std::optional<unsigned> max_jet_order() const {
    std::optional<unsigned> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [a, e] : m.factors())
        if (auto k = jet_order(a)) out = out ? std::max(*out, *k) : *k;
    return out;
  }

  std::set<std::string> parameters() const {
    std::set<std::string> out;
    for (const auto& [m, c] : terms_)
      for (const auto& v : c.variables()) out.insert(v);
    return out;
  }

  /// Applies f to every coefficient, dropping terms that become zero.
  template <class F>
  Expr map_coefficients(F f) const {
    Expr out;
    for (const auto& [m, c] : terms_) out.add_term(m, f(c));
    return out;
  }

 private:
  Terms terms_;
};

/// Simultaneous substitution of atoms by polynomial expressions.
inline Expr substitute_all(const Expr& e, const std::map<Atom, Expr>& replacements) {
  if (replacements.empty()) return e;
  Expr out;
  std::map<std::pair<Atom, unsigned>, Expr> power_cache;
  for (const auto& [m, c] : e.terms()) {
    Monomial kept;
    Expr factor(c);
    for (const auto& [a, p] : m.factors()) {
      auto it = replacements.find(a);
      if (it == replacements.end()) {
        kept = kept * Monomial(a, p);
        continue;
      }
      auto key = std::make_pair(a, p);
      auto cached = power_cache.find(key);
      if (cached == power_cache.end()) cached = power_cache.emplace(key, it->second.pow(p)).first;
      factor = factor * cached->second;
    }
    if (kept.empty()) {
      out += factor;
    } else {
      for (const auto& [fm, fc] : factor.terms()) out.add_term(fm * kept, fc);
    }
  }
  return out;
}

inline Expr substitute(const Expr& e, const Atom& target, const Expr& replacement) {
  return substitute_all(e, {{target, replacement}});
}

/// Coefficients of e by powers of `by`, ascending, zero coefficients omitted.
inline std::vector<std::pair<unsigned, Expr>> collect(const Expr& e, const Atom& by) {
  std::map<unsigned, Expr> buckets;
  for (const auto& [m, c] : e.terms()) {
    const unsigned p = m.exponent_of(by);
    buckets[p].add_term(p ? m.without(by) : m, c);
  }
  std::vector<std::pair<unsigned, Expr>> out;
  for (auto& [p, coeff] : buckets)
    if (!coeff.is_zero()) out.emplace_back(p, std::move(coeff));
  return out;
}

/// Inverse of collect.
inline Expr reassemble(const std::vector<std::pair<unsigned, Expr>>& parts, const Atom& by) {
  Expr out;
  for (const auto& [p, coeff] : parts) out += coeff * Expr(by, p);
  return out;
}

struct RationalSubstitution {
  Expr numerator;            ///< den^d * e|_{target -> num/den}
  unsigned cleared_power{};  ///< d = degree of e in target
};

/// Substitutes target -> num/den and clears the denominator with den^d.
inline RationalSubstitution rational_substitute(const Expr& e, const Atom& target, const Expr& num,
                                                const Expr& den) {
  if (den.is_zero()) throw InvariantViolation("rational_substitute: zero denominator");
  const unsigned d = e.degree_in(target);
  Expr out;
  std::vector<Expr> num_powers{Expr(1)}, den_powers{Expr(1)};
  for (unsigned k = 1; k <= d; ++k) {
    num_powers.push_back(num_powers.back() * num);
    den_powers.push_back(den_powers.back() * den);
  }
  for (const auto& [p, coeff] : collect(e, target)) out += coeff * num_powers[p] * den_powers[d - p];
  return {std::move(out), d};
}

/// Exact division by a monomial; throws InvariantViolation if not divisible.
inline Expr divide_by_monomial(const Expr& e, const Monomial& m) {
  Expr out;
  for (const auto& [tm, c] : e.terms()) {
    auto q = tm.divided_by(m);
    if (!q) throw InvariantViolation("expression not divisible by monomial");
    out.add_term(*q, c);
  }
  return out;
}

/// Largest monomial in the selected atoms dividing every term of e.
template <class Pred>
Monomial monomial_content(const Expr& e, Pred keep) {
  std::optional<Monomial> g;
  for (const auto& [m, c] : e.terms()) {
    Monomial filtered;
    for (const auto& [a, p] : m.factors())
      if (keep(a)) filtered = filtered * Monomial(a, p);
    g = g ? Monomial::gcd(*g, filtered) : filtered;
    if (g->empty()) break;
  }
  return g.value_or(Monomial{});
}

/// Replaces parameters by rationals in every coefficient.
inline Expr specialize(const Expr& e, const std::map<std::string, Rational>& values) {
  if (values.empty()) return e;
  return e.map_coefficients([&](const ParamField& c) { return c.specialize(values); });
}

}  // namespace liesym
