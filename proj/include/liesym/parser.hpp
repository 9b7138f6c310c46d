#pragma once

// Recursive-descent parser for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' INTEGER)?
//   primary := INTEGER | '(' expr ')' | NAME TICKS? ('(' NAME (',' NAME)* ')')?
//
// NAME resolves, in order, to the independent variable, the dependent
// variable (ticks give the jet order: x''), a declared parameter, an ansatz
// constant, or a declared unknown function. Unknown-function derivatives are
// written with ticks for one-argument functions (f1'') or with an argument
// subscript for several arguments (xi_tx). Division is allowed only by
// parameter expressions.

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "liesym/expr.hpp"
#include "liesym/printer.hpp"

namespace liesym {

struct ParseContext {
  Notation notation;
  std::set<std::string> params;
  std::map<std::string, std::vector<BaseVar>> functions;
  std::map<std::string, AnsatzConst> constants;

  ParseContext& declare_function(const std::string& name, std::vector<BaseVar> args) {
    functions[name] = std::move(args);
    return *this;
  }
  /// Declares the generator unknowns xi(t, x) and eta(t, x).
  ParseContext& with_generator_unknowns() {
    declare_function("xi", {BaseVar::T, BaseVar::X});
    declare_function("eta", {BaseVar::T, BaseVar::X});
    return *this;
  }
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const ParseContext& ctx) : text_(text), ctx_(ctx) {}

  Expr parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (accept('+'))
        lhs += parse_term();
      else if (accept('-'))
        lhs -= parse_term();
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (true) {
      if (accept('*')) {
        lhs *= parse_unary();
      } else {
        skip_ws();
        const std::size_t at = pos_;
        if (!accept('/')) return lhs;
        Expr rhs = parse_unary();
        if (!rhs.is_constant()) throw ParseError("division by a non-parameter expression", at);
        if (rhs.is_zero()) throw ParseError("division by zero", at);
        lhs = lhs.scaled(rhs.constant_value().inverse());
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("exponent must be a nonnegative integer literal", at);
      const Integer n = parse_integer();
      if (n > KernelLimits::max_exponent.load()) throw ParseError("exponent exceeds kernel limit", at);
      return base.pow(static_cast<unsigned>(n));
    }
    return base;
  }

  Integer parse_integer() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return Expr(ParamField(parse_integer()));
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_symbol();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr parse_symbol() {
    const std::size_t at = pos_;
    const std::string name = parse_name();
    unsigned ticks = 0;
    while (accept('\'')) ++ticks;
    std::vector<std::string> args;
    bool has_args = false;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(' && is_function_like(name)) {
      ++pos_;
      has_args = true;
      do {
        skip_ws();
        args.push_back(parse_name());
        if (args.back().empty()) throw ParseError("expected argument name", pos_);
      } while (accept(','));
      expect(')');
    }
    return resolve(name, ticks, has_args, args, at);
  }

  bool is_function_like(const std::string& name) const {
    if (ctx_.functions.count(name)) return true;
    return subscript_split(name).has_value();
  }

  struct Subscripted {
    std::string base;
    std::vector<unsigned> orders;
  };

  std::optional<Subscripted> subscript_split(const std::string& name) const {
    for (std::size_t cut = name.rfind('_'); cut != std::string::npos && cut > 0;
         cut = name.rfind('_', cut - 1)) {
      auto fn = ctx_.functions.find(name.substr(0, cut));
      if (fn == ctx_.functions.end()) continue;
      std::vector<unsigned> orders(fn->second.size(), 0);
      if (match_suffix(name.substr(cut + 1), fn->second, orders)) return Subscripted{fn->first, orders};
      if (cut == 0) break;
    }
    return std::nullopt;
  }

  bool match_suffix(std::string_view suffix, const std::vector<BaseVar>& sig,
                    std::vector<unsigned>& orders) const {
    if (suffix.empty()) return true;
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const std::string& an = ctx_.notation.name_of(sig[i]);
      if (suffix.substr(0, an.size()) == an) {
        ++orders[i];
        if (match_suffix(suffix.substr(an.size()), sig, orders)) return true;
        --orders[i];
      }
    }
    return false;
  }

  void check_args(const std::string& name, const std::vector<BaseVar>& sig, const std::vector<std::string>& args,
                  std::size_t at) const {
    bool ok = args.size() == sig.size();
    for (std::size_t i = 0; ok && i < sig.size(); ++i) ok = args[i] == ctx_.notation.name_of(sig[i]);
    if (!ok) throw ParseError("argument list does not match signature of '" + name + "'", at);
  }

  Expr resolve(const std::string& name, unsigned ticks, bool has_args, const std::vector<std::string>& args,
               std::size_t at) const {
    const auto no_decoration = [&](const char* what) {
      if (ticks || has_args) throw ParseError(std::string("unexpected derivative or arguments on ") + what, at);
    };
    if (name == ctx_.notation.indep) {
      no_decoration("the independent variable");
      return Expr(indep());
    }
    if (name == ctx_.notation.dep) {
      if (has_args) throw ParseError("unexpected arguments on the dependent variable", at);
      if (ticks > KernelLimits::max_exponent.load()) throw ParseError("derivative order too large", at);
      return Expr(jet(ticks));
    }
    if (ctx_.params.count(name)) {
      no_decoration("a parameter");
      return Expr::param(name);
    }
    if (auto c = ctx_.constants.find(name); c != ctx_.constants.end()) {
      no_decoration("a constant");
      return Expr(Atom(c->second));
    }
    if (auto fn = ctx_.functions.find(name); fn != ctx_.functions.end()) {
      FnDeriv d = unknown_fn(name, fn->second);
      if (ticks) {
        if (d.args.size() != 1) throw ParseError("ticks are only allowed on one-argument functions", at);
        d.orders[0] = ticks;
      }
      if (has_args) check_args(name, fn->second, args, at);
      return Expr(Atom(d));
    }
    if (auto sub = subscript_split(name)) {
      if (ticks) throw ParseError("ticks cannot be combined with a subscript derivative", at);
      const auto& sig = ctx_.functions.at(sub->base);
      if (has_args) check_args(sub->base, sig, args, at);
      return Expr(Atom(FnDeriv{sub->base, sig, sub->orders}));
    }
    throw UndeclaredSymbol(name, at);
  }

  std::string_view text_;
  const ParseContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text, const ParseContext& ctx = {}) {
  return detail::ExprParser(text, ctx).parse();
}

}  // namespace liesym
