#pragma once

// Term-by-term comparison of transcribed formulas against recomputed ones.
// Reference file: blocks of key=value lines separated by blank lines.
//
//   functions=f1(t), f2(t), g3(t)     (header: extra unknowns of t or (t,x))
//   constants=c1, c2, c3              (header: free constants)
//
//   name=first prolongation
//   target=eta1 | eta2 | condition | det <k>
//   xi=...                            (optional: substitute for xi)
//   eta=...                           (optional: substitute for eta)
//   divisor=x                         (optional: monomial divided out of the computed side)
//   expect=...

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "liesym/analysis.hpp"
#include "liesym/parser.hpp"
#include "liesym/printer.hpp"

namespace liesym {

struct ReferenceEntry {
  std::string name;
  std::string target;
  std::string xi, eta, divisor;
  std::string expect;
  int line = 0;
};

struct ReferenceSet {
  std::map<std::string, std::vector<BaseVar>> functions;
  std::vector<std::string> constants;
  std::vector<ReferenceEntry> entries;
  std::string source;
};

struct TermDiff {
  Expr monomial;  ///< coefficient 1
  ParamField computed, printed;
};

struct ReferenceResult {
  std::string name;
  bool match = false;
  Expr computed, printed;
  std::vector<TermDiff> diffs;
  std::string note;  ///< set when the comparison could not be made
};

inline ReferenceSet read_reference(const std::string& text, const std::string& source = "<reference>") {
  ReferenceSet out;
  out.source = source;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  ReferenceEntry cur;
  bool open = false;
  auto close = [&] {
    if (!open) return;
    if (cur.target.empty() || cur.expect.empty())
      throw InputError(source + ":" + std::to_string(cur.line) + ": entry needs target and expect");
    if (cur.name.empty()) cur.name = cur.target;
    out.entries.push_back(cur);
    cur = {};
    open = false;
  };
  auto fail = [&](const std::string& msg) { throw InputError(source + ":" + std::to_string(line_no) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty()) {
      close();
      continue;
    }
    if (line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key=value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key == "functions" || key == "constants") {
      if (open) fail("'" + key + "' belongs in the header");
      if (key == "constants") {
        for (const auto& c : detail::split_list(value)) out.constants.push_back(c);
        continue;
      }
      // Split on commas outside parentheses.
      int depth = 0;
      std::string item;
      std::vector<std::string> items;
      for (char ch : value + ",") {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
          if (auto t = detail::trim(item); !t.empty()) items.push_back(t);
          item.clear();
        } else {
          item += ch;
        }
      }
      for (const auto& f : items) {
        const auto lp = f.find('('), rp = f.find(')');
        if (lp == std::string::npos || rp == std::string::npos || rp < lp) fail("function must be written name(args)");
        std::vector<BaseVar> sig;
        for (const auto& arg : detail::split_list(f.substr(lp + 1, rp - lp - 1))) {
          if (arg == "t")
            sig.push_back(BaseVar::T);
          else if (arg == "x")
            sig.push_back(BaseVar::X);
          else
            fail("function arguments must be t or x");
        }
        out.functions[detail::trim(f.substr(0, lp))] = sig;
      }
      continue;
    }
    if (key == "name" && open) close();
    if (!open) {
      cur.line = line_no;
      open = true;
    }
    if (key == "name")
      cur.name = value;
    else if (key == "target")
      cur.target = value;
    else if (key == "xi")
      cur.xi = value;
    else if (key == "eta")
      cur.eta = value;
    else if (key == "divisor")
      cur.divisor = value;
    else if (key == "expect")
      cur.expect = value;
    else
      fail("unknown key '" + key + "'");
  }
  close();
  return out;
}

inline std::vector<TermDiff> term_diff(const Expr& computed, const Expr& printed) {
  std::vector<TermDiff> out;
  const Expr delta = computed - printed;
  for (const auto& [m, c] : delta.terms()) {
    TermDiff d{Expr(m, ParamField(1)), {}, {}};
    if (auto it = computed.terms().find(m); it != computed.terms().end()) d.computed = it->second;
    if (auto it = printed.terms().find(m); it != printed.terms().end()) d.printed = it->second;
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<ReferenceResult> check_reference(const ReferenceSet& ref, const Analysis& an) {
  ParseContext ctx = an.ode.parse_context();
  ctx.with_generator_unknowns();
  for (const auto& [name, sig] : ref.functions) ctx.declare_function(name, sig);
  for (std::size_t i = 0; i < ref.constants.size(); ++i)
    ctx.constants[ref.constants[i]] = AnsatzConst{static_cast<unsigned>(i + 1), ref.constants[i]};

  std::vector<ReferenceResult> out;
  for (const auto& e : ref.entries) {
    auto parse = [&](const std::string& text, const char* key) {
      try {
        return parse_expr(text, ctx);
      } catch (const InputError& err) {
        throw InputError(ref.source + ":" + std::to_string(e.line) + ": " + key + ": " + err.what());
      }
    };
    ReferenceResult r;
    r.name = e.name;
    Expr computed;
    if (e.target == "eta1" || e.target == "eta2") {
      computed = an.prolonged.prolongations.at(e.target == "eta1" ? 0 : 1);
    } else if (e.target == "condition") {
      computed = an.condition.numerator;
    } else if (e.target.rfind("det ", 0) == 0) {
      const unsigned p = static_cast<unsigned>(std::stoul(e.target.substr(4)));
      for (const auto& d : an.determining.equations)
        if (d.xdot_power == p) computed = d.eq;
    } else {
      throw InputError(ref.source + ":" + std::to_string(e.line) + ": unknown target '" + e.target + "'");
    }
    if (!e.xi.empty() || !e.eta.empty()) {
      const Expr xi = e.xi.empty() ? Expr(Atom(unknown_fn("xi", {BaseVar::T, BaseVar::X}))) : parse(e.xi, "xi");
      const Expr eta = e.eta.empty() ? Expr(Atom(unknown_fn("eta", {BaseVar::T, BaseVar::X}))) : parse(e.eta, "eta");
      computed = substitute_generator(computed, xi, eta);
    }
    r.printed = parse(e.expect, "expect");
    if (!e.divisor.empty()) {
      const Expr div = parse(e.divisor, "divisor");
      if (div.size() != 1) throw InputError(ref.source + ":" + std::to_string(e.line) + ": divisor must be a monomial");
      const auto& [dm, dc] = *div.terms().begin();
      Expr q;
      bool exact = true;
      for (const auto& [m, c] : computed.terms()) {
        auto qm = m.divided_by(dm);
        if (!qm) {
          exact = false;
          break;
        }
        q.add_term(*qm, c / dc);
      }
      if (!exact) {
        r.computed = computed;
        r.note = "computed side is not divisible by " + e.divisor;
        out.push_back(std::move(r));
        continue;
      }
      computed = q;
    }
    r.computed = computed;
    r.diffs = term_diff(r.computed, r.printed);
    r.match = r.diffs.empty();
    out.push_back(std::move(r));
  }
  return out;
}

/// One line per entry, followed by indented term differences.
inline std::string format_reference_results(const std::vector<ReferenceResult>& results, const Notation& nt = {}) {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.match ? "[match] " : "[FLAG]  ") << r.name << "\n";
    if (!r.note.empty()) os << "    " << r.note << "\n";
    for (const auto& d : r.diffs)
      os << "    term " << to_text(d.monomial, nt) << ": computed " << d.computed.to_string() << ", printed "
         << d.printed.to_string() << "\n";
  }
  return os.str();
}

}  // namespace liesym
