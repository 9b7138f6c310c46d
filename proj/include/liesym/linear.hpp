#pragma once

// Incremental exact Gauss-Jordan elimination over the parameter field with
// sparse rows. Pivot = lowest column index of the reduced incoming row, so the
// final reduced row echelon form does not depend on the order rows arrive in.

#include <map>
#include <optional>
#include <vector>

#include "liesym/param_field.hpp"

namespace liesym {

using SparseRow = std::map<unsigned, ParamField>;  ///< column -> nonzero entry

namespace detail {

/// row += k * other
inline void axpy(SparseRow& row, const ParamField& k, const SparseRow& other) {
  for (const auto& [c, v] : other) {
    auto [it, inserted] = row.emplace(c, k * v);
    if (!inserted) {
      it->second += k * v;
      if (it->second.is_zero()) row.erase(it);
    } else if (it->second.is_zero()) {
      row.erase(it);
    }
  }
}

}  // namespace detail

class Eliminator {
 public:
  enum class Outcome { Pivot, Redundant, Inconsistent };

  struct PivotRow {
    SparseRow entries;  ///< entries[pivot] == 1, zero in every other pivot column
    ParamField rhs;
  };

  explicit Eliminator(std::size_t columns) : columns_(columns) {}

  /// Adds `row . v = rhs`. Divisions by non-constant pivots are logged as
  /// genericity conditions.
  Outcome add(SparseRow row, ParamField rhs = {}) {
    std::vector<unsigned> hits;
    for (const auto& [c, v] : row)
      if (pivots_.count(c)) hits.push_back(c);
    for (unsigned c : hits) {
      const ParamField f = row.at(c);
      const PivotRow& p = pivots_.at(c);
      detail::axpy(row, -f, p.entries);
      rhs -= f * p.rhs;
    }
    if (row.empty()) return rhs.is_zero() ? Outcome::Redundant : Outcome::Inconsistent;

    const unsigned pivot = row.begin()->first;
    const ParamField lead = row.begin()->second;
    if (!lead.is_one()) {
      note_divisor(lead.num());
      const ParamField inv = lead.inverse();
      for (auto& [c, v] : row) v *= inv;
      rhs *= inv;
    }
    for (auto& [pc, prow] : pivots_) {
      auto it = prow.entries.find(pivot);
      if (it == prow.entries.end()) continue;
      const ParamField f = it->second;
      detail::axpy(prow.entries, -f, row);
      prow.rhs -= f * rhs;
    }
    pivots_.emplace(pivot, PivotRow{std::move(row), std::move(rhs)});
    return Outcome::Pivot;
  }

  std::size_t columns() const noexcept { return columns_; }
  std::size_t rank() const noexcept { return pivots_.size(); }
  std::size_t nullity() const noexcept { return columns_ - pivots_.size(); }
  const std::map<unsigned, PivotRow>& pivots() const noexcept { return pivots_; }
  const std::vector<ParamPoly>& genericity() const noexcept { return genericity_; }

  std::vector<unsigned> free_columns() const {
    std::vector<unsigned> out;
    for (unsigned c = 0; c < columns_; ++c)
      if (!pivots_.count(c)) out.push_back(c);
    return out;
  }

  /// Basis of the homogeneous solution space: one vector per free column
  /// (ascending), with 1 in that column.
  std::vector<std::vector<ParamField>> nullspace() const {
    std::vector<std::vector<ParamField>> out;
    for (unsigned j : free_columns()) {
      std::vector<ParamField> v(columns_);
      v[j] = ParamField(1);
      for (const auto& [p, row] : pivots_)
        if (auto it = row.entries.find(j); it != row.entries.end()) v[p] = -it->second;
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  /// Records each variable of the monomial content and the primitive remainder.
  void note_divisor(const ParamPoly& p) {
    if (p.is_constant()) return;
    std::map<std::string, unsigned> common;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
      std::map<std::string, unsigned> here(m.begin(), m.end());
      if (first) {
        common = here;
        first = false;
        continue;
      }
      for (auto it = common.begin(); it != common.end();) {
        auto h = here.find(it->first);
        if (h == here.end()) {
          it = common.erase(it);
        } else {
          it->second = std::min(it->second, h->second);
          ++it;
        }
      }
    }
    ParamPoly rest;
    for (const auto& [m, c] : p.terms()) {
      ParamMonomial reduced;
      for (const auto& [name, e] : m)
        if (e > (common.count(name) ? common[name] : 0u))
          reduced.emplace_back(name, e - (common.count(name) ? common[name] : 0u));
      rest.add_term(reduced, c);
    }
    for (const auto& [name, e] : common) remember(ParamPoly::variable(name));
    if (!rest.is_constant()) {
      rest = rest.divided_by(rest.content());
      if (rest.leading_coefficient() < 0) rest = -rest;
      remember(std::move(rest));
    }
  }

  void remember(ParamPoly q) {
    for (const auto& g : genericity_)
      if (g == q) return;
    genericity_.push_back(std::move(q));
  }

  std::size_t columns_;
  std::map<unsigned, PivotRow> pivots_;
  std::vector<ParamPoly> genericity_;
};

}  // namespace liesym
