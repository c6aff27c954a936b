#include "unitsel/simplex.hpp"

#include <optional>
#include <stdexcept>

namespace unitsel {
namespace {

class Tableau {
 public:
  explicit Tableau(const StandardFormLP& lp) : variables_(lp.variables), rows_(lp.rows.size()) {
    width_ = variables_ + rows_ + 1;
    cells_.assign(rows_, std::vector<Rational>(width_));
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (lp.rows[r].size() != variables_) throw std::invalid_argument("LP row has the wrong length");
      const bool flip = lp.rhs[r] < 0;
      for (std::size_t k = 0; k < variables_; ++k) cells_[r][k] = flip ? Rational(-lp.rows[r][k]) : lp.rows[r][k];
      cells_[r][variables_ + r] = 1;
      cells_[r][width_ - 1] = flip ? Rational(-lp.rhs[r]) : lp.rhs[r];
      basis_[r] = variables_ + r;
    }
  }

  // Phase one: minimise the sum of artificials. Returns false if infeasible.
  bool phase_one() {
    std::vector<Rational> cost(width_ - 1);
    for (std::size_t r = 0; r < rows_; ++r) cost[variables_ + r] = 1;
    price(cost);
    iterate(width_ - 1);
    if (objective_value() != 0) return false;
    drive_out_artificials();
    return true;
  }

  // Phase two over the original columns only.
  SimplexStatus phase_two(const std::vector<Rational>& original_cost) {
    std::vector<Rational> cost(width_ - 1);
    for (std::size_t k = 0; k < variables_; ++k) cost[k] = original_cost[k];
    price(cost);
    return iterate(variables_) ? SimplexStatus::optimal : SimplexStatus::unbounded;
  }

  Rational objective_value() const { return -objective_[width_ - 1]; }

  std::vector<Rational> point() const {
    std::vector<Rational> x(variables_);
    for (std::size_t r = 0; r < cells_.size(); ++r) {
      if (basis_[r] < variables_) x[basis_[r]] = cells_[r][width_ - 1];
    }
    return x;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  void price(const std::vector<Rational>& cost) {
    objective_.assign(width_, Rational(0));
    for (std::size_t k = 0; k + 1 < width_; ++k) objective_[k] = cost[k];
    for (std::size_t r = 0; r < cells_.size(); ++r) {
      const Rational& cb = cost[basis_[r]];
      if (cb == 0) continue;
      for (std::size_t k = 0; k < width_; ++k) {
        if (cells_[r][k] != 0) objective_[k] -= cb * cells_[r][k];
      }
    }
  }

  // Bland's rule: lowest-index improving column, ties in the ratio test go
  // to the lowest-index basic variable. Returns false when unbounded.
  bool iterate(std::size_t allowed_columns) {
    for (;;) {
      std::optional<std::size_t> entering;
      for (std::size_t k = 0; k < allowed_columns; ++k) {
        if (objective_[k] < 0) {
          entering = k;
          break;
        }
      }
      if (!entering) return true;

      std::optional<std::size_t> leaving;
      Rational best_ratio;
      for (std::size_t r = 0; r < cells_.size(); ++r) {
        const Rational& a = cells_[r][*entering];
        if (a <= 0) continue;
        Rational ratio = cells_[r][width_ - 1] / a;
        if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (!leaving) return false;
      pivot(*leaving, *entering);
    }
  }

  void pivot(std::size_t row, std::size_t column) {
    ++pivots_;
    auto& pivot_row = cells_[row];
    const Rational inverse = 1 / pivot_row[column];
    for (auto& v : pivot_row) {
      if (v != 0) v *= inverse;
    }
    auto eliminate = [&](std::vector<Rational>& target) {
      const Rational factor = target[column];
      if (factor == 0) return;
      for (std::size_t k = 0; k < width_; ++k) {
        if (pivot_row[k] != 0) target[k] -= factor * pivot_row[k];
      }
    };
    for (std::size_t r = 0; r < cells_.size(); ++r) {
      if (r != row) eliminate(cells_[r]);
    }
    eliminate(objective_);
    basis_[row] = column;
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < cells_.size();) {
      if (basis_[r] < variables_) {
        ++r;
        continue;
      }
      std::optional<std::size_t> column;
      for (std::size_t k = 0; k < variables_; ++k) {
        if (cells_[r][k] != 0) {
          column = k;
          break;
        }
      }
      if (column) {
        // The row's value is zero, so this degenerate pivot keeps feasibility.
        pivot(r, *column);
        ++r;
      } else {
        cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
      }
    }
  }

  std::size_t variables_;
  std::size_t rows_;
  std::size_t width_ = 0;
  std::vector<std::vector<Rational>> cells_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> objective_;
  std::size_t pivots_ = 0;
};

}  // namespace

SimplexResult minimize(const StandardFormLP& lp) {
  if (lp.rhs.size() != lp.rows.size() || lp.cost.size() != lp.variables) {
    throw std::invalid_argument("inconsistent LP dimensions");
  }
  Tableau tableau(lp);
  SimplexResult result;
  if (!tableau.phase_one()) {
    result.status = SimplexStatus::infeasible;
    result.pivots = tableau.pivots();
    return result;
  }
  result.status = tableau.phase_two(lp.cost);
  result.pivots = tableau.pivots();
  if (result.status == SimplexStatus::optimal) {
    result.objective = tableau.objective_value();
    result.point = tableau.point();
  }
  return result;
}

bool satisfies(const StandardFormLP& lp, const std::vector<Rational>& point) {
  if (point.size() != lp.variables) return false;
  for (const auto& v : point) {
    if (v < 0) return false;
  }
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    Rational lhs = 0;
    for (std::size_t k = 0; k < lp.variables; ++k) {
      if (lp.rows[r][k] != 0) lhs += lp.rows[r][k] * point[k];
    }
    if (lhs != lp.rhs[r]) return false;
  }
  return true;
}

}  // namespace unitsel
