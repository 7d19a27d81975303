#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace causalsens {

// Finite covariate grid. Cells are indexed lexicographically with the last
// covariate varying fastest; d is the product of the arities.
struct CovariateGrid {
  std::vector<std::string> names;
  std::vector<int> arities;
  std::vector<int> strides;
  int d = 0;

  std::size_t covariates() const { return names.size(); }
  int index_of(std::span<const int> levels) const;
  std::vector<int> levels_of(int index) const;
  int find(const std::string& name) const;  // -1 when absent
};

CovariateGrid build_grid(std::vector<std::string> names,
                         std::vector<int> arities);

// Observed rows (cell, t, y); t and y are binary, covariate levels live in
// the bound grid.
struct Dataset {
  CovariateGrid grid;
  std::vector<std::int32_t> cell;
  std::vector<std::uint8_t> t;
  std::vector<std::uint8_t> y;

  std::size_t n() const { return cell.size(); }
  void add_row(std::span<const int> levels, int t_val, int y_val);
};

struct CellCounts {
  std::vector<std::int64_t> control;  // rows with t = 0 per cell
  std::vector<std::int64_t> treated;  // rows with t = 1 per cell
};

// Saturated per-cell fit: outcome means by arm, treated fraction, and the
// empirical covariate distribution. Cells with no rows keep qx = 0 and an
// inert 0.5 placeholder for the means.
struct BaselineEstimate {
  CovariateGrid grid;
  std::vector<double> mu0, mu1, e, qx;
  CellCounts counts;
  std::int64_t n = 0;

  double tau_hat() const;  // plug-in effect sum_x qx * (mu1 - mu0)
};

// smoothing s > 0 turns each mean into (successes + s) / (trials + 2s);
// without it, a populated cell missing one arm is a hard error so that
// silent extrapolation never happens.
BaselineEstimate fit_baseline(const Dataset& data,
                              std::optional<double> smoothing = {});

}  // namespace causalsens
