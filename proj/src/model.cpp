#include "causalsens/model.hpp"

#include <set>

#include "causalsens/errors.hpp"
#include "causalsens/kernels.hpp"

namespace causalsens {

CovariateGrid build_grid(std::vector<std::string> names,
                         std::vector<int> arities) {
  if (names.size() != arities.size())
    fail("length-mismatch", "covariate names and arities differ in length");
  std::set<std::string> seen;
  for (const auto& nm : names)
    if (!seen.insert(nm).second)
      fail("duplicate-name", "duplicate covariate name: " + nm);
  for (std::size_t i = 0; i < arities.size(); ++i)
    if (arities[i] < 2)
      fail("arity-too-small", "covariate " + names[i] + " has arity < 2");

  CovariateGrid g;
  g.names = std::move(names);
  g.arities = std::move(arities);
  g.strides.assign(g.arities.size(), 1);
  long long d = 1;
  for (int i = static_cast<int>(g.arities.size()) - 1; i >= 0; --i) {
    g.strides[i] = static_cast<int>(d);
    d *= g.arities[i];
    if (d > (1 << 24)) fail("grid-too-large", "covariate grid exceeds 2^24 cells");
  }
  g.d = static_cast<int>(d);
  return g;
}

int CovariateGrid::index_of(std::span<const int> levels) const {
  if (levels.size() != arities.size())
    fail("length-mismatch", "level tuple length does not match grid");
  int idx = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] >= arities[i])
      fail("bad-level", "level out of range for covariate " + names[i]);
    idx += levels[i] * strides[i];
  }
  return idx;
}

std::vector<int> CovariateGrid::levels_of(int index) const {
  std::vector<int> lv(arities.size());
  for (std::size_t i = 0; i < arities.size(); ++i) {
    lv[i] = (index / strides[i]) % arities[i];
  }
  return lv;
}

int CovariateGrid::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

void Dataset::add_row(std::span<const int> levels, int t_val, int y_val) {
  if ((t_val != 0 && t_val != 1) || (y_val != 0 && y_val != 1))
    fail("bad-level", "t and y must be 0 or 1");
  cell.push_back(grid.index_of(levels));
  t.push_back(static_cast<std::uint8_t>(t_val));
  y.push_back(static_cast<std::uint8_t>(y_val));
}

double BaselineEstimate::tau_hat() const {
  return kern::effect_dot(qx.data(), mu1.data(), mu0.data(), qx.size());
}

BaselineEstimate fit_baseline(const Dataset& data,
                              std::optional<double> smoothing) {
  if (data.n() == 0) fail("empty-dataset", "cannot fit a baseline on zero rows");
  if (smoothing && *smoothing <= 0.0)
    fail("bad-smoothing", "smoothing must be positive when given");

  const int d = data.grid.d;
  BaselineEstimate b;
  b.grid = data.grid;
  b.n = static_cast<std::int64_t>(data.n());
  b.counts.control.assign(d, 0);
  b.counts.treated.assign(d, 0);
  std::vector<std::int64_t> succ0(d, 0), succ1(d, 0);

  for (std::size_t i = 0; i < data.n(); ++i) {
    const int c = data.cell[i];
    if (data.t[i]) {
      ++b.counts.treated[c];
      succ1[c] += data.y[i];
    } else {
      ++b.counts.control[c];
      succ0[c] += data.y[i];
    }
  }

  b.mu0.assign(d, 0.5);
  b.mu1.assign(d, 0.5);
  b.e.assign(d, 0.5);
  b.qx.assign(d, 0.0);
  const double s = smoothing.value_or(0.0);

  for (int c = 0; c < d; ++c) {
    const std::int64_t n0 = b.counts.control[c];
    const std::int64_t n1 = b.counts.treated[c];
    const std::int64_t nc = n0 + n1;
    if (nc == 0) continue;  // empty cell keeps the inert placeholders
    b.qx[c] = static_cast<double>(nc) / static_cast<double>(b.n);
    b.e[c] = static_cast<double>(n1) / static_cast<double>(nc);
    if (!smoothing) {
      if (n0 == 0)
        fail("missing-arm", "cell " + std::to_string(c) +
                                " has no control rows; pass smoothing to fit anyway");
      if (n1 == 0)
        fail("missing-arm", "cell " + std::to_string(c) +
                                " has no treated rows; pass smoothing to fit anyway");
      b.mu0[c] = static_cast<double>(succ0[c]) / static_cast<double>(n0);
      b.mu1[c] = static_cast<double>(succ1[c]) / static_cast<double>(n1);
    } else {
      b.mu0[c] = (static_cast<double>(succ0[c]) + s) /
                 (static_cast<double>(n0) + 2.0 * s);
      b.mu1[c] = (static_cast<double>(succ1[c]) + s) /
                 (static_cast<double>(n1) + 2.0 * s);
    }
  }
  return b;
}

}  // namespace causalsens
