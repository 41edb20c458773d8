#ifndef QELM_NELDER_MEAD_HPP
#define QELM_NELDER_MEAD_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace qelm {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Derivative-free downhill simplex minimization with the standard
/// reflection/expansion/contraction/shrink coefficients (1, 2, 1/2, 1/2).
/// Stops once max_evals objective calls have been spent or the spread of
/// simplex values falls below ftol.
template <typename Objective>
SimplexResult nelder_mead(Objective&& f, const Eigen::VectorXd& x0, double step, std::size_t max_evals,
                          double ftol = 1e-14) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n) + 1, x0);
  std::vector<double> vals(pts.size());
  std::size_t evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i) + 1](i) += step;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (vals[worst] - vals[best] <= ftol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(it - vals.begin())], *it, evals};
}

}  // namespace qelm

#endif  // QELM_NELDER_MEAD_HPP
