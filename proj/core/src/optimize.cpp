#include "driftfit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace driftfit {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& opts) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  const double nd = static_cast<double>(dim);
  const double rho = 1.0;
  const double chi = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double sigma = 1.0 - 1.0 / nd;

  SimplexResult res;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) {
    const double step = opts.initial_step.size() == dim ? opts.initial_step[i] : 0.1;
    pts[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);
  const auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
  };

  while (res.evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return vals[a] < vals[b];
    });
    {
      std::vector<std::vector<double>> p2(dim + 1);
      std::vector<double> v2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        p2[i] = std::move(pts[order[i]]);
        v2[i] = vals[order[i]];
      }
      pts = std::move(p2);
      vals = std::move(v2);
    }

    const double fbest = vals.front();
    const double fspread = vals.back() - fbest;
    double xspread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        xspread = std::max(xspread, std::abs(pts[i][j] - pts[0][j]));
      }
    }
    if (std::isfinite(fbest) && fspread <= opts.ftol * (1.0 + std::abs(fbest)) &&
        xspread <= opts.xtol) {
      res.converged = true;
      break;
    }
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[i][j] / nd;
    }
    const auto& worst = pts[dim];
    along(rho, xr, worst);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      along(rho * chi, xe, worst);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[dim] = xe;
        vals[dim] = fe;
      } else {
        pts[dim] = xr;
        vals[dim] = fr;
      }
      continue;
    }
    if (fr < vals[dim - 1]) {
      pts[dim] = xr;
      vals[dim] = fr;
      continue;
    }
    bool shrink = false;
    if (fr < vals[dim]) {
      along(rho * gamma, xc, worst);
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[dim] = xc;
        vals[dim] = fc;
      } else {
        shrink = true;
      }
    } else {
      along(-gamma, xc, worst);
      const double fc = eval(xc);
      if (fc < vals[dim]) {
        pts[dim] = xc;
        vals[dim] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i <= dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) pts[i][j] = pts[0][j] + sigma * (pts[i][j] - pts[0][j]);
        vals[i] = eval(pts[i]);
      }
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
  res.x = pts[best];
  res.fval = vals[best];
  return res;
}

}  // namespace driftfit
