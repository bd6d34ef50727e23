#pragma once

// Reference computations for the test suites. Deliberately written without
// the library's numerics so that agreement means something.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

// Fractional ranks, rank 1 for the largest score when `descending`.
inline std::vector<double> fractional_ranks(const std::vector<double>& s, bool descending) {
  std::vector<double> r(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double better = 0, equal = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == i) continue;
      if (s[j] == s[i]) {
        ++equal;
      } else if (descending ? s[j] > s[i] : s[j] < s[i]) {
        ++better;
      }
    }
    r[i] = 1 + better + equal / 2;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

using Matrix = std::vector<std::vector<double>>;  // row major

// Column means and population standard deviations.
inline void standardize(Matrix& x, std::vector<double>* means = nullptr, std::vector<double>* sds = nullptr) {
  const std::size_t n = x.size(), d = x.front().size();
  std::vector<double> m(d, 0.0), s(d, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) m[j] += row[j] / static_cast<double>(n);
  for (const auto& row : x)
    for (std::size_t j = 0; j < d; ++j) s[j] += (row[j] - m[j]) * (row[j] - m[j]) / static_cast<double>(n);
  for (auto& v : s) v = std::sqrt(v);
  for (auto& row : x)
    for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - m[j]) / s[j];
  if (means) *means = m;
  if (sds) *sds = s;
}

// sum_i softplus(eta_i) - y_i eta_i + ridge/2 |w|^2 with theta = (b, w).
inline double penalized_nll(const Matrix& z, const std::vector<double>& y, const std::vector<double>& theta,
                            double ridge, std::vector<double>* grad = nullptr) {
  const std::size_t d = theta.size() - 1;
  double f = 0;
  if (grad) grad->assign(theta.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double eta = theta[0];
    for (std::size_t j = 0; j < d; ++j) eta += theta[j + 1] * z[i][j];
    const double sp = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    f += sp - y[i] * eta;
    if (grad) {
      const double r = 1.0 / (1.0 + std::exp(-eta)) - y[i];
      (*grad)[0] += r;
      for (std::size_t j = 0; j < d; ++j) (*grad)[j + 1] += r * z[i][j];
    }
  }
  for (std::size_t j = 1; j < theta.size(); ++j) {
    f += 0.5 * ridge * theta[j] * theta[j];
    if (grad) (*grad)[j] += ridge * theta[j];
  }
  return f;
}

// BFGS with an Armijo backtracking line search.
inline std::vector<double> bfgs(const std::function<double(const std::vector<double>&, std::vector<double>*)>& f,
                                std::vector<double> x, double gtol = 1e-10, int max_iter = 1000) {
  const std::size_t n = x.size();
  Matrix h(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) h[i][i] = 1.0;
  std::vector<double> g;
  double fx = f(x, &g);
  for (int it = 0; it < max_iter; ++it) {
    double gmax = 0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < gtol) break;
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[i] -= h[i][j] * g[j];
    double slope = 0;
    for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
    if (slope >= 0) {  // reset to steepest descent
      for (std::size_t i = 0; i < n; ++i) {
        std::fill(h[i].begin(), h[i].end(), 0.0);
        h[i][i] = 1.0;
        p[i] = -g[i];
      }
      slope = 0;
      for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
    }
    double step = 1.0;
    std::vector<double> xn(n), gn;
    double fn = 0;
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * p[i];
      fn = f(xn, &gn);
      if (fn <= fx + 1e-4 * step * slope) break;
      step /= 2;
    }
    std::vector<double> s(n), yv(n);
    double sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      yv[i] = gn[i] - g[i];
      sy += s[i] * yv[i];
    }
    x = xn;
    g = gn;
    fx = fn;
    if (sy <= 1e-300) continue;
    std::vector<double> hy(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) hy[i] += h[i][j] * yv[j];
    double yhy = 0;
    for (std::size_t i = 0; i < n; ++i) yhy += yv[i] * hy[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
  }
  return x;
}

// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

// Accuracy of the Bayes rule for P(y = 1 | z) = 1 / (1 + exp(-c z)),
// z ~ N(0, 1): E[max(p, 1 - p)] = 2 * int_0^inf sigma(c z) phi(z) dz.
inline double bayes_accuracy_logistic_normal(double c) {
  const double pi = std::acos(-1.0);
  return 2 * simpson([&](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * pi) / (1 + std::exp(-c * z)); },
                     0.0, 12.0);
}

}  // namespace oracle
