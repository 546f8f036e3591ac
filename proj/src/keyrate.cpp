#include "lmsqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace lmsqkd {

namespace {

constexpr std::size_t probe_dim = 4;

DensityMatrix half_mix(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<Complex> entries(probe_dim * probe_dim);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i] = 0.5 * (a.entries()[i] + b.entries()[i]);
  }
  return DensityMatrix(probe_dim, std::move(entries));
}

}  // namespace

LambdaVector lambda_from(double q, double lambda4) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw std::invalid_argument("lambda_from: q out of [0, 0.5]");
  }
  if (!(lambda4 >= 0.0 && lambda4 <= q)) {
    throw std::invalid_argument("lambda_from: lambda4 out of [0, q]");
  }
  auto clipped = [](double x) {
    if (x < -1e-12) throw std::invalid_argument("lambda_from: negative component");
    return std::max(x, 0.0);
  };
  LambdaVector lam;
  lam.lambda1 = clipped(1.0 + lambda4 - 2.0 * q);
  lam.lambda2 = clipped(q - lambda4);
  lam.lambda3 = lam.lambda2;
  lam.lambda4 = lambda4;
  lam.q = q;
  return lam;
}

DensityMatrix sigma_tp(int a, const LambdaVector& lam) {
  const double sign = (a == 0) ? 1.0 : -1.0;
  const double c12 = sign * std::sqrt(lam.lambda1 * lam.lambda2);
  const double c34 = sign * std::sqrt(lam.lambda3 * lam.lambda4);
  std::vector<Complex> m(probe_dim * probe_dim, Complex(0.0, 0.0));
  m[0 * 4 + 0] = lam.lambda1;
  m[0 * 4 + 1] = c12;
  m[1 * 4 + 0] = c12;
  m[1 * 4 + 1] = lam.lambda2;
  m[2 * 4 + 2] = lam.lambda3;
  m[2 * 4 + 3] = c34;
  m[3 * 4 + 2] = c34;
  m[3 * 4 + 3] = lam.lambda4;
  return DensityMatrix(probe_dim, std::move(m));
}

double rate_from_lambda(const LambdaVector& lam) {
  const DensityMatrix sigma0 = sigma_tp(0, lam);
  const DensityMatrix sigma1 = sigma_tp(1, lam);
  const double s_given_key =
      0.5 * von_neumann_entropy(sigma0) + 0.5 * von_neumann_entropy(sigma1);
  const double s_marginal = von_neumann_entropy(half_mix(sigma0, sigma1));
  return (s_given_key - s_marginal) - (binary_entropy(lam.q) - 1.0);
}

double rate_given_lambda(double q, double lambda4) {
  return rate_from_lambda(lambda_from(q, lambda4));
}

KeyRatePoint minimize_rate(double q, std::size_t coarse_steps,
                           double refine_tol) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw std::invalid_argument("minimize_rate: q out of [0, 0.5]");
  }
  if (q < 1e-15 || coarse_steps < 2) {
    return KeyRatePoint{q, rate_given_lambda(q, 0.0), 0.0};
  }

  // Coarse scan.
  double best_x = 0.0;
  double best_rate = rate_given_lambda(q, 0.0);
  const double dx = q / static_cast<double>(coarse_steps - 1);
  for (std::size_t i = 1; i < coarse_steps; ++i) {
    const double x = std::min(q, static_cast<double>(i) * dx);
    const double r = rate_given_lambda(q, x);
    if (r < best_rate) {
      best_rate = r;
      best_x = x;
    }
  }

  // Golden-section refinement of the bracketing interval. The objective is
  // smooth and unimodal on [0, q].
  double lo = std::max(0.0, best_x - dx);
  double hi = std::min(q, best_x + dx);
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = rate_given_lambda(q, x1);
  double f2 = rate_given_lambda(q, x2);
  while (hi - lo > refine_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = rate_given_lambda(q, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = rate_given_lambda(q, x2);
    }
  }
  const double x_star = 0.5 * (lo + hi);
  const double r_star = rate_given_lambda(q, x_star);
  if (r_star < best_rate) {
    best_rate = r_star;
    best_x = x_star;
  }
  return KeyRatePoint{q, best_rate, best_x};
}

double find_threshold(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_threshold: tol must be > 0");
  double lo = 0.0;
  double hi = 0.25;
  double f_lo = minimize_rate(lo).rate;
  double f_hi = minimize_rate(hi).rate;
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw std::logic_error("find_threshold: no sign change over [0, 0.25]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (minimize_rate(mid).rate > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<KeyRatePoint> export_curve(double q_min, double q_max, double step,
                                       unsigned threads) {
  if (!(q_min >= 0.0 && q_min < q_max && q_max <= 0.5 && step > 0.0)) {
    throw std::invalid_argument("export_curve: invalid grid");
  }
  const std::size_t n_points =
      static_cast<std::size_t>(std::floor((q_max - q_min) / step + 1e-9)) + 1;
  std::vector<KeyRatePoint> curve(n_points);

  auto fill_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double q = std::min(q_min + static_cast<double>(i) * step, q_max);
      KeyRatePoint point = minimize_rate(q);
      point.rate = std::max(point.rate, -1.0);  // display sanity clamp
      curve[i] = point;
    }
  };

  const unsigned n_threads = std::max(1u, threads);
  if (n_threads <= 1 || n_points < 2) {
    fill_range(0, n_points);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_points + n_threads - 1) / n_threads;
    for (std::size_t lo = 0; lo < n_points; lo += chunk) {
      pool.emplace_back(fill_range, lo, std::min(lo + chunk, n_points));
    }
    for (std::thread& th : pool) th.join();
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const std::vector<KeyRatePoint>& curve) {
  out << "qber,rate,lambda4_star\n";
  char line[128];
  for (const KeyRatePoint& p : curve) {
    std::snprintf(line, sizeof(line), "%.9f,%.9f,%.9f\n", p.q, p.rate,
                  p.lambda4_star);
    out << line;
  }
}

}  // namespace lmsqkd
