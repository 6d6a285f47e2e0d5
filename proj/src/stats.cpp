#include "sleap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sleap {

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by modified Lentz continued fraction.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Pool adjacent bins so every pooled expectation reaches `floor`.
void pool_bins(std::span<const long long> observed,
               std::span<const double> expected, double floor,
               std::vector<long long>& obs_out, std::vector<double>& exp_out) {
  obs_out.clear();
  exp_out.clear();
  long long o_acc = 0;
  double e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= floor) {
      obs_out.push_back(o_acc);
      exp_out.push_back(e_acc);
      o_acc = 0;
      e_acc = 0.0;
    }
  }
  if (o_acc != 0 || e_acc != 0.0) {
    if (exp_out.empty()) {
      obs_out.push_back(o_acc);
      exp_out.push_back(e_acc);
    } else {
      obs_out.back() += o_acc;
      exp_out.back() += e_acc;
    }
  }
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0) throw std::invalid_argument("gamma shape must be positive");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double chi_square_pvalue(double stat, int dof) {
  if (dof <= 0 || stat <= 0.0) return 1.0;
  const double a = 0.5 * dof;
  const double x = 0.5 * stat;
  const double q =
      x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
  return std::clamp(q, 0.0, 1.0);
}

GofResult chi_square_gof(std::span<const long long> observed,
                         std::span<const double> expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("observed/expected size mismatch");
  std::vector<long long> obs;
  std::vector<double> exp;
  pool_bins(observed, expected, 5.0, obs, exp);

  GofResult r;
  if (obs.size() < 2) return r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) continue;
    const double diff = static_cast<double>(obs[i]) - exp[i];
    r.stat += diff * diff / exp[i];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  r.pvalue = chi_square_pvalue(r.stat, r.dof);
  return r;
}

GofResult chi_square_homogeneity(std::span<const long long> a,
                                 std::span<const long long> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("count vector size mismatch");
  long long n1 = 0, n2 = 0;
  for (long long v : a) n1 += v;
  for (long long v : b) n2 += v;
  GofResult r;
  if (n1 == 0 || n2 == 0) return r;
  const double total = static_cast<double>(n1 + n2);
  const double f1 = static_cast<double>(n1) / total;
  const double f2 = static_cast<double>(n2) / total;

  // Pool adjacent categories until both expected cells reach 5.
  std::vector<long long> am, bm;
  long long ai = 0, bi = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ai += a[i];
    bi += b[i];
    const double col = static_cast<double>(ai + bi);
    if (col * f1 >= 5.0 && col * f2 >= 5.0) {
      am.push_back(ai);
      bm.push_back(bi);
      ai = 0;
      bi = 0;
    }
  }
  if (ai != 0 || bi != 0) {
    if (am.empty()) {
      am.push_back(ai);
      bm.push_back(bi);
    } else {
      am.back() += ai;
      bm.back() += bi;
    }
  }
  if (am.size() < 2) return r;

  for (std::size_t k = 0; k < am.size(); ++k) {
    const double col = static_cast<double>(am[k] + bm[k]);
    const double e1 = col * f1;
    const double e2 = col * f2;
    if (e1 <= 0.0 || e2 <= 0.0) continue;
    const double d1 = static_cast<double>(am[k]) - e1;
    const double d2 = static_cast<double>(bm[k]) - e2;
    r.stat += d1 * d1 / e1 + d2 * d2 / e2;
  }
  r.dof = static_cast<int>(am.size()) - 1;
  r.pvalue = chi_square_pvalue(r.stat, r.dof);
  return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());

  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx -
                              static_cast<double>(j) / ny));
  }

  KsResult r;
  r.stat = d;
  const double ne = nx * ny / (nx + ny);
  const double lambda =
      (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 1e-9) {
    r.pvalue = 1.0;
    return r;
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    sign = -sign;
    if (term < 1e-14) break;
  }
  r.pvalue = std::clamp(2.0 * q, 0.0, 1.0);
  return r;
}

}  // namespace sleap
