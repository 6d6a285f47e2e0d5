#pragma once

#include <span>
#include <vector>

namespace sleap {

/// Lower regularized incomplete gamma P(a, x); series for x < a+1, continued
/// fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom, evaluated at `stat`.
double chi_square_pvalue(double stat, int dof);

struct GofResult {
  double stat = 0.0;
  int dof = 0;
  double pvalue = 1.0;
};

/// Pearson goodness of fit of observed counts against expected counts.
/// Adjacent bins are pooled until each carries an expectation of at least 5;
/// fewer than two pooled bins yields the degenerate p = 1.
GofResult chi_square_gof(std::span<const long long> observed,
                         std::span<const double> expected);

/// Homogeneity test for two independent count vectors over the same
/// categories (2xK table), with the same adjacent pooling rule.
GofResult chi_square_homogeneity(std::span<const long long> a,
                                 std::span<const long long> b);

struct KsResult {
  double stat = 0.0;
  double pvalue = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace sleap
