#pragma once

#include <vector>

namespace faasim {

struct ConfidenceInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Two-sided confidence interval of the sample mean using the Student's t
/// distribution with n-1 degrees of freedom.
ConfidenceInterval student_t_ci(const std::vector<double>& samples,
                                double confidence = 0.95);

/// Spearman rank correlation; average ranks on ties.
double spearman_rank_correlation(const std::vector<double>& x,
                                 const std::vector<double>& y);

}  // namespace faasim
