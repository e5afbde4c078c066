#pragma once

#include <cstddef>
#include <span>

namespace cmek {

struct TTestResult {
    double t = 0.0;
    double p = 1.0;           ///< two-sided
    double normality = 0.0;   ///< Jarque-Bera statistic of the differences
    std::size_t df = 0;
};

/// Paired Student t-test on d = a - b with |d| - 1 degrees of freedom.
/// Throws when fewer than 3 pairs are given or the differences have zero
/// variance (which includes the all-zero case).
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// n/6 * (S^2 + (K - 3)^2 / 4) with moment-based skewness S and kurtosis K.
double jarque_bera(std::span<const double> x);

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

}  // namespace cmek
