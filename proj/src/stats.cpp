#include "cmek/stats.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "cmek/error.hpp"

namespace cmek {

double student_t_two_sided(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double jarque_bera(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) throw Error("jarque_bera needs at least two values");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 == 0.0) throw Error("jarque_bera: zero variance");
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    return n / 6.0 * (skew * skew + (kurt - 3.0) * (kurt - 3.0) / 4.0);
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("paired t-test: samples differ in length");
    if (a.size() < 3) throw Error("paired t-test: need at least 3 pairs");

    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double n = static_cast<double>(d.size());
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    if (ss == 0.0) throw Error("degenerate t-test: zero variance in paired differences");

    TTestResult r;
    r.df = d.size() - 1;
    const double sd = std::sqrt(ss / (n - 1.0));
    r.t = mean / (sd / std::sqrt(n));
    r.p = student_t_two_sided(r.t, static_cast<double>(r.df));
    r.normality = jarque_bera(d);
    return r;
}

}  // namespace cmek
