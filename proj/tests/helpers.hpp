#pragma once

// Shared statistical helpers for the test suites: z-scores, a two-sample
// Kolmogorov-Smirnov test, and chi-square critical values at the 99.9% level.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace testutil {

inline double zscore(double a, double sa, double b, double sb) {
    const double denom = std::sqrt(sa * sa + sb * sb);
    const double diff = std::abs(a - b);
    if (denom == 0.0) return diff == 0.0 ? 0.0 : 1e300;
    return diff / denom;
}

/// Two-sample KS p-value (asymptotic, with the Stephens small-sample
/// correction). Good enough for sample sizes in the thousands.
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t m = a.size(), n = b.size();
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < m && j < n) {
        const double x = std::min(a[i], b[j]);
        while (i < m && a[i] <= x) ++i;
        while (j < n && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / double(m) - double(j) / double(n)));
    }
    const double en = std::sqrt(double(m) * double(n) / double(m + n));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k)
        q += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
    return std::clamp(q, 0.0, 1.0);
}

/// 99.9% chi-square critical values by degrees of freedom.
inline double chi2_crit_999(int df) {
    switch (df) {
        case 1: return 10.828;
        case 2: return 13.816;
        case 3: return 16.266;
        case 4: return 18.467;
        case 5: return 20.515;
        case 6: return 22.458;
        case 7: return 24.322;
        case 11: return 31.264;
        case 19: return 43.820;
        default: return 0.0;  // extend the table as needed
    }
}

}  // namespace testutil
