#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace excut {

/// Neumaier-compensated accumulator for long sums of mixed magnitude.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

/// Streaming central moments up to order four (Welford-style updates), enough
/// for the mean, its standard error, and the standard error of the sample
/// variance.
class RunningMoments {
public:
    void add(double x) {
        const double n1 = double(count_);
        ++count_;
        const double n = double(count_);
        const double delta = x - mean_;
        const double delta_n = delta / n;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean_ += delta_n;
        m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
               4.0 * delta_n * m3_;
        m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
        m2_ += term1;
    }

    std::uint64_t count() const { return count_; }
    double mean() const { return mean_; }

    /// Unbiased sample variance.
    double variance() const { return count_ > 1 ? m2_ / double(count_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }

    /// Standard error of the mean.
    double stderr_mean() const {
        return count_ > 1 ? std::sqrt(variance() / double(count_)) : 0.0;
    }

    /// Central moments (population normalization).
    double central2() const { return count_ ? m2_ / double(count_) : 0.0; }
    double central3() const { return count_ ? m3_ / double(count_) : 0.0; }
    double central4() const { return count_ ? m4_ / double(count_) : 0.0; }

    /// Asymptotic standard error of the sample variance:
    /// sqrt((m4 - m2^2) / n).
    double stderr_variance() const {
        if (count_ < 2) return 0.0;
        const double m2 = central2();
        const double m4 = central4();
        const double v = (m4 - m2 * m2) / double(count_);
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

}  // namespace excut
