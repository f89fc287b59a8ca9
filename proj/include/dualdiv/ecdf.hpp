#pragma once

// Empirical-distribution utilities. The reference CDF carries its own left
// limit so distributions with atoms (0.5*dirac_0 + 0.5*chi2_1) compare
// correctly.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "dualdiv/common.hpp"

namespace dualdiv {

struct ReferenceCdf {
    std::function<double(double)> cdf;
    std::function<double(double)> cdf_left;  // defaults to cdf (continuous reference)

    double at(double x) const { return cdf(x); }
    double left(double x) const { return cdf_left ? cdf_left(x) : cdf(x); }
};

class EcdfSummary {
  public:
    explicit EcdfSummary(std::vector<double> sample) : sorted_(std::move(sample)) {
        if (sorted_.empty()) throw std::invalid_argument("EcdfSummary: sample must be nonempty");
        std::sort(sorted_.begin(), sorted_.end());
    }

    const std::vector<double>& sorted() const { return sorted_; }

    /// Kolmogorov-Smirnov sup-distance, evaluated at the jump points with
    /// both one-sided gaps.
    double ks_distance_to(const ReferenceCdf& ref) const {
        const double n = static_cast<double>(sorted_.size());
        double d = 0.0;
        for (std::size_t i = 0; i < sorted_.size(); ++i) {
            double x = sorted_[i];
            double hi = (static_cast<double>(i) + 1.0) / n - ref.at(x);
            double lo = ref.left(x) - static_cast<double>(i) / n;
            d = std::max(d, std::max(hi, lo));
        }
        return std::max(d, 0.0);
    }

    double ks_distance_to(const std::function<double(double)>& cdf) const {
        return ks_distance_to(ReferenceCdf{cdf, nullptr});
    }

  private:
    std::vector<double> sorted_;
};

inline double ecdf_ks(const std::vector<double>& sample, const ReferenceCdf& ref) {
    return EcdfSummary(sample).ks_distance_to(ref);
}

}  // namespace dualdiv
