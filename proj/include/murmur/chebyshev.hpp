#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace murmur {

/// Piecewise Chebyshev interpolant on [a, b] with equal-width panels.
class PiecewiseChebyshev {
public:
    PiecewiseChebyshev() = default;

    template <class F>
    PiecewiseChebyshev(F&& f, double a, double b, int panels, int degree)
        : a_(a), b_(b), panels_(panels), n_(degree + 1), width_((b - a) / panels) {
        coef_.assign(static_cast<std::size_t>(panels_ * n_), 0.0);
        std::vector<double> vals(static_cast<std::size_t>(n_));
        for (int p = 0; p < panels_; ++p) {
            const double lo = a_ + p * width_;
            for (int k = 0; k < n_; ++k) {
                const double y = std::cos(std::numbers::pi * (k + 0.5) / n_);
                vals[static_cast<std::size_t>(k)] = f(lo + 0.5 * (y + 1.0) * width_);
            }
            for (int j = 0; j < n_; ++j) {
                double s = 0.0;
                for (int k = 0; k < n_; ++k) {
                    s += vals[static_cast<std::size_t>(k)] * std::cos(std::numbers::pi * j * (k + 0.5) / n_);
                }
                coef_[static_cast<std::size_t>(p * n_ + j)] = (j == 0 ? 1.0 : 2.0) * s / n_;
            }
        }
    }

    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }

    double operator()(double x) const noexcept {
        int p = static_cast<int>((x - a_) / width_);
        p = std::clamp(p, 0, panels_ - 1);
        const double lo = a_ + p * width_;
        const double y = 2.0 * (x - lo) / width_ - 1.0;
        const double* c = coef_.data() + static_cast<std::size_t>(p * n_);
        double b1 = 0.0, b2 = 0.0;
        for (int j = n_ - 1; j >= 1; --j) {
            const double b0 = 2.0 * y * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return y * b1 - b2 + c[0];
    }

private:
    double a_ = 0.0, b_ = 1.0;
    int panels_ = 1, n_ = 1;
    double width_ = 1.0;
    std::vector<double> coef_;
};

}  // namespace murmur
