#pragma once

#include <cmath>
#include <vector>

#include "css/errors.hpp"
#include "css/tridiag.hpp"

namespace css {

// Not-a-knot cubic spline on a uniform grid starting at 0. Evaluation beyond
// the last node returns 0 (fields are stored up to r_max and decay); negative
// arguments are a caller bug and clamp to 0.
class CubicSpline {
  public:
    CubicSpline() = default;

    CubicSpline(const std::vector<double>& y, double h) { build(y, h); }

    void build(const std::vector<double>& y, double h) {
        const int n = static_cast<int>(y.size());
        if (n < 8) throw GridTooCoarse("CubicSpline: need at least 8 nodes");
        y_ = y;
        h_ = h;
        mm_.assign(n, 0.0);
        // Second-derivative unknowns M_i. Not-a-knot closes the system with
        // third-derivative continuity at the second and second-to-last nodes,
        // which pins M_1 and M_{n-2} to plain second differences.
        auto d2 = [&](int i) { return (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h); };
        mm_[1] = d2(1);
        mm_[n - 2] = d2(n - 2);
        const int nsys = n - 4;  // unknowns M_2 .. M_{n-3}
        if (nsys > 0) {
            std::vector<double> dl(nsys, 1.0), dg(nsys, 4.0), du(nsys, 1.0), rhs(nsys);
            for (int k = 0; k < nsys; ++k) rhs[k] = 6.0 * d2(k + 2);
            rhs[0] -= mm_[1];
            rhs[nsys - 1] -= mm_[n - 2];
            TridiagLUd lu;
            lu.factor(dl, dg, du);
            lu.solve(rhs);
            for (int k = 0; k < nsys; ++k) mm_[k + 2] = rhs[k];
        }
        mm_[0] = 2.0 * mm_[1] - mm_[2];
        mm_[n - 1] = 2.0 * mm_[n - 2] - mm_[n - 3];
    }

    double operator()(double x) const {
        const int n = static_cast<int>(y_.size());
        if (x <= 0.0) return y_[0] * (x == 0.0 ? 1.0 : (x > -1e-14 ? 1.0 : 0.0));
        const double xmax = h_ * (n - 1);
        if (x >= xmax) return (x <= xmax + 1e-14 * xmax) ? y_[n - 1] : 0.0;
        int i = static_cast<int>(x / h_);
        if (i > n - 2) i = n - 2;
        const double t = x / h_ - i;
        const double s = 1.0 - t;
        return y_[i] * s + y_[i + 1] * t +
               (h_ * h_ / 6.0) * ((s * s * s - s) * mm_[i] + (t * t * t - t) * mm_[i + 1]);
    }

  private:
    std::vector<double> y_;
    std::vector<double> mm_;
    double h_ = 0.0;
};

}  // namespace css
