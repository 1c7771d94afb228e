#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "css/errors.hpp"

namespace css {

// Tridiagonal LU factorization with partial pivoting (row interchanges create
// one extra superdiagonal). Factor once, solve many right-hand sides.
template <class T>
struct TridiagLU {
    int n = 0;
    std::vector<T> dl, d, du, du2;
    std::vector<char> piv;

    // dl: subdiagonal (dl[0] unused), d: diagonal, du: superdiagonal
    // (du[n-1] unused). Arrays all sized n for caller convenience.
    void factor(std::vector<T> dl_in, std::vector<T> d_in, std::vector<T> du_in) {
        n = static_cast<int>(d_in.size());
        dl = std::move(dl_in);
        d = std::move(d_in);
        du = std::move(du_in);
        du2.assign(n, T(0));
        piv.assign(n, 0);
        for (int i = 0; i + 1 < n; ++i) {
            T sub = dl[i + 1];
            if (std::abs(d[i]) >= std::abs(sub)) {
                if (std::abs(d[i]) == 0.0)
                    throw LinearSolveFailed("tridiagonal factor: zero pivot at row " + std::to_string(i));
                T fact = sub / d[i];
                dl[i + 1] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                T fact = d[i] / sub;
                d[i] = sub;
                dl[i + 1] = fact;
                T tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                piv[i] = 1;
            }
        }
        if (std::abs(d[n - 1]) == 0.0)
            throw LinearSolveFailed("tridiagonal factor: singular matrix");
    }

    void solve(std::vector<T>& x) const {
        for (int i = 0; i + 1 < n; ++i) {
            if (!piv[i]) {
                x[i + 1] -= dl[i + 1] * x[i];
            } else {
                T tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - dl[i + 1] * x[i];
            }
        }
        x[n - 1] /= d[n - 1];
        if (n >= 2) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for (int i = n - 3; i >= 0; --i)
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
};

using TridiagLUd = TridiagLU<double>;
using TridiagLUz = TridiagLU<std::complex<double>>;

}  // namespace css
