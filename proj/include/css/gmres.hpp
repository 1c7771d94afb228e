#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace css {

struct GmresReport {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// Left-preconditioned restarted GMRES on real vectors. `apply` computes A x
// into its second argument, `precond` applies an approximate inverse of A in
// place. Convergence is measured on the preconditioned residual, which is the
// quantity the Newton caller damps against anyway.
inline GmresReport gmres_solve(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
    const std::function<void(std::vector<double>&)>& precond, const std::vector<double>& b,
    std::vector<double>& x, int restart, int max_iter, double rel_tol) {
    const int n = static_cast<int>(b.size());
    GmresReport rep;
    auto norm2 = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double t : v) s += t * t;
        return std::sqrt(s);
    };

    std::vector<double> work(n), r0(n);
    auto residual = [&](std::vector<double>& out) {
        bool zero = true;
        for (double t : x)
            if (t != 0.0) {
                zero = false;
                break;
            }
        if (zero) {
            out = b;
        } else {
            apply(x, work);
            for (int i = 0; i < n; ++i) out[i] = b[i] - work[i];
        }
        precond(out);
    };

    residual(r0);
    const double bnorm = norm2(r0);
    if (bnorm == 0.0) {
        rep.converged = true;
        return rep;
    }

    int total = 0;
    while (total < max_iter) {
        std::vector<std::vector<double>> basis(1, r0);
        const double beta = norm2(r0);
        if (beta == 0.0) {
            rep.converged = true;
            rep.iterations = total;
            return rep;
        }
        for (double& t : basis[0]) t /= beta;
        std::vector<double> g(restart + 1, 0.0), cs(restart, 0.0), sn(restart, 0.0);
        std::vector<std::vector<double>> hess;
        g[0] = beta;
        int k = 0;
        bool stop = false;
        while (k < restart && total < max_iter) {
            apply(basis[k], work);
            precond(work);
            std::vector<double> hcol(k + 2, 0.0);
            for (int j = 0; j <= k; ++j) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += work[i] * basis[j][i];
                hcol[j] = dot;
                for (int i = 0; i < n; ++i) work[i] -= dot * basis[j][i];
            }
            const double hnext = norm2(work);
            hcol[k + 1] = hnext;
            if (hnext > 0.0) {
                std::vector<double> v = work;
                for (double& t : v) t /= hnext;
                basis.push_back(std::move(v));
            }
            for (int j = 0; j < k; ++j) {
                const double t = cs[j] * hcol[j] + sn[j] * hcol[j + 1];
                hcol[j + 1] = -sn[j] * hcol[j] + cs[j] * hcol[j + 1];
                hcol[j] = t;
            }
            const double denom = std::hypot(hcol[k], hcol[k + 1]);
            cs[k] = denom == 0.0 ? 1.0 : hcol[k] / denom;
            sn[k] = denom == 0.0 ? 0.0 : hcol[k + 1] / denom;
            hcol[k] = denom;
            hcol[k + 1] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            hess.push_back(std::move(hcol));
            ++k;
            ++total;
            rep.rel_residual = std::abs(g[k]) / bnorm;
            if (hnext == 0.0 || rep.rel_residual < rel_tol) {
                stop = true;
                break;
            }
        }
        std::vector<double> y(k, 0.0);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= hess[j][i] * y[j];
            y[i] = s / hess[i][i];
        }
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < n; ++i) x[i] += y[j] * basis[j][i];
        residual(r0);
        rep.rel_residual = norm2(r0) / bnorm;
        rep.iterations = total;
        if (rep.rel_residual < rel_tol) {
            rep.converged = true;
            return rep;
        }
        if (stop) return rep;
    }
    rep.iterations = total;
    return rep;
}

}  // namespace css
