#pragma once

// Tridiagonal LU with partial pivoting (dgttrf/dgtts2 transcription).
// Shared by the manifold Newton refiner and the extremal witness polish.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace pohozaev::detail {

struct TriLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv;
    std::size_t n = 0;

    // Factors in place; returns false on an exactly singular pivot.
    bool factor(std::vector<double> sub, std::vector<double> diag,
                std::vector<double> sup) {
        n = diag.size();
        dl = std::move(sub);   // dl[i] couples row i to column i-1 (i >= 1)
        d = std::move(diag);
        du = std::move(sup);   // du[i] couples row i to column i+1 (i <= n-2)
        du2.assign(n, 0.0);
        piv.assign(n, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = dl[i + 1];
            if (std::abs(d[i]) >= std::abs(a)) {
                if (d[i] == 0.0) return false;
                const double fact = a / d[i];
                dl[i + 1] = fact;
                d[i + 1] -= fact * du[i];
                if (i + 2 < n) du2[i] = 0.0;
            } else {
                const double fact = d[i] / a;
                d[i] = a;
                dl[i + 1] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                piv[i] = 1;
            }
        }
        return d[n - 1] != 0.0;
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (piv[i] == 0) {
                b[i + 1] -= dl[i + 1] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i + 1] * b[i + 1];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }
};

}  // namespace pohozaev::detail
