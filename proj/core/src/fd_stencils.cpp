#include "chernoff/fd_stencils.hpp"

#include <algorithm>

#include "chernoff/errors.hpp"

namespace chernoff {

std::vector<double> fd_weights(double z, const std::vector<double>& xs, int der) {
    const int n = int(xs.size()) - 1;
    if (n < der)
        throw ShapeError("fd_weights: need more nodes than the derivative order");
    if (der < 0) throw DomainError("fd_weights: derivative order must be >= 0");
    const int m = der;
    std::vector<std::vector<double>> C(size_t(n + 1), std::vector<double>(size_t(m + 1), 0.0));
    C[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = xs[0] - z;
    for (int i = 1; i <= n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[size_t(i)] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[size_t(i)] - xs[size_t(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C[size_t(i)][size_t(k)] =
                        c1 * (k * C[size_t(i - 1)][size_t(k - 1)] - c5 * C[size_t(i - 1)][size_t(k)]) / c2;
                C[size_t(i)][0] = -c1 * c5 * C[size_t(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                C[size_t(j)][size_t(k)] =
                    (c4 * C[size_t(j)][size_t(k)] - k * C[size_t(j)][size_t(k - 1)]) / c3;
            C[size_t(j)][0] = c4 * C[size_t(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(size_t(n + 1));
    for (int i = 0; i <= n; ++i) w[size_t(i)] = C[size_t(i)][size_t(m)];
    return w;
}

}  // namespace chernoff
