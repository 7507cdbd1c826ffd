#include "atl/eigensym.hpp"

#include <algorithm>
#include <cmath>

namespace atl {

EigenSym eigen_symmetric(const SymMat& s, int dim) {
    double a[3][3];
    double V[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            a[i][j] = (i < dim && j < dim) ? s(i, j) : (i == j ? 1.0 : 0.0);
            V[i][j] = (i == j) ? 1.0 : 0.0;
        }

    double scale = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(a[i][j]));
    const double tiny = (scale > 0.0 ? scale : 1.0) * 1e-300;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < dim; ++p)
            for (int q = p + 1; q < dim; ++q) off += a[p][q] * a[p][q];
        if (off <= scale * scale * 1e-30) break;

        for (int p = 0; p < dim; ++p)
            for (int q = p + 1; q < dim; ++q) {
                const double apq = a[p][q];
                if (std::abs(apq) <= tiny) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                const double app = a[p][p], aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (int r = 0; r < dim; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = a[p][r] = c * arp - sn * arq;
                    a[r][q] = a[q][r] = sn * arp + c * arq;
                }
                for (int r = 0; r < dim; ++r) {
                    const double vrp = V[r][p], vrq = V[r][q];
                    V[r][p] = c * vrp - sn * vrq;
                    V[r][q] = sn * vrp + c * vrq;
                }
            }
    }

    int order[3] = {0, 1, 2};
    std::sort(order, order + dim, [&](int i, int j) { return a[i][i] < a[j][j]; });

    EigenSym e;
    for (int r = 0; r < dim; ++r) {
        const int src = order[r];
        e.values[r] = a[src][src];
        for (int c = 0; c < 3; ++c) e.vectors[r][c] = V[c][src];
    }
    return e;
}

double spectral_norm(const SymMat& s, int dim) {
    const EigenSym e = eigen_symmetric(s, dim);
    double m = 0.0;
    for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(e.values[i]));
    return m;
}

}  // namespace atl
