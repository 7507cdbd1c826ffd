#include "atl/analytic_arrival.hpp"

#include "atl/errors.hpp"

namespace atl {

AnalyticArrival AnalyticArrival::sphere(int dim, double initial_radius, const Vec& center) {
    if (dim != 2 && dim != 3) throw ConfigError("arrival dim must be 2 or 3");
    if (initial_radius <= 0.0) throw ConfigError("initial radius must be positive");
    AnalyticArrival a;
    a.dim_ = dim;
    a.cylinder_k_ = 0;
    a.radius_ = initial_radius;
    a.place_ = Placement::translation(center);
    return a;
}

AnalyticArrival AnalyticArrival::cylinder(int dim, int k, const Placement& place) {
    if (dim != 2 && dim != 3) throw ConfigError("arrival dim must be 2 or 3");
    if (k < 1 || k > dim - 1) throw ConfigError("cylinder k must satisfy 1 <= k <= dim-1");
    AnalyticArrival a;
    a.dim_ = dim;
    a.cylinder_k_ = k;
    a.place_ = place;
    return a;
}

double AnalyticArrival::value(const Vec& x) const {
    const Vec y = place_.to_local(x);
    if (cylinder_k_ == 0) {
        double r2 = 0.0;
        for (int i = 0; i < dim_; ++i) r2 += y[i] * y[i];
        return (radius_ * radius_ - r2) / (2.0 * (dim_ - 1));
    }
    double s = 0.0;
    for (int i = 0; i <= cylinder_k_; ++i) s += y[i] * y[i];
    return -s / (2.0 * cylinder_k_);
}

Vec AnalyticArrival::gradient(const Vec& x) const {
    const Vec y = place_.to_local(x);
    Vec gl{0, 0, 0};
    if (cylinder_k_ == 0) {
        for (int i = 0; i < dim_; ++i) gl[i] = -y[i] / (dim_ - 1);
    } else {
        for (int i = 0; i <= cylinder_k_; ++i) gl[i] = -y[i] / cylinder_k_;
    }
    // Rotate back to world coordinates; translation drops out.
    Vec g{0, 0, 0};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g[i] += place_.rotation[i][j] * gl[j];
    return g;
}

double AnalyticArrival::extinction_value() const {
    if (cylinder_k_ != 0) throw ContractError("extinction value is sphere-only");
    return radius_ * radius_ / (2.0 * (dim_ - 1));
}

ScalarField AnalyticArrival::sample(const GridSpec& g, const std::string& label) const {
    if (g.dim != dim_) throw ConfigError("grid/arrival dimension mismatch");
    return ScalarField::sample(g, label, [this](const Vec& x) { return value(x); });
}

}  // namespace atl
