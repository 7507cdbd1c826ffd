#pragma once

#include <cstddef>
#include <vector>

#include "atl/eigensym.hpp"
#include "atl/levelset.hpp"
#include "atl/stencils.hpp"

namespace atl {

// One detected near-critical grid node together with its local second-order
// data.  classified_k == 0 means "no admissible class".
struct CriticalPointRecord {
  Idx index{};
  Vec location{};
  double grad_norm = 0.0;
  SymMat hessian{};
  EigenSym eigen{};
  int classified_k = 0;
  double spectrum_residual = 0.0;
  double equation_residual_b = 0.0;
};

struct QuantileStats {
  double median = 0.0;
  double q95 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct ProfileFit {
  double tau = 0.0;
  double mean_ratio = 0.0;   // mean of (radial distance)/sqrt(tau)
  double spread = 0.0;       // standard deviation of the ratios
  std::size_t points = 0;
};

struct AxisDecayRow {
  double delta = 0.0;
  double grad_norm = 0.0;
  double ratio = 0.0;        // |grad u(p + delta v)| / delta
};

struct ViscosityReport {
  int tested = 0;
  int violations = 0;
  int skipped = 0;
};

struct PinchingReport {
  double c11_bound = 0.0;    // max spectral norm of the Hessian, regular set
  double pinching_max = 0.0; // max norm of the tangentially restricted Hessian
  std::size_t sample_count = 0;
};

struct RegularitySummary {
  double h = 0.0;
  std::size_t regular_count = 0;
  QuantileStats classical;   // |Delta_1 u + 1| over the filtered regular set
  PinchingReport pinching;
  std::vector<CriticalPointRecord> critical_points;
};

// Nodes whose gradient norm is below threshold_factor * h and locally minimal
// in the 3^d neighborhood.  Requires the full second-difference stencil to be
// arrived; records carry Hessian, spectrum classification and the residual of
// the critical-point form of the equation.
std::vector<CriticalPointRecord> find_critical_points(
    const ArrivalResult& result, double threshold_factor = 2.0);

// Matches the sorted eigenvalues against the admissible spectra
// {-1/k with multiplicity k+1, 0 with multiplicity n-k}, k = 1..n, by minimal
// max deviation.  Returns {k, residual}; k = 0 when the best residual exceeds
// half the spectral gap 1/(2k).  Throws ContractError on asymmetric input.
struct Classification {
  int k = 0;
  double residual = 0.0;
};
Classification classify_critical(const SymMat& hessian, int n);

// Residual of the equation at a node.  Regular nodes: |Delta_1 u + 1|.
// Critical nodes: min over unit eigenvectors v of the computed Hessian of
// |trace(Hess) - Hess(v,v) + 1|.
double check_classical(const ScalarField& u, const Idx& at, bool critical);

// Quadratic comparison-function sampling around one node.  Each trial draws a
// random symmetric perturbation S, forms Q = Hess(u) +- eta * S with
// eta = h, and tests the sub/supersolution inequality whenever u - phi
// attains a one-signed extremum over the discrete ball of radius
// radius_cells.  Trials with no extremum are skipped.
ViscosityReport check_viscosity(const ArrivalResult& result, const Idx& at,
                                int trial_count, int radius_cells,
                                std::uint64_t seed, double tolerance = 0.05);

// Level-set radius fits around a critical point.  For each tau the level
// {u = u(p) - tau} is sampled by quadratic edge interpolation inside a ball
// of radius window_factor * sqrt(tau); distances are measured in the
// subspace complementary to the near-zero Hessian eigenspace.  Expected
// mean ratio: sqrt(2k).
std::vector<ProfileFit> tangent_flow_profile(const ArrivalResult& result,
                                             const CriticalPointRecord& p,
                                             const std::vector<double>& taus,
                                             double window_factor = 2.0);

// |grad u(p + delta v)| / delta for each delta.  v must lie within 15 degrees
// of the zero-eigenvalue eigenspace of the record's Hessian.
std::vector<AxisDecayRow> axis_decay(const ArrivalResult& result,
                                     const CriticalPointRecord& p,
                                     const Vec& v,
                                     const std::vector<double>& deltas);

// Hessian size over the regular sample set {|grad u| >= grad_floor}.
PinchingReport pinching_and_c11(const ArrivalResult& result,
                                double grad_floor = 0.2);

// Least-squares slope of log(1/|grad u|) against log(u(p) - u) over arrived
// nodes within sample_radius of p; returns beta_hat = -slope, expected 1/2.
double blowup_exponent(const ArrivalResult& result,
                       const CriticalPointRecord& p, double sample_radius);

// Full sweep: critical points, equation residual quantiles over the regular
// set at least dist_cells nodes away from every critical point, and the
// Hessian-size report.
RegularitySummary summarize_regularity(const ArrivalResult& result,
                                       double grad_floor = 0.2,
                                       double threshold_factor = 2.0,
                                       int dist_cells = 3);

// Gradient at an off-grid point: multilinear interpolation of the per-node
// centered gradients of the surrounding cell (exact for quadratic fields).
Vec sampled_gradient(const ScalarField& u, const Mask& arrived, const Vec& x);

}  // namespace atl
