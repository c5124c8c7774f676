#pragma once

#include <cstdint>

#include "dgc/common.hpp"
#include "dgc/graph.hpp"

namespace dgc {

// Truncated spectral model of the Markov transition matrix P. Eigenvalues
// are sorted by descending modulus with the unit eigenvalue first; phi
// columns are right eigenvectors of P normalized so that
// sum_u phi_a(u) phi_b(u) pi(u) = delta_ab, with the largest-magnitude entry
// of each column made positive. Under this normalization the spectral
// distance below coincides exactly with the dense transition-row distance
// taken with counting measure.
struct DiffusionModel {
    Eigen::VectorXd lambdas;  // length M
    RowMatrixXd phis;         // N x M
    double t_default = 30.0;

    Index m() const { return lambdas.size(); }
    Index n() const { return phis.rows(); }
};

struct DecomposeOptions {
    int fixed_m = 0;          // 0 = pick M by the largest gap in |lambda|
    int max_krylov = 600;     // Lanczos subspace cap before giving up
    double tol = 1e-10;       // Ritz residual tolerance
    uint64_t seed = 0x6D652D646763ull;  // Lanczos start vector seed
};

// Top eigenpairs of the degree-normalized conjugate of P via dense solve
// (small N) or implicitly restarted full-reorthogonalization Lanczos.
// Requires a connected graph and 2 <= m_max <= N.
DiffusionModel decompose(const MarkovGraph& g, int m_max, const DecomposeOptions& opts = {});

// N x M embedding whose row Euclidean distances equal the truncated
// diffusion distance at time t: column m is lambda_m^t * phi_m.
RowMatrixXd diffusion_coords(const DiffusionModel& dm, double t);

// Truncated diffusion distance between points i and j at time t. Computed
// from the scaled rows with the same arithmetic as diffusion_coords, so it
// matches embedding row distances bit-exactly.
double pair_distance(const DiffusionModel& dm, double t, Index i, Index j);

// Dense t-step transition matrix P^t (binary powering); test oracle support.
RowMatrixXd dense_transition_power(const MarkovGraph& g, int t);

// Reference diffusion distance from the definition:
//   d_t^2(i,j) = sum_u (P^t(i,u) - P^t(j,u))^2 / pi(u)
// Guarded to N <= 2000; intended for validation, not production paths.
double oracle_distance(const MarkovGraph& g, int t, Index i, Index j);
double oracle_distance(const RowMatrixXd& pt, const Eigen::VectorXd& pi, Index i, Index j);

}  // namespace dgc
