#include "dgc/diffusion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dgc/kernels.hpp"
#include "dgc/rng.hpp"

namespace dgc {

namespace {

constexpr Index kDenseCutoff = 512;

bool graph_connected(const MarkovGraph& g) {
    const Index n = g.w.rows();
    std::vector<int32_t> stack{0};
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    seen[0] = 1;
    Index visited = 1;
    while (!stack.empty()) {
        const int32_t u = stack.back();
        stack.pop_back();
        for (SparseRowMatrix::InnerIterator it(g.w, u); it; ++it) {
            const auto v = static_cast<int32_t>(it.col());
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++visited;
                stack.push_back(v);
            }
        }
    }
    return visited == n;
}

struct EigenPairs {
    Eigen::VectorXd values;   // candidate eigenvalues of the conjugate matrix
    Eigen::MatrixXd vectors;  // l2-orthonormal columns
};

// Dense symmetric solve of S = D^{-1/2} W D^{-1/2}.
EigenPairs dense_pairs(const MarkovGraph& g, const Eigen::VectorXd& dinv_sqrt) {
    const Index n = g.w.rows();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (SparseRowMatrix::InnerIterator it(g.w, i); it; ++it)
            s(i, it.col()) = it.value() * dinv_sqrt(i) * dinv_sqrt(it.col());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Lanczos with full reorthogonalization on the implicit conjugate matrix.
// The Krylov space grows until the m_want largest-modulus Ritz pairs have
// residual norm below tol, or the subspace cap is hit.
EigenPairs lanczos_pairs(const MarkovGraph& g, const Eigen::VectorXd& dinv_sqrt, int m_want,
                         const DecomposeOptions& opts) {
    const Index n = g.w.rows();
    const Index cap = std::min<Index>(n, opts.max_krylov);

    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return dinv_sqrt.asDiagonal() * (g.w * (dinv_sqrt.asDiagonal() * x));
    };

    Rng rng(opts.seed);
    Eigen::MatrixXd q(n, cap);
    Eigen::VectorXd alpha(cap), beta(cap);
    {
        Eigen::VectorXd v0(n);
        for (Index i = 0; i < n; ++i) v0(i) = rng.uniform(-1.0, 1.0);
        q.col(0) = v0 / v0.norm();
    }

    Index built = 0;  // number of completed Lanczos columns
    Index dim = std::min<Index>(cap, std::max<Index>(2 * m_want + 40, 80));

    auto extend_to = [&](Index target) {
        for (Index j = built; j < target; ++j) {
            Eigen::VectorXd w = apply(q.col(j));
            if (j > 0) w -= beta(j - 1) * q.col(j - 1);
            alpha(j) = q.col(j).dot(w);
            w -= alpha(j) * q.col(j);
            // Full reorthogonalization, one refinement pass.
            auto basis = q.leftCols(j + 1);
            w -= basis * (basis.transpose() * w);
            w -= basis * (basis.transpose() * w);
            double norm = w.norm();
            if (j + 1 == target) {
                beta(j) = norm;
                break;
            }
            if (norm < 1e-13) {
                // Invariant subspace found; continue with a fresh direction.
                Eigen::VectorXd fresh(n);
                for (Index i = 0; i < n; ++i) fresh(i) = rng.uniform(-1.0, 1.0);
                fresh -= basis * (basis.transpose() * fresh);
                fresh -= basis * (basis.transpose() * fresh);
                norm = fresh.norm();
                if (norm < 1e-13) {
                    beta(j) = 0.0;
                    q.col(j + 1).setZero();
                    continue;
                }
                beta(j) = 0.0;
                q.col(j + 1) = fresh / norm;
            } else {
                beta(j) = norm;
                q.col(j + 1) = w / norm;
            }
        }
        built = target;
    };

    while (true) {
        extend_to(dim);
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
        for (Index j = 0; j < dim; ++j) {
            t(j, j) = alpha(j);
            if (j + 1 < dim) {
                t(j, j + 1) = beta(j);
                t(j + 1, j) = beta(j);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
        if (solver.info() != Eigen::Success) throw Error("tridiagonal eigensolve failed");
        const Eigen::VectorXd& ritz = solver.eigenvalues();
        const Eigen::MatrixXd& s = solver.eigenvectors();

        std::vector<Index> order(static_cast<std::size_t>(dim));
        std::iota(order.begin(), order.end(), Index{0});
        std::sort(order.begin(), order.end(), [&](Index a, Index b) {
            const double ma = std::abs(ritz(a)), mb = std::abs(ritz(b));
            if (ma != mb) return ma > mb;
            return ritz(a) > ritz(b);
        });

        const Index take = std::min<Index>(m_want, dim);
        bool converged = true;
        const double blast = beta(dim - 1);
        for (Index r = 0; r < take; ++r) {
            const Index c = order[static_cast<std::size_t>(r)];
            const double resid = std::abs(blast * s(dim - 1, c));
            if (resid > opts.tol * std::max(1.0, std::abs(ritz(c)))) {
                converged = false;
                break;
            }
        }
        if (converged || dim >= cap) {
            if (!converged)
                throw Error("eigensolver did not converge within the configured subspace (" +
                            std::to_string(cap) + " vectors); increase max_krylov");
            EigenPairs out;
            out.values.resize(take);
            out.vectors.resize(n, take);
            for (Index r = 0; r < take; ++r) {
                const Index c = order[static_cast<std::size_t>(r)];
                out.values(r) = ritz(c);
                out.vectors.col(r) = q.leftCols(dim) * s.col(c);
            }
            return out;
        }
        dim = std::min<Index>(cap, dim * 2);
    }
}

}  // namespace

DiffusionModel decompose(const MarkovGraph& g, int m_max, const DecomposeOptions& opts) {
    const Index n = g.w.rows();
    if (m_max < 2 || m_max > n) throw Error("decompose requires 2 <= m_max <= N");
    if (!graph_connected(g))
        throw Error("graph is disconnected; repair connectivity (build_graph bridges "
                    "components) before decomposing");

    const Eigen::VectorXd dinv_sqrt = g.deg.cwiseSqrt().cwiseInverse();

    EigenPairs pairs;
    if (n <= kDenseCutoff) {
        pairs = dense_pairs(g, dinv_sqrt);
    } else {
        pairs = lanczos_pairs(g, dinv_sqrt, m_max, opts);
    }

    // Order by descending modulus, positive sign first among equal moduli.
    std::vector<Index> order(static_cast<std::size_t>(pairs.values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double ma = std::abs(pairs.values(a)), mb = std::abs(pairs.values(b));
        if (ma != mb) return ma > mb;
        return pairs.values(a) > pairs.values(b);
    });
    const Index m_have = std::min<Index>(m_max, pairs.values.size());

    Eigen::VectorXd lambdas(m_have);
    for (Index r = 0; r < m_have; ++r) lambdas(r) = pairs.values(order[static_cast<std::size_t>(r)]);

    // Spectrum of a stochastic matrix lies in [-1, 1]; trim rounding spill.
    for (Index r = 0; r < m_have; ++r) {
        if (std::abs(lambdas(r)) > 1.0) {
            if (std::abs(lambdas(r)) > 1.0 + 1e-8)
                throw Error("eigenvalue outside the unit interval: " + std::to_string(lambdas(r)));
            lambdas(r) = lambdas(r) > 0 ? 1.0 : -1.0;
        }
    }
    if (std::abs(lambdas(0) - 1.0) > 1e-8)
        throw Error("leading eigenvalue is not 1; graph is malformed");
    int unit_count = 0;
    for (Index r = 0; r < m_have; ++r)
        if (lambdas(r) > 1.0 - 1e-8) ++unit_count;
    if (unit_count != 1)
        throw Error("unit eigenvalue has multiplicity " + std::to_string(unit_count) +
                    "; repair graph connectivity");

    // Truncation order: largest consecutive gap in |lambda| over indices
    // 2..m_have (1-based), unless pinned by fixed_m.
    Index m_keep = m_have;
    if (opts.fixed_m > 0) {
        m_keep = std::clamp<Index>(opts.fixed_m, 2, m_have);
    } else if (m_have > 2) {
        double best_gap = -1.0;
        Index best_i = m_have;
        for (Index i = 2; i + 1 <= m_have; ++i) {  // gap between |lambda_i| and |lambda_{i+1}|
            const double gap = std::abs(lambdas(i - 1)) - std::abs(lambdas(i));
            if (gap > best_gap) {
                best_gap = gap;
                best_i = i;
            }
        }
        m_keep = best_i;
    }

    DiffusionModel dm;
    dm.lambdas = lambdas.head(m_keep);
    dm.phis.resize(n, m_keep);
    const double scale = std::sqrt(g.deg.sum());
    for (Index r = 0; r < m_keep; ++r) {
        Eigen::VectorXd phi =
            scale * dinv_sqrt.cwiseProduct(pairs.vectors.col(order[static_cast<std::size_t>(r)]));
        // Deterministic sign: largest-magnitude entry (lowest index on ties)
        // made positive.
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < n; ++i) {
            const double mag = std::abs(phi(i));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (phi(arg) < 0) phi = -phi;
        dm.phis.col(r) = phi;
    }
    return dm;
}

namespace {

double lambda_power(double lambda, double t) {
    if (t == 0.0) return 1.0;
    if (lambda > 0.0) return std::pow(lambda, t);
    if (lambda == 0.0) return 0.0;
    if (std::floor(t) != t)
        throw Error("non-integer diffusion time with a negative eigenvalue is undefined");
    const double mag = std::pow(-lambda, t);
    return std::fmod(t, 2.0) == 0.0 ? mag : -mag;
}

}  // namespace

RowMatrixXd diffusion_coords(const DiffusionModel& dm, double t) {
    if (t < 0) throw Error("diffusion time must be nonnegative");
    RowMatrixXd coords = dm.phis;
    for (Index m = 0; m < dm.m(); ++m) coords.col(m) *= lambda_power(dm.lambdas(m), t);
    return coords;
}

double pair_distance(const DiffusionModel& dm, double t, Index i, Index j) {
    if (t < 0) throw Error("diffusion time must be nonnegative");
    if (i < 0 || j < 0 || i >= dm.n() || j >= dm.n()) throw Error("pair_distance index out of range");
    const Index m = dm.m();
    Eigen::VectorXd ci(m), cj(m);
    for (Index c = 0; c < m; ++c) {
        const double w = lambda_power(dm.lambdas(c), t);
        ci(c) = w * dm.phis(i, c);
        cj(c) = w * dm.phis(j, c);
    }
    return std::sqrt(
        kernels::squared_distance(ci.data(), cj.data(), static_cast<std::size_t>(m)));
}

RowMatrixXd dense_transition_power(const MarkovGraph& g, int t) {
    const Index n = g.p.rows();
    if (t < 0) throw Error("transition power requires t >= 0");
    RowMatrixXd base = RowMatrixXd(g.p);
    RowMatrixXd result = RowMatrixXd::Identity(n, n);
    int e = t;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

double oracle_distance(const RowMatrixXd& pt, const Eigen::VectorXd& pi, Index i, Index j) {
    const Eigen::VectorXd inv_pi = pi.cwiseInverse();
    return std::sqrt(kernels::weighted_squared_distance(
        pt.row(i).data(), pt.row(j).data(), inv_pi.data(), static_cast<std::size_t>(pt.cols())));
}

double oracle_distance(const MarkovGraph& g, int t, Index i, Index j) {
    const Index n = g.p.rows();
    if (n > 2000) throw Error("oracle_distance is limited to N <= 2000");
    if (i < 0 || j < 0 || i >= n || j >= n) throw Error("oracle_distance index out of range");
    const RowMatrixXd pt = dense_transition_power(g, t);
    return oracle_distance(pt, g.pi, i, j);
}

}  // namespace dgc
