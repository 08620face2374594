#include "kscert/theta_sdp.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace kscert {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct EdgeList {
    std::vector<std::pair<int, int>> e;
};

EdgeList collect_edges(const ExclusivityGraph& g) {
    EdgeList el;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (g.edge(i, j)) el.e.emplace_back(i, j);
    return el;
}

/// A^T(y) = y_0 I + sum_e y_{e+1} (E_ij + E_ji).
MatrixXd adjoint_a(const VectorXd& y, const EdgeList& el, int n) {
    MatrixXd r = y(0) * MatrixXd::Identity(n, n);
    for (std::size_t e = 0; e < el.e.size(); ++e) {
        const auto [i, j] = el.e[e];
        r(i, j) += y(static_cast<Eigen::Index>(e) + 1);
        r(j, i) += y(static_cast<Eigen::Index>(e) + 1);
    }
    return r;
}

/// Longest step in {1, 0.75, 0.75^2, ...} keeping A + step*dA positive
/// definite (Cholesky as the test); 0 when even the smallest trial fails.
double longest_pd_step(const MatrixXd& a, const MatrixXd& da) {
    double step = 1.0;
    for (int t = 0; t < 80; ++t) {
        Eigen::LLT<MatrixXd> llt(a + step * da);
        if (llt.info() == Eigen::Success) return step;
        step *= 0.75;
    }
    return 0.0;
}

}  // namespace

SdpResult lovasz_theta(const ExclusivityGraph& g, const SdpOptions& options) {
    const int n = g.n;
    if (n < 1) throw std::invalid_argument("lovasz_theta: empty graph");
    if (g.adj.size() != static_cast<std::size_t>(n) ||
        g.weight.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("lovasz_theta: inconsistent graph arrays");

    VectorXd s(n);
    for (int i = 0; i < n; ++i) {
        const double w = g.weight[static_cast<std::size_t>(i)].to_double();
        if (w < 0.0) throw std::invalid_argument("lovasz_theta: negative vertex weight");
        s(i) = std::sqrt(w);
    }
    const MatrixXd C = s * s.transpose();
    const MatrixXd identity = MatrixXd::Identity(n, n);
    const EdgeList el = collect_edges(g);
    const int m = 1 + static_cast<int>(el.e.size());

    // Exactly feasible primal start; dual start dominates lambda_max(C) = sum w.
    MatrixXd X = identity / n;
    VectorXd y = VectorXd::Zero(m);
    y(0) = s.squaredNorm() + 1.0;
    MatrixXd Z = adjoint_a(y, el, n) - C;

    double best_primal = -std::numeric_limits<double>::infinity();
    double best_dual = std::numeric_limits<double>::infinity();
    MatrixXd best_x, best_s;
    VectorXd best_y;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig;

    const auto certify = [&]() {
        // Primal: project the iterate onto the exactly feasible affine slice,
        // then blend toward I/n until it is PSD. The result is a genuinely
        // feasible point, so its objective is a valid lower bound.
        MatrixXd p = 0.5 * (X + X.transpose());
        for (const auto& [i, j] : el.e) p(i, j) = p(j, i) = 0.0;
        p /= p.trace();
        eig.compute(p, Eigen::EigenvaluesOnly);
        const double lam_min = eig.eigenvalues().minCoeff();
        if (lam_min < 0.0) {
            const double tau = -lam_min / (1.0 / n - lam_min);
            p = (1.0 - tau) * p + (tau / n) * identity;
        }
        const double primal = C.cwiseProduct(p).sum();
        if (primal > best_primal) {
            best_primal = primal;
            best_x = p;
        }
        // Dual: S = A^T(y) - C is feasible once shifted PSD; the shift only
        // raises the trace multiplier, so y0 + shift is a valid upper bound.
        MatrixXd dual_s = adjoint_a(y, el, n) - C;
        eig.compute(dual_s, Eigen::EigenvaluesOnly);
        const double shift = std::max(0.0, -eig.eigenvalues().minCoeff());
        const double dual = y(0) + shift;
        if (dual < best_dual) {
            best_dual = dual;
            best_y = y;
            best_y(0) += shift;
            best_s = dual_s + shift * identity;
        }
    };

    int it = 0;
    for (; it < options.max_iterations; ++it) {
        certify();
        if (best_dual - best_primal <= options.gap_tol) break;

        const double mu = X.cwiseProduct(Z).sum() / (2.0 * n);
        Eigen::LLT<MatrixXd> zllt(Z);
        if (zllt.info() != Eigen::Success) break;  // certified interval stands
        MatrixXd zi = zllt.solve(identity);
        zi = 0.5 * (zi + zi.transpose());
        const MatrixXd w = zi * X;

        // Schur system A(Z^{-1} A^T(dy) X) = mu A(Z^{-1}) - b.
        MatrixXd schur(m, m);
        VectorXd rhs(m);
        schur(0, 0) = w.trace();
        rhs(0) = mu * zi.trace() - 1.0;
        for (std::size_t f = 0; f < el.e.size(); ++f) {
            const auto [p, q] = el.e[f];
            const double val = w(p, q) + w(q, p);
            schur(0, static_cast<Eigen::Index>(f) + 1) = val;
            schur(static_cast<Eigen::Index>(f) + 1, 0) = val;
        }
        for (std::size_t e = 0; e < el.e.size(); ++e) {
            const auto [i, j] = el.e[e];
            rhs(static_cast<Eigen::Index>(e) + 1) = 2.0 * mu * zi(i, j);
            for (std::size_t f = 0; f < el.e.size(); ++f) {
                const auto [p, q] = el.e[f];
                schur(static_cast<Eigen::Index>(e) + 1, static_cast<Eigen::Index>(f) + 1) =
                    zi(i, p) * X(q, j) + zi(i, q) * X(p, j) +
                    zi(j, p) * X(q, i) + zi(j, q) * X(p, i);
            }
        }

        const VectorXd dy = schur.partialPivLu().solve(rhs);
        const MatrixXd dz = adjoint_a(dy, el, n);
        MatrixXd dx = mu * zi - X - zi * (dz * X);
        dx = 0.5 * (dx + dx.transpose());

        const double alpha_p = longest_pd_step(X, dx);
        const double alpha_d = longest_pd_step(Z, dz);
        if (alpha_p <= 0.0 && alpha_d <= 0.0) break;

        if (alpha_p > 0.0) X += alpha_p * dx;
        if (alpha_d > 0.0) {
            y += alpha_d * dy;
            Z = adjoint_a(y, el, n) - C;
        }
        // Re-impose the primal affine constraints exactly; the drift per step
        // is rounding-level and the optimum lies on this slice anyway.
        X = 0.5 * (X + X.transpose());
        for (const auto& [i, j] : el.e) X(i, j) = X(j, i) = 0.0;
        X /= X.trace();
    }
    certify();

    SdpResult r;
    r.primal_bound = best_primal;
    r.dual_bound = best_dual;
    r.gap = best_dual - best_primal;
    r.value = 0.5 * (best_primal + best_dual);
    r.iterations = it;
    r.converged = r.gap <= options.gap_tol;
    r.primal_witness = best_x;
    r.dual_multipliers = best_y;
    r.dual_witness = best_s;
    return r;
}

SdpResult quantum_bound(const KsSet& set, const SdpOptions& options) {
    return lovasz_theta(build_graph(set, Rational(2)), options);
}

Eigen::MatrixXcd projector_sum(const KsSet& set) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(set.dimension, set.dimension);
    for (const KsVector& v : set.vectors) sum += projector(v);
    return sum;
}

double verify_quantum_value_by_projectors(const KsSet& set) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(2.0 * projector_sum(set),
                                                        Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

}  // namespace kscert
