#pragma once

#include "kscert/exclusivity.hpp"

#include <Eigen/Dense>

namespace kscert {

struct SdpOptions {
    double gap_tol = 1e-7;     ///< stop once the certified duality gap is this small
    int max_iterations = 200;
    double psd_floor = -1e-9;  ///< witness eigenvalues must stay above this
    double feas_tol = 1e-9;    ///< tolerated constraint residual in witnesses
};

/// Outcome of the semidefinite bound computation. The two bounds are
/// certified from explicitly feasible points, so
///   primal_bound <= true optimum <= dual_bound
/// holds regardless of how the interior-point iteration behaved.
struct SdpResult {
    double value = 0.0;        ///< midpoint of the certified interval
    double primal_bound = 0.0; ///< objective of the feasible primal witness
    double dual_bound = 0.0;   ///< objective of the feasible dual witness
    double gap = 0.0;          ///< dual_bound - primal_bound
    int iterations = 0;
    bool converged = false;    ///< gap <= gap_tol was reached

    Eigen::MatrixXd primal_witness;    ///< X: PSD, unit trace, zero on edges
    Eigen::VectorXd dual_multipliers;  ///< t followed by one multiplier per edge
    Eigen::MatrixXd dual_witness;      ///< S = t*I + sum_e y_e E_e - J_w, PSD
};

/// Weighted Lovász theta of the graph:
///   max <J_w, X>  s.t.  tr X = 1,  X_ij = 0 on edges,  X PSD,
/// with (J_w)_ij = sqrt(w_i w_j), solved by a primal-dual interior-point
/// iteration on the XZ linearization. Runs from the exactly feasible start
/// X = I/n and keeps certified bounds on both sides each iteration; when the
/// iteration cap is hit, the best certified interval found is returned with
/// converged = false.
SdpResult lovasz_theta(const ExclusivityGraph& g, const SdpOptions& options = {});

/// Theta bound for the set's exclusivity graph with every weight equal to 2,
/// matching a sum in which each vector is counted once per context it joins.
SdpResult quantum_bound(const KsSet& set, const SdpOptions& options = {});

/// Sum of the rank-one projectors of all vectors in the set.
Eigen::MatrixXcd projector_sum(const KsSet& set);

/// Independent route to the same ceiling: the largest eigenvalue of twice the
/// projector sum. Shares no code with the SDP path.
double verify_quantum_value_by_projectors(const KsSet& set);

}  // namespace kscert
