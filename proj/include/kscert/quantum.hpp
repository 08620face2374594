#pragma once

#include "kscert/ks_set.hpp"

#include <Eigen/Dense>

#include <vector>

namespace kscert {

/// Validated density operator: Hermitian within 1e-12, unit trace within
/// 1e-12, eigenvalues above -1e-10. Construction is the only mutation point,
/// so instances are valid states by invariant.
class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd m);

    /// |psi><psi| for the normalized version of `state` (must be nonzero).
    static DensityMatrix pure(const Eigen::VectorXcd& state);
    static DensityMatrix maximally_mixed(int dimension);

    const Eigen::MatrixXcd& matrix() const { return m_; }
    int dimension() const { return static_cast<int>(m_.rows()); }

private:
    Eigen::MatrixXcd m_;
};

/// Per-slit transmittances t_l >= 0 and phases phi_l (radians). The prepared
/// pure state has amplitudes sqrt(t_l) e^{i phi_l}, normalized.
struct SlitSpec {
    std::vector<double> transmittance;
    std::vector<double> phase;
};

DensityMatrix slit_state(const SlitSpec& spec);

/// <v|rho|v> for the unit-normalized ray, clamped into [0, 1].
double detection_probability(const DensityMatrix& rho, const KsVector& v);

/// Twice the sum of the detection probabilities of every vector in the set:
/// each vector stands in two contexts, so it contributes once per context.
double sigma(const DensityMatrix& rho, const KsSet& set);

/// (1 - w) rho + w I/d for w in [0, 1].
DensityMatrix add_white_noise(const DensityMatrix& rho, double w);

/// Ideal thresholds and their corrections for a mean residual-detection rate
/// epsilon_bar measured on orthogonal preparation/projection pairs: every
/// misfire can at worst push the total toward sigma_max.
struct BoundSet {
    double epsilon_bar = 0.0;
    double classical_ideal = 0.0;      ///< noncontextual ceiling, exact model
    double classical_corrected = 0.0;  ///< classical_ideal(1-eb) + sigma_max*eb
    double quantum_lower = 0.0;        ///< quantum_ideal(1-eb)
    double quantum_upper = 0.0;        ///< quantum_ideal(1-eb) + sigma_max*eb
    double sigma_max = 0.0;            ///< algebraic maximum of the sum
};

BoundSet corrected_bounds(double epsilon_bar, double classical_ideal = 6.0,
                          double quantum_ideal = 7.0, double sigma_max = 42.0);

}  // namespace kscert
