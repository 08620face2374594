#include "kscert/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace kscert {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigenvalueFloor = -1e-10;

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols())
        throw std::invalid_argument("density matrix must be square and nonempty");
    const double herm_dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev > kHermitianTol)
        throw std::invalid_argument("density matrix is not Hermitian (max deviation " +
                                    std::to_string(herm_dev) + ")");
    m_ = 0.5 * (m_ + m_.adjoint().eval());
    const double trace_dev = std::abs(m_.trace() - std::complex<double>(1.0, 0.0));
    if (trace_dev > kTraceTol)
        throw std::invalid_argument("density matrix trace deviates from 1 by " +
                                    std::to_string(trace_dev));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m_, Eigen::EigenvaluesOnly);
    const double lam_min = eig.eigenvalues().minCoeff();
    if (lam_min < kEigenvalueFloor)
        throw std::invalid_argument("density matrix has negative eigenvalue " +
                                    std::to_string(lam_min));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& state) {
    const double norm = state.norm();
    if (!(norm > 0.0))
        throw std::invalid_argument("pure state must be a nonzero vector");
    const Eigen::VectorXcd u = state / norm;
    return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be positive");
    return DensityMatrix(Eigen::MatrixXcd::Identity(dimension, dimension) /
                         static_cast<double>(dimension));
}

DensityMatrix slit_state(const SlitSpec& spec) {
    const std::size_t d = spec.transmittance.size();
    if (d == 0) throw std::invalid_argument("slit_state: empty transmittance list");
    if (spec.phase.size() != d)
        throw std::invalid_argument("slit_state: transmittance and phase lists differ in length");
    Eigen::VectorXcd amp(static_cast<Eigen::Index>(d));
    double total = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
        const double t = spec.transmittance[l];
        if (t < 0.0 || !std::isfinite(t))
            throw std::invalid_argument("slit_state: transmittances must be finite and >= 0");
        if (!std::isfinite(spec.phase[l]))
            throw std::invalid_argument("slit_state: phases must be finite");
        total += t;
        amp(static_cast<Eigen::Index>(l)) =
            std::sqrt(t) * std::exp(std::complex<double>(0.0, spec.phase[l]));
    }
    if (!(total > 0.0))
        throw std::invalid_argument("slit_state: at least one transmittance must be positive");
    return DensityMatrix::pure(amp);
}

double detection_probability(const DensityMatrix& rho, const KsVector& v) {
    const Eigen::VectorXcd u = to_unit_vector(v);
    if (u.size() != rho.dimension())
        throw std::invalid_argument("detection_probability: dimension mismatch");
    const double p = std::real((u.adjoint() * rho.matrix() * u)(0, 0));
    return std::clamp(p, 0.0, 1.0);
}

double sigma(const DensityMatrix& rho, const KsSet& set) {
    double total = 0.0;
    for (const KsVector& v : set.vectors) total += detection_probability(rho, v);
    return 2.0 * total;
}

DensityMatrix add_white_noise(const DensityMatrix& rho, double w) {
    if (!(w >= 0.0 && w <= 1.0))
        throw std::invalid_argument("add_white_noise: w must lie in [0, 1]");
    const int d = rho.dimension();
    return DensityMatrix((1.0 - w) * rho.matrix() +
                         (w / d) * Eigen::MatrixXcd::Identity(d, d));
}

BoundSet corrected_bounds(double epsilon_bar, double classical_ideal, double quantum_ideal,
                          double sigma_max) {
    if (!(epsilon_bar >= 0.0 && epsilon_bar < 1.0))
        throw std::invalid_argument("corrected_bounds: epsilon_bar must lie in [0, 1)");
    if (!(classical_ideal >= 0.0) || !(quantum_ideal >= classical_ideal) ||
        !(sigma_max >= quantum_ideal))
        throw std::invalid_argument(
            "corrected_bounds: need 0 <= classical_ideal <= quantum_ideal <= sigma_max");
    BoundSet b;
    b.epsilon_bar = epsilon_bar;
    b.classical_ideal = classical_ideal;
    b.classical_corrected = classical_ideal * (1.0 - epsilon_bar) + sigma_max * epsilon_bar;
    b.quantum_lower = quantum_ideal * (1.0 - epsilon_bar);
    b.quantum_upper = quantum_ideal * (1.0 - epsilon_bar) + sigma_max * epsilon_bar;
    b.sigma_max = sigma_max;
    return b;
}

}  // namespace kscert
