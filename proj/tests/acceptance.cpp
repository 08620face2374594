// Acceptance gate: every release criterion in one binary, one PASS/FAIL line
// each, nonzero exit when anything fails. Tolerances are fixed here and
// nowhere else.

#include "kscert/exclusivity.hpp"
#include "kscert/ks_set.hpp"
#include "kscert/quantum.hpp"
#include "kscert/report.hpp"
#include "kscert/simulate.hpp"
#include "kscert/theta_sdp.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kscert;

namespace {

int failures = 0;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %-18s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

DensityMatrix random_density(int d, int rank, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd a(d, rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    Eigen::MatrixXcd m = a * a.adjoint();
    m /= m.trace().real();
    return DensityMatrix(m);
}

// 1. The shipped set loads and passes every structural check: dimension 6,
//    21 vectors, 7 complete contexts, two memberships per vector, 105
//    orthogonal pairs. Budget: 1 s.
KsSet criterion_structure() {
    Stopwatch timer;
    KsSet set = load_ks_set_file(KSCERT_DATA_FILE);
    const ExclusivityGraph g = build_graph(set);
    bool ok = set.dimension == 6 && set.profile == "ks21" && set.vectors.size() == 21 &&
              set.contexts.size() == 7 && g.edge_count() == 105;
    for (int i = 0; i < g.n; ++i) ok = ok && g.degree(i) == 10;
    const double elapsed = timer.seconds();
    ok = ok && elapsed < 1.0;
    report("structure", ok,
           "dimension 6, 21 vectors, 7 contexts, 105 edges, 10-regular (" +
               fmt(elapsed) + " s)");
    return set;
}

// 2. Independence number 3, agreed between branch-and-bound and exhaustive
//    enumeration, with a verified witness. Budget: 10 s.
void criterion_independence(const KsSet& set) {
    Stopwatch timer;
    const ExclusivityGraph g = build_graph(set);
    const IndependenceResult r = independence_number(g);
    const int brute = independence_number_bruteforce(g);
    const bool ok = r.alpha == 3 && brute == 3 && r.witness.size() == 3 &&
                    is_independent_set(g, r.witness) && timer.seconds() < 10.0;
    report("independence", ok,
           "alpha = " + std::to_string(r.alpha) + " (brute force " + std::to_string(brute) +
               "), witness verified (" + fmt(timer.seconds()) + " s)");
}

// 3. The weighted semidefinite bound certifies 7 within 1e-6 at duality gap
//    <= 1e-6, the witnesses re-verify independently, and the projector route
//    agrees to 1e-12. Budget: 30 s.
void criterion_quantum_bound(const KsSet& set) {
    Stopwatch timer;
    const ExclusivityGraph g = build_graph(set, Rational(2));
    const SdpResult r = lovasz_theta(g);

    bool witness_ok = r.primal_witness.rows() == 21;
    if (witness_ok) {
        const Eigen::MatrixXd& x = r.primal_witness;
        witness_ok = std::abs(x.trace() - 1.0) < 1e-9;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                if (i != j && g.edge(i, j)) witness_ok = witness_ok && std::abs(x(i, j)) < 1e-9;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> xe(x);
        witness_ok = witness_ok && xe.eigenvalues().minCoeff() > -1e-9;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(r.dual_witness);
        witness_ok = witness_ok && se.eigenvalues().minCoeff() > -1e-9;
    }

    const Eigen::MatrixXcd sum = projector_sum(set);
    const double projector_residual =
        (sum - 3.5 * Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff();
    const double lambda_route = verify_quantum_value_by_projectors(set);

    const bool ok = r.converged && std::abs(r.value - 7.0) < 1e-6 && r.gap <= 1e-6 &&
                    witness_ok && projector_residual < 1e-12 &&
                    std::abs(lambda_route - 7.0) < 1e-12 && timer.seconds() < 30.0;
    report("quantum-bound", ok,
           "theta = " + fmt(r.value) + ", gap " + fmt(r.gap) + ", projector route " +
               fmt(lambda_route) + " (" + fmt(timer.seconds()) + " s)");
}

// 4. The probability sum equals 7 within 1e-10 for all 21 set vectors, the
//    five auxiliary states, and 1000 random density matrices of every rank.
void criterion_state_independence(const KsSet& set) {
    Stopwatch timer;
    double worst = 0.0;
    for (const KsVector& v : set.vectors)
        worst = std::max(worst,
                         std::abs(sigma(DensityMatrix::pure(to_unit_vector(v)), set) - 7.0));
    for (const char* label : {"phi1", "phi2", "mixed", "KS9w30", "KS9"})
        worst = std::max(
            worst, std::abs(sigma(resolve_state(labeled_state(label, set), set), set) - 7.0));
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 1000; ++trial) {
        const int rank = 1 + trial % 6;
        worst = std::max(worst, std::abs(sigma(random_density(6, rank, rng), set) - 7.0));
    }
    const bool ok = worst < 1e-10;
    report("state-independence", ok,
           "max |sum - 7| = " + fmt(worst) + " over 1026 states (" + fmt(timer.seconds()) +
               " s)");
}

// 5. Corrected bounds at the reference residual rate 0.0151 reproduce the
//    published arithmetic exactly: 6.5436 / 6.8943 / 7.5285, and the
//    classical ceiling sits within 0.01 of 6.55.
void criterion_corrected_bounds() {
    const BoundSet b = corrected_bounds(0.0151);
    const bool ok = std::abs(b.classical_corrected - 6.5436) < 1e-12 &&
                    std::abs(b.quantum_lower - 6.8943) < 1e-12 &&
                    std::abs(b.quantum_upper - 7.5285) < 1e-12 &&
                    std::abs(b.classical_corrected - 6.55) < 0.01;
    report("corrected-bounds", ok,
           "classical " + fmt(b.classical_corrected) + ", quantum [" + fmt(b.quantum_lower) +
               ", " + fmt(b.quantum_upper) + "]");
}

// 6. Simulated exclusivity audit under 9.06% preparation white noise lands on
//    epsilon_bar = 0.0151 within 0.0012 at 1e5 samples per ordered pair.
void criterion_exclusivity(const KsSet& set) {
    Stopwatch timer;
    ExperimentConfig cfg;
    cfg.seed = 2;
    cfg.samples_per_pair = 100'000;
    cfg.noise = {NoiseModel::Kind::preparation_white_noise, 0.0906};
    const ExclusivityReport rep = run_exclusivity_tests(cfg, set);
    const bool ok = rep.pairs.size() == 210 && std::abs(rep.epsilon_bar - 0.0151) < 0.0012;
    report("exclusivity", ok,
           "epsilon_bar = " + fmt(rep.epsilon_bar) + " +/- " + fmt(rep.std_error) + " (" +
               fmt(timer.seconds()) + " s)");
}

// 7. The full 26-state protocol at 1e6 pulses per state under the same noise:
//    every state beats the corrected classical ceiling by more than three
//    standard errors, sits inside the corrected quantum band, and the verdict
//    is QUANTUM_D6_CONFIRMED. Budget: 5 minutes.
void criterion_protocol(const KsSet& set) {
    Stopwatch timer;
    ExperimentConfig cfg;
    cfg.pulses = 1'000'000;
    cfg.seed = 7;
    cfg.noise = {NoiseModel::Kind::preparation_white_noise, 0.0906};
    const std::vector<SuiteRow> rows = state_independence_suite(cfg, set);
    const BoundSet b = corrected_bounds(0.0151);

    bool ok = rows.size() == 26;
    double min_margin = 1e300;
    for (const SuiteRow& row : rows) {
        ok = ok && row.sampled;
        if (!row.sampled) continue;
        const double margin =
            row.estimate.sigma_hat - 3.0 * row.estimate.std_error - b.classical_corrected;
        min_margin = std::min(min_margin, margin);
        ok = ok && margin > 0.0;
        ok = ok && row.estimate.sigma_hat >= b.quantum_lower - 3.0 * row.estimate.std_error;
        ok = ok && row.estimate.sigma_hat <= b.quantum_upper + 3.0 * row.estimate.std_error;
    }

    std::vector<StateResult> states;
    for (const SuiteRow& row : rows)
        states.push_back({row.label, row.sampled, row.estimate.sigma_hat,
                          row.estimate.std_error});
    const Verdict verdict = decide_verdict(states, b);
    ok = ok && verdict == Verdict::quantum_d6_confirmed && timer.seconds() < 300.0;
    report("protocol", ok,
           "26 states, min classical margin " + fmt(min_margin) + ", verdict " +
               std::string(to_string(verdict)) + " (" + fmt(timer.seconds()) + " s)");
}

// 8. Convergence: the ideal single-state run reaches |estimate - 7| < 0.05 at
//    1e6 pulses and the error bar shrinks like pulses^(-1/2) (log-log slope
//    in [-0.6, -0.4]).
void criterion_convergence(const KsSet& set) {
    Stopwatch timer;
    ExperimentConfig cfg;
    cfg.pulses = 1'000'000;
    cfg.seed = 4;
    const RunRecord rec = run_experiment(cfg, set);
    const SigmaEstimate final = estimate_sigma(rec, cfg.eta);
    const std::vector<TracePoint> trace = convergence_trace(rec, cfg.eta);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (const TracePoint& p : trace) {
        if (p.pulses < 1000) continue;
        const double x = std::log10(static_cast<double>(p.pulses));
        const double y = std::log10(p.std_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const bool ok = std::abs(final.sigma_hat - 7.0) < 0.05 && k >= 40 && slope > -0.6 &&
                    slope < -0.4;
    report("convergence", ok,
           "estimate " + fmt(final.sigma_hat) + " +/- " + fmt(final.std_error) +
               ", error slope " + fmt(slope) + " over " + std::to_string(k) +
               " checkpoints (" + fmt(timer.seconds()) + " s)");
}

// 9. Artifacts are reproducible: identical counts and CSV bytes for 1 vs 4
//    worker threads and across repeated runs.
void criterion_determinism(const KsSet& set) {
    Stopwatch timer;
    ExperimentConfig cfg;
    cfg.pulses = 20'000;
    cfg.seed = 12;

    cfg.threads = 1;
    const RunRecord serial = run_experiment(cfg, set);
    cfg.threads = 4;
    const RunRecord parallel = run_experiment(cfg, set);
    const RunRecord again = run_experiment(cfg, set);

    const ArtifactHeader header{"f1f2f3f4f5f6f7f8", cfg.seed};
    const std::string csv_serial = fig4_csv(convergence_trace(serial, cfg.eta), header);
    const std::string csv_parallel = fig4_csv(convergence_trace(parallel, cfg.eta), header);

    ExperimentConfig pair_cfg;
    pair_cfg.seed = 12;
    pair_cfg.samples_per_pair = 5'000;
    pair_cfg.threads = 1;
    const ExclusivityReport e1 = run_exclusivity_tests(pair_cfg, set);
    pair_cfg.threads = 3;
    const ExclusivityReport e3 = run_exclusivity_tests(pair_cfg, set);
    bool pairs_equal = e1.pairs.size() == e3.pairs.size();
    for (std::size_t i = 0; pairs_equal && i < e1.pairs.size(); ++i)
        pairs_equal = e1.pairs[i].detections == e3.pairs[i].detections;

    const bool ok = serial == parallel && parallel == again && csv_serial == csv_parallel &&
                    pairs_equal;
    report("determinism", ok,
           "1 vs 4 threads bit-identical, rerun bit-identical, pair audit thread-invariant (" +
               fmt(timer.seconds()) + " s)");
}

}  // namespace

int main() {
    std::printf("acceptance gate\n");
    try {
        const KsSet set = criterion_structure();
        criterion_independence(set);
        criterion_quantum_bound(set);
        criterion_state_independence(set);
        criterion_corrected_bounds();
        criterion_exclusivity(set);
        criterion_protocol(set);
        criterion_convergence(set);
        criterion_determinism(set);
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        ++failures;
    }
    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", failures);
    return 1;
}
