#pragma once

#include "kscert/quantum.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace kscert {

/// Counter-based pseudo-random source: draw k on stream s under a seed is a
/// pure function of (seed, s, k). Any partition of a pulse range across
/// threads or checkpoint segments therefore reproduces identical results.
namespace counter_rng {

std::uint64_t rand_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

}  // namespace counter_rng

struct NoiseModel {
    enum class Kind { none, preparation_white_noise, projection_crosstalk };
    Kind kind = Kind::none;
    double parameter = 0.0;  ///< w for white noise, epsilon for crosstalk

    std::string describe() const;
};

/// Prepared state: a vector id from the set, a slit specification, or an
/// explicit density operator.
struct PreparedState {
    std::string label = "KS7";
    std::variant<int, SlitSpec, DensityMatrix> source = 7;
};

struct ExperimentConfig {
    std::uint64_t pulses = 1'000'000;
    double eta = 1.0;  ///< overall detection efficiency, in (0, 1]
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  ///< distinct runs under one seed use distinct streams
    int threads = 1;
    bool keep_pulse_log = false;
    std::uint64_t samples_per_pair = 100'000;  ///< used by run_exclusivity_tests
    PreparedState state;
};

struct PulseEvent {
    std::uint8_t projector_index = 0;  ///< 0-based
    std::uint8_t detected = 0;

    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

struct CountCheckpoint {
    std::uint64_t pulses = 0;                ///< pulses sent so far
    std::vector<std::uint64_t> n;            ///< cumulative per-projector pulses
    std::vector<std::uint64_t> c;            ///< cumulative per-projector detections

    friend bool operator==(const CountCheckpoint&, const CountCheckpoint&) = default;
};

struct RunRecord {
    std::string state_label;
    std::uint64_t pulses = 0;
    double eta = 1.0;
    std::vector<std::uint64_t> n;  ///< per-projector pulses, sums to `pulses`
    std::vector<std::uint64_t> c;  ///< per-projector detections, c[i] <= n[i]
    std::vector<CountCheckpoint> checkpoints;  ///< log-spaced cumulative snapshots
    std::vector<PulseEvent> pulse_log;         ///< filled only when requested

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Raised by the estimator when some projector has no pulses yet.
class InsufficientSampling : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

DensityMatrix resolve_state(const PreparedState& state, const KsSet& set);

/// Per-projector detection probability after applying the noise model and the
/// detection efficiency; entries are clamped into [0, 1].
std::vector<double> effective_probabilities(const DensityMatrix& rho, const KsSet& set,
                                            const NoiseModel& noise, double eta);

/// Sends cfg.pulses pulses, each aimed at a uniformly chosen projector and
/// detected with its effective probability. Counts are integers and every
/// random draw is counter-indexed, so results are bit-identical for any
/// thread count. Cumulative counts are snapshotted on a grid of 20 points per
/// decade from 100 up to the total.
RunRecord run_experiment(const ExperimentConfig& cfg, const KsSet& set);

struct SigmaEstimate {
    double sigma_hat = 0.0;
    double std_error = 0.0;
};

/// sigma_hat = 2 sum_i c_i / (eta n_i); the error combines per-projector
/// Poisson fluctuations: 2 sqrt(sum_i c_i / (eta n_i)^2).
/// Throws InsufficientSampling when some n_i is zero.
SigmaEstimate estimate_sigma(const RunRecord& record, double eta);

struct TracePoint {
    std::uint64_t pulses = 0;
    double sigma_hat = 0.0;
    double std_error = 0.0;
};

/// Running estimate at each checkpoint with full projector coverage;
/// checkpoints where some projector is still unsampled are skipped because
/// the per-projector estimator is undefined there.
std::vector<TracePoint> convergence_trace(const RunRecord& record, double eta);

struct PairResult {
    int source_id = 0;  ///< prepared vector id
    int probe_id = 0;   ///< measured projector id, orthogonal to the source
    std::uint64_t samples = 0;
    std::uint64_t detections = 0;
};

struct SourceEpsilon {
    int source_id = 0;
    double epsilon = 0.0;    ///< pooled residual rate over the orthogonal probes
    double std_error = 0.0;
};

struct ExclusivityReport {
    std::vector<PairResult> pairs;           ///< every ordered orthogonal pair
    std::vector<SourceEpsilon> by_source;    ///< one aggregate per prepared vector
    double epsilon_bar = 0.0;                ///< pooled over all pairs
    double std_error = 0.0;
};

/// For every ordered orthogonal pair (i, j): prepare vector i under the
/// configured noise, measure projector j for cfg.samples_per_pair pulses, and
/// record the residual detections. Ideally every count is zero.
ExclusivityReport run_exclusivity_tests(const ExperimentConfig& cfg, const KsSet& set);

/// Builds a prepared state from a stable label: "KS<k>" for vector k, and for
/// the ks21 profile "phi1" (uniform slit superposition), "phi2" (slits 1 and
/// 5 open), "mixed" (I/d), "KS9w30" (vector 9 with 30% white noise).
PreparedState labeled_state(const std::string& label, const KsSet& set);

enum class SuiteSelection { ks_vectors, auxiliary, full };

struct SuiteRow {
    std::string label;
    RunRecord record;
    bool sampled = false;  ///< every projector received at least one pulse
    SigmaEstimate estimate;
};

/// Runs one experiment per prepared state: every vector of the set, and (for
/// the ks21 profile) five auxiliary states — two slit superpositions, the
/// maximally mixed state, vector 9 with 30% white noise, and vector 9 pure.
/// Row k uses stream k, so the suite is one deterministic family per seed.
std::vector<SuiteRow> state_independence_suite(const ExperimentConfig& base, const KsSet& set,
                                               SuiteSelection selection = SuiteSelection::full);

}  // namespace kscert
