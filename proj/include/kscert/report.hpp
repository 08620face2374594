#pragma once

#include "kscert/quantum.hpp"
#include "kscert/simulate.hpp"
#include "kscert/theta_sdp.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kscert {

enum class Verdict { quantum_d6_confirmed, classical_compatible, inconclusive };

std::string to_string(Verdict verdict);

struct StateResult {
    std::string label;
    bool sampled = false;
    double sigma_hat = 0.0;
    double std_error = 0.0;
};

/// Decision rule over a family of per-state estimates against ideal bounds
/// corrected by the measured epsilon_bar:
///  - QUANTUM_D6_CONFIRMED when every state clears the corrected classical
///    ceiling by more than three standard errors AND sits inside the
///    corrected quantum band widened by three standard errors;
///  - CLASSICAL_COMPATIBLE when every state stays at or below the corrected
///    classical ceiling plus three standard errors;
///  - INCONCLUSIVE otherwise, and always when a state is unsampled or the
///    family is empty.
Verdict decide_verdict(const std::vector<StateResult>& states, const BoundSet& bounds);

struct CertificationReport {
    std::string set_path;
    std::string set_fingerprint;
    std::uint64_t seed = 0;
    std::uint64_t pulses = 0;
    double eta = 1.0;
    std::string noise;
    std::string data_source;  ///< "simulation" or the measured-data path
    BoundSet bounds;
    std::vector<StateResult> states;
    Verdict verdict = Verdict::inconclusive;
};

/// 64-bit FNV-1a content hash, hex-encoded; fingerprints input files in
/// every emitted artifact so runs can be correlated.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// First line of every CSV artifact: set fingerprint and seed.
struct ArtifactHeader {
    std::string set_fingerprint;
    std::uint64_t seed = 0;
};

std::string fig2_csv(const ExclusivityReport& report, const ArtifactHeader& header);

/// Shared schema of the per-state summaries (fig3 and fig5 presets).
std::string suite_csv(const std::vector<SuiteRow>& rows, const BoundSet& bounds,
                      const ArtifactHeader& header);

std::string fig4_csv(const std::vector<TracePoint>& trace, const ArtifactHeader& header);

/// Raw per-projector counts, one row per (state, projector); the measured-data
/// input format of the certify command.
std::string counts_csv(const std::vector<SuiteRow>& rows, double eta,
                       const ArtifactHeader& header);

struct MeasuredCounts {
    double eta = 1.0;
    std::vector<RunRecord> records;
};

MeasuredCounts read_counts_csv(const std::string& text);

std::string sdp_result_json(const SdpResult& result);

std::string bounds_json(const std::string& set_fingerprint, int alpha,
                        const Rational& noncontextual, const SdpResult& theta,
                        double projector_route, const BoundSet& bounds);

std::string certification_json(const CertificationReport& report);
std::string certification_text(const CertificationReport& report);

/// Manifest describing one CLI invocation; the only artifact carrying a
/// timestamp, so byte-identical reruns are checked on everything else.
std::string manifest_json(const std::string& command, const std::string& preset,
                          const std::string& set_path, const std::string& set_fingerprint,
                          const ExperimentConfig& cfg,
                          const std::vector<std::string>& outputs,
                          const std::string& timestamp_utc);

struct ConfigParse {
    ExperimentConfig cfg;
    std::vector<std::string> errors;  ///< empty iff cfg is usable
};

/// Parses an experiment configuration, collecting every violation instead of
/// stopping at the first so a bad file is diagnosed in one pass.
ConfigParse parse_experiment_config(const std::string& json_text, const KsSet& set,
                                    const ExperimentConfig& base = {});

}  // namespace kscert
