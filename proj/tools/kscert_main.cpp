#include "kscert/exclusivity.hpp"
#include "kscert/ks_set.hpp"
#include "kscert/quantum.hpp"
#include "kscert/report.hpp"
#include "kscert/simulate.hpp"
#include "kscert/theta_sdp.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using namespace kscert;

constexpr int kExitSuccess = 0;       // checks passed / verdict QUANTUM_D6_CONFIRMED
constexpr int kExitFailure = 1;       // set invalid, colorable, or CLASSICAL_COMPATIBLE
constexpr int kExitInconclusive = 2;  // verdict INCONCLUSIVE
constexpr int kExitIoError = 3;       // unreadable files, bad configuration, bad flags

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on '" + path + "'");
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct LoadedSet {
    KsSet set;
    std::string path;
    std::string fingerprint;
};

LoadedSet load_set(const std::string& path) {
    std::string text = read_file(path);
    LoadedSet out{load_ks_set(text), path, hex64(fnv1a64(text))};
    return out;
}

bool fully_sampled(const RunRecord& rec) {
    return !rec.n.empty() &&
           std::all_of(rec.n.begin(), rec.n.end(), [](std::uint64_t x) { return x > 0; });
}

SuiteRow wrap_single_run(const RunRecord& rec, double eta) {
    SuiteRow row;
    row.label = rec.state_label;
    row.record = rec;
    row.sampled = fully_sampled(rec);
    if (row.sampled) row.estimate = estimate_sigma(rec, eta);
    return row;
}

std::vector<StateResult> to_state_results(const std::vector<SuiteRow>& rows) {
    std::vector<StateResult> out;
    out.reserve(rows.size());
    for (const SuiteRow& r : rows)
        out.push_back({r.label, r.sampled, r.estimate.sigma_hat, r.estimate.std_error});
    return out;
}

/// Certification bounds derived from the set itself: exact noncontextal
/// ceiling from the weighted independence search, quantum value from the
/// semidefinite bound, and the saturation ceiling 2 * (number of vectors).
BoundSet bounds_for_set(const KsSet& set, double epsilon_bar, SdpResult* theta_out = nullptr) {
    ExclusivityGraph g = build_graph(set, Rational(2));
    Rational nc = noncontextual_bound(g);
    SdpResult theta = lovasz_theta(g);
    if (!theta.converged)
        throw std::runtime_error("semidefinite bound did not converge (gap " +
                                 std::to_string(theta.gap) + ")");
    if (theta_out) *theta_out = theta;
    double sigma_max = 2.0 * static_cast<double>(set.vectors.size());
    return corrected_bounds(epsilon_bar, nc.to_double(), theta.value, sigma_max);
}

int cmd_validate(const LoadedSet& ls) {
    const KsSet& set = ls.set;
    std::cout << "set:       " << ls.path << " (fingerprint " << ls.fingerprint << ")\n";
    std::cout << "profile:   " << set.profile << ", dimension " << set.dimension << ", "
              << set.vectors.size() << " vectors, " << set.contexts.size() << " contexts\n";

    ExclusivityGraph g = build_graph(set);
    std::cout << "graph:     " << g.n << " vertices, " << g.edge_count() << " edges\n";

    IndependenceResult ir = independence_number(g);
    std::cout << "alpha:     " << ir.alpha << " (witness ids:";
    for (int v : ir.witness) std::cout << ' ' << set.vectors[static_cast<std::size_t>(v)].id;
    std::cout << ")\n";

    Rational nc = noncontextual_bound(build_graph(set, Rational(2)));
    std::cout << "noncontextual bound (weight 2): " << nc.to_string() << "\n";

    ColorabilityVerdict cv = ks_colorability(set, g);
    if (cv.colorable) {
        std::cout << "coloring:  FOUND -- ids assigned 1:";
        for (std::size_t v = 0; v < cv.witness.size(); ++v)
            if (cv.witness[v] == 1) std::cout << ' ' << set.vectors[v].id;
        std::cout << "\nRESULT: the set admits an admissible {0,1} coloring; "
                     "it is not a Kochen-Specker set\n";
        return kExitFailure;
    }
    std::cout << "coloring:  none exists (" << cv.nodes_explored << " search nodes)\n";
    std::cout << "RESULT: structural checks passed; no admissible {0,1} coloring exists\n";
    return kExitSuccess;
}

int cmd_bounds(const LoadedSet& ls, double epsilon_bar, const std::string& out_dir) {
    const KsSet& set = ls.set;
    IndependenceResult ir = independence_number(build_graph(set));
    ExclusivityGraph g2 = build_graph(set, Rational(2));
    Rational nc = noncontextual_bound(g2);
    SdpResult theta = lovasz_theta(g2);
    double route = verify_quantum_value_by_projectors(set);
    double sigma_max = 2.0 * static_cast<double>(set.vectors.size());
    BoundSet bounds = corrected_bounds(epsilon_bar, nc.to_double(), theta.value, sigma_max);

    std::cout << std::setprecision(12);
    std::cout << "alpha:                    " << ir.alpha << "\n";
    std::cout << "noncontextual bound (w=2): " << nc.to_string() << "\n";
    std::cout << "theta (w=2):              " << theta.value << "  in [" << theta.primal_bound
              << ", " << theta.dual_bound << "], gap " << theta.gap << ", " << theta.iterations
              << " iterations" << (theta.converged ? "" : "  (NOT converged)") << "\n";
    std::cout << "projector-sum route:      " << route << "\n";
    std::cout << "epsilon_bar:              " << bounds.epsilon_bar << "\n";
    std::cout << "classical corrected:      " << bounds.classical_corrected << "\n";
    std::cout << "quantum band:             [" << bounds.quantum_lower << ", "
              << bounds.quantum_upper << "]\n";

    std::filesystem::path dir(out_dir);
    std::string path = (dir / "bounds.json").string();
    write_file(path, bounds_json(ls.fingerprint, ir.alpha, nc, theta, route, bounds));
    std::cout << "wrote " << path << "\n";
    if (!theta.converged) {
        std::cerr << "error: semidefinite bound did not reach the requested gap\n";
        return kExitFailure;
    }
    return kExitSuccess;
}

void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
    if (preset == "fig2") {
        cfg.seed = 2;
        cfg.noise = {NoiseModel::Kind::preparation_white_noise, 0.0906};
        cfg.samples_per_pair = 100'000;
    } else if (preset == "fig3") {
        cfg.seed = 3;
        cfg.noise = {NoiseModel::Kind::preparation_white_noise, 0.0906};
        cfg.pulses = 1'000'000;
    } else if (preset == "fig4") {
        cfg.seed = 4;
        cfg.noise = {NoiseModel::Kind::none, 0.0};
        cfg.pulses = 1'000'000;
        cfg.state = PreparedState{};  // vector 7
    } else if (preset == "fig5") {
        cfg.seed = 5;
        cfg.noise = {NoiseModel::Kind::preparation_white_noise, 0.0906};
        cfg.pulses = 1'000'000;
    }
}

struct Overrides {
    std::uint64_t seed = 0;
    std::uint64_t pulses = 0;
    std::uint64_t samples_per_pair = 0;
    int threads = 0;
    bool has_seed = false, has_pulses = false, has_spp = false, has_threads = false;

    void apply(ExperimentConfig& cfg) const {
        if (has_seed) cfg.seed = seed;
        if (has_pulses) cfg.pulses = pulses;
        if (has_spp) cfg.samples_per_pair = samples_per_pair;
        if (has_threads) cfg.threads = threads;
    }
};

/// Builds the effective configuration: preset defaults, then the config file,
/// then explicit flags. Returns false (after printing every error) when the
/// config file is unusable.
bool resolve_config(const LoadedSet& ls, const std::string& preset,
                    const std::string& config_path, const Overrides& ov,
                    ExperimentConfig& cfg) {
    apply_preset(cfg, preset);
    if (!config_path.empty()) {
        ConfigParse parsed = parse_experiment_config(read_file(config_path), ls.set, cfg);
        if (!parsed.errors.empty()) {
            std::cerr << "configuration errors in '" << config_path << "':\n";
            for (const std::string& e : parsed.errors) std::cerr << "  - " << e << "\n";
            return false;
        }
        cfg = parsed.cfg;
    }
    ov.apply(cfg);
    return true;
}

int cmd_simulate(const LoadedSet& ls, const std::string& preset, const std::string& config_path,
                 const Overrides& ov, double epsilon_bar, const std::string& out_dir) {
    if (preset.empty() && config_path.empty()) {
        std::cerr << "simulate needs --preset or --config (nothing to run otherwise)\n";
        return kExitIoError;
    }
    ExperimentConfig cfg;
    if (!resolve_config(ls, preset, config_path, ov, cfg)) return kExitIoError;

    const KsSet& set = ls.set;
    std::filesystem::path dir(out_dir);
    ArtifactHeader header{ls.fingerprint, cfg.seed};
    std::vector<std::string> outputs;
    std::cout << std::setprecision(8);

    auto emit = [&](const std::string& name, const std::string& content) {
        std::string path = (dir / name).string();
        write_file(path, content);
        outputs.push_back(path);
        std::cout << "wrote " << path << "\n";
    };

    if (preset == "fig2") {
        ExclusivityReport rep = run_exclusivity_tests(cfg, set);
        emit("fig2.csv", fig2_csv(rep, header));
        std::cout << "epsilon_bar = " << rep.epsilon_bar << " +/- " << rep.std_error << " over "
                  << rep.pairs.size() << " ordered orthogonal pairs\n";
    } else {
        SuiteSelection selection = SuiteSelection::full;
        std::string csv_name = "trace.csv";
        std::string counts_name = "counts.csv";
        bool single = preset.empty() || preset == "fig4";
        if (preset == "fig3") {
            selection = SuiteSelection::ks_vectors;
            csv_name = "fig3.csv";
            counts_name = "counts_fig3.csv";
        } else if (preset == "fig5") {
            selection = SuiteSelection::auxiliary;
            csv_name = "fig5.csv";
            counts_name = "counts_fig5.csv";
        } else if (preset == "fig4") {
            csv_name = "fig4.csv";
            counts_name = "counts_fig4.csv";
        }

        if (single) {
            RunRecord rec = run_experiment(cfg, set);
            SuiteRow row = wrap_single_run(rec, cfg.eta);
            emit(csv_name, fig4_csv(convergence_trace(rec, cfg.eta), header));
            emit(counts_name, counts_csv({row}, cfg.eta, header));
            if (row.sampled)
                std::cout << "state " << row.label << ": sigma_hat = " << row.estimate.sigma_hat
                          << " +/- " << row.estimate.std_error << " after " << rec.pulses
                          << " pulses\n";
            else
                std::cout << "state " << row.label << ": undersampled (some projector "
                          << "received no pulses)\n";
        } else {
            std::vector<SuiteRow> rows = state_independence_suite(cfg, set, selection);
            BoundSet bounds = bounds_for_set(set, epsilon_bar);
            emit(csv_name, suite_csv(rows, bounds, header));
            emit(counts_name, counts_csv(rows, cfg.eta, header));
            for (const SuiteRow& r : rows) {
                std::cout << "state " << r.label << ": ";
                if (r.sampled)
                    std::cout << "sigma_hat = " << r.estimate.sigma_hat << " +/- "
                              << r.estimate.std_error << "\n";
                else
                    std::cout << "undersampled\n";
            }
        }
    }

    std::string manifest_path = (dir / "manifest.json").string();
    write_file(manifest_path, manifest_json("simulate", preset, ls.path, ls.fingerprint, cfg,
                                            outputs, timestamp_utc()));
    std::cout << "wrote " << manifest_path << "\n";
    return kExitSuccess;
}

int cmd_certify(const LoadedSet& ls, const std::string& config_path,
                const std::string& measured_path, const Overrides& ov, double epsilon_bar,
                const std::string& out_dir) {
    const KsSet& set = ls.set;
    BoundSet bounds = bounds_for_set(set, epsilon_bar);

    CertificationReport report;
    report.set_path = ls.path;
    report.set_fingerprint = ls.fingerprint;
    report.bounds = bounds;

    std::filesystem::path dir(out_dir);
    std::vector<std::string> outputs;
    ExperimentConfig cfg;
    cfg.seed = 7;
    bool simulated = measured_path.empty();

    if (simulated) {
        if (!resolve_config(ls, "", config_path, ov, cfg)) return kExitIoError;
        SuiteSelection selection =
            set.profile == "ks21" ? SuiteSelection::full : SuiteSelection::ks_vectors;
        std::vector<SuiteRow> rows = state_independence_suite(cfg, set, selection);
        report.states = to_state_results(rows);
        report.seed = cfg.seed;
        report.pulses = cfg.pulses;
        report.eta = cfg.eta;
        report.noise = cfg.noise.describe();
        report.data_source = "simulation";

        ArtifactHeader header{ls.fingerprint, cfg.seed};
        std::string counts_path = (dir / "counts.csv").string();
        write_file(counts_path, counts_csv(rows, cfg.eta, header));
        outputs.push_back(counts_path);
    } else {
        MeasuredCounts mc = read_counts_csv(read_file(measured_path));
        for (const RunRecord& rec : mc.records) {
            if (rec.n.size() != set.vectors.size())
                throw ParseError("state '" + rec.state_label + "' has " +
                                 std::to_string(rec.n.size()) + " projectors but the set has " +
                                 std::to_string(set.vectors.size()));
            SuiteRow row = wrap_single_run(rec, mc.eta);
            report.states.push_back(
                {row.label, row.sampled, row.estimate.sigma_hat, row.estimate.std_error});
        }
        report.seed = 0;
        report.pulses = mc.records.empty() ? 0 : mc.records.front().pulses;
        report.eta = mc.eta;
        report.noise = "measured";
        report.data_source = measured_path;
    }

    report.verdict = decide_verdict(report.states, bounds);

    std::string json_path = (dir / "certification.json").string();
    std::string text_path = (dir / "certification.txt").string();
    std::string text = certification_text(report);
    write_file(json_path, certification_json(report));
    write_file(text_path, text);
    outputs.push_back(json_path);
    outputs.push_back(text_path);

    std::cout << text;
    for (const std::string& p : outputs) std::cout << "wrote " << p << "\n";

    if (simulated) {
        std::string manifest_path = (dir / "manifest.json").string();
        write_file(manifest_path, manifest_json("certify", "", ls.path, ls.fingerprint, cfg,
                                                outputs, timestamp_utc()));
        std::cout << "wrote " << manifest_path << "\n";
    }

    switch (report.verdict) {
        case Verdict::quantum_d6_confirmed: return kExitSuccess;
        case Verdict::classical_compatible: return kExitFailure;
        case Verdict::inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kochen-Specker contextuality certification toolkit"};
    app.require_subcommand(1);

    std::string set_path = "data/ks21.json";
    std::string out_dir = "out";
    std::string config_path;
    std::string measured_path;
    std::string preset;
    double epsilon_bar = 0.0151;
    Overrides ov;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--set", set_path, "Vector-set JSON file")->capture_default_str();
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory for artifacts")
            ->capture_default_str();
    };
    auto add_eb = [&](CLI::App* cmd) {
        cmd->add_option("--epsilon-bar", epsilon_bar,
                        "Average residual exclusivity rate used for bound correction")
            ->check(CLI::Range(0.0, 0.999))
            ->capture_default_str();
    };
    auto add_run_overrides = [&](CLI::App* cmd, bool with_spp) {
        auto* so = cmd->add_option("--seed", ov.seed, "Random seed");
        auto* po = cmd->add_option("--pulses", ov.pulses, "Pulses per experiment");
        auto* to = cmd->add_option("--threads", ov.threads, "Worker threads")
                       ->check(CLI::Range(1, 256));
        CLI::Option* ppo = nullptr;
        if (with_spp)
            ppo = cmd->add_option("--samples-per-pair", ov.samples_per_pair,
                                  "Pulses per ordered orthogonal pair");
        cmd->callback([&ov = ov, so, po, to, ppo]() {
            ov.has_seed = so->count() > 0;
            ov.has_pulses = po->count() > 0;
            ov.has_threads = to->count() > 0;
            ov.has_spp = ppo != nullptr && ppo->count() > 0;
        });
    };

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Structural checks plus the coloring search");
    add_common(validate_cmd);

    CLI::App* bounds_cmd = app.add_subcommand(
        "bounds", "Independence number, semidefinite bound, and corrected ceilings");
    add_common(bounds_cmd);
    add_out(bounds_cmd);
    add_eb(bounds_cmd);

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo detection experiments and CSV artifacts");
    add_common(simulate_cmd);
    add_out(simulate_cmd);
    add_eb(simulate_cmd);
    simulate_cmd->add_option("--preset", preset, "One of fig2, fig3, fig4, fig5")
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5"}));
    simulate_cmd->add_option("--config", config_path, "Experiment configuration JSON");
    add_run_overrides(simulate_cmd, true);

    CLI::App* certify_cmd = app.add_subcommand(
        "certify", "Per-state verdict against the corrected classical and quantum bounds");
    add_common(certify_cmd);
    add_out(certify_cmd);
    add_eb(certify_cmd);
    certify_cmd->add_option("--config", config_path,
                            "Experiment configuration JSON for the simulated suite");
    certify_cmd->add_option("--measured", measured_path,
                            "Counts CSV with measured data (skips simulation)");
    add_run_overrides(certify_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitSuccess : kExitIoError;
    }

    try {
        LoadedSet ls = load_set(set_path);
        if (validate_cmd->parsed()) return cmd_validate(ls);
        if (bounds_cmd->parsed()) return cmd_bounds(ls, epsilon_bar, out_dir);
        if (simulate_cmd->parsed())
            return cmd_simulate(ls, preset, config_path, ov, epsilon_bar, out_dir);
        if (certify_cmd->parsed())
            return cmd_certify(ls, config_path, measured_path, ov, epsilon_bar, out_dir);
    } catch (const ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kExitFailure;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    }
    return kExitIoError;
}
