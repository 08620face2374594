#include "kscert/report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kscert {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

ordered_json bounds_to_json(const BoundSet& b) {
    ordered_json j;
    j["epsilon_bar"] = b.epsilon_bar;
    j["classical_ideal"] = b.classical_ideal;
    j["classical_corrected"] = b.classical_corrected;
    j["quantum_lower"] = b.quantum_lower;
    j["quantum_upper"] = b.quantum_upper;
    j["sigma_max"] = b.sigma_max;
    return j;
}

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_header(const ArtifactHeader& h) {
    return "# set=" + h.set_fingerprint + " seed=" + std::to_string(h.seed) + "\n";
}

}  // namespace

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::quantum_d6_confirmed:
            return "QUANTUM_D6_CONFIRMED";
        case Verdict::classical_compatible:
            return "CLASSICAL_COMPATIBLE";
        case Verdict::inconclusive:
            return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

Verdict decide_verdict(const std::vector<StateResult>& states, const BoundSet& bounds) {
    if (states.empty()) return Verdict::inconclusive;
    bool all_quantum = true;
    bool all_classical = true;
    for (const StateResult& s : states) {
        if (!s.sampled) return Verdict::inconclusive;
        const double margin = 3.0 * s.std_error;
        const bool above_classical = s.sigma_hat - margin > bounds.classical_corrected;
        const bool in_band = s.sigma_hat >= bounds.quantum_lower - margin &&
                             s.sigma_hat <= bounds.quantum_upper + margin;
        all_quantum = all_quantum && above_classical && in_band;
        all_classical = all_classical && s.sigma_hat <= bounds.classical_corrected + margin;
    }
    if (all_quantum) return Verdict::quantum_d6_confirmed;
    if (all_classical) return Verdict::classical_compatible;
    return Verdict::inconclusive;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::string fig2_csv(const ExclusivityReport& report, const ArtifactHeader& header) {
    std::string out = csv_header(header);
    out += "# epsilon_bar=" + fmt(report.epsilon_bar) +
           " std_error=" + fmt(report.std_error) + "\n";
    out += "state,epsilon,std_error\n";
    for (const SourceEpsilon& s : report.by_source)
        out += std::to_string(s.source_id) + "," + fmt(s.epsilon) + "," + fmt(s.std_error) + "\n";
    return out;
}

std::string suite_csv(const std::vector<SuiteRow>& rows, const BoundSet& bounds,
                      const ArtifactHeader& header) {
    std::string out = csv_header(header);
    out += "# classical_corrected=" + fmt(bounds.classical_corrected) +
           " quantum_lower=" + fmt(bounds.quantum_lower) +
           " quantum_upper=" + fmt(bounds.quantum_upper) +
           " epsilon_bar=" + fmt(bounds.epsilon_bar) + "\n";
    out += "state,sigma_hat,std_error\n";
    for (const SuiteRow& r : rows) {
        if (r.sampled)
            out += r.label + "," + fmt(r.estimate.sigma_hat) + "," + fmt(r.estimate.std_error) +
                   "\n";
        else
            out += r.label + ",,\n";
    }
    return out;
}

std::string fig4_csv(const std::vector<TracePoint>& trace, const ArtifactHeader& header) {
    std::string out = csv_header(header);
    out += "pulses,sigma_hat,std_error\n";
    for (const TracePoint& t : trace)
        out += std::to_string(t.pulses) + "," + fmt(t.sigma_hat) + "," + fmt(t.std_error) + "\n";
    return out;
}

std::string counts_csv(const std::vector<SuiteRow>& rows, double eta,
                       const ArtifactHeader& header) {
    std::string out = csv_header(header);
    out += "# eta=" + fmt(eta) + "\n";
    out += "state,projector,pulses,detections\n";
    for (const SuiteRow& r : rows)
        for (std::size_t i = 0; i < r.record.n.size(); ++i)
            out += r.label + "," + std::to_string(i + 1) + "," + std::to_string(r.record.n[i]) +
                   "," + std::to_string(r.record.c[i]) + "\n";
    return out;
}

MeasuredCounts read_counts_csv(const std::string& text) {
    MeasuredCounts data;
    bool saw_eta = false;
    bool saw_header = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("eta=");
            if (pos != std::string::npos) {
                try {
                    data.eta = std::stod(line.substr(pos + 4));
                    saw_eta = true;
                } catch (const std::exception&) {
                    throw ParseError("counts csv line " + std::to_string(line_no) +
                                     ": malformed eta");
                }
            }
            continue;
        }
        if (!saw_header) {
            if (line != "state,projector,pulses,detections")
                throw ParseError("counts csv line " + std::to_string(line_no) +
                                 ": expected header state,projector,pulses,detections");
            saw_header = true;
            continue;
        }
        std::istringstream row(line);
        std::string label, proj, pulses, detections;
        if (!std::getline(row, label, ',') || !std::getline(row, proj, ',') ||
            !std::getline(row, pulses, ',') || !std::getline(row, detections))
            throw ParseError("counts csv line " + std::to_string(line_no) + ": expected 4 fields");
        std::size_t projector = 0;
        std::uint64_t n = 0, c = 0;
        try {
            projector = static_cast<std::size_t>(std::stoull(proj));
            n = std::stoull(pulses);
            c = std::stoull(detections);
        } catch (const std::exception&) {
            throw ParseError("counts csv line " + std::to_string(line_no) +
                             ": malformed integer field");
        }
        if (projector < 1)
            throw ParseError("counts csv line " + std::to_string(line_no) +
                             ": projector ids are 1-based");
        if (c > n)
            throw ParseError("counts csv line " + std::to_string(line_no) +
                             ": detections exceed pulses");
        if (data.records.empty() || data.records.back().state_label != label) {
            RunRecord rec;
            rec.state_label = label;
            data.records.push_back(std::move(rec));
        }
        RunRecord& rec = data.records.back();
        if (projector != rec.n.size() + 1)
            throw ParseError("counts csv line " + std::to_string(line_no) +
                             ": projector rows of state '" + label +
                             "' must be contiguous starting at 1");
        rec.n.push_back(n);
        rec.c.push_back(c);
        rec.pulses += n;
    }
    if (!saw_header) throw ParseError("counts csv: missing header row");
    if (!saw_eta) throw ParseError("counts csv: missing '# eta=' line");
    if (data.records.empty()) throw ParseError("counts csv: no data rows");
    if (!(data.eta > 0.0 && data.eta <= 1.0))
        throw ParseError("counts csv: eta must lie in (0, 1]");
    for (RunRecord& rec : data.records) rec.eta = data.eta;
    return data;
}

std::string sdp_result_json(const SdpResult& result) {
    ordered_json j;
    j["value"] = result.value;
    j["primal_bound"] = result.primal_bound;
    j["dual_bound"] = result.dual_bound;
    j["gap"] = result.gap;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["primal_witness"] = matrix_to_json(result.primal_witness);
    ordered_json mult = ordered_json::array();
    for (Eigen::Index i = 0; i < result.dual_multipliers.size(); ++i)
        mult.push_back(result.dual_multipliers(i));
    j["dual_multipliers"] = std::move(mult);
    j["dual_witness"] = matrix_to_json(result.dual_witness);
    return j.dump(2) + "\n";
}

std::string bounds_json(const std::string& set_fingerprint, int alpha,
                        const Rational& noncontextual, const SdpResult& theta,
                        double projector_route, const BoundSet& bounds) {
    ordered_json j;
    j["set_fingerprint"] = set_fingerprint;
    j["alpha"] = alpha;
    j["noncontextual_bound"] = noncontextual.to_string();
    j["theta"] = {{"value", theta.value},
                  {"primal_bound", theta.primal_bound},
                  {"dual_bound", theta.dual_bound},
                  {"gap", theta.gap},
                  {"iterations", theta.iterations},
                  {"converged", theta.converged},
                  {"primal_witness", matrix_to_json(theta.primal_witness)},
                  {"dual_multipliers", theta.dual_multipliers},
                  {"dual_witness", matrix_to_json(theta.dual_witness)}};
    j["projector_route"] = projector_route;
    j["corrected"] = bounds_to_json(bounds);
    return j.dump(2) + "\n";
}

std::string certification_json(const CertificationReport& report) {
    ordered_json j;
    j["verdict"] = to_string(report.verdict);
    j["set_path"] = report.set_path;
    j["set_fingerprint"] = report.set_fingerprint;
    j["data_source"] = report.data_source;
    j["seed"] = report.seed;
    j["pulses"] = report.pulses;
    j["eta"] = report.eta;
    j["noise"] = report.noise;
    j["bounds"] = bounds_to_json(report.bounds);
    ordered_json states = ordered_json::array();
    for (const StateResult& s : report.states) {
        ordered_json js;
        js["label"] = s.label;
        js["sampled"] = s.sampled;
        if (s.sampled) {
            js["sigma_hat"] = s.sigma_hat;
            js["std_error"] = s.std_error;
            js["sigmas_above_classical"] =
                s.std_error > 0.0
                    ? (s.sigma_hat - report.bounds.classical_corrected) / s.std_error
                    : 0.0;
        }
        states.push_back(std::move(js));
    }
    j["states"] = std::move(states);
    return j.dump(2) + "\n";
}

std::string certification_text(const CertificationReport& report) {
    std::ostringstream os;
    os << "certification report\n";
    os << "  set:         " << report.set_path << " (fingerprint " << report.set_fingerprint
       << ")\n";
    os << "  data source: " << report.data_source << "\n";
    os << "  seed:        " << report.seed << "   pulses per state: " << report.pulses
       << "   eta: " << fmt(report.eta) << "   noise: " << report.noise << "\n";
    os << "  bounds (epsilon_bar = " << fmt(report.bounds.epsilon_bar)
       << "): classical <= " << fmt(report.bounds.classical_corrected) << ", quantum in ["
       << fmt(report.bounds.quantum_lower) << ", " << fmt(report.bounds.quantum_upper)
       << "], max " << fmt(report.bounds.sigma_max) << "\n";
    os << "  states:\n";
    for (const StateResult& s : report.states) {
        os << "    " << s.label;
        for (std::size_t pad = s.label.size(); pad < 8; ++pad) os << ' ';
        if (s.sampled)
            os << " sigma_hat = " << fmt(s.sigma_hat) << " +/- " << fmt(s.std_error) << "\n";
        else
            os << " (unsampled)\n";
    }
    os << "verdict: " << to_string(report.verdict) << "\n";
    return os.str();
}

std::string manifest_json(const std::string& command, const std::string& preset,
                          const std::string& set_path, const std::string& set_fingerprint,
                          const ExperimentConfig& cfg,
                          const std::vector<std::string>& outputs,
                          const std::string& timestamp_utc) {
    ordered_json j;
    j["command"] = command;
    if (!preset.empty()) j["preset"] = preset;
    j["set_path"] = set_path;
    j["set_fingerprint"] = set_fingerprint;
    j["config"] = {{"pulses", cfg.pulses},
                   {"eta", cfg.eta},
                   {"noise", cfg.noise.describe()},
                   {"seed", cfg.seed},
                   {"threads", cfg.threads},
                   {"samples_per_pair", cfg.samples_per_pair}};
    j["outputs"] = outputs;
    j["timestamp_utc"] = timestamp_utc;
    return j.dump(2) + "\n";
}

namespace {

/// Converts {"dimension": d, "entries": [[re, im] x d*d]} (row-major) into a
/// validated density matrix; pushes diagnostics instead of throwing.
void parse_density(const nlohmann::json& j, ConfigParse& out) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("entries")) {
        out.errors.push_back("state.density must be {dimension, entries}");
        return;
    }
    if (!j["dimension"].is_number_integer() || !j["entries"].is_array()) {
        out.errors.push_back("state.density: dimension must be an integer, entries an array");
        return;
    }
    const int d = j["dimension"].get<int>();
    if (d < 1 || j["entries"].size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
        out.errors.push_back("state.density: entries must hold dimension^2 [re, im] pairs");
        return;
    }
    Eigen::MatrixXcd m(d, d);
    for (std::size_t k = 0; k < j["entries"].size(); ++k) {
        const auto& e = j["entries"][k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            out.errors.push_back("state.density: entry " + std::to_string(k) +
                                 " is not an [re, im] pair");
            return;
        }
        m(static_cast<Eigen::Index>(k / static_cast<std::size_t>(d)),
          static_cast<Eigen::Index>(k % static_cast<std::size_t>(d))) =
            std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
    try {
        out.cfg.state.source = DensityMatrix(m);
        out.cfg.state.label = "density";
    } catch (const std::exception& e) {
        out.errors.push_back(std::string("state.density: ") + e.what());
    }
}

void parse_state(const nlohmann::json& j, const KsSet& set, ConfigParse& out) {
    if (!j.is_object()) {
        out.errors.push_back("state must be an object");
        return;
    }
    int keys = 0;
    for (const char* k : {"ks_id", "slit", "density", "label"}) keys += j.contains(k) ? 1 : 0;
    if (keys != 1) {
        out.errors.push_back("state must hold exactly one of: ks_id, slit, density, label");
        return;
    }
    for (const auto& item : j.items())
        if (item.key() != "ks_id" && item.key() != "slit" && item.key() != "density" &&
            item.key() != "label")
            out.errors.push_back("state: unknown key '" + item.key() + "'");

    if (j.contains("ks_id")) {
        if (!j["ks_id"].is_number_integer()) {
            out.errors.push_back("state.ks_id must be an integer");
            return;
        }
        const int id = j["ks_id"].get<int>();
        if (id < 1 || id > static_cast<int>(set.vectors.size())) {
            out.errors.push_back("state.ks_id " + std::to_string(id) + " is out of range 1.." +
                                 std::to_string(set.vectors.size()));
            return;
        }
        out.cfg.state.source = id;
        out.cfg.state.label = "KS" + std::to_string(id);
    } else if (j.contains("slit")) {
        const auto& js = j["slit"];
        if (!js.is_object() || !js.contains("t") || !js.contains("phi") ||
            !js["t"].is_array() || !js["phi"].is_array()) {
            out.errors.push_back("state.slit must be {t: [...], phi: [...]}");
            return;
        }
        SlitSpec spec;
        for (const auto& v : js["t"]) {
            if (!v.is_number()) {
                out.errors.push_back("state.slit.t entries must be numbers");
                return;
            }
            spec.transmittance.push_back(v.get<double>());
        }
        for (const auto& v : js["phi"]) {
            if (!v.is_number()) {
                out.errors.push_back("state.slit.phi entries must be numbers");
                return;
            }
            spec.phase.push_back(v.get<double>());
        }
        try {
            slit_state(spec);  // validates shape and positivity
            out.cfg.state.source = std::move(spec);
            out.cfg.state.label = "slit";
        } catch (const std::exception& e) {
            out.errors.push_back(std::string("state.slit: ") + e.what());
        }
    } else if (j.contains("density")) {
        parse_density(j["density"], out);
    } else {
        if (!j["label"].is_string()) {
            out.errors.push_back("state.label must be a string");
            return;
        }
        try {
            out.cfg.state = labeled_state(j["label"].get<std::string>(), set);
        } catch (const std::exception& e) {
            out.errors.push_back(e.what());
        }
    }
}

}  // namespace

ConfigParse parse_experiment_config(const std::string& json_text, const KsSet& set,
                                    const ExperimentConfig& base) {
    ConfigParse out;
    out.cfg = base;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        out.errors.push_back(std::string("invalid JSON: ") + e.what());
        return out;
    }
    if (!j.is_object()) {
        out.errors.push_back("configuration must be a JSON object");
        return out;
    }
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "pulses" && key != "eta" && key != "seed" && key != "threads" &&
            key != "noise" && key != "state" && key != "samples_per_pair")
            out.errors.push_back("unknown key '" + key + "'");
    }
    if (j.contains("pulses")) {
        if (j["pulses"].is_number_unsigned() || (j["pulses"].is_number_integer() &&
                                                 j["pulses"].get<std::int64_t>() >= 0))
            out.cfg.pulses = j["pulses"].get<std::uint64_t>();
        else
            out.errors.push_back("pulses must be a nonnegative integer");
    }
    if (j.contains("eta")) {
        if (j["eta"].is_number() && j["eta"].get<double>() > 0.0 && j["eta"].get<double>() <= 1.0)
            out.cfg.eta = j["eta"].get<double>();
        else
            out.errors.push_back("eta must be a number in (0, 1]");
    }
    if (j.contains("seed")) {
        if (j["seed"].is_number_unsigned() ||
            (j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
            out.cfg.seed = j["seed"].get<std::uint64_t>();
        else
            out.errors.push_back("seed must be a nonnegative integer");
    }
    if (j.contains("threads")) {
        if (j["threads"].is_number_integer() && j["threads"].get<int>() >= 1 &&
            j["threads"].get<int>() <= 256)
            out.cfg.threads = j["threads"].get<int>();
        else
            out.errors.push_back("threads must be an integer in 1..256");
    }
    if (j.contains("samples_per_pair")) {
        if (j["samples_per_pair"].is_number_unsigned() ||
            (j["samples_per_pair"].is_number_integer() &&
             j["samples_per_pair"].get<std::int64_t>() >= 1))
            out.cfg.samples_per_pair = j["samples_per_pair"].get<std::uint64_t>();
        else
            out.errors.push_back("samples_per_pair must be a positive integer");
    }
    if (j.contains("noise")) {
        const auto& jn = j["noise"];
        if (!jn.is_object() || !jn.contains("type") || !jn["type"].is_string()) {
            out.errors.push_back("noise must be an object with a string 'type'");
        } else {
            const std::string type = jn["type"].get<std::string>();
            const auto read_param = [&](const char* name) -> bool {
                if (!jn.contains(name) || !jn[name].is_number()) {
                    out.errors.push_back("noise." + std::string(name) +
                                         " must be a number in [0, 1]");
                    return false;
                }
                const double v = jn[name].get<double>();
                if (!(v >= 0.0 && v <= 1.0)) {
                    out.errors.push_back("noise." + std::string(name) +
                                         " must lie in [0, 1]");
                    return false;
                }
                out.cfg.noise.parameter = v;
                return true;
            };
            if (type == "none") {
                out.cfg.noise.kind = NoiseModel::Kind::none;
            } else if (type == "preparation_white_noise") {
                if (read_param("w")) out.cfg.noise.kind = NoiseModel::Kind::preparation_white_noise;
            } else if (type == "projection_crosstalk") {
                if (read_param("epsilon"))
                    out.cfg.noise.kind = NoiseModel::Kind::projection_crosstalk;
            } else {
                out.errors.push_back("noise.type must be one of: none, "
                                     "preparation_white_noise, projection_crosstalk");
            }
        }
    }
    if (j.contains("state")) parse_state(j["state"], set, out);
    return out;
}

}  // namespace kscert
