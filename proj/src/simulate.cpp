#include "kscert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace kscert {

namespace counter_rng {

namespace {

constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t rand_u64(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(rand_u64(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace counter_rng

std::string NoiseModel::describe() const {
    switch (kind) {
        case Kind::none:
            return "none";
        case Kind::preparation_white_noise:
            return "preparation_white_noise(w=" + std::to_string(parameter) + ")";
        case Kind::projection_crosstalk:
            return "projection_crosstalk(epsilon=" + std::to_string(parameter) + ")";
    }
    return "unknown";
}

DensityMatrix resolve_state(const PreparedState& state, const KsSet& set) {
    struct Visitor {
        const KsSet& set;
        DensityMatrix operator()(int id) const {
            return DensityMatrix::pure(to_unit_vector(set.vector_by_id(id)));
        }
        DensityMatrix operator()(const SlitSpec& spec) const {
            DensityMatrix rho = slit_state(spec);
            if (rho.dimension() != set.dimension)
                throw std::invalid_argument("prepared slit state dimension " +
                                            std::to_string(rho.dimension()) +
                                            " does not match the set dimension");
            return rho;
        }
        DensityMatrix operator()(const DensityMatrix& rho) const {
            if (rho.dimension() != set.dimension)
                throw std::invalid_argument("prepared density matrix dimension " +
                                            std::to_string(rho.dimension()) +
                                            " does not match the set dimension");
            return rho;
        }
    };
    return std::visit(Visitor{set}, state.source);
}

std::vector<double> effective_probabilities(const DensityMatrix& rho, const KsSet& set,
                                            const NoiseModel& noise, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("eta must lie in (0, 1]");
    if (noise.kind != NoiseModel::Kind::none &&
        !(noise.parameter >= 0.0 && noise.parameter <= 1.0))
        throw std::invalid_argument("noise parameter must lie in [0, 1]");

    const DensityMatrix* effective = &rho;
    DensityMatrix noisy = rho;
    if (noise.kind == NoiseModel::Kind::preparation_white_noise) {
        noisy = add_white_noise(rho, noise.parameter);
        effective = &noisy;
    }
    std::vector<double> p(set.vectors.size());
    for (std::size_t i = 0; i < set.vectors.size(); ++i) {
        double q = detection_probability(*effective, set.vectors[i]);
        if (noise.kind == NoiseModel::Kind::projection_crosstalk)
            q = (1.0 - noise.parameter) * q + noise.parameter / set.dimension;
        p[i] = std::clamp(eta * q, 0.0, 1.0);
    }
    return p;
}

namespace {

int require_thread_count(int threads) {
    if (threads < 1 || threads > 256)
        throw std::invalid_argument("threads must be in 1..256, got " +
                                    std::to_string(threads));
    return threads;
}

/// Snapshot grid: 20 points per decade starting at 100, plus the total.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t pulses) {
    std::vector<std::uint64_t> grid;
    if (pulses == 0) return grid;
    for (int j = 0;; ++j) {
        const double value = std::pow(10.0, 2.0 + j / 20.0);
        if (value >= static_cast<double>(pulses)) break;
        const auto point = static_cast<std::uint64_t>(std::llround(value));
        if (point >= pulses) break;
        if (grid.empty() || point > grid.back()) grid.push_back(point);
    }
    grid.push_back(pulses);
    return grid;
}

struct Tally {
    std::vector<std::uint64_t> n, c;
    explicit Tally(std::size_t nv) : n(nv, 0), c(nv, 0) {}
};

/// Processes pulses [lo, hi). Draw 2k selects the projector, draw 2k+1 the
/// detection, both indexed by the absolute pulse number k, so any split of
/// the range yields the same counts.
void tally_range(std::uint64_t seed, std::uint64_t stream, std::uint64_t lo, std::uint64_t hi,
                 const std::vector<double>& p, Tally& out, std::vector<PulseEvent>* log) {
    const auto nv = static_cast<std::uint64_t>(p.size());
    for (std::uint64_t k = lo; k < hi; ++k) {
        const double u1 = counter_rng::uniform01(seed, 2 * stream, k);
        auto idx = static_cast<std::size_t>(u1 * static_cast<double>(nv));
        if (idx >= nv) idx = static_cast<std::size_t>(nv - 1);
        const double u2 = counter_rng::uniform01(seed, 2 * stream + 1, k);
        const bool hit = u2 < p[idx];
        ++out.n[idx];
        out.c[idx] += hit;
        if (log)
            (*log)[k] = PulseEvent{static_cast<std::uint8_t>(idx),
                                   static_cast<std::uint8_t>(hit)};
    }
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, const KsSet& set) {
    const DensityMatrix rho = resolve_state(cfg.state, set);
    const std::vector<double> p = effective_probabilities(rho, set, cfg.noise, cfg.eta);
    const std::size_t nv = p.size();
    const int threads = require_thread_count(cfg.threads);

    RunRecord rec;
    rec.state_label = cfg.state.label;
    rec.pulses = cfg.pulses;
    rec.eta = cfg.eta;
    rec.n.assign(nv, 0);
    rec.c.assign(nv, 0);
    if (cfg.keep_pulse_log) rec.pulse_log.resize(cfg.pulses);
    std::vector<PulseEvent>* log = cfg.keep_pulse_log ? &rec.pulse_log : nullptr;

    std::uint64_t prev = 0;
    for (const std::uint64_t next : checkpoint_grid(cfg.pulses)) {
        const std::uint64_t span = next - prev;
        if (threads == 1 || span < 2048) {
            Tally t(nv);
            tally_range(cfg.seed, cfg.stream, prev, next, p, t, log);
            for (std::size_t i = 0; i < nv; ++i) {
                rec.n[i] += t.n[i];
                rec.c[i] += t.c[i];
            }
        } else {
            const auto tn = static_cast<std::uint64_t>(threads);
            std::vector<Tally> parts(static_cast<std::size_t>(threads), Tally(nv));
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads));
            for (std::uint64_t q = 0; q < tn; ++q) {
                const std::uint64_t lo = prev + span * q / tn;
                const std::uint64_t hi = prev + span * (q + 1) / tn;
                pool.emplace_back([&, lo, hi, q] {
                    tally_range(cfg.seed, cfg.stream, lo, hi, p, parts[q], log);
                });
            }
            for (std::thread& th : pool) th.join();
            // Merge in fixed thread order; integer sums keep this exact.
            for (const Tally& t : parts)
                for (std::size_t i = 0; i < nv; ++i) {
                    rec.n[i] += t.n[i];
                    rec.c[i] += t.c[i];
                }
        }
        rec.checkpoints.push_back(CountCheckpoint{next, rec.n, rec.c});
        prev = next;
    }
    return rec;
}

namespace {

SigmaEstimate estimate_from_counts(const std::vector<std::uint64_t>& n,
                                   const std::vector<std::uint64_t>& c, double eta) {
    double total = 0.0, variance = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double denom = eta * static_cast<double>(n[i]);
        total += static_cast<double>(c[i]) / denom;
        variance += static_cast<double>(c[i]) / (denom * denom);
    }
    return SigmaEstimate{2.0 * total, 2.0 * std::sqrt(variance)};
}

}  // namespace

SigmaEstimate estimate_sigma(const RunRecord& record, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("estimate_sigma: eta must lie in (0, 1]");
    if (record.n.empty())
        throw InsufficientSampling("estimate_sigma: record holds no projectors");
    for (std::size_t i = 0; i < record.n.size(); ++i)
        if (record.n[i] == 0)
            throw InsufficientSampling("estimate_sigma: projector " + std::to_string(i + 1) +
                                       " received no pulses");
    return estimate_from_counts(record.n, record.c, eta);
}

std::vector<TracePoint> convergence_trace(const RunRecord& record, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("convergence_trace: eta must lie in (0, 1]");
    std::vector<TracePoint> trace;
    for (const CountCheckpoint& ck : record.checkpoints) {
        if (std::any_of(ck.n.begin(), ck.n.end(), [](std::uint64_t v) { return v == 0; }))
            continue;
        const SigmaEstimate est = estimate_from_counts(ck.n, ck.c, eta);
        trace.push_back(TracePoint{ck.pulses, est.sigma_hat, est.std_error});
    }
    return trace;
}

ExclusivityReport run_exclusivity_tests(const ExperimentConfig& cfg, const KsSet& set) {
    if (cfg.samples_per_pair == 0)
        throw std::invalid_argument("run_exclusivity_tests: samples_per_pair must be positive");
    // Ordered orthogonal pairs in (source, probe) lexicographic order.
    struct Pair {
        int i, j;  // 0-based indices
    };
    std::vector<Pair> pairs;
    const int n = static_cast<int>(set.vectors.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j &&
                inner_product_exact(set.vectors[static_cast<std::size_t>(i)],
                                    set.vectors[static_cast<std::size_t>(j)])
                    .is_zero())
                pairs.push_back(Pair{i, j});

    // Detection probability of probe j when vector i was prepared.
    std::vector<double> prob(pairs.size());
    {
        std::vector<std::vector<double>> per_source(static_cast<std::size_t>(n));
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            auto& row = per_source[static_cast<std::size_t>(pairs[q].i)];
            if (row.empty()) {
                const DensityMatrix rho = DensityMatrix::pure(
                    to_unit_vector(set.vectors[static_cast<std::size_t>(pairs[q].i)]));
                row = effective_probabilities(rho, set, cfg.noise, cfg.eta);
            }
            prob[q] = row[static_cast<std::size_t>(pairs[q].j)];
        }
    }

    // Pair q draws from stream kPairStreamBase + q; the offset keeps these
    // streams disjoint from the per-run streams used by run_experiment.
    constexpr std::uint64_t kPairStreamBase = std::uint64_t{1} << 32;
    std::vector<std::uint64_t> detections(pairs.size(), 0);
    const auto count_pair = [&](std::size_t q) {
        std::uint64_t c = 0;
        for (std::uint64_t k = 0; k < cfg.samples_per_pair; ++k)
            c += counter_rng::uniform01(cfg.seed, kPairStreamBase + q, k) < prob[q];
        detections[q] = c;
    };
    const int threads = require_thread_count(cfg.threads);
    if (threads == 1 || pairs.size() < 2) {
        for (std::size_t q = 0; q < pairs.size(); ++q) count_pair(q);
    } else {
        std::vector<std::thread> pool;
        const std::size_t tn = std::min<std::size_t>(static_cast<std::size_t>(threads),
                                                     pairs.size());
        for (std::size_t t = 0; t < tn; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t q = t; q < pairs.size(); q += tn) count_pair(q);
            });
        for (std::thread& th : pool) th.join();
    }

    ExclusivityReport report;
    std::vector<std::uint64_t> src_c(static_cast<std::size_t>(n), 0);
    std::vector<std::uint64_t> src_n(static_cast<std::size_t>(n), 0);
    std::uint64_t all_c = 0, all_n = 0;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        report.pairs.push_back(PairResult{pairs[q].i + 1, pairs[q].j + 1, cfg.samples_per_pair,
                                          detections[q]});
        src_c[static_cast<std::size_t>(pairs[q].i)] += detections[q];
        src_n[static_cast<std::size_t>(pairs[q].i)] += cfg.samples_per_pair;
        all_c += detections[q];
        all_n += cfg.samples_per_pair;
    }
    for (int i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        if (src_n[si] == 0) continue;  // isolated vertex: no orthogonal partner
        const double denom = cfg.eta * static_cast<double>(src_n[si]);
        report.by_source.push_back(SourceEpsilon{
            i + 1, static_cast<double>(src_c[si]) / denom,
            std::sqrt(static_cast<double>(src_c[si])) / denom});
    }
    if (all_n > 0) {
        const double denom = cfg.eta * static_cast<double>(all_n);
        report.epsilon_bar = static_cast<double>(all_c) / denom;
        report.std_error = std::sqrt(static_cast<double>(all_c)) / denom;
    }
    return report;
}

PreparedState labeled_state(const std::string& label, const KsSet& set) {
    PreparedState ps;
    ps.label = label;
    if (label == "phi1") {
        const auto d = static_cast<std::size_t>(set.dimension);
        ps.source = SlitSpec{std::vector<double>(d, 1.0), std::vector<double>(d, 0.0)};
        return ps;
    }
    if (label == "phi2") {
        if (set.dimension != 6)
            throw std::invalid_argument("labeled_state: phi2 is defined for dimension 6");
        ps.source = SlitSpec{{1.0, 0.0, 0.0, 0.0, 1.0, 0.0},
                             {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
        return ps;
    }
    if (label == "mixed") {
        ps.source = DensityMatrix::maximally_mixed(set.dimension);
        return ps;
    }
    if (label == "KS9w30") {
        ps.source =
            add_white_noise(DensityMatrix::pure(to_unit_vector(set.vector_by_id(9))), 0.30);
        return ps;
    }
    if (label.size() > 2 && label.rfind("KS", 0) == 0) {
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(label.substr(2), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == label.size() - 2 && id >= 1 && id <= static_cast<int>(set.vectors.size())) {
            ps.source = id;
            return ps;
        }
    }
    throw std::invalid_argument("labeled_state: unknown state label '" + label + "'");
}

std::vector<SuiteRow> state_independence_suite(const ExperimentConfig& base, const KsSet& set,
                                               SuiteSelection selection) {
    std::vector<PreparedState> plan;
    if (selection != SuiteSelection::auxiliary)
        for (const KsVector& v : set.vectors)
            plan.push_back(labeled_state("KS" + std::to_string(v.id), set));
    if (selection != SuiteSelection::ks_vectors) {
        if (set.profile != "ks21")
            throw std::invalid_argument(
                "state_independence_suite: the auxiliary states require the ks21 profile");
        for (const char* label : {"phi1", "phi2", "mixed", "KS9w30", "KS9"})
            plan.push_back(labeled_state(label, set));
    }

    std::vector<SuiteRow> rows;
    rows.reserve(plan.size());
    for (std::size_t k = 0; k < plan.size(); ++k) {
        ExperimentConfig cfg = base;
        cfg.state = plan[k];
        cfg.stream = k;
        SuiteRow row;
        row.label = plan[k].label;
        row.record = run_experiment(cfg, set);
        row.sampled = !row.record.n.empty() &&
                      std::none_of(row.record.n.begin(), row.record.n.end(),
                                   [](std::uint64_t v) { return v == 0; });
        if (row.sampled) row.estimate = estimate_sigma(row.record, cfg.eta);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace kscert
