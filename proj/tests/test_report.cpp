#include "kscert/report.hpp"

#include "test_helpers.hpp"

#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace kscert;
using kscert_test::shipped_set;

namespace {

StateResult state(const std::string& label, double sigma_hat, double err = 0.01) {
    return {label, true, sigma_hat, err};
}

std::vector<SuiteRow> tiny_suite(const KsSet& set, std::uint64_t pulses = 3'000) {
    ExperimentConfig cfg;
    cfg.pulses = pulses;
    cfg.seed = 5;
    return state_independence_suite(cfg, set, SuiteSelection::auxiliary);
}

}  // namespace

TEST_CASE("verdict rule") {
    const BoundSet b = corrected_bounds(0.0151);

    SUBCASE("clear violations in the quantum band confirm") {
        const std::vector<StateResult> states{state("a", 7.00), state("b", 6.98),
                                              state("c", 7.03)};
        CHECK(decide_verdict(states, b) == Verdict::quantum_d6_confirmed);
    }
    SUBCASE("values at the classical ceiling are classical") {
        const std::vector<StateResult> states{state("a", 6.0), state("b", 5.5),
                                              state("c", 6.5436)};
        CHECK(decide_verdict(states, b) == Verdict::classical_compatible);
    }
    SUBCASE("above classical but below the quantum band is inconclusive") {
        // 6.7 - 0.03 > 6.5436, yet 6.7 < 6.8943 - 0.03
        CHECK(decide_verdict({state("a", 6.7)}, b) == Verdict::inconclusive);
    }
    SUBCASE("a mix of classical and quantum states is inconclusive") {
        CHECK(decide_verdict({state("a", 7.0), state("b", 6.0)}, b) ==
              Verdict::inconclusive);
    }
    SUBCASE("no states, no verdict") {
        CHECK(decide_verdict({}, b) == Verdict::inconclusive);
    }
    SUBCASE("an unsampled state blocks any verdict") {
        std::vector<StateResult> states{state("a", 7.0)};
        states.push_back({"b", false, 0.0, 0.0});
        CHECK(decide_verdict(states, b) == Verdict::inconclusive);
    }
    SUBCASE("a state exactly at classical + 3 errors stays classical") {
        const double at_edge = b.classical_corrected + 3.0 * 0.01;
        CHECK(decide_verdict({state("a", at_edge)}, b) == Verdict::classical_compatible);
    }
    SUBCASE("values above the widened quantum band are inconclusive") {
        CHECK(decide_verdict({state("a", 8.0)}, b) == Verdict::inconclusive);
    }

    CHECK(to_string(Verdict::quantum_d6_confirmed) == "QUANTUM_D6_CONFIRMED");
    CHECK(to_string(Verdict::classical_compatible) == "CLASSICAL_COMPATIBLE");
    CHECK(to_string(Verdict::inconclusive) == "INCONCLUSIVE");
}

TEST_CASE("fnv1a64 matches the published reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("csv artifacts: schema, embedded provenance, determinism") {
    const KsSet set = shipped_set();
    const std::vector<SuiteRow> rows = tiny_suite(set);
    const ArtifactHeader header{"00ff00ff00ff00ff", 5};
    const BoundSet bounds = corrected_bounds(0.0151);

    SUBCASE("suite csv") {
        const std::string text = suite_csv(rows, bounds, header);
        CHECK(text.find("# set=00ff00ff00ff00ff seed=5\n") == 0);
        CHECK(text.find("state,sigma_hat,std_error\n") != std::string::npos);
        CHECK(text.find("classical_corrected=6.5436") != std::string::npos);
        CHECK(text.find("phi1,") != std::string::npos);
        CHECK(suite_csv(rows, bounds, header) == text);  // deterministic
    }
    SUBCASE("suite csv leaves unsampled rows empty") {
        std::vector<SuiteRow> broken = rows;
        broken[2].sampled = false;
        const std::string text = suite_csv(broken, bounds, header);
        CHECK(text.find("mixed,,\n") != std::string::npos);
    }
    SUBCASE("counts csv") {
        const std::string text = counts_csv(rows, 1.0, header);
        CHECK(text.find("# set=00ff00ff00ff00ff seed=5\n") == 0);
        CHECK(text.find("# eta=1\n") != std::string::npos);
        CHECK(text.find("state,projector,pulses,detections\n") != std::string::npos);
        CHECK(text.find("phi1,1,") != std::string::npos);
        CHECK(text.find("KS9w30,21,") != std::string::npos);
    }
    SUBCASE("trace csv") {
        ExperimentConfig cfg;
        cfg.pulses = 5'000;
        cfg.seed = 4;
        const RunRecord rec = run_experiment(cfg, set);
        const std::string text = fig4_csv(convergence_trace(rec, 1.0), header);
        CHECK(text.find("pulses,sigma_hat,std_error\n") != std::string::npos);
        CHECK(text.find("5000,") != std::string::npos);
    }
    SUBCASE("pair csv") {
        ExperimentConfig cfg;
        cfg.seed = 5;
        cfg.samples_per_pair = 500;
        const ExclusivityReport rep = run_exclusivity_tests(cfg, set);
        const std::string text = fig2_csv(rep, header);
        CHECK(text.find("# set=00ff00ff00ff00ff seed=5\n") == 0);
        CHECK(text.find("epsilon_bar=") != std::string::npos);
        CHECK(text.find("state,epsilon,std_error\n") != std::string::npos);
        CHECK(std::count(text.begin(), text.end(), '\n') == 24);  // 3 header + 21 rows
    }
}

TEST_CASE("counts csv round-trips through the reader") {
    const KsSet set = shipped_set();
    const std::vector<SuiteRow> rows = tiny_suite(set);
    const ArtifactHeader header{"0123456789abcdef", 5};
    const std::string text = counts_csv(rows, 0.75, header);

    const MeasuredCounts mc = read_counts_csv(text);
    CHECK(mc.eta == doctest::Approx(0.75).epsilon(1e-12));
    REQUIRE(mc.records.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(mc.records[i].state_label == rows[i].label);
        CHECK(mc.records[i].n == rows[i].record.n);
        CHECK(mc.records[i].c == rows[i].record.c);
        CHECK(mc.records[i].pulses == rows[i].record.pulses);
        CHECK(mc.records[i].eta == doctest::Approx(0.75).epsilon(1e-12));
    }
}

TEST_CASE("counts csv reader rejects corrupt input") {
    const std::string good =
        "# set=x seed=1\n# eta=0.5\nstate,projector,pulses,detections\n"
        "a,1,100,3\na,2,100,0\n";
    CHECK(read_counts_csv(good).records.size() == 1);

    SUBCASE("missing header") {
        CHECK_THROWS_AS(read_counts_csv("a,1,100,3\n"), ParseError);
    }
    SUBCASE("detections above pulses") {
        CHECK_THROWS_AS(read_counts_csv("# eta=1\nstate,projector,pulses,detections\n"
                                        "a,1,100,101\n"),
                        ParseError);
    }
    SUBCASE("non-contiguous projector ids") {
        CHECK_THROWS_AS(read_counts_csv("# eta=1\nstate,projector,pulses,detections\n"
                                        "a,1,100,1\na,3,100,1\n"),
                        ParseError);
    }
    SUBCASE("eta outside (0, 1]") {
        CHECK_THROWS_AS(read_counts_csv("# eta=0\nstate,projector,pulses,detections\n"
                                        "a,1,100,1\n"),
                        ParseError);
    }
    SUBCASE("malformed row") {
        CHECK_THROWS_AS(read_counts_csv("# eta=1\nstate,projector,pulses,detections\n"
                                        "a,1,100\n"),
                        ParseError);
    }
    SUBCASE("a body with no data rows is rejected") {
        CHECK_THROWS_AS(read_counts_csv("# eta=1\nstate,projector,pulses,detections\n"),
                        ParseError);
    }
}

TEST_CASE("json artifacts parse and carry the advertized keys") {
    const KsSet set = shipped_set();

    SUBCASE("semidefinite result") {
        const SdpResult r = quantum_bound(set);
        const nlohmann::json j = nlohmann::json::parse(sdp_result_json(r));
        CHECK(j.at("converged").get<bool>());
        CHECK(j.at("value").get<double>() == doctest::Approx(7.0).epsilon(1e-6));
        CHECK(j.at("primal_witness").size() == 21);
        CHECK(j.at("dual_multipliers").size() == 106);
    }
    SUBCASE("bounds document") {
        const SdpResult r = quantum_bound(set);
        const std::string text = bounds_json(
            "0123456789abcdef", 3, Rational(6), r, 7.0, corrected_bounds(0.0151));
        const nlohmann::json j = nlohmann::json::parse(text);
        CHECK(j.at("set_fingerprint") == "0123456789abcdef");
        CHECK(j.at("alpha") == 3);
        CHECK(j.at("noncontextual_bound") == "6");
        CHECK(j.at("corrected").at("classical_corrected").get<double>() ==
              doctest::Approx(6.5436).epsilon(1e-12));
        CHECK(j.at("theta").at("gap").get<double>() < 1e-6);
    }
    SUBCASE("certification document and text") {
        CertificationReport rep;
        rep.set_path = "data/x.json";
        rep.set_fingerprint = "deadbeefdeadbeef";
        rep.seed = 7;
        rep.pulses = 1000;
        rep.eta = 1.0;
        rep.noise = "none";
        rep.data_source = "simulation";
        rep.bounds = corrected_bounds(0.0151);
        rep.states = {state("KS1", 7.01, 0.02), state("phi1", 6.99, 0.02)};
        rep.verdict = decide_verdict(rep.states, rep.bounds);

        const nlohmann::json j = nlohmann::json::parse(certification_json(rep));
        CHECK(j.at("verdict") == "QUANTUM_D6_CONFIRMED");
        CHECK(j.at("set_fingerprint") == "deadbeefdeadbeef");
        CHECK(j.at("states").size() == 2);
        CHECK(j.at("states")[0].at("sigmas_above_classical").get<double>() > 20.0);

        const std::string text = certification_text(rep);
        CHECK(text.find("QUANTUM_D6_CONFIRMED") != std::string::npos);
        CHECK(text.find("KS1") != std::string::npos);
        CHECK(text.find("deadbeefdeadbeef") != std::string::npos);
    }
    SUBCASE("manifest") {
        ExperimentConfig cfg;
        cfg.seed = 9;
        const nlohmann::json j = nlohmann::json::parse(manifest_json(
            "simulate", "fig4", "data/x.json", "abcd", cfg, {"out/fig4.csv"},
            "2026-01-01T00:00:00Z"));
        CHECK(j.at("command") == "simulate");
        CHECK(j.at("preset") == "fig4");
        CHECK(j.at("outputs")[0] == "out/fig4.csv");
        CHECK(j.at("config").at("seed") == 9);
        CHECK(j.at("timestamp_utc") == "2026-01-01T00:00:00Z");
    }
}

TEST_CASE("experiment configuration parsing") {
    const KsSet set = shipped_set();

    SUBCASE("full valid configuration") {
        const ConfigParse p = parse_experiment_config(R"({
            "pulses": 5000,
            "eta": 0.8,
            "seed": 11,
            "threads": 2,
            "samples_per_pair": 900,
            "noise": {"type": "projection_crosstalk", "epsilon": 0.02},
            "state": {"ks_id": 4}
        })", set);
        REQUIRE(p.errors.empty());
        CHECK(p.cfg.pulses == 5000);
        CHECK(p.cfg.eta == doctest::Approx(0.8).epsilon(1e-15));
        CHECK(p.cfg.seed == 11);
        CHECK(p.cfg.threads == 2);
        CHECK(p.cfg.samples_per_pair == 900);
        CHECK(p.cfg.noise.kind == NoiseModel::Kind::projection_crosstalk);
        CHECK(p.cfg.noise.parameter == doctest::Approx(0.02).epsilon(1e-15));
        CHECK(p.cfg.state.label == "KS4");
    }
    SUBCASE("slit state") {
        const ConfigParse p = parse_experiment_config(R"({
            "state": {"slit": {"t": [1,0,0,0,1,0], "phi": [0,0,0,0,0,0]}}
        })", set);
        REQUIRE(p.errors.empty());
        CHECK(p.cfg.state.label == "slit");
        const DensityMatrix rho = resolve_state(p.cfg.state, set);
        CHECK(std::abs(rho.matrix()(0, 0).real() - 0.5) < 1e-14);
    }
    SUBCASE("density state") {
        std::string entries = "[";
        for (int i = 0; i < 36; ++i) {
            const bool diag = i % 7 == 0;
            entries += std::string("[") + (diag ? "0.16666666666666666" : "0") + ",0]";
            if (i != 35) entries += ",";
        }
        entries += "]";
        const ConfigParse p = parse_experiment_config(
            R"({"state": {"density": {"dimension": 6, "entries": )" + entries + "}}}", set);
        REQUIRE(p.errors.empty());
        const DensityMatrix rho = resolve_state(p.cfg.state, set);
        CHECK((rho.matrix() - DensityMatrix::maximally_mixed(6).matrix())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    SUBCASE("label state") {
        const ConfigParse p =
            parse_experiment_config(R"({"state": {"label": "KS9w30"}})", set);
        REQUIRE(p.errors.empty());
        CHECK(p.cfg.state.label == "KS9w30");
    }
    SUBCASE("the base carries preset defaults that the file can override") {
        ExperimentConfig base;
        base.seed = 42;
        base.pulses = 777;
        const ConfigParse p = parse_experiment_config(R"({"pulses": 100})", set, base);
        REQUIRE(p.errors.empty());
        CHECK(p.cfg.seed == 42);     // untouched
        CHECK(p.cfg.pulses == 100);  // overridden
    }
    SUBCASE("every violation is reported, not just the first") {
        const ConfigParse p = parse_experiment_config(R"({
            "pulses": -1,
            "eta": 2.0,
            "bogus": true,
            "noise": {"type": "sparkle"},
            "state": {"ks_id": 99}
        })", set);
        CHECK(p.errors.size() == 5);
    }
    SUBCASE("state must pick exactly one source") {
        const ConfigParse both = parse_experiment_config(
            R"({"state": {"ks_id": 1, "label": "phi1"}})", set);
        CHECK_FALSE(both.errors.empty());
        const ConfigParse none = parse_experiment_config(R"({"state": {}})", set);
        CHECK_FALSE(none.errors.empty());
    }
    SUBCASE("invalid JSON is one clear error") {
        const ConfigParse p = parse_experiment_config("{nope", set);
        REQUIRE(p.errors.size() == 1);
        CHECK(p.errors[0].find("invalid JSON") != std::string::npos);
    }
}
