#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "vmpo/gatelib.hpp"
#include "vmpo/metrics.hpp"
#include "vmpo/optimizer.hpp"

using namespace vmpo;

namespace {

ComplexMatrix noisy_unitary(Eigen::Index dim, std::uint64_t seed) {
    return haar_random_unitary(dim, seed) +
           0.2 * haar_random_unitary(dim, mix_seed(seed, 1));
}

}  // namespace

TEST_CASE("frobenius_cost matches its definition") {
    const ComplexMatrix a = noisy_unitary(4, 2);
    const ComplexMatrix b = noisy_unitary(4, 3);
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) direct += std::norm(a(i, j) - b(i, j));
    CHECK(frobenius_cost(a, b) == doctest::Approx(direct).epsilon(1e-13));
    CHECK_THROWS_AS(frobenius_cost(a, ComplexMatrix::Identity(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("gap formulas follow their closed forms") {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
        const ComplexMatrix t = noisy_unitary(6, seed);
        const ComplexMatrix s = noisy_unitary(6, mix_seed(seed, 2));
        const double cost = frobenius_cost(t, s);

        const double nf_t = frobenius_norm_sq(t);
        const double nf_s = frobenius_norm_sq(s);
        CHECK(gap_frobenius(cost, t, s) ==
              doctest::Approx(cost / (nf_t + nf_s)).epsilon(1e-13));
        CHECK(gap_frobenius_renormalized(cost, t, s) ==
              doctest::Approx(cost / std::pow(std::sqrt(nf_t) + std::sqrt(nf_s), 2))
                  .epsilon(1e-13));

        const double s2 = spectral_norm(t - s);
        CHECK(gap_pnorm(t, s) ==
              doctest::Approx(s2 * s2 /
                              std::pow(spectral_norm(t) + spectral_norm(s), 2))
                  .epsilon(1e-13));
    }
}

TEST_CASE("unitary pairs satisfy the renormalized identity and p-norm denominator 4") {
    for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
        const ComplexMatrix t = haar_random_unitary(8, seed);
        const ComplexMatrix s = haar_random_unitary(8, mix_seed(seed, 9));
        const double cost = frobenius_cost(t, s);
        // Equal Frobenius norms make the renormalized gap exactly half.
        CHECK(std::abs(gap_frobenius_renormalized(cost, t, s) -
                       gap_frobenius(cost, t, s) / 2.0) < 1e-12);
        // Spectral norm of a unitary is 1, so the denominator is 4.
        const double d = spectral_norm(t - s);
        CHECK(gap_pnorm(t, s) == doctest::Approx(d * d / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("norm inequalities and ranges hold on random pairs") {
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(i);
        const ComplexMatrix t = noisy_unitary(4, seed);
        const ComplexMatrix s = noisy_unitary(4, mix_seed(seed, 4));
        // Spectral norm is dominated by the Frobenius norm.
        CHECK(spectral_norm(t) <= std::sqrt(frobenius_norm_sq(t)) + 1e-12);
        // Triangle inequality for the spectral norm.
        CHECK(spectral_norm(t + s) <= spectral_norm(t) + spectral_norm(s) + 1e-12);
        // Triangle-inequality normalizations stay inside [0, 1]; the
        // squared-norm denominator admits up to 2 (anti-aligned pair).
        const double cost = frobenius_cost(t, s);
        const double gf = gap_frobenius(cost, t, s);
        const double gp = gap_pnorm(t, s);
        const double gr = gap_frobenius_renormalized(cost, t, s);
        for (double g : {gf, gp, gr}) CHECK(g >= 0.0);
        CHECK(gp <= 1.0 + 1e-12);
        CHECK(gr <= 1.0 + 1e-12);
        CHECK(gf <= 2.0 + 1e-12);
        // (a+b)^2 >= a^2+b^2 >= (a+b)^2/2 sandwiches the two Frobenius
        // normalizations.
        CHECK(gr <= gf + 1e-12);
        CHECK(gf <= 2.0 * gr + 1e-12);
    }
}

TEST_CASE("restart_stats_from_costs skips aborted restarts") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<double> costs = {4.0, 2.0, nan, 6.0};
    const RestartStats stats = restart_stats_from_costs(costs, 8.0);
    CHECK(stats.count == 3);
    CHECK(stats.best == doctest::Approx(0.25));        // 2/8
    CHECK(stats.mean == doctest::Approx(0.5));         // (0.5+0.25+0.75)/3
    const double expected_sd =
        std::sqrt(((0.5 - 0.5) * (0.5 - 0.5) + (0.25 - 0.5) * (0.25 - 0.5) +
                   (0.75 - 0.5) * (0.75 - 0.5)) /
                  3.0);
    CHECK(stats.stddev == doctest::Approx(expected_sd).epsilon(1e-13));

    CHECK_THROWS_AS(restart_stats_from_costs({}, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(restart_stats_from_costs({nan}, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(restart_stats_from_costs(costs, 0.0), std::invalid_argument);
}

TEST_CASE("make_gap_report assembles a consistent frobenius report") {
    GateSpec spec;
    spec.kind = GateKind::cz;
    spec.shape = SystemShape{2, 2, 2};
    const ComplexMatrix target = embed_with_ancilla(build_gate(spec), 2);

    OptimizerConfig cfg;
    cfg.restarts = 3;
    cfg.seed = 8;
    const OptimizeResult result = optimize_frobenius(target, spec.shape, cfg);
    const ComplexMatrix seq = contract_to_dense(result.mpo);

    const GapReport report =
        make_gap_report("test", "CZ", spec.shape, Metric::frobenius, target, seq,
                        result, config_digest(cfg));
    CHECK(report.experiment == "test");
    CHECK(report.gate == "CZ");
    CHECK(report.metric == "frobenius");
    CHECK(report.cost_frobenius == doctest::Approx(result.best_cost).epsilon(1e-9));
    CHECK(report.gap_frobenius ==
          doctest::Approx(result.best_cost / 16.0).epsilon(1e-9));
    CHECK(report.gap_frobenius_renorm ==
          doctest::Approx(report.gap_frobenius / 2.0).epsilon(1e-12));
    CHECK(!report.cost_pnorm.has_value());
    CHECK(!report.gap_pnorm.has_value());
    CHECK(report.target_norm_f_sq == doctest::Approx(8.0));
    CHECK(report.seq_norm_f_sq == doctest::Approx(8.0));
    CHECK(report.restarts.count == 3);
    CHECK(report.restarts.best ==
          doctest::Approx(report.gap_frobenius).epsilon(1e-9));
    CHECK(report.converged == result.trace.converged);
    CHECK(report.config_digest == config_digest(cfg));
}

TEST_CASE("p-norm reports carry restart statistics in gap units") {
    const SystemShape shape{2, 2, 2};
    const SequentialMPO planted = random_mpo(shape, 55);
    const ComplexMatrix target = contract_to_dense(planted);
    OptimizerConfig cfg;
    cfg.metric = Metric::pnorm2;
    cfg.restarts = 2;
    cfg.seed = 4;
    cfg.max_sweeps = 60;
    const OptimizeResult result = optimize_pnorm(target, shape, cfg);
    const ComplexMatrix seq = contract_to_dense(result.mpo);
    const GapReport report =
        make_gap_report("test", "PLANTED", shape, Metric::pnorm2, target, seq, result,
                        config_digest(cfg));
    REQUIRE(report.cost_pnorm.has_value());
    REQUIRE(report.gap_pnorm.has_value());
    CHECK(*report.cost_pnorm == doctest::Approx(result.best_cost).epsilon(1e-9));
    // Headline value is the mean over restarts.
    CHECK(*report.gap_pnorm == doctest::Approx(report.restarts.mean).epsilon(1e-12));
    CHECK(report.restarts.count == 2);
    // Frobenius fields are still filled from the actual pair.
    CHECK(report.cost_frobenius ==
          doctest::Approx(frobenius_cost(target, seq)).epsilon(1e-9));
}

TEST_CASE("config digests are stable and configuration-sensitive") {
    OptimizerConfig a;
    OptimizerConfig b;
    CHECK(config_digest(a) == config_digest(b));
    b.restarts = 7;
    CHECK(config_digest(a) != config_digest(b));
    b = a;
    b.metric = Metric::pnorm2;
    CHECK(config_digest(a) != config_digest(b));
    b = a;
    b.seed = 2;
    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a).size() == 16);  // 64-bit hex
}

TEST_CASE("gap reports round-trip through JSON and CSV") {
    GapReport report;
    report.experiment = "table1";
    report.gate = "CNOT";
    report.shape = SystemShape{2, 4, 2};
    report.metric = "pnorm2";
    report.cost_frobenius = 4.6863;
    report.gap_frobenius = 0.29289;
    report.gap_frobenius_renorm = 0.146445;
    report.cost_pnorm = 0.592;
    report.gap_pnorm = 0.148;
    report.target_norm_f_sq = 16.0;
    report.seq_norm_f_sq = 16.0;
    report.restarts = RestartStats{0.1464, 0.1480, 0.002, 10};
    report.converged = true;
    report.sweeps_used = 212;
    report.config_digest = "0123456789abcdef";

    const std::string text = gap_report_to_json_string(report);
    const GapReport back = gap_report_from_json_string(text);
    CHECK(back == report);

    SUBCASE("absent optionals stay absent") {
        report.cost_pnorm.reset();
        report.gap_pnorm.reset();
        const GapReport fr = gap_report_from_json_string(gap_report_to_json_string(report));
        CHECK(fr == report);
        CHECK(!fr.cost_pnorm.has_value());
    }

    SUBCASE("CSV header and row have matching field counts") {
        const std::string header = gap_report_csv_header();
        const std::string row = gap_report_csv_row(report);
        const auto count_fields = [](const std::string& line) {
            std::size_t n = 1;
            for (char c : line)
                if (c == ',') ++n;
            return n;
        };
        CHECK(count_fields(header) == count_fields(row));
        CHECK(row.find("CNOT") != std::string::npos);
        CHECK(row.find("pnorm2") != std::string::npos);
    }

    SUBCASE("malformed JSON throws") {
        CHECK_THROWS_AS(gap_report_from_json_string("{"), std::invalid_argument);
        CHECK_THROWS_AS(gap_report_from_json_string("{\"gate\": \"X\"}"),
                        std::invalid_argument);
    }
}
