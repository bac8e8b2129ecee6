#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "core/errors.hpp"
#include "core/sampling.hpp"
#include "support/oracles.hpp"
#include "support/reference_values.hpp"

using ordexp::EstimatorId;
using ordexp::LinexShape;
using ordexp::Scenario;
using ordexp::SubStream;

namespace {

Scenario basic_scenario(std::uint64_t reps, std::uint64_t seed,
                        double p = 0.5) {
    return Scenario::zero_location({3, 5}, {0.5, 1.0}, LinexShape(p), reps,
                                   seed);
}

}  // namespace

TEST_SUITE("sampling") {
    TEST_CASE("scenario validation") {
        CHECK_THROWS_AS(Scenario::zero_location({3, 5}, {1.0, 0.5},
                                                LinexShape(0.5), 10, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(Scenario::zero_location({3, 5}, {0.0, 1.0},
                                                LinexShape(0.5), 10, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(Scenario::zero_location({3}, {1.0}, LinexShape(0.5),
                                                10, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(Scenario::zero_location({3, 5}, {0.5, 1.0},
                                                LinexShape(0.5), 0, 1),
                        std::invalid_argument);
    }

    TEST_CASE("sample_population determinism and moments") {
        SubStream a(123u, 5);
        SubStream b(123u, 5);
        const auto xs = ordexp::sample_population(2.0, 3.0, 1000, a);
        const auto ys = ordexp::sample_population(2.0, 3.0, 1000, b);
        CHECK(xs == ys);

        SubStream big(9001u, 0);
        const auto draws = ordexp::sample_population(2.0, 3.0, 1000000, big);
        double sum = 0.0;
        for (double x : draws) {
            CHECK(x >= 2.0);
            sum += x;
        }
        const double mean = sum / static_cast<double>(draws.size());
        CHECK(std::abs(mean - 5.0) < 4.0 * 3.0 / 1000.0);
    }

    TEST_CASE("sample minimum follows the order-statistic law") {
        // min of n exponentials is exponential with scale sigma/n
        SubStream stream(4242u, 0);
        const int reps = 20000;
        const int n = 20;
        double sum_min = 0.0;
        for (int r = 0; r < reps; ++r) {
            const auto xs = ordexp::sample_population(1.0, 2.0, n, stream);
            double mn = xs[0];
            for (double x : xs) {
                mn = std::min(mn, x);
            }
            sum_min += mn;
        }
        const double mean_min = sum_min / reps;
        const double expected = 1.0 + 2.0 / n;
        const double se = (2.0 / n) / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(mean_min - expected) < 4.0 * se);
    }

    TEST_CASE("risk estimates are bit-identical across runs and threads") {
        const auto sc = basic_scenario(20000, 99);
        const auto a = ordexp::estimate_risk(EstimatorId::ImprovedBsee, sc, 1);
        const auto b = ordexp::estimate_risk(EstimatorId::ImprovedBsee, sc, 1);
        const auto c = ordexp::estimate_risk(EstimatorId::ImprovedBsee, sc, 2);
        const auto d = ordexp::estimate_risk(EstimatorId::ImprovedBsee, sc, 5);
        CHECK(a.mean_loss == b.mean_loss);
        CHECK(a.std_error == b.std_error);
        CHECK(a.mean_loss == c.mean_loss);
        CHECK(a.std_error == c.std_error);
        CHECK(a.mean_loss == d.mean_loss);
        CHECK(a.std_error == d.std_error);
    }

    TEST_CASE("truth-returning stub has exactly zero risk") {
        const auto sc = basic_scenario(500, 7);
        const auto risk = ordexp::estimate_risk_custom(
            [](const std::vector<std::vector<double>>&,
               const Scenario& scenario) { return scenario.sigma(); },
            sc);
        CHECK(risk.mean_loss == std::vector<double>{0.0, 0.0});
        CHECK(risk.std_error == std::vector<double>{0.0, 0.0});
        CHECK(risk.overflow_count == 0);
    }

    TEST_CASE("closed-form risk values") {
        const LinexShape p05(0.5);
        CHECK(ordexp::closed_form_bsee_risk(3, p05, refs::kC0N3P05) ==
              doctest::Approx(refs::kRiskN3P05AtC0).epsilon(1e-13));
        CHECK(ordexp::closed_form_bsee_risk(3, p05, 1.0 / 3.0) ==
              doctest::Approx(refs::kRiskN3P05AtThird).epsilon(1e-13));
        CHECK(ordexp::closed_form_bsee_risk(5, LinexShape(-0.5),
                                            refs::kC0N5M05) ==
              doctest::Approx(refs::kRiskN5M05AtC0).epsilon(1e-13));
        // optimal coefficient really is a minimum
        CHECK(refs::kRiskN3P05AtC0 < refs::kRiskN3P05AtThird);
        // boundary of the mgf domain
        CHECK(std::isinf(ordexp::closed_form_bsee_risk(3, p05, 2.0)));
        CHECK_THROWS_AS(ordexp::closed_form_bsee_risk(3, p05, -1.0),
                        std::invalid_argument);
    }

    TEST_CASE("monte carlo bsee risk matches the closed form") {
        const auto sc = Scenario::zero_location({3, 3}, {1.0, 1.0},
                                                LinexShape(0.5), 50000, 314);
        const auto risk = ordexp::estimate_risk(EstimatorId::Bsee, sc);
        CHECK(risk.overflow_count == 0);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(std::abs(risk.mean_loss[c] - refs::kRiskN3P05AtC0) <=
                  3.0 * risk.std_error[c]);
        }
    }

    TEST_CASE("prri basics") {
        ordexp::RiskEstimate a;
        a.mean_loss = {0.02, 0.03};
        a.std_error = {0.0, 0.0};
        a.replications = 100;
        ordexp::RiskEstimate b = a;
        CHECK(ordexp::prri(a, b) == std::vector<double>{0.0, 0.0});

        b.mean_loss = {0.04, 0.02};
        const auto gain = ordexp::prri(a, b);
        CHECK(gain[0] == doctest::Approx(50.0));
        CHECK(gain[1] == doctest::Approx(-50.0));

        // direction flips sign
        const auto reverse = ordexp::prri(b, a);
        CHECK(((gain[0] > 0) == (reverse[0] < 0)));
        CHECK(((gain[1] > 0) == (reverse[1] < 0)));

        ordexp::RiskEstimate zero = a;
        zero.mean_loss = {0.0, 0.01};
        CHECK_THROWS_AS(ordexp::prri(a, zero), std::domain_error);

        ordexp::RiskEstimate other = b;
        other.replications = 50;
        CHECK_THROWS_AS(ordexp::prri(a, other), std::invalid_argument);
    }

    TEST_CASE("prri antisymmetry on random positive risks") {
        std::mt19937_64 gen(17);
        std::uniform_real_distribution<double> r_dist(0.001, 2.0);
        for (int trial = 0; trial < 200; ++trial) {
            ordexp::RiskEstimate a;
            ordexp::RiskEstimate b;
            a.replications = b.replications = 10;
            for (int c = 0; c < 3; ++c) {
                a.mean_loss.push_back(r_dist(gen));
                b.mean_loss.push_back(r_dist(gen));
            }
            const auto ab = ordexp::prri(a, b);
            const auto ba = ordexp::prri(b, a);
            for (int c = 0; c < 3; ++c) {
                if (ab[c] != 0.0) {
                    CHECK(((ab[c] > 0) == (ba[c] < 0)));
                }
            }
        }
    }

    TEST_CASE("standard error shrinks like one over root replications") {
        const auto small = basic_scenario(10000, 1234);
        const auto large = basic_scenario(40000, 1234);
        const auto risk_small = ordexp::estimate_risk(EstimatorId::Bsee,
                                                      small);
        const auto risk_large = ordexp::estimate_risk(EstimatorId::Bsee,
                                                      large);
        for (std::size_t c = 0; c < 2; ++c) {
            const double ratio = risk_small.std_error[c] /
                                 risk_large.std_error[c];
            CHECK(ratio > 1.6);
            CHECK(ratio < 2.4);
        }
    }

    TEST_CASE("risk depends on the scales only through their ratio") {
        const auto lo = Scenario::zero_location({3, 5}, {0.5, 1.0},
                                                LinexShape(0.5), 20000, 555);
        const auto hi = Scenario::zero_location({3, 5}, {1.0, 2.0},
                                                LinexShape(0.5), 20000, 555);
        const auto risk_lo = ordexp::estimate_risk(EstimatorId::ImprovedBsee,
                                                   lo);
        const auto risk_hi = ordexp::estimate_risk(EstimatorId::ImprovedBsee,
                                                   hi);
        for (std::size_t c = 0; c < 2; ++c) {
            // same seed: the draws scale exactly, so risks agree tightly
            CHECK(oracles::rel_diff(risk_lo.mean_loss[c],
                                    risk_hi.mean_loss[c]) < 1e-9);
        }

        const auto hi_other = Scenario::zero_location(
            {3, 5}, {1.0, 2.0}, LinexShape(0.5), 20000, 556);
        const auto risk_other =
            ordexp::estimate_risk(EstimatorId::ImprovedBsee, hi_other);
        for (std::size_t c = 0; c < 2; ++c) {
            const double se = std::sqrt(
                risk_lo.std_error[c] * risk_lo.std_error[c] +
                risk_other.std_error[c] * risk_other.std_error[c]);
            CHECK(std::abs(risk_lo.mean_loss[c] - risk_other.mean_loss[c]) <=
                  3.0 * se);
        }
    }

    TEST_CASE("degenerate draws are redrawn and counted") {
        // subnormal scales quantize the draws so hard that residual sums
        // of zero actually occur
        const auto sc = Scenario::zero_location(
            {2, 2}, {5e-324, 5e-324}, LinexShape(0.5), 500, 2024);
        const auto risk = ordexp::estimate_risk(EstimatorId::Baee, sc);
        CHECK(risk.degenerate_count > 0);
        CHECK(risk.replications == 500);
        for (double m : risk.mean_loss) {
            CHECK(std::isfinite(m));
        }
    }

    TEST_CASE("saturated losses are counted") {
        const auto sc = basic_scenario(100, 3);
        const auto risk = ordexp::estimate_risk_custom(
            [](const std::vector<std::vector<double>>&, const Scenario&) {
                return std::vector<double>{1e308, 1e308};
            },
            sc);
        CHECK(risk.overflow_count == 2 * 100);
    }

    TEST_CASE("estimator and scenario compatibility") {
        const auto one_obs = Scenario::zero_location(
            {1, 5}, {0.5, 1.0}, LinexShape(0.5), 100, 1);
        CHECK_THROWS_AS(ordexp::estimate_risk(EstimatorId::Baee, one_obs),
                        ordexp::IncompatibleEstimatorError);
        CHECK_NOTHROW(ordexp::estimate_risk(EstimatorId::Bsee, one_obs));

        const Scenario shifted({3, 5}, {1.0, 1.0}, {0.5, 1.0},
                               LinexShape(0.5), 100, 1);
        CHECK_THROWS_AS(ordexp::estimate_risk(EstimatorId::Bsee, shifted),
                        ordexp::IncompatibleEstimatorError);
        CHECK_NOTHROW(ordexp::estimate_risk(EstimatorId::Baee, shifted));
    }

    TEST_CASE("truncation is inactive at wide scale separation") {
        // with sigma = (0.2, 1.5) at n = (10, 15) the clamp essentially
        // never binds, so the improved estimator collapses onto the base
        const auto sc = Scenario::zero_location(
            {10, 15}, {0.2, 1.5}, LinexShape(0.5), 5000, 606);
        const EstimatorId ids[] = {EstimatorId::ImprovedBaee,
                                   EstimatorId::Baee};
        const auto joint = ordexp::estimate_risks(ids, sc);
        const auto cell = ordexp::prri_with_se(joint, 0, 1);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(std::abs(cell.value[c]) < 0.2);
        }
    }

    TEST_CASE("joint risks expose the loss covariance") {
        const auto sc = basic_scenario(5000, 88);
        const EstimatorId ids[] = {EstimatorId::Bsee,
                                   EstimatorId::ImprovedBsee};
        const auto joint = ordexp::estimate_risks(ids, sc);
        REQUIRE(joint.estimates().size() == 2);
        for (std::size_t c = 0; c < 2; ++c) {
            const double var0 = joint.loss_covariance(0, 0, c);
            const double var1 = joint.loss_covariance(1, 1, c);
            const double cov = joint.loss_covariance(0, 1, c);
            CHECK(var0 >= 0.0);
            CHECK(var1 >= 0.0);
            CHECK(cov == joint.loss_covariance(1, 0, c));
            // Cauchy-Schwarz
            CHECK(cov * cov <= var0 * var1 * (1.0 + 1e-12));
        }
        const auto cell = ordexp::prri_with_se(joint, 1, 0);
        CHECK(cell.value.size() == 2);
        for (double se : cell.std_error) {
            CHECK(se >= 0.0);
        }
    }
}
