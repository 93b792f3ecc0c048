#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ballopt/solver.hpp"

using namespace ballopt;
using Catch::Approx;

TEST_CASE("case classification follows the mode of q") {
    CHECK(classify(ShiftedIntensity(logit_model(), -2.0, 1.0), 3) ==
          CaseLabel::A);
    CHECK(classify(ShiftedIntensity(logit_model(), 2.0, 1.0), 3) ==
          CaseLabel::B);
    CHECK(classify(ShiftedIntensity(logit_model(), 0.3, 1.0), 3) ==
          CaseLabel::C);
    CHECK(classify(ShiftedIntensity(logit_model(), 0.0, 0.0), 3) ==
          CaseLabel::Degenerate);
    // strictly increasing intensity: always case a
    CHECK(classify(ShiftedIntensity(exponential_model(), 5.0, 2.0), 3) ==
          CaseLabel::A);
    CHECK(to_string(CaseLabel::A) == "a");
    CHECK(to_string(CaseLabel::Degenerate) == "degenerate");
}

TEST_CASE("boundary-pinned solution for a left-shifted logit") {
    const auto rep = solve_canonical(logit_model(), -0.5, 1.0, 3);
    CHECK(rep.case_label == CaseLabel::C);
    REQUIRE(rep.marginal.size() == 2);
    CHECK(rep.marginal.points[0] == 1.0);
    CHECK(rep.marginal.weights[0] == Approx(0.25).epsilon(1e-12));
    CHECK(rep.marginal.points[1] == Approx(-0.1756).margin(5e-3));
    CHECK(rep.kw_pass);
    CHECK(rep.kw_max <= 4.0 + kKwTolerance);
}

TEST_CASE("centered logit is symmetric with interior support") {
    const auto rep = solve_canonical(logit_model(), 0.0, 1.0, 3);
    CHECK(rep.case_label == CaseLabel::C);
    CHECK(rep.diag.interior);
    CHECK(rep.diag.residual <= 1e-9);
    REQUIRE(rep.marginal.size() == 2);
    CHECK(rep.marginal.points[0] == Approx(0.5188).margin(1e-3));
    CHECK(rep.marginal.points[0] == Approx(-rep.marginal.points[1]).margin(1e-8));
    CHECK(rep.marginal.weights[0] == Approx(0.5).margin(1e-8));
    CHECK(rep.kw_pass);
}

TEST_CASE("interior solution at a small positive shift") {
    const auto rep = solve_canonical(logit_model(), 0.1, 1.0, 3);
    CHECK(rep.case_label == CaseLabel::C);
    CHECK(rep.diag.interior);
    REQUIRE(rep.marginal.size() == 2);
    CHECK(rep.marginal.points[0] == Approx(0.4239).margin(1e-3));
    CHECK(rep.marginal.points[1] == Approx(-0.6239).margin(1e-3));
    CHECK(rep.kw_pass);

    // reflecting beta0 mirrors the design and swaps the weights
    const auto mirror = solve_canonical(logit_model(), -0.1, 1.0, 3);
    CHECK(mirror.marginal.points[0] == Approx(-rep.marginal.points[1]).margin(1e-7));
    CHECK(mirror.marginal.points[1] == Approx(-rep.marginal.points[0]).margin(1e-7));
    CHECK(mirror.marginal.weights[0] == Approx(rep.marginal.weights[1]).margin(1e-7));
    CHECK(rep.log_det == Approx(mirror.log_det).margin(1e-10));
}

TEST_CASE("case a far in the left tail") {
    const auto rep = solve_canonical(logit_model(), -2.0, 1.0, 3);
    CHECK(rep.case_label == CaseLabel::A);
    CHECK(rep.marginal.points[0] == 1.0);
    CHECK(rep.marginal.weights[0] == Approx(0.25).epsilon(1e-12));
    CHECK(rep.kw_pass);

    const auto mirror = solve_canonical(logit_model(), 2.0, 1.0, 3);
    CHECK(mirror.case_label == CaseLabel::B);
    CHECK(mirror.marginal.points[1] == -1.0);
    CHECK(mirror.marginal.weights[1] == Approx(0.25).epsilon(1e-12));
    CHECK(mirror.marginal.points[0] == Approx(-rep.marginal.points[1]).margin(1e-9));
}

TEST_CASE("extreme shifts approach the closed-form limit points") {
    CHECK(asymptotic_inner_point(1.0, 3) == Approx(0.15470053).margin(1e-6));
    CHECK(asymptotic_inner_point(1.0, 6) == Approx(0.29099444).margin(1e-6));
    CHECK(asymptotic_inner_point(0.0, 4) == Approx(-0.25));

    for (int k : {3, 6}) {
        const auto rep = solve_canonical(logit_model(), -30.0, 1.0, k, 2001);
        CHECK(rep.case_label == CaseLabel::A);
        CHECK(rep.marginal.points[1] ==
              Approx(asymptotic_inner_point(1.0, k)).margin(0.01));
        CHECK(rep.kw_pass);
    }
    const auto probit = solve_canonical(probit_model(), -30.0, 1.0, 3, 2001);
    CHECK(probit.marginal.points[1] > 0.9);
    CHECK(probit.marginal.points[1] < 1.0);
    CHECK(probit.kw_pass);
}

TEST_CASE("exponential intensity solves for every shift") {
    // beta0 only scales the objective for exp(.), so the support must be
    // shift-invariant
    const auto base = solve_canonical(exponential_model(), 0.0, 1.0, 3);
    CHECK(base.case_label == CaseLabel::A);
    CHECK(base.kw_pass);
    for (double b0 : {-3.0, -1.0, 2.0, 5.0}) {
        const auto rep = solve_canonical(exponential_model(), b0, 1.0, 3);
        CHECK(rep.marginal.points[0] == Approx(base.marginal.points[0]).margin(1e-8));
        CHECK(rep.marginal.points[1] == Approx(base.marginal.points[1]).margin(1e-8));
        CHECK(rep.log_det == Approx(base.log_det + 4.0 * b0).margin(1e-8));
        CHECK(rep.kw_pass);
    }
    // k = 1 with a steep slope: upper point pinned, inner point at 1 - 2/beta1
    const auto steep = solve_canonical(exponential_model(), 0.0, 10.0, 1);
    CHECK(steep.marginal.points[0] == 1.0);
    CHECK(steep.marginal.points[1] == Approx(0.8).margin(1e-8));
    CHECK(steep.kw_pass);
}

TEST_CASE("degenerate problem yields the regular simplex") {
    for (int k = 1; k <= 6; ++k) {
        const auto design = solve_degenerate(k);
        REQUIRE(design.size() == std::size_t(k + 1));
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
        InfoMatrix m = design_info(logit_model(), beta, design);
        // normalize away lambda(0) = 1/4 to compare against diag(1, 1/k, ...)
        m /= logit_model().lambda(0.0);
        CHECK(std::abs(m(0, 0) - 1.0) < 1e-12);
        for (int i = 1; i <= k; ++i)
            CHECK(std::abs(m(i, i) - 1.0 / double(k)) < 1e-12);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                if (i != j) CHECK(std::abs(m(i, j)) < 1e-12);
        for (const auto& p : design.points)
            CHECK(p.norm() == Approx(1.0).epsilon(1e-12));

        const auto rep = solve_canonical(logit_model(), 0.7, 0.0, k, 1001);
        CHECK(rep.case_label == CaseLabel::Degenerate);
        CHECK(rep.kw_pass);
        CHECK(rep.kw_max == Approx(double(k + 1)).margin(1e-9));
    }
}

TEST_CASE("k = 1 problems are handled by the scalar variants") {
    const auto centered = solve_canonical(logit_model(), 0.0, 1.0, 1);
    CHECK(centered.kw_pass);
    CHECK(centered.marginal.weights[0] == Approx(0.5).margin(1e-8));
    const auto shifted = solve_canonical(logit_model(), -3.0, 1.0, 1);
    CHECK(shifted.case_label == CaseLabel::A);
    CHECK(shifted.kw_pass);
    const auto probit1 = solve_canonical(probit_model(), 1.5, 0.7, 1);
    CHECK(probit1.kw_pass);
}

TEST_CASE("support levels move continuously along a sweep") {
    double prev_hi = std::nan(""), prev_lo = std::nan("");
    for (double b0 = -1.5; b0 <= 1.5 + 1e-9; b0 += 0.05) {
        const auto rep = solve_canonical(logit_model(), b0, 1.0, 3, 1001);
        REQUIRE(rep.marginal.size() == 2);
        CHECK(rep.kw_pass);
        if (!std::isnan(prev_hi)) {
            // support levels drift with slope < 1.5 in beta0, no jumps
            CHECK(std::abs(rep.marginal.points[0] - prev_hi) < 0.08);
            CHECK(std::abs(rep.marginal.points[1] - prev_lo) < 0.08);
        }
        prev_hi = rep.marginal.points[0];
        prev_lo = rep.marginal.points[1];
    }
}

TEST_CASE("interior support interval for the centered logit") {
    const auto iv = case_c_interval(logit_model(), 3, 1.0);
    CHECK(iv.first == Approx(-0.403).margin(5e-3));
    CHECK(iv.second == Approx(0.403).margin(5e-3));
    CHECK_THROWS_AS(case_c_interval(exponential_model(), 3, 1.0),
                    std::invalid_argument);
}

TEST_CASE("full solve matches the canonical solve for axis-aligned beta") {
    Eigen::VectorXd beta(4);
    beta << -0.5, 1.0, 0.0, 0.0;
    const auto rep = solve(logit_model(), beta, 1001);
    const auto canon = solve_canonical(logit_model(), -0.5, 1.0, 3, 1001);
    CHECK(rep.log_det == Approx(canon.log_det).margin(1e-12));
    CHECK(rep.canonical.beta1_tilde == 1.0);
    CHECK(rep.canonical.rotation.isIdentity(1e-14));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(solve_canonical(logit_model(), 0.0, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(asymptotic_inner_point(-1.0, 3), std::invalid_argument);
}
