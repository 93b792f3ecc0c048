#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "ballopt/equivariance.hpp"
#include "ballopt/solver.hpp"

using namespace ballopt;
using Catch::Approx;

namespace {

Eigen::VectorXd make_beta(double b0, std::initializer_list<double> rest) {
    Eigen::VectorXd beta(rest.size() + 1);
    beta(0) = b0;
    int i = 1;
    for (double v : rest) beta(i++) = v;
    return beta;
}

}  // namespace

TEST_CASE("canonicalize reduces to a nonnegative axis coefficient") {
    const auto cp = canonicalize(make_beta(-0.5, {3.0, 4.0}));
    CHECK(cp.k == 2);
    CHECK(cp.beta0 == -0.5);
    CHECK(cp.beta1_tilde == Approx(5.0).epsilon(1e-15));
    // rotation * (beta1_tilde, 0)^T recovers the subvector
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(2);
    e1(0) = cp.beta1_tilde;
    Eigen::VectorXd back = cp.rotation * e1;
    CHECK(back(0) == Approx(3.0).margin(1e-12));
    CHECK(back(1) == Approx(4.0).margin(1e-12));
}

TEST_CASE("canonicalize rotation is orthogonal") {
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + int(rng() % 6);
        Eigen::VectorXd beta(k + 1);
        for (int i = 0; i <= k; ++i) beta(i) = gauss(rng);
        const auto cp = canonicalize(beta);
        Eigen::MatrixXd err = cp.rotation * cp.rotation.transpose() -
                              Eigen::MatrixXd::Identity(k, k);
        CHECK(err.cwiseAbs().maxCoeff() < 1e-13);
        Eigen::VectorXd can = Eigen::VectorXd::Zero(k);
        can(0) = cp.beta1_tilde;
        CHECK((cp.rotation * can - beta.tail(k)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(cp.beta1_tilde >= 0.0);
    }
}

TEST_CASE("canonicalize is exact near the coordinate poles") {
    // directions within 1e-12 of +-e1 must still be recovered to within the
    // representation error of the input direction itself
    for (double eps : {1e-12, 1e-9, 1e-6}) {
        for (double sign : {1.0, -1.0}) {
            Eigen::VectorXd beta(4);
            beta << 0.3, sign * std::sqrt(1.0 - eps * eps), eps, 0.0;
            const auto cp = canonicalize(beta);
            Eigen::VectorXd can = Eigen::VectorXd::Zero(3);
            can(0) = cp.beta1_tilde;
            CHECK((cp.rotation * can - beta.tail(3)).cwiseAbs().maxCoeff() <
                  2.0 * eps + 1e-12);
        }
    }
}

TEST_CASE("zero direction falls back to the identity") {
    const auto cp = canonicalize(make_beta(1.5, {0.0, 0.0, 0.0}));
    CHECK(cp.beta1_tilde == 0.0);
    CHECK(cp.rotation.isIdentity(0.0));
}

TEST_CASE("push_forward rotates points and keeps weights") {
    const auto cp = canonicalize(make_beta(0.0, {0.0, 2.0}));
    ExactDesign d;
    Eigen::VectorXd p(2);
    p << 1.0, 0.0;
    d.points.push_back(p);
    d.weights.push_back(1.0);
    const auto out = push_forward(d, cp);
    CHECK(out.weights == d.weights);
    CHECK(out.points[0](0) == Approx(0.0).margin(1e-15));
    CHECK(out.points[0](1) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("solve is equivariant under random rotations of beta") {
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss;
    const auto base = solve_canonical(logit_model(), -0.4, 1.3, 3, 1001);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd rot = random_rotation(3, 1000 + trial);
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(3);
        dir(0) = 1.3;
        Eigen::VectorXd beta(4);
        beta(0) = -0.4;
        beta.tail(3) = rot * dir;
        const auto rep = solve(logit_model(), beta, 1001);
        CHECK(rep.log_det == Approx(base.log_det).margin(1e-9));
        CHECK(rep.marginal.points[0] ==
              Approx(base.marginal.points[0]).margin(1e-9));
        CHECK(rep.marginal.points[1] ==
              Approx(base.marginal.points[1]).margin(1e-9));

        // push the discretized canonical design into the rotated frame and
        // confirm the information determinant is preserved there
        const auto disc =
            discretize_design(logit_model(), -0.4, 1.3, rep.marginal, 3);
        const auto moved = push_forward(disc.design, rep.canonical);
        InfoMatrix m = design_info(logit_model(), beta, moved);
        const double ld = std::log(m.determinant());
        CHECK(ld == Approx(disc.log_det).margin(1e-9));
        (void)gauss;
    }
}

TEST_CASE("canonicalize rejects empty direction vectors") {
    Eigen::VectorXd beta(1);
    beta << 0.5;
    CHECK_THROWS_AS(canonicalize(beta), std::invalid_argument);
}
