#ifndef BALLOPT_EQUIVARIANCE_HPP
#define BALLOPT_EQUIVARIANCE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "ballopt/core.hpp"

namespace ballopt {

/// A parameter vector reduced to the canonical frame: the linear predictor
/// collapses to beta0 + beta1_tilde * x1 with beta1_tilde >= 0.  `rotation`
/// maps canonical coordinates back to the original ones, so
/// rotation * (beta1_tilde, 0, ..., 0)^T recovers (beta_1, ..., beta_k)^T.
struct CanonicalProblem {
    int k;
    double beta0;
    double beta1_tilde;
    Eigen::MatrixXd rotation;  // k x k orthogonal
};

/// Reduce beta = (beta0, beta_1, ..., beta_k) to canonical form by an
/// explicit orthogonal map (a Householder reflection sending e1 to the
/// direction of the subvector).
inline CanonicalProblem canonicalize(const Eigen::VectorXd& beta) {
    const int k = int(beta.size()) - 1;
    if (k < 1) throw std::invalid_argument("canonicalize: need k >= 1");
    CanonicalProblem cp;
    cp.k = k;
    cp.beta0 = beta(0);
    const Eigen::VectorXd b = beta.tail(k);
    cp.beta1_tilde = b.norm();
    if (cp.beta1_tilde < 1e-14) {
        cp.beta1_tilde = 0.0;
        cp.rotation = Eigen::MatrixXd::Identity(k, k);
        return cp;
    }
    const Eigen::VectorXd u = b / cp.beta1_tilde;
    Eigen::VectorXd v = u;
    v(0) -= 1.0;  // reflection axis u - e1; H maps e1 <-> u exactly
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 < 1e-300) {
        cp.rotation = Eigen::MatrixXd::Identity(k, k);
    } else {
        cp.rotation = Eigen::MatrixXd::Identity(k, k) -
                      (2.0 / vnorm2) * v * v.transpose();
    }
    return cp;
}

/// Map a design found in the canonical frame back to the original frame.
inline ExactDesign push_forward(const ExactDesign& design,
                                const CanonicalProblem& problem) {
    ExactDesign out;
    out.weights = design.weights;
    out.points.reserve(design.size());
    for (const auto& x : design.points) {
        if (int(x.size()) != problem.k)
            throw std::invalid_argument("push_forward: dimension mismatch");
        out.points.push_back(problem.rotation * x);
    }
    return out;
}

}  // namespace ballopt

#endif  // BALLOPT_EQUIVARIANCE_HPP
