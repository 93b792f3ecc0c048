#ifndef BALLOPT_CORE_HPP
#define BALLOPT_CORE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ballopt/models.hpp"

namespace ballopt {

using InfoMatrix = Eigen::MatrixXd;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A design on [-1,1] for the first coordinate: the x1-marginal of a
/// rotation-invariant design on the sphere.  Points are kept strictly
/// decreasing; weights are positive and sum to one.
struct MarginalDesign {
    std::vector<double> points;
    std::vector<double> weights;

    MarginalDesign() = default;
    MarginalDesign(std::vector<double> pts, std::vector<double> wts)
        : points(std::move(pts)), weights(std::move(wts)) {
        normalize();
    }

    std::size_t size() const { return points.size(); }

    void normalize() {
        if (points.size() != weights.size())
            throw std::invalid_argument("MarginalDesign: size mismatch");
        std::vector<std::size_t> idx(points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return points[a] > points[b]; });
        std::vector<double> p, w;
        double total = 0.0;
        for (std::size_t i : idx) {
            if (weights[i] <= 0.0)
                throw std::invalid_argument("MarginalDesign: nonpositive weight");
            if (std::abs(points[i]) > 1.0 + 1e-12)
                throw std::invalid_argument("MarginalDesign: point outside [-1,1]");
            if (!p.empty() && points[i] >= p.back() - 1e-15)
                throw std::invalid_argument("MarginalDesign: duplicate point");
            p.push_back(std::clamp(points[i], -1.0, 1.0));
            w.push_back(weights[i]);
            total += weights[i];
        }
        for (double& wi : w) wi /= total;
        points = std::move(p);
        weights = std::move(w);
    }
};

/// A finitely supported design on the unit sphere in R^k.
struct ExactDesign {
    std::vector<Eigen::VectorXd> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    int dimension() const { return points.empty() ? 0 : int(points[0].size()); }
};

/// Elemental (one-support-point) information matrix
/// lambda(f(x)^T beta) f(x) f(x)^T for f(x) = (1, x1, ..., xk)^T.
inline InfoMatrix elemental_info(const IntensityModel& model,
                                 const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& x) {
    const int k = int(x.size());
    if (beta.size() != k + 1)
        throw std::invalid_argument("elemental_info: beta must have length k+1");
    Eigen::VectorXd f(k + 1);
    f(0) = 1.0;
    f.tail(k) = x;
    const double lam = model.lambda(f.dot(beta));
    return lam * f * f.transpose();
}

/// Information matrix of an exact design, sum of weighted elemental matrices.
inline InfoMatrix design_info(const IntensityModel& model,
                              const Eigen::VectorXd& beta,
                              const ExactDesign& design) {
    const int k = design.dimension();
    InfoMatrix m = InfoMatrix::Zero(k + 1, k + 1);
    for (std::size_t i = 0; i < design.size(); ++i)
        m += design.weights[i] * elemental_info(model, beta, design.points[i]);
    return m;
}

namespace detail {

// Moments of q against the marginal, factored as e^{log_scale} * (s0,...)
// so that extreme shifts (q ~ e^{-400}) do not underflow in products.
struct MarginalMoments {
    double s0 = 0.0;  // sum w q
    double s1 = 0.0;  // sum w q x
    double s2 = 0.0;  // sum w q x^2
    double t = 0.0;   // sum w q (1 - x^2)
    double log_scale = 0.0;
};

inline MarginalMoments marginal_moments(const ShiftedIntensity& s,
                                        const MarginalDesign& xi1) {
    MarginalMoments mm;
    std::vector<double> logq(xi1.size());
    for (std::size_t i = 0; i < xi1.size(); ++i) {
        logq[i] = s.log_q(xi1.points[i]);
        mm.log_scale = i == 0 ? logq[i] : std::max(mm.log_scale, logq[i]);
    }
    for (std::size_t i = 0; i < xi1.size(); ++i) {
        const double x = xi1.points[i];
        const double wq = xi1.weights[i] * std::exp(logq[i] - mm.log_scale);
        mm.s0 += wq;
        mm.s1 += wq * x;
        mm.s2 += wq * x * x;
        mm.t += wq * (1.0 - x * x);
    }
    return mm;
}

}  // namespace detail

/// Information matrix of the invariant design xi1 (x) uniform-orbit kernel.
/// The block structure is assembled, not computed: the coupling blocks are
/// exact zeros and the lower-right block is a multiple of the identity.
/// For k = 1 the matrix is the bare 2x2 block.
inline InfoMatrix marginal_info(const ShiftedIntensity& s,
                                const MarginalDesign& xi1, int k) {
    if (k < 1) throw std::invalid_argument("marginal_info: k must be >= 1");
    const auto mm = detail::marginal_moments(s, xi1);
    const double scale = std::exp(mm.log_scale);
    InfoMatrix m = InfoMatrix::Zero(k + 1, k + 1);
    m(0, 0) = scale * mm.s0;
    m(0, 1) = m(1, 0) = scale * mm.s1;
    m(1, 1) = scale * mm.s2;
    if (k >= 2) {
        const double diag = scale * mm.t / double(k - 1);
        for (int j = 2; j <= k; ++j) m(j, j) = diag;
    }
    return m;
}

/// log det of marginal_info, via the block structure: a 2x2 determinant and
/// k-1 identical scalar factors.  Returns -inf for singular designs.
inline double log_det_marginal(const ShiftedIntensity& s,
                               const MarginalDesign& xi1, int k) {
    const auto mm = detail::marginal_moments(s, xi1);
    const double det2 = mm.s0 * mm.s2 - mm.s1 * mm.s1;
    if (!(det2 > 1e-300)) return kNegInf;
    double ld = std::log(det2) + 2.0 * mm.log_scale;
    if (k >= 2) {
        if (!(mm.t > 1e-300)) return kNegInf;
        ld += double(k - 1) *
              (std::log(mm.t) + mm.log_scale - std::log(double(k - 1)));
    }
    return std::isfinite(ld) ? ld : kNegInf;
}

/// log det of the information matrix of a two-point marginal design
/// {x: alpha, y: 1-alpha}, in the closed form used by the case-c objective:
///   log q(x) + log q(y) + log (x-y)^2 + log a + log(1-a)
///   + (k-1) [ -log(k-1) + log( q(x)(1-x^2)a + q(y)(1-y^2)(1-a) ) ].
/// Singular configurations give the -inf sentinel rather than an exception.
inline double log_det_two_point(const ShiftedIntensity& s, double x, double y,
                                double alpha, int k) {
    if (!(x > y) || alpha <= 0.0 || alpha >= 1.0) return kNegInf;
    double ld = s.log_q(x) + s.log_q(y) + 2.0 * std::log(x - y) +
                std::log(alpha) + std::log1p(-alpha);
    if (k >= 2) {
        const double d = s.q(x) * (1.0 - x * x) * alpha +
                         s.q(y) * (1.0 - y * y) * (1.0 - alpha);
        if (!(d > 0.0)) return kNegInf;
        ld += double(k - 1) * (std::log(d) - std::log(double(k - 1)));
    }
    return std::isfinite(ld) ? ld : kNegInf;
}

/// Sensitivity function psi at orbit level x1 (constant on orbits):
///   psi(x1) = q(x1) [ (1,x1) B^{-1} (1,x1)^T + (k-1)(1-x1^2) / t ]
/// with B the top-left 2x2 block and t = sum w q (1-x^2).  The second
/// summand is absent for k = 1.
inline double sensitivity(const ShiftedIntensity& s, const MarginalDesign& xi1,
                          int k, double x1) {
    const auto mm = detail::marginal_moments(s, xi1);
    const double det2 = mm.s0 * mm.s2 - mm.s1 * mm.s1;
    if (!(det2 > 1e-300) || (k >= 2 && !(mm.t > 1e-300)))
        throw std::runtime_error("sensitivity: singular information matrix");
    // (1,x1) B^{-1} (1,x1)^T with B = [[s0, s1],[s1, s2]]; the common
    // e^{log_scale} factor of the moments cancels against q(x1)
    const double quad =
        (mm.s2 - 2.0 * mm.s1 * x1 + mm.s0 * x1 * x1) / det2;
    double p1 = quad;
    if (k >= 2) p1 += double(k - 1) * (1.0 - x1 * x1) / mm.t;
    return std::exp(s.log_q(x1) - mm.log_scale) * p1;
}

}  // namespace ballopt

#endif  // BALLOPT_CORE_HPP
