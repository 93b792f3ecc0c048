#ifndef BALLOPT_DISCRETIZE_HPP
#define BALLOPT_DISCRETIZE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ballopt/core.hpp"

namespace ballopt {

enum class PolytopeKind { Simplex, CrossPolytope, Cube, Point };

inline std::string to_string(PolytopeKind k) {
    switch (k) {
        case PolytopeKind::Simplex: return "simplex";
        case PolytopeKind::CrossPolytope: return "cross-polytope";
        case PolytopeKind::Cube: return "cube";
        case PolytopeKind::Point: return "point";
    }
    return "?";
}

/// Vertex count of a (k-1)-dimensional polytope used to discretize one orbit.
inline std::size_t orbit_vertex_count(PolytopeKind kind, int k) {
    switch (kind) {
        case PolytopeKind::Simplex: return std::size_t(k);
        case PolytopeKind::CrossPolytope: return std::size_t(2 * (k - 1));
        case PolytopeKind::Cube: return std::size_t(1) << (k - 1);
        case PolytopeKind::Point: return 1;
    }
    return 0;
}

namespace detail {

/// d+1 vertices of a regular d-simplex on the unit sphere in R^d.
/// Tight frame: sum v = 0, sum v v^T = ((d+1)/d) I.
inline std::vector<Eigen::VectorXd> unit_simplex_vertices(int d) {
    // centered standard basis of R^{d+1}, expressed in an orthonormal basis
    // of the hyperplane orthogonal to the ones-vector
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(d + 1) / std::sqrt(d + 1.0);
    Eigen::VectorXd v = ones;
    v(0) -= 1.0;
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d + 1, d + 1);
    if (v.squaredNorm() > 0)
        h -= (2.0 / v.squaredNorm()) * v * v.transpose();
    // columns 1..d of h span the complement of the ones-vector
    Eigen::MatrixXd q = h.rightCols(d);
    std::vector<Eigen::VectorXd> out;
    out.reserve(d + 1);
    const double scale = std::sqrt((d + 1.0) / d);
    for (int i = 0; i <= d; ++i) {
        Eigen::VectorXd p = -Eigen::VectorXd::Ones(d + 1) / (d + 1.0);
        p(i) += 1.0;
        out.push_back(scale * (q.transpose() * p));
    }
    return out;
}

inline std::vector<Eigen::VectorXd> cross_polytope_vertices(int d) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(2 * d);
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(j) = 1.0;
        out.push_back(e);
        out.push_back(-e);
    }
    return out;
}

inline std::vector<Eigen::VectorXd> cube_vertices(int d) {
    if (d > 20) throw std::invalid_argument("cube_vertices: 2^d too large");
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::size_t(1) << d);
    const double s = 1.0 / std::sqrt(double(d));
    for (std::size_t mask = 0; mask < (std::size_t(1) << d); ++mask) {
        Eigen::VectorXd v(d);
        for (int j = 0; j < d; ++j) v(j) = (mask >> j) & 1 ? s : -s;
        out.push_back(v);
    }
    return out;
}

inline std::vector<Eigen::VectorXd> polytope_vertices(PolytopeKind kind, int d) {
    switch (kind) {
        case PolytopeKind::Simplex: return unit_simplex_vertices(d);
        case PolytopeKind::CrossPolytope: return cross_polytope_vertices(d);
        case PolytopeKind::Cube: return cube_vertices(d);
        case PolytopeKind::Point: break;
    }
    throw std::invalid_argument("polytope_vertices: point orbit has no polytope");
}

}  // namespace detail

/// A seeded random rotation in O(d), for reproducible orbit orientations.
inline Eigen::MatrixXd random_rotation(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

/// One discretized orbit: the vertex set of a regular (k-1)-dimensional
/// polytope inscribed in the sphere slice at first coordinate x1.
struct OrbitDiscretization {
    double x1;
    double radius;
    PolytopeKind polytope;
    std::vector<Eigen::VectorXd> points;  // vertices in R^k, all with norm 1
};

inline OrbitDiscretization orbit_vertices(
    int k, double x1, PolytopeKind kind,
    const std::optional<Eigen::MatrixXd>& orientation = std::nullopt) {
    if (std::abs(x1) > 1.0 + 1e-12)
        throw std::invalid_argument("orbit_vertices: |x1| must be <= 1");
    x1 = std::clamp(x1, -1.0, 1.0);
    OrbitDiscretization orbit;
    orbit.x1 = x1;
    orbit.radius = std::sqrt(std::max(0.0, 1.0 - x1 * x1));
    if (kind == PolytopeKind::Point || std::abs(x1) >= 1.0 || k == 1) {
        orbit.polytope = PolytopeKind::Point;
        Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
        p(0) = x1;
        if (std::abs(x1) < 1.0 && k > 1)
            throw std::invalid_argument(
                "orbit_vertices: point orbit requires |x1| = 1");
        orbit.points.push_back(p);
        return orbit;
    }
    if (k < 2)
        throw std::invalid_argument("orbit_vertices: polytope orbits need k >= 2");
    orbit.polytope = kind;
    auto verts = detail::polytope_vertices(kind, k - 1);
    for (auto& v : verts) {
        if (orientation) {
            if (orientation->rows() != k - 1 || orientation->cols() != k - 1)
                throw std::invalid_argument("orbit_vertices: orientation size");
            v = (*orientation) * v;
        }
        Eigen::VectorXd p(k);
        p(0) = x1;
        p.tail(k - 1) = orbit.radius * v;
        orbit.points.push_back(p);
    }
    return orbit;
}

enum class DiscretizeStrategy { Auto, Simplex, Cross, Cube };

struct DiscretizeResult {
    ExactDesign design;
    std::vector<PolytopeKind> orbit_kinds;  // one per marginal support point
    double d_efficiency = 0.0;
    double log_det = kNegInf;
};

/// D-efficiency of a candidate exact design against a known optimal log-det,
/// (det M(candidate)/det M(optimal))^{1/k}.
inline double d_efficiency(const ExactDesign& candidate, double optimal_log_det,
                           int k, const Eigen::VectorXd& beta,
                           const IntensityModel& model) {
    InfoMatrix m = design_info(model, beta, candidate);
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) return 0.0;
    double ld = 0.0;
    for (int i = 0; i < m.rows(); ++i) {
        const double d = llt.matrixL()(i, i);
        if (!(d > 0.0)) return 0.0;
        ld += 2.0 * std::log(d);
    }
    if (!std::isfinite(ld)) return 0.0;
    return std::exp((ld - optimal_log_det) / double(k));
}

/// Replace each orbit of a marginal design by a polytope vertex set and round
/// to equal weights over all points.  The Auto strategy enumerates polytope
/// assignments and keeps the one with the highest D-efficiency against the
/// continuous optimum; forced strategies use one polytope kind for every
/// non-degenerate orbit.  Never throws for infeasible weights; the best
/// effort design and its efficiency are returned.
inline DiscretizeResult discretize_design(
    const IntensityModel& model, double beta0, double beta1,
    const MarginalDesign& marginal, int k,
    DiscretizeStrategy strategy = DiscretizeStrategy::Auto,
    const std::vector<std::size_t>& forced_counts = {},
    std::uint64_t orientation_seed = 0) {
    const ShiftedIntensity s(model, beta0, beta1);
    const double optimal_log_det = log_det_marginal(s, marginal, k);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
    beta(0) = beta0;
    beta(1) = beta1;

    // per-orbit candidate kinds
    std::vector<std::vector<PolytopeKind>> choices(marginal.size());
    for (std::size_t i = 0; i < marginal.size(); ++i) {
        const double x1 = marginal.points[i];
        if (std::abs(x1) >= 1.0 - 1e-12 || k == 1) {
            choices[i] = {PolytopeKind::Point};
        } else if (!forced_counts.empty()) {
            if (forced_counts.size() != marginal.size())
                throw std::invalid_argument(
                    "discretize_design: one vertex count per orbit required");
            std::vector<PolytopeKind> match;
            for (PolytopeKind kind : {PolytopeKind::Simplex,
                                      PolytopeKind::CrossPolytope,
                                      PolytopeKind::Cube})
                if (orbit_vertex_count(kind, k) == forced_counts[i]) {
                    match = {kind};
                    break;
                }
            if (match.empty())
                throw std::invalid_argument(
                    "discretize_design: no polytope with requested vertex count");
            choices[i] = match;
        } else {
            switch (strategy) {
                case DiscretizeStrategy::Auto:
                    choices[i] = {PolytopeKind::Simplex,
                                  PolytopeKind::CrossPolytope,
                                  PolytopeKind::Cube};
                    break;
                case DiscretizeStrategy::Simplex:
                    choices[i] = {PolytopeKind::Simplex};
                    break;
                case DiscretizeStrategy::Cross:
                    choices[i] = {PolytopeKind::CrossPolytope};
                    break;
                case DiscretizeStrategy::Cube:
                    choices[i] = {PolytopeKind::Cube};
                    break;
            }
        }
    }

    std::optional<Eigen::MatrixXd> orientation;
    if (orientation_seed != 0 && k >= 2)
        orientation = random_rotation(k - 1, orientation_seed);

    DiscretizeResult best;
    std::vector<std::size_t> pick(marginal.size(), 0);
    while (true) {
        ExactDesign cand;
        std::vector<PolytopeKind> kinds;
        std::size_t total = 0;
        for (std::size_t i = 0; i < marginal.size(); ++i) {
            const PolytopeKind kind = choices[i][pick[i]];
            auto orbit = orbit_vertices(k, marginal.points[i], kind, orientation);
            kinds.push_back(orbit.polytope);
            for (auto& p : orbit.points) cand.points.push_back(p);
            total += orbit.points.size();
        }
        cand.weights.assign(total, 1.0 / double(total));
        const double eff = d_efficiency(cand, optimal_log_det, k, beta, model);
        if (eff > best.d_efficiency) {
            best.design = std::move(cand);
            best.orbit_kinds = std::move(kinds);
            best.d_efficiency = eff;
            best.log_det = optimal_log_det + double(k) * std::log(eff);
        }
        // advance the mixed-radix counter over per-orbit choices
        std::size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < choices[i].size()) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return best;
}

}  // namespace ballopt

#endif  // BALLOPT_DISCRETIZE_HPP
