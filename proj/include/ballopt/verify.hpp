#ifndef BALLOPT_VERIFY_HPP
#define BALLOPT_VERIFY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ballopt/core.hpp"

namespace ballopt {

constexpr double kKwTolerance = 1e-6;

struct KwReport {
    double max_psi = kNegInf;
    double argmax_x1 = 0.0;
    bool pass = false;
};

/// Kiefer-Wolfowitz equivalence check: psi(x1) <= k+1 on a uniform grid
/// over [-1,1].  Support points of a D-optimal design attain k+1.
inline KwReport kw_check(const ShiftedIntensity& s, const MarginalDesign& xi1,
                         int k, int grid_size = 10001,
                         double tolerance = kKwTolerance) {
    if (grid_size < 2) throw std::invalid_argument("kw_check: grid too small");
    KwReport rep;
    for (int i = 0; i < grid_size; ++i) {
        const double x1 = -1.0 + 2.0 * double(i) / double(grid_size - 1);
        const double psi = sensitivity(s, xi1, k, x1);
        if (psi > rep.max_psi) {
            rep.max_psi = psi;
            rep.argmax_x1 = x1;
        }
    }
    rep.pass = rep.max_psi <= double(k + 1) + tolerance;
    return rep;
}

/// Weight of the larger support point that maximizes the two-point log-det
/// for fixed support, from the stationarity condition in alpha.  a and b are
/// q(x)(1-x^2) and q(y)(1-y^2).  For k = 1 the optimum is always 1/2.
inline double optimal_two_point_alpha(double a, double b, int k) {
    if (k == 1) return 0.5;
    const double c = a - b;
    if (c == 0.0) return 0.5;
    // stationarity is quadratic: -(k+1) c t^2 + (k c - 2 b) t + b = 0
    const double qa = -double(k + 1) * c;
    const double qb = double(k) * c - 2.0 * b;
    const double qc = b;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return 0.5;
    const double sq = std::sqrt(disc);
    const double shifted = -(qb + (qb >= 0 ? sq : -sq)) / 2.0;
    for (double root : {shifted / qa, qc / shifted}) {
        if (root > 0.0 && root < 1.0) return root;
    }
    return 0.5;
}

/// Brute-force maximizer of the two-point log-det over a grid of support
/// pairs, with the weight solved in closed form per pair.  Independent of
/// the case analysis; used as a test oracle.
inline MarginalDesign oracle_two_point(const ShiftedIntensity& s, int k,
                                       int resolution = 2001) {
    if (resolution < 101)
        throw std::invalid_argument("oracle_two_point: resolution too coarse");
    std::vector<double> grid(resolution), logq(resolution), orb(resolution);
    for (int i = 0; i < resolution; ++i) {
        grid[i] = -1.0 + 2.0 * double(i) / double(resolution - 1);
        logq[i] = s.log_q(grid[i]);
        orb[i] = s.q(grid[i]) * (1.0 - grid[i] * grid[i]);
    }
    double best = kNegInf;
    double bx = 1.0, by = -1.0, ba = 0.5;
    const double logk1 = k >= 2 ? std::log(double(k - 1)) : 0.0;
    for (int i = 1; i < resolution; ++i) {
        for (int j = 0; j < i; ++j) {
            const double alpha = optimal_two_point_alpha(orb[i], orb[j], k);
            double ld = logq[i] + logq[j] + 2.0 * std::log(grid[i] - grid[j]) +
                        std::log(alpha) + std::log1p(-alpha);
            if (k >= 2) {
                const double d = orb[i] * alpha + orb[j] * (1.0 - alpha);
                if (!(d > 0.0)) continue;
                ld += double(k - 1) * (std::log(d) - logk1);
            }
            if (ld > best) {
                best = ld;
                bx = grid[i];
                by = grid[j];
                ba = alpha;
            }
        }
    }
    return MarginalDesign({bx, by}, {ba, 1.0 - ba});
}

/// Three-point oracle for intensities without (A5): supports {1, m, -1} with
/// an interior m swept over a grid and D-optimal weights found by the
/// multiplicative algorithm.  Also tries all two-point designs; returns the
/// overall best.
inline MarginalDesign oracle_three_point(const ShiftedIntensity& s, int k,
                                         int resolution = 2001) {
    MarginalDesign best = oracle_two_point(s, k, resolution);
    double best_ld = log_det_marginal(s, best, k);
    for (int i = 1; i + 1 < resolution; ++i) {
        const double m = -1.0 + 2.0 * double(i) / double(resolution - 1);
        MarginalDesign xi({1.0, m, -1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
        for (int it = 0; it < 400; ++it) {
            double ld = log_det_marginal(s, xi, k);
            if (!std::isfinite(ld)) break;
            double total = 0.0;
            for (std::size_t p = 0; p < xi.size(); ++p) {
                xi.weights[p] *=
                    sensitivity(s, xi, k, xi.points[p]) / double(k + 1);
                total += xi.weights[p];
            }
            for (auto& w : xi.weights) w /= total;
        }
        const double ld = log_det_marginal(s, xi, k);
        if (ld > best_ld) {
            best_ld = ld;
            best = xi;
        }
    }
    return best;
}

}  // namespace ballopt

#endif  // BALLOPT_VERIFY_HPP
