#ifndef BALLOPT_SOLVER_HPP
#define BALLOPT_SOLVER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ballopt/core.hpp"
#include "ballopt/discretize.hpp"
#include "ballopt/equivariance.hpp"
#include "ballopt/models.hpp"
#include "ballopt/verify.hpp"

namespace ballopt {

enum class CaseLabel { A, B, C, Degenerate };

inline std::string to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::A: return "a";
        case CaseLabel::B: return "b";
        case CaseLabel::C: return "c";
        case CaseLabel::Degenerate: return "degenerate";
    }
    return "?";
}

struct SolverDiagnostics {
    int iterations = 0;
    double residual = 0.0;
    bool interior = false;  // case c only: interior stationary point found
};

struct SolveReport {
    CaseLabel case_label = CaseLabel::Degenerate;
    MarginalDesign marginal;
    double log_det = kNegInf;
    double kw_max = kNegInf;
    double kw_argmax = 0.0;
    bool kw_pass = false;
    CanonicalProblem canonical;
    SolverDiagnostics diag;
};

/// Case classification of Theorem-2 type: the position of the mode of q
/// relative to [-1,1].  Strictly increasing intensities (mode +inf) are
/// always case a, strictly decreasing ones case b.
inline CaseLabel classify(const ShiftedIntensity& s, int /*k*/) {
    if (s.beta1 < 0.0)
        throw std::invalid_argument("classify: beta1 < 0, canonicalize first");
    if (s.beta1 < 1e-14) return CaseLabel::Degenerate;
    const double cq = s.mode();
    if (cq > 1.0) return CaseLabel::A;
    if (cq < -1.0) return CaseLabel::B;
    return CaseLabel::C;
}

namespace detail {

/// All roots of f on [lo, hi] found by a sign-change scan plus bisection.
inline std::vector<double> bracketed_roots(const std::function<double(double)>& f,
                                           double lo, double hi, int scan = 2001) {
    std::vector<double> roots;
    double xa = lo, fa = f(lo);
    for (int i = 1; i < scan; ++i) {
        const double xb = lo + (hi - lo) * double(i) / double(scan - 1);
        const double fb = f(xb);
        if (fa == 0.0) roots.push_back(xa);
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
            double a = xa, b = xb, va = fa;
            for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
                const double m = 0.5 * (a + b);
                const double vm = f(m);
                if (vm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((va < 0.0) == (vm < 0.0)) {
                    a = m;
                    va = vm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(xa);
    return roots;
}

}  // namespace detail

/// Case a: upper support point pinned to x1 = 1 with weight 1/(k+1); the
/// inner point solves q'/q = 2(1+kx)/(k(1-x^2)) for k >= 2 (the bracket
/// h(-1) >= 0 > h(1) is structural), or q'/q = 2/(1-x) with fallback to -1
/// for k = 1.  With several roots the best log-det candidate wins.
inline MarginalDesign solve_case_a(const ShiftedIntensity& s, int k) {
    const double w1 = 1.0 / double(k + 1);
    std::vector<double> candidates;
    if (k >= 2) {
        auto h = [&](double x) {
            return s.dlog_q(x) * double(k) * (1.0 - x * x) -
                   2.0 * (1.0 + double(k) * x);
        };
        candidates = detail::bracketed_roots(h, -1.0, 1.0);
        if (candidates.empty())
            throw std::runtime_error("solve_case_a: no root found");
    } else {
        auto h = [&](double x) { return s.dlog_q(x) * (1.0 - x) - 2.0; };
        candidates = detail::bracketed_roots(h, -1.0, 1.0 - 1e-12);
        candidates.push_back(-1.0);
    }
    MarginalDesign best;
    double best_ld = kNegInf;
    for (double x12 : candidates) {
        if (x12 >= 1.0) continue;
        MarginalDesign xi({1.0, x12}, {w1, 1.0 - w1});
        const double ld = log_det_marginal(s, xi, k);
        if (ld > best_ld) {
            best_ld = ld;
            best = xi;
        }
    }
    if (best.size() != 2) throw std::runtime_error("solve_case_a: degenerate");
    // residual check on the accepted root (skip the k=1 boundary fallback)
    const double x12 = best.points[1];
    if (x12 > -1.0 + 1e-12) {
        const double lhs = s.dlog_q(x12);
        const double rhs = k >= 2
                               ? 2.0 * (1.0 + k * x12) / (k * (1.0 - x12 * x12))
                               : 2.0 / (1.0 - x12);
        if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
            throw std::runtime_error("solve_case_a: root residual too large");
    }
    return best;
}

/// Case b: mirror of case a under x1 -> -x1; the lower point is pinned to
/// -1 with weight 1/(k+1).
inline MarginalDesign solve_case_b(const ShiftedIntensity& s, int k) {
    const double w2 = 1.0 / double(k + 1);
    std::vector<double> candidates;
    if (k >= 2) {
        auto h = [&](double x) {
            return s.dlog_q(x) * double(k) * (1.0 - x * x) -
                   2.0 * (-1.0 + double(k) * x);
        };
        candidates = detail::bracketed_roots(h, -1.0, 1.0);
        if (candidates.empty())
            throw std::runtime_error("solve_case_b: no root found");
    } else {
        auto h = [&](double x) { return s.dlog_q(x) * (1.0 + x) + 2.0; };
        candidates = detail::bracketed_roots(h, -1.0 + 1e-12, 1.0);
        candidates.push_back(1.0);
    }
    MarginalDesign best;
    double best_ld = kNegInf;
    for (double x11 : candidates) {
        if (x11 <= -1.0) continue;
        MarginalDesign xi({x11, -1.0}, {1.0 - w2, w2});
        const double ld = log_det_marginal(s, xi, k);
        if (ld > best_ld) {
            best_ld = ld;
            best = xi;
        }
    }
    if (best.size() != 2) throw std::runtime_error("solve_case_b: degenerate");
    const double x11 = best.points[0];
    if (x11 < 1.0 - 1e-12) {
        const double lhs = s.dlog_q(x11);
        const double rhs = k >= 2
                               ? 2.0 * (-1.0 + k * x11) / (k * (1.0 - x11 * x11))
                               : -2.0 / (1.0 + x11);
        if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(rhs)))
            throw std::runtime_error("solve_case_b: root residual too large");
    }
    return best;
}

namespace detail {

/// Stationarity residuals of the two-point log-det in (x, y, alpha).
/// For k = 1 the third equation pins alpha = 1/2 and the orbit terms vanish.
inline Eigen::Vector3d case_c_residual(const ShiftedIntensity& s, int k,
                                       double x, double y, double alpha) {
    const double qx = s.q(x), qy = s.q(y);
    const double dx = s.dlog_q(x), dy = s.dlog_q(y);
    Eigen::Vector3d e;
    if (k == 1) {
        e(0) = dx + 2.0 / (x - y);
        e(1) = dy - 2.0 / (x - y);
        e(2) = alpha - 0.5;
        return e;
    }
    const double ax = qx * (1.0 - x * x);
    const double ay = qy * (1.0 - y * y);
    const double d = ax * alpha + ay * (1.0 - alpha);
    e(0) = dx + 2.0 / (x - y) +
           double(k - 1) * (dx * ax - 2.0 * x * qx) * alpha / d;
    e(1) = dy - 2.0 / (x - y) +
           double(k - 1) * (dy * ay - 2.0 * y * qy) * (1.0 - alpha) / d;
    e(2) = 1.0 / alpha - 1.0 / (1.0 - alpha) + double(k - 1) * (ax - ay) / d;
    return e;
}

struct CaseCResult {
    bool interior = false;
    double x = 0.0, y = 0.0, alpha = 0.5;
    double log_det = kNegInf;
    double residual = 0.0;
    int iterations = 0;
};

/// Interior stationary point of case c, by direct maximization: a coarse
/// grid over the support pair with the weight solved in closed form, local
/// grid refinement, then a damped Newton polish of the stationarity system.
inline CaseCResult solve_case_c_interior(const ShiftedIntensity& s, int k) {
    auto objective = [&](double x, double y) {
        const double a = optimal_two_point_alpha(s.q(x) * (1.0 - x * x),
                                                 s.q(y) * (1.0 - y * y), k);
        return std::make_pair(log_det_two_point(s, x, y, a, k), a);
    };

    // coarse grid
    const int n = 81;
    double bx = 0.5, by = -0.5, ba = 0.5, best = kNegInf;
    for (int i = 1; i < n; ++i) {
        const double x = -1.0 + 2.0 * double(i) / double(n - 1);
        for (int j = 0; j < i; ++j) {
            const double y = -1.0 + 2.0 * double(j) / double(n - 1);
            auto [ld, a] = objective(x, y);
            if (ld > best) {
                best = ld;
                bx = x;
                by = y;
                ba = a;
            }
        }
    }
    // zoom refinement
    double span = 2.0 / double(n - 1);
    for (int round = 0; round < 18; ++round) {
        const int m = 9;
        double nbx = bx, nby = by, nba = ba;
        for (int i = 0; i < m; ++i) {
            const double x = std::clamp(
                bx + span * (2.0 * double(i) / double(m - 1) - 1.0), -1.0, 1.0);
            for (int j = 0; j < m; ++j) {
                const double y = std::clamp(
                    by + span * (2.0 * double(j) / double(m - 1) - 1.0), -1.0,
                    1.0);
                if (!(x > y)) continue;
                auto [ld, a] = objective(x, y);
                if (ld > best) {
                    best = ld;
                    nbx = x;
                    nby = y;
                    nba = a;
                }
            }
        }
        bx = nbx;
        by = nby;
        ba = nba;
        span *= 0.35;
    }

    CaseCResult res;
    res.x = bx;
    res.y = by;
    res.alpha = ba;
    res.log_det = best;

    const double face = 1e-7;
    const bool near_interior = bx < 1.0 - 1e-4 && by > -1.0 + 1e-4;
    if (!near_interior) {
        res.residual = case_c_residual(s, k, bx, by, ba).cwiseAbs().maxCoeff();
        return res;  // boundary maximum, dispatcher falls back to cases a/b
    }

    // damped Newton on the stationarity system, finite-difference Jacobian
    Eigen::Vector3d z(bx, by, ba);
    Eigen::Vector3d e = case_c_residual(s, k, z(0), z(1), z(2));
    int it = 0;
    for (; it < 80 && e.cwiseAbs().maxCoeff() > 1e-12; ++it) {
        Eigen::Matrix3d jac;
        const double h = 1e-7;
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d zp = z, zm = z;
            zp(c) += h;
            zm(c) -= h;
            jac.col(c) = (case_c_residual(s, k, zp(0), zp(1), zp(2)) -
                          case_c_residual(s, k, zm(0), zm(1), zm(2))) /
                         (2.0 * h);
        }
        Eigen::Vector3d step = jac.fullPivLu().solve(-e);
        double t = 1.0;
        bool moved = false;
        for (int back = 0; back < 40; ++back, t *= 0.5) {
            Eigen::Vector3d zn = z + t * step;
            if (!(zn(0) > zn(1)) || zn(0) > 1.0 - face || zn(1) < -1.0 + face ||
                zn(2) < face || zn(2) > 1.0 - face)
                continue;
            Eigen::Vector3d en = case_c_residual(s, k, zn(0), zn(1), zn(2));
            if (en.norm() < e.norm()) {
                z = zn;
                e = en;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    res.iterations = it;
    res.residual = e.cwiseAbs().maxCoeff();
    const double ld = log_det_two_point(s, z(0), z(1), z(2), k);
    if (std::isfinite(ld) && ld >= res.log_det - 1e-9) {
        res.x = z(0);
        res.y = z(1);
        res.alpha = z(2);
        res.log_det = ld;
    }
    res.interior = res.x < 1.0 - face && res.y > -1.0 + face &&
                   res.alpha > face && res.alpha < 1.0 - face &&
                   res.residual <= 1e-9;
    return res;
}

}  // namespace detail

/// Case c: interior two-point solution of the stationarity system if one
/// exists; std::nullopt signals fallback to the boundary forms of cases a/b.
inline std::optional<MarginalDesign> solve_case_c(const ShiftedIntensity& s,
                                                  int k,
                                                  SolverDiagnostics* diag = nullptr) {
    const auto res = detail::solve_case_c_interior(s, k);
    if (diag) {
        diag->iterations = res.iterations;
        diag->residual = res.residual;
        diag->interior = res.interior;
    }
    if (!res.interior) return std::nullopt;
    return MarginalDesign({res.x, res.y}, {res.alpha, 1.0 - res.alpha});
}

/// beta1 = 0: the equally weighted regular simplex inscribed in the unit
/// sphere (one vertex at e1); its normalized information matrix is
/// diag(1, 1/k, ..., 1/k).
inline ExactDesign solve_degenerate(int k) {
    ExactDesign d;
    const double w = 1.0 / double(k + 1);
    Eigen::VectorXd apex = Eigen::VectorXd::Zero(k);
    apex(0) = 1.0;
    d.points.push_back(apex);
    d.weights.push_back(w);
    if (k == 1) {
        Eigen::VectorXd low(1);
        low(0) = -1.0;
        d.points.push_back(low);
        d.weights.push_back(w);
        return d;
    }
    auto orbit = orbit_vertices(k, -1.0 / double(k), PolytopeKind::Simplex);
    for (auto& p : orbit.points) {
        d.points.push_back(p);
        d.weights.push_back(w);
    }
    return d;
}

/// Marginal of the degenerate simplex design: {1: 1/(k+1), -1/k: k/(k+1)}.
inline MarginalDesign degenerate_marginal(int k) {
    if (k == 1) return MarginalDesign({1.0, -1.0}, {0.5, 0.5});
    return MarginalDesign({1.0, -1.0 / double(k)},
                          {1.0 / double(k + 1), double(k) / double(k + 1)});
}

/// Closed-form limit of the inner support point for the logit model as
/// beta0 -> -inf; test oracle for extreme shifts.
inline double asymptotic_inner_point(double beta1, int k) {
    if (beta1 < 0.0)
        throw std::invalid_argument("asymptotic_inner_point: beta1 < 0");
    if (beta1 == 0.0) return -1.0 / double(k);
    const double disc = 1.0 - 2.0 * beta1 / double(k) + beta1 * beta1;
    return (-1.0 + std::sqrt(std::max(0.0, disc))) / beta1;
}

/// Solve the canonical problem (beta0, beta1 >= 0) in dimension k:
/// classify, run the applicable case solvers, keep the best log-det
/// candidate, and certify it with the Kiefer-Wolfowitz check.
inline SolveReport solve_canonical(const IntensityModel& model, double beta0,
                                   double beta1, int k, int kw_grid = 10001) {
    if (k < 1) throw std::invalid_argument("solve_canonical: k must be >= 1");
    SolveReport rep;
    rep.canonical.k = k;
    rep.canonical.beta0 = beta0;
    rep.canonical.beta1_tilde = std::max(beta1, 0.0);
    rep.canonical.rotation = Eigen::MatrixXd::Identity(k, k);
    const ShiftedIntensity s(model, beta0, std::max(beta1, 0.0));
    rep.case_label = classify(s, k);

    if (rep.case_label == CaseLabel::Degenerate) {
        rep.marginal = degenerate_marginal(k);
    } else {
        std::vector<MarginalDesign> candidates;
        if (rep.case_label == CaseLabel::A) {
            candidates.push_back(solve_case_a(s, k));
        } else if (rep.case_label == CaseLabel::B) {
            candidates.push_back(solve_case_b(s, k));
        } else {
            auto interior = solve_case_c(s, k, &rep.diag);
            if (interior) candidates.push_back(*interior);
            candidates.push_back(solve_case_a(s, k));
            candidates.push_back(solve_case_b(s, k));
        }
        double best = kNegInf;
        for (auto& c : candidates) {
            const double ld = log_det_marginal(s, c, k);
            if (ld > best) {
                best = ld;
                rep.marginal = c;
            }
        }
    }

    rep.log_det = log_det_marginal(s, rep.marginal, k);
    const auto kw = kw_check(s, rep.marginal, k, kw_grid);
    rep.kw_max = kw.max_psi;
    rep.kw_argmax = kw.argmax_x1;
    rep.kw_pass = kw.pass;
    return rep;
}

/// Full solve: canonicalize an arbitrary beta, solve the reduced problem.
/// The returned report carries the rotation needed to push discretized
/// designs back to the original frame.
inline SolveReport solve(const IntensityModel& model,
                         const Eigen::VectorXd& beta, int kw_grid = 10001) {
    const CanonicalProblem cp = canonicalize(beta);
    SolveReport rep =
        solve_canonical(model, cp.beta0, cp.beta1_tilde, cp.k, kw_grid);
    rep.canonical = cp;
    return rep;
}

/// Endpoints of the beta0 interval around the mode where the case-c
/// solution has two interior support points, located by bisection on beta0
/// to the requested tolerance.
inline std::pair<double, double> case_c_interval(const IntensityModel& model,
                                                 int k, double beta1,
                                                 double tol = 1e-3) {
    if (!std::isfinite(model.mode))
        throw std::invalid_argument("case_c_interval: needs a unimodal model");
    const double center = model.mode;
    auto interior_at = [&](double beta0) {
        const SolveReport rep = solve_canonical(model, beta0, beta1, k, 101);
        return rep.marginal.size() == 2 &&
               rep.marginal.points.front() < 1.0 - 1e-6 &&
               rep.marginal.points.back() > -1.0 + 1e-6;
    };
    if (!interior_at(center))
        return {std::nan(""), std::nan("")};
    auto bisect = [&](double inner, double outer) {
        while (std::abs(outer - inner) > tol) {
            const double mid = 0.5 * (inner + outer);
            (interior_at(mid) ? inner : outer) = mid;
        }
        return 0.5 * (inner + outer);
    };
    const double hi = bisect(center, center + beta1);
    const double lo = bisect(center, center - beta1);
    return {lo, hi};
}

}  // namespace ballopt

#endif  // BALLOPT_SOLVER_HPP
