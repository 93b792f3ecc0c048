#ifndef BALLOPT_MODELS_HPP
#define BALLOPT_MODELS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace ballopt {

/// An intensity function lambda together with its analytic companions.
///
/// The library works with the scalar weight lambda(z) that multiplies
/// f(x)f(x)^T in the elemental information matrix, where z is the linear
/// predictor.  Besides lambda itself we carry:
///   * log_lambda     — log lambda(z), stable far into the tails,
///   * dlog_lambda    — lambda'(z)/lambda(z),
///   * u_second       — second derivative of u = 1/lambda,
///   * mode           — the maximizer of lambda; +inf/-inf for strictly
///                      monotone intensities.
/// Property flags are declared per model (they encode analytic knowledge
/// such as injectivity of u'' that is not cheaply verifiable numerically).
struct IntensityModel {
    std::string name;
    std::function<double(double)> log_lambda;
    std::function<double(double)> dlog_lambda;
    std::function<double(double)> u_second;
    double mode = std::numeric_limits<double>::infinity();

    bool satisfies_A2 = false;       // lambda' > 0 everywhere
    bool satisfies_A2prime = false;  // unimodal with finite mode
    bool satisfies_A3 = false;       // u'' injective on R
    bool satisfies_A3prime = false;  // u'' injective on each side of the mode
    bool satisfies_A4 = false;       // lambda'/lambda non-increasing
    bool satisfies_A5 = false;       // 1/lambda dominates x^2 asymptotically

    double lambda(double x) const {
        check_finite(x);
        return std::exp(log_lambda(x));
    }
    double lambda_prime(double x) const {
        check_finite(x);
        return dlog_lambda(x) * lambda(x);
    }
    double log_lambda_at(double x) const {
        check_finite(x);
        return log_lambda(x);
    }
    double dlog_lambda_at(double x) const {
        check_finite(x);
        return dlog_lambda(x);
    }
    double u_second_at(double x) const {
        check_finite(x);
        return u_second(x);
    }

  private:
    static void check_finite(double x) {
        if (!std::isfinite(x))
            throw std::domain_error("IntensityModel: non-finite argument");
    }
};

namespace detail {

// log(erfc(z)) without underflow.  erfc itself dies near z ~ 26.5; beyond
// z = 8 the asymptotic series is accurate to ~1e-12.
inline double log_erfc(double z) {
    if (z < 8.0) return std::log(std::erfc(z));
    const double z2 = z * z;
    double series = 1.0;
    double term = 1.0;
    for (int n = 1; n <= 5; ++n) {
        term *= -(2.0 * n - 1.0) / (2.0 * z2);
        series += term;
    }
    return -z2 - std::log(z) - 0.5 * std::log(M_PI) + std::log(series);
}

constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;  // log(sqrt(2*pi))

inline double norm_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

// log Phi(x) = log(erfc(-x/sqrt(2))/2)
inline double norm_log_cdf(double x) {
    return log_erfc(-x / M_SQRT2) - M_LN2;
}

// hazard of the standard normal, phi(x)/(1 - Phi(x)), stable for large x
inline double norm_hazard(double x) {
    return std::exp(norm_log_pdf(x) - norm_log_cdf(-x));
}

}  // namespace detail

/// Logit intensity: lambda(x) = exp(x)/(1+exp(x))^2 = 1/(4 cosh^2(x/2)).
inline const IntensityModel& logit_model() {
    static const IntensityModel m = [] {
        IntensityModel m;
        m.name = "logit";
        m.mode = 0.0;
        m.satisfies_A2prime = true;
        m.satisfies_A3prime = true;
        m.satisfies_A5 = true;
        m.log_lambda = [](double x) {
            // x - 2*log1p(exp(x)), evaluated from the side that cannot overflow
            double a = -std::abs(x);
            return a - 2.0 * std::log1p(std::exp(a));
        };
        m.dlog_lambda = [](double x) { return -std::tanh(0.5 * x); };
        m.u_second = [](double x) { return 2.0 * std::cosh(x); };
        return m;
    }();
    return m;
}

/// Probit intensity: lambda(x) = phi(x)^2 / (Phi(x) (1 - Phi(x))).
inline const IntensityModel& probit_model() {
    static const IntensityModel m = [] {
        IntensityModel m;
        m.name = "probit";
        m.mode = 0.0;
        m.satisfies_A2prime = true;
        m.satisfies_A3prime = true;
        m.satisfies_A5 = true;
        m.log_lambda = [](double x) {
            return 2.0 * detail::norm_log_pdf(x) - detail::norm_log_cdf(x) -
                   detail::norm_log_cdf(-x);
        };
        m.dlog_lambda = [](double x) {
            return -2.0 * x + detail::norm_hazard(x) - detail::norm_hazard(-x);
        };
        m.u_second = [](double x) {
            // u'' = u * (dll^2 - dll') with
            // dll' = -2 + h'(x) + h'(-x),  h' = h^2 - x h
            const double hp = detail::norm_hazard(x);
            const double hm = detail::norm_hazard(-x);
            const double dll = -2.0 * x + hp - hm;
            const double dllp = -2.0 + (hp * hp - x * hp) + (hm * hm + x * hm);
            const double u = std::exp(-probit_model().log_lambda(x));
            return u * (dll * dll - dllp);
        };
        return m;
    }();
    return m;
}

/// Exponential (Poisson-type) intensity: lambda(x) = exp(x).
inline const IntensityModel& exponential_model() {
    static const IntensityModel m = [] {
        IntensityModel m;
        m.name = "exponential";
        m.mode = std::numeric_limits<double>::infinity();
        m.satisfies_A2 = true;
        m.satisfies_A3 = true;
        m.satisfies_A4 = true;  // lambda'/lambda == 1
        m.log_lambda = [](double x) { return x; };
        m.dlog_lambda = [](double) { return 1.0; };
        m.u_second = [](double x) { return std::exp(-x); };
        return m;
    }();
    return m;
}

inline const IntensityModel& model_by_name(const std::string& name) {
    if (name == "logit") return logit_model();
    if (name == "probit") return probit_model();
    if (name == "exponential") return exponential_model();
    throw std::invalid_argument("unknown model: " + name);
}

/// q(x1) = lambda(beta0 + beta1*x1), the shifted intensity of the canonical
/// one-dimensional marginal problem.  Requires beta1 >= 0 (canonicalize
/// first).
struct ShiftedIntensity {
    const IntensityModel* model;
    double beta0;
    double beta1;

    ShiftedIntensity(const IntensityModel& m, double b0, double b1)
        : model(&m), beta0(b0), beta1(b1) {
        if (b1 < 0.0)
            throw std::invalid_argument("ShiftedIntensity: beta1 must be >= 0");
    }

    double q(double x1) const { return model->lambda(beta0 + beta1 * x1); }
    double log_q(double x1) const {
        return model->log_lambda_at(beta0 + beta1 * x1);
    }
    double q_prime(double x1) const {
        return beta1 * model->lambda_prime(beta0 + beta1 * x1);
    }
    // q'/q, the only form the root equations need; stable in the tails
    double dlog_q(double x1) const {
        return beta1 * model->dlog_lambda_at(beta0 + beta1 * x1);
    }

    /// Mode of q on the x1 axis; +-inf when lambda is strictly monotone
    /// or beta1 == 0.
    double mode() const {
        const double cl = model->mode;
        if (beta1 == 0.0)
            return std::numeric_limits<double>::infinity();
        if (std::isinf(cl)) return cl;
        return (cl - beta0) / beta1;
    }
};

/// (q, q') at a point, chain rule applied once.
inline std::pair<double, double> q_bundle(const ShiftedIntensity& s, double x1) {
    return {s.q(x1), s.q_prime(x1)};
}

}  // namespace ballopt

#endif  // BALLOPT_MODELS_HPP
