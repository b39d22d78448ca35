#include "atlas/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace atlas::sf {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Series expansion of P(a,x), good for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_gamma_p: series did not converge");
}

// Modified Lentz continued fraction for Q(a,x), good for x >= a + 1.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_gamma_q: continued fraction did not converge");
}

double beta_cf(double x, double a, double b) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("reg_beta_i: continued fraction did not converge");
}

}  // namespace

double reg_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double reg_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double reg_beta_i(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0)
        throw std::domain_error("reg_beta_i: need a,b > 0 and x in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // tail is 1 to well below double precision
    if (lambda < 1.0) {
        // Dual (Jacobi theta) series, fast for small lambda.
        double sum = 0.0;
        const double f = M_PI * M_PI / (8.0 * lambda * lambda);
        for (int k = 1; k <= 21; k += 2) {
            const double term = std::exp(-f * static_cast<double>(k) * static_cast<double>(k));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return 1.0 - std::sqrt(2.0 * M_PI) / lambda * sum;
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term =
            std::exp(-2.0 * static_cast<double>(k) * static_cast<double>(k) * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

double student_t_critical(double confidence, double df) {
    if (!(confidence > 0.0 && confidence < 1.0) || !(df > 0.0))
        throw std::domain_error("student_t_critical: bad arguments");
    // P(|T| <= t) = 1 - I_{df/(df+t^2)}(df/2, 1/2); solve by bisection.
    const double target = 1.0 - confidence;
    double lo = 0.0, hi = 1.0;
    auto two_sided_tail = [&](double t) { return reg_beta_i(df / (df + t * t), df / 2.0, 0.5); };
    while (two_sided_tail(hi) > target) {
        hi *= 2.0;
        if (hi > 1e8) throw std::runtime_error("student_t_critical: bracket failed");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (two_sided_tail(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace atlas::sf
