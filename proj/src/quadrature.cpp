#include "atlas/quadrature.hpp"

#include <cmath>

namespace atlas {

namespace {

// G7/K15 nodes and weights on [-1, 1] (QUADPACK constants). Odd K15 nodes
// coincide with the G7 nodes.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWeightsG[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                 0.417959183673469};

struct PanelResult {
    double integral;
    double error;
    double resabs;  // integral of |f|, the roundoff scale of the panel
};

PanelResult gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum_k = 0.0, sum_g = 0.0, sum_abs = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * kNodes[i];
        double fv, fabs_v;
        if (i == 7) {
            fv = f(mid);
            fabs_v = std::abs(fv);
        } else {
            const double fa = f(mid - dx), fb = f(mid + dx);
            fv = fa + fb;
            fabs_v = std::abs(fa) + std::abs(fb);
        }
        sum_k += kWeightsK[i] * fv;
        sum_abs += kWeightsK[i] * fabs_v;
        // G7 nodes are the odd K15 nodes (the center, i == 7, included).
        if (i % 2 == 1) sum_g += kWeightsG[i / 2] * fv;
    }
    const double ik = sum_k * half;
    const double ig = sum_g * half;
    return {ik, std::abs(ik - ig), sum_abs * half};
}

struct Accumulator {
    double integral = 0.0;
    double error = 0.0;
    double resabs = 0.0;
};

void refine(const std::function<double(double)>& f, double lo, double hi, double tol, int depth,
            int max_depth, Accumulator& acc) {
    const PanelResult r = gk15(f, lo, hi);
    // Stop on the error target, on the roundoff floor relative to the
    // panel's absolute mass, or when the panel cannot be resolved further.
    const double floor = 1e-13 * r.resabs;
    const double width = hi - lo;
    const bool unresolvable =
        width <= 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)}) || depth >= max_depth;
    if (r.error <= tol || r.error <= floor || unresolvable) {
        acc.integral += r.integral;
        acc.error += r.error;
        acc.resabs += r.resabs;
        return;
    }
    const double mid = 0.5 * (lo + hi);
    refine(f, lo, mid, 0.5 * tol, depth + 1, max_depth, acc);
    refine(f, mid, hi, 0.5 * tol, depth + 1, max_depth, acc);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadOptions& opts) {
    if (!(hi > lo)) throw std::invalid_argument("integrate: need hi > lo");
    Accumulator acc;
    const int panels = std::max(1, opts.initial_panels);
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        refine(f, lo + p * width, lo + (p + 1) * width, opts.tol / panels, 0, opts.max_depth,
               acc);
    }
    // Allow the roundoff floor of the total absolute mass on top of the
    // requested target.
    if (acc.error > 10.0 * opts.tol + 1e-13 * acc.resabs)
        throw QuadratureError("integrate: error target not met", acc.integral, acc.error);
    return acc.integral;
}

double log_substituted_quadrature(const std::function<double(double)>& f, double tol) {
    QuadOptions opts;
    opts.tol = tol;
    // Narrow initial panels so that sharply peaked integrands (Gaussians in w
    // with scale down to ~0.15) are seen by the Kronrod nodes.
    opts.initial_panels = 64;
    auto g = [&f](double w) {
        const double y = std::exp(w);
        return f(y) * y;
    };
    return integrate(g, -100.0, 100.0, opts);
}

}  // namespace atlas
