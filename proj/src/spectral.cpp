#include "agesis/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace agesis {

namespace {
constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 50;
constexpr double kDerivFloor = 1e-12;
}  // namespace

cplx char_g(cplx zeta, double tau, const ReducedCoeffs& rc) {
    return zeta * zeta + rc.b_coef * zeta + rc.c_coef +
           (rc.d_coef * zeta + rc.e_coef) * std::exp(-tau * zeta);
}

cplx char_g_deriv(cplx zeta, double tau, const ReducedCoeffs& rc) {
    return 2.0 * zeta + rc.b_coef +
           (rc.d_coef - tau * rc.d_coef * zeta - tau * rc.e_coef) * std::exp(-tau * zeta);
}

cplx det_delta(cplx lambda, double tau, const ReducedCoeffs& rc) {
    double mu = rc.e_coef / rc.d_coef;  // e = mu d
    cplx p1 = lambda + tau, p2 = lambda + mu * tau;
    if (std::abs(p1) < 1e-12 || std::abs(p2) < 1e-12)
        throw PoleError("transfer determinant evaluated at a pole (lambda = -tau or -mu tau)");
    cplx f = lambda * lambda + tau * rc.b_coef * lambda + tau * tau * rc.c_coef +
             (tau * rc.d_coef * lambda + tau * tau * rc.e_coef) * std::exp(-lambda);
    return f / (p1 * p2);
}

double omega0(const ReducedCoeffs& rc) {
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    double p = b * b - 2.0 * c - d * d;
    double q = c * c - e * e;
    double disc = p * p - 4.0 * q;
    if (disc < 0.0) throw NoCrossingError("frequency equation has no real root in sigma");
    double root = std::sqrt(disc);
    // Largest positive root of sigma^2 + p sigma + q = 0; in the admissible
    // regime (q < 0) it is the unique positive one.
    double sigma = (-p + root) / 2.0;
    if (!(sigma > 0.0)) throw NoCrossingError("frequency equation has no positive root");
    return std::sqrt(sigma);
}

double transversality(const ReducedCoeffs& rc, double w) {
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    return (2.0 * w * w + b * b - 2.0 * c - d * d) / (w * w * d * d + e * e);
}

HopfPoint tau_k(const ReducedCoeffs& rc, double w, int k) {
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    double den = d * d * w * w + e * e;
    double cosv = std::clamp(((e - b * d) * w * w - c * e) / den, -1.0, 1.0);
    double selector = w * (d * w * w + b * e - c * d);
    HopfPoint pt;
    pt.k = k;
    pt.omega0 = w;
    pt.branch_tie = selector == 0.0;
    double theta;
    if (selector >= 0.0) {
        theta = std::acos(cosv);
        pt.branch = "arccos";
    } else {
        theta = 2.0 * std::numbers::pi - std::acos(cosv);
        pt.branch = "two-pi-minus-arccos";
    }
    pt.tau_k = (theta + 2.0 * std::numbers::pi * k) / w;
    pt.transversality = transversality(rc, w);
    pt.residual = std::abs(char_g(cplx(0.0, w), pt.tau_k, rc));
    return pt;
}

double simplicity_check(const ReducedCoeffs& rc, double w, double tau_k, double floor) {
    double mag = std::abs(char_g_deriv(cplx(0.0, w), tau_k, rc));
    if (mag < floor)
        throw DegenerateRootError("crossing root is not simple: |g'| = " + std::to_string(mag));
    return mag;
}

cplx refine_root(cplx zeta0, double tau, const ReducedCoeffs& rc, RefineStats* stats) {
    cplx z = zeta0;
    for (int it = 0; it <= kNewtonMaxIter; ++it) {
        cplx g = char_g(z, tau, rc);
        if (std::abs(g) < kNewtonTol) {
            if (stats) *stats = {it, std::abs(g)};
            return z;
        }
        if (it == kNewtonMaxIter) break;
        cplx gp = char_g_deriv(z, tau, rc);
        if (std::abs(gp) < kDerivFloor)
            throw DerivativeVanishedError("Newton derivative vanished at zeta = (" +
                                          std::to_string(z.real()) + ", " +
                                          std::to_string(z.imag()) + ")");
        z -= g / gp;
    }
    throw MaxIterError("Newton did not reach |g| < 1e-12 within 50 iterations");
}

std::vector<double> scan_crossings(const ReducedCoeffs& rc, double omega_max, int n) {
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    double p = b * b - 2.0 * c - d * d;
    double q = c * c - e * e;
    auto h = [&](double w) {
        double s = w * w;
        return s * s + p * s + q;
    };
    n = std::max(n, 1000);
    std::vector<double> roots;
    double prev_w = 0.0, prev_h = h(0.0);
    for (int i = 1; i <= n; ++i) {
        double w = omega_max * double(i) / n;
        double hw = h(w);
        if (hw == 0.0) {
            roots.push_back(w);
        } else if (prev_h != 0.0 && ((prev_h < 0.0) != (hw < 0.0))) {
            double lo = prev_w, hi = w, flo = prev_h;
            for (int iter = 0; iter < 200 && (hi - lo) > 1e-15; ++iter) {
                double mid = 0.5 * (lo + hi), fm = h(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_w = w;
        prev_h = hw;
    }
    // Positive frequencies only; drop duplicates from adjacent cells.
    std::erase_if(roots, [](double w) { return w < 1e-9; });
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-9; }),
                roots.end());
    return roots;
}

std::vector<RootPathPoint> trace_leading_root(const ReducedCoeffs& rc, double tau_from,
                                              double tau_to, int steps) {
    double w = omega0(rc);
    // Anchor the continuation at the crossing nearest the requested range so
    // the Newton seed i*omega0 is closest to the actual root branch there.
    double spacing = 2.0 * std::numbers::pi / w;
    double theta = tau_k(rc, w, 0).tau_k;
    double mid = 0.5 * (tau_from + tau_to);
    int k_near = std::max(0, (int)std::llround((mid - theta) / spacing));
    double tau_anchor = theta + k_near * spacing;

    std::vector<double> taus(steps + 1);
    for (int i = 0; i <= steps; ++i)
        taus[i] = tau_from + (tau_to - tau_from) * double(i) / steps;
    int anchor_idx = 0;
    for (int i = 1; i <= steps; ++i)
        if (std::abs(taus[i] - tau_anchor) < std::abs(taus[anchor_idx] - tau_anchor))
            anchor_idx = i;

    std::vector<RootPathPoint> path(steps + 1);
    auto refine_at = [&](int idx, cplx seed) {
        try {
            path[idx] = {taus[idx], refine_root(seed, taus[idx], rc)};
        } catch (const Error& e) {
            throw MaxIterError("root continuation failed at tau = " + std::to_string(taus[idx]) +
                               ": " + e.what());
        }
    };
    refine_at(anchor_idx, cplx(0.0, w));
    for (int i = anchor_idx + 1; i <= steps; ++i) refine_at(i, path[i - 1].zeta);
    for (int i = anchor_idx - 1; i >= 0; --i) refine_at(i, path[i + 1].zeta);
    return path;
}

}  // namespace agesis
