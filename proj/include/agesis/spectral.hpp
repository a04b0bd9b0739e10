#pragma once
#include <string>
#include <vector>

#include "agesis/model.hpp"

namespace agesis {

// One imaginary-axis crossing of the characteristic root pair: at delay
// tau_k the roots +-(i omega0) sit exactly on the axis and move right with
// positive speed (transversality > 0 in the admissible regime).
struct HopfPoint {
    int k = 0;                 // crossing index
    double omega0 = 0.0;       // crossing frequency (rescaled root variable)
    double tau_k = 0.0;        // critical delay
    std::string branch;        // "arccos" | "two-pi-minus-arccos"
    bool branch_tie = false;   // branch selector was exactly zero (resolved to arccos)
    double transversality = 0.0;
    double residual = 0.0;     // |g(i omega0; tau_k)|
};

// Characteristic function of the linearization in the rescaled root variable:
//   g(zeta) = zeta^2 + B zeta + C + (D zeta + E) e^(-tau zeta).
cplx char_g(cplx zeta, double tau, const ReducedCoeffs& coeffs);

// dg/dzeta = 2 zeta + B + (D - tau D zeta - tau E) e^(-tau zeta).
cplx char_g_deriv(cplx zeta, double tau, const ReducedCoeffs& coeffs);

// Transfer determinant in the unscaled root variable lambda = tau zeta:
//   det(lambda) = f(lambda) / [(lambda + tau)(lambda + mu tau)]
// with f(lambda) = lambda^2 + tau B lambda + tau^2 C
//                 + (tau D lambda + tau^2 E) e^(-lambda).
// Throws PoleError at lambda in {-tau, -mu tau}.
cplx det_delta(cplx lambda, double tau, const ReducedCoeffs& coeffs);

// Unique positive crossing frequency from the frequency equation
//   omega^4 + (B^2 - 2C - D^2) omega^2 + C^2 - E^2 = 0
// (largest positive root of the quadratic in sigma = omega^2).
// Throws NoCrossingError when no positive root exists.
double omega0(const ReducedCoeffs& coeffs);

// k-th critical delay from the crossing angle
//   cos(theta) = [(E - B D) w^2 - C E] / (D^2 w^2 + E^2),
// branch arccos when w (D w^2 + B E - C D) >= 0, else 2 pi - arccos;
// tau_k = (theta + 2 k pi) / w. Returns the fully populated HopfPoint.
HopfPoint tau_k(const ReducedCoeffs& coeffs, double omega0, int k);

// Closed-form crossing-speed quotient
//   (2 w^2 + B^2 - 2C - D^2) / (w^2 D^2 + E^2);
// its sign equals the sign of d Re(root)/d tau at every crossing.
double transversality(const ReducedCoeffs& coeffs, double omega0);

// |dg/dzeta| at the crossing; throws DegenerateRootError below the floor
// (the crossing root must be simple).
double simplicity_check(const ReducedCoeffs& coeffs, double omega0, double tau_k,
                        double floor = 1e-8);

// Newton refinement of a root of g(.; tau). Stops at |g| < 1e-12; at most 50
// iterations (MaxIterError), derivative floor 1e-12 (DerivativeVanishedError).
struct RefineStats {
    int iterations = 0;
    double residual = 0.0;
};
cplx refine_root(cplx zeta0, double tau, const ReducedCoeffs& coeffs,
                 RefineStats* stats = nullptr);

// Brute-force oracle for omega0: sign-change scan of the quartic
// omega^4 + (B^2-2C-D^2) omega^2 + (C^2-E^2) on [0, omega_max] with n grid
// cells (n floored at 1000), each bracket refined by bisection. Independent
// of the crossing-angle machinery by construction.
std::vector<double> scan_crossings(const ReducedCoeffs& coeffs, double omega_max, int n);

// Newton continuation of the crossing root pair's analytic branch across a
// delay range. Anchored at the crossing nearest the range, then marched
// outward so each refinement is seeded by its neighbor.
struct RootPathPoint {
    double tau;
    cplx zeta;
};
std::vector<RootPathPoint> trace_leading_root(const ReducedCoeffs& coeffs, double tau_from,
                                              double tau_to, int steps);

}  // namespace agesis
