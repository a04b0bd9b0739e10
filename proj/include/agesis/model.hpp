#pragma once
#include <array>
#include <string>

#include "agesis/expsum.hpp"

namespace agesis {

// Epidemiological constants of the age-since-infection SIS model with the
// step contact kernel (zero influence before age 1 in rescaled age, plateau
// e^tau after). tau, the kernel switch age in original units, doubles as the
// bifurcation parameter and is passed separately where needed.
struct ModelParams {
    double lambda;  // recruitment rate, > 0
    double mu;      // natural death rate, 0 < mu < 1
    double eta;     // recovery rate, 0 < eta < 1
};

// The scalar quintuple driving every spectral formula. All five are exact
// arithmetic in the parameters:
//   d = (lambda-mu)/(1+lambda-eta),  c = (1-eta) d,  e = mu d,
//   b = [mu(lambda-eta)+lambda]/(lambda-mu) d,
//   xi = (lambda-mu)/(1+mu-eta)   (total infected at equilibrium).
struct ReducedCoeffs {
    double xi;
    double b_coef;
    double c_coef;
    double d_coef;
    double e_coef;
};

// The unique positive equilibrium in rescaled coordinates.
struct Equilibrium {
    double s_bar;     // susceptible level, equals 1 + xi
    double xi;        // total infected
    ExpSum i_bar;     // infected age profile, xi * tau * exp(-tau a)
    ExpSum rho_bar;   // susceptible age profile, [lambda + xi(eta-1)] tau exp(-mu tau a)
};

// One signed admissibility quantity with its required strict sign satisfied
// or not. The five quantities gate the crossing analysis:
//   lambda - mu > 0,  c - e < 0,  2e - bd < 0,  2c - b^2 < 0,
//   e(b^2 - 2c) - bcd < 0.
struct AssumptionEntry {
    std::string name;
    double value;
    bool pass;
};

struct AssumptionReport {
    std::array<AssumptionEntry, 5> entries;
    bool all_pass;
};

// Returns params unchanged if all range constraints hold; otherwise throws
// RangeError (naming the violated constraint) or EndemicityError when
// lambda <= mu (no positive equilibrium).
ModelParams validate(const ModelParams& params);

ReducedCoeffs reduced_coeffs(const ModelParams& params);

Equilibrium equilibrium(const ModelParams& params, double tau);

// Report only, never a guard: callers decide what to do with failures.
AssumptionReport assumption_report(const ReducedCoeffs& coeffs);

// Change of variables between rescaled and original coordinates:
// t = tau*t_hat, a = tau*a_hat, density i = i_hat / tau.
struct OriginalPoint {
    double t;
    double a;
    double i;
};
struct ScaledPoint {
    double t_hat;
    double a_hat;
    double i_hat;
};

OriginalPoint unscale(double t_hat, double a_hat, double i_hat, double tau);
ScaledPoint rescale(double t, double a, double i, double tau);

}  // namespace agesis
