#include "agesis/model.hpp"

namespace agesis {

ModelParams validate(const ModelParams& params) {
    if (!(params.lambda > 0.0))
        throw RangeError("lambda must be positive (got " + std::to_string(params.lambda) + ")");
    if (!(params.mu > 0.0 && params.mu < 1.0))
        throw RangeError("mu must lie in (0, 1) (got " + std::to_string(params.mu) + ")");
    if (!(params.eta > 0.0 && params.eta < 1.0))
        throw RangeError("eta must lie in (0, 1) (got " + std::to_string(params.eta) + ")");
    if (!(params.lambda - params.mu > 0.0))
        throw EndemicityError("lambda - mu must be positive for an endemic equilibrium (got " +
                              std::to_string(params.lambda - params.mu) + ")");
    return params;
}

ReducedCoeffs reduced_coeffs(const ModelParams& p) {
    ReducedCoeffs rc;
    rc.xi = (p.lambda - p.mu) / (1.0 + p.mu - p.eta);
    rc.d_coef = (p.lambda - p.mu) / (1.0 + p.lambda - p.eta);
    rc.c_coef = (1.0 - p.eta) * rc.d_coef;
    rc.e_coef = p.mu * rc.d_coef;
    rc.b_coef = (p.mu * (p.lambda - p.eta) + p.lambda) / (p.lambda - p.mu) * rc.d_coef;
    return rc;
}

Equilibrium equilibrium(const ModelParams& p, double tau) {
    if (!(p.lambda - p.mu > 0.0))
        throw EndemicityError("lambda - mu must be positive for an endemic equilibrium");
    Equilibrium eq;
    eq.xi = (p.lambda - p.mu) / (1.0 + p.mu - p.eta);
    eq.s_bar = 1.0 + eq.xi;
    eq.i_bar = make_expsum({{cplx(eq.xi * tau, 0.0), cplx(tau, 0.0)}});
    double rho0 = p.lambda + eq.xi * (p.eta - 1.0);  // equals mu * s_bar
    eq.rho_bar = make_expsum({{cplx(rho0 * tau, 0.0), cplx(p.mu * tau, 0.0)}});
    return eq;
}

AssumptionReport assumption_report(const ReducedCoeffs& rc) {
    const double b = rc.b_coef, c = rc.c_coef, d = rc.d_coef, e = rc.e_coef;
    // lambda - mu is recoverable from the coefficients: c + e = (1 + mu - eta) d,
    // so xi (c + e) / d = lambda - mu.
    double lam_minus_mu = d != 0.0 ? rc.xi * (c + e) / d : 0.0;
    AssumptionReport rep;
    rep.entries[0] = {"lambda-minus-mu", lam_minus_mu, lam_minus_mu > 0.0};
    rep.entries[1] = {"c-minus-e", c - e, c - e < 0.0};
    rep.entries[2] = {"two-e-minus-bd", 2.0 * e - b * d, 2.0 * e - b * d < 0.0};
    rep.entries[3] = {"two-c-minus-b-squared", 2.0 * c - b * b, 2.0 * c - b * b < 0.0};
    double last = e * (b * b - 2.0 * c) - b * c * d;
    rep.entries[4] = {"e-bsq-minus-2c-minus-bcd", last, last < 0.0};
    rep.all_pass = true;
    for (const auto& en : rep.entries) rep.all_pass = rep.all_pass && en.pass;
    return rep;
}

OriginalPoint unscale(double t_hat, double a_hat, double i_hat, double tau) {
    return {tau * t_hat, tau * a_hat, i_hat / tau};
}

ScaledPoint rescale(double t, double a, double i, double tau) {
    return {t / tau, a / tau, i * tau};
}

}  // namespace agesis
