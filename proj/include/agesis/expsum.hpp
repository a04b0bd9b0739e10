#pragma once
#include <complex>
#include <vector>

#include "agesis/errors.hpp"

namespace agesis {

using cplx = std::complex<double>;

// One term c * exp(-r a) of an exponential sum on ages a in [0, inf).
struct ExpTerm {
    cplx coeff;
    cplx rate;  // Re(rate) > 0 so the term is integrable on [0, inf)
};

// Finite sum f(a) = sum_j c_j exp(-r_j a), kept in canonical form: terms
// sorted by rate, rates that coincide (within 1e-12) merged, exact-zero
// coefficients dropped. The empty sum is the zero function.
struct ExpSum {
    std::vector<ExpTerm> terms;
};

// Builds a canonical ExpSum; throws DivergentError if any Re(rate) <= 0.
ExpSum make_expsum(std::vector<ExpTerm> terms);

ExpSum add(const ExpSum& f, const ExpSum& g);
ExpSum scale(cplx s, const ExpSum& f);
ExpSum mul(const ExpSum& f, const ExpSum& g);

// Termwise conjugation: conj(c) exp(-conj(r) a); equals conj(f(a)) for real a.
ExpSum conj_profile(const ExpSum& f);

// Pointwise value at age a >= 0.
cplx eval(const ExpSum& f, double a);

// integral(f)      = int_0^inf f(a) da               = sum c_j / r_j.
// beta_integral(f) = int_1^inf e^tau f(a) da          = sum c_j e^(tau - r_j) / r_j,
// the contact-weighted integral for the step kernel that switches on at age 1
// with plateau e^tau. The exponent is always formed as tau - r_j first, so the
// plateau magnitude e^tau is never materialized on its own.
cplx integral(const ExpSum& f);
cplx beta_integral(const ExpSum& f, double tau);

// Term-multiset equality of the canonical forms, within tol on coefficients
// and rates.
bool same(const ExpSum& f, const ExpSum& g, double tol = 1e-12);

}  // namespace agesis
