#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "agesis/expsum.hpp"

using namespace agesis;

namespace {

// Independent quadrature oracle: composite Simpson on [a, b] applied to the
// pointwise evaluator, so it never sees the closed-form antiderivatives.
cplx simpson(const std::function<cplx(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    cplx acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

cplx oracle_integral(const ExpSum& f, double a, double b) {
    return simpson([&](double x) { return eval(f, x); }, a, b, 400000);
}

}  // namespace

TEST_CASE("construction rejects non-decaying terms") {
    CHECK_THROWS_AS(make_expsum({{cplx(1.0, 0.0), cplx(0.0, 1.0)}}), DivergentError);
    CHECK_THROWS_AS(make_expsum({{cplx(1.0, 0.0), cplx(-0.5, 0.0)}}), DivergentError);
    CHECK_THROWS_AS(make_expsum({{cplx(1.0, 0.0), cplx(0.0, 0.0)}}), DivergentError);
}

TEST_CASE("construction canonicalizes: sorted, merged, zero-free") {
    const ExpSum f = make_expsum({{cplx(2.0, 0.0), cplx(3.0, 0.0)},
                                  {cplx(1.0, 1.0), cplx(1.0, 0.0)},
                                  {cplx(0.0, 0.0), cplx(5.0, 0.0)}});
    REQUIRE(f.terms.size() == 2);
    CHECK(f.terms[0].rate == cplx(1.0, 0.0));
    CHECK(f.terms[1].rate == cplx(3.0, 0.0));

    const ExpSum g = make_expsum(
        {{cplx(1.0, 0.0), cplx(2.0, 0.0)}, {cplx(2.0, 0.0), cplx(2.0 + 1e-13, 0.0)}});
    REQUIRE(g.terms.size() == 1);
    CHECK(g.terms[0].coeff.real() == doctest::Approx(3.0).epsilon(1e-12));

    // Opposite coefficients at the same rate cancel to the zero function.
    const ExpSum z = make_expsum(
        {{cplx(1.5, -2.0), cplx(4.0, 1.0)}, {cplx(-1.5, 2.0), cplx(4.0, 1.0)}});
    CHECK(z.terms.empty());
    CHECK(eval(z, 0.7) == cplx(0.0, 0.0));
    CHECK(integral(z) == cplx(0.0, 0.0));
}

TEST_CASE("algebra agrees with pointwise evaluation") {
    const ExpSum f = make_expsum({{cplx(2.0, 0.0), cplx(1.0, 0.0)},
                                  {cplx(0.0, 1.0), cplx(2.0, -0.5)}});
    const ExpSum g = make_expsum({{cplx(1.0, -1.0), cplx(0.5, 0.25)}});
    for (double a : {0.0, 0.3, 1.7, 4.2}) {
        const cplx fa = eval(f, a), ga = eval(g, a);
        CHECK(std::abs(eval(add(f, g), a) - (fa + ga)) < 1e-14);
        CHECK(std::abs(eval(scale(cplx(0.5, 2.0), f), a) - cplx(0.5, 2.0) * fa) < 1e-14);
        CHECK(std::abs(eval(mul(f, g), a) - fa * ga) < 1e-14);
        CHECK(std::abs(eval(conj_profile(f), a) - std::conj(fa)) < 1e-14);
    }
    // Product rates add; here 2 x 1 cross terms -> 2 terms.
    CHECK(mul(f, g).terms.size() == 2);
}

TEST_CASE("integral over all ages matches the quadrature oracle") {
    const ExpSum f = make_expsum({{cplx(2.0, 0.0), cplx(3.0, 0.0)},
                                  {cplx(1.0, 2.0), cplx(1.0, 1.0)}});
    // Truncation at a = 40 leaves a tail below e^-40 ~ 4e-18.
    const cplx oracle = oracle_integral(f, 0.0, 40.0);
    CHECK(std::abs(integral(f) - oracle) < 1e-12);
}

TEST_CASE("contact-weighted integral matches the quadrature oracle") {
    const double tau = 3.0;
    const ExpSum f = make_expsum({{cplx(1.0, -0.5), cplx(3.0, 2.0)},
                                  {cplx(0.25, 0.0), cplx(2.0, 0.0)}});
    const cplx oracle = std::exp(tau) * oracle_integral(f, 1.0, 30.0);
    CHECK(std::abs(beta_integral(f, tau) - oracle) < 1e-12);
}

TEST_CASE("contact-weighted integral is stable at large plateau exponents") {
    // Rates of size tau against plateau e^tau: the closed form works with
    // exponents tau - r and never materializes e^tau alone.
    const double tau = 24.0;
    const cplx r(tau, 2.8717918698061181);
    const ExpSum f = make_expsum({{cplx(1.0, 0.0), r}});
    const cplx oracle = std::exp(tau) * oracle_integral(f, 1.0, 3.5);
    const cplx got = beta_integral(f, tau);
    CHECK(std::abs(got - oracle) < 1e-12);
    CHECK(std::abs(got - std::exp(tau - r) / r) < 1e-15);
}

TEST_CASE("conjugated profile integrates to the conjugate") {
    const ExpSum f = make_expsum({{cplx(1.0, 2.0), cplx(2.0, -3.0)},
                                  {cplx(-0.5, 0.25), cplx(1.0, 1.0)}});
    CHECK(std::abs(integral(conj_profile(f)) - std::conj(integral(f))) < 1e-15);
    CHECK(std::abs(beta_integral(conj_profile(f), 2.0) -
                   std::conj(beta_integral(f, 2.0))) < 1e-15);
}

TEST_CASE("term-multiset equality respects its tolerance") {
    const ExpSum f = make_expsum({{cplx(1.0, 0.0), cplx(2.0, 1.0)}});
    const ExpSum g = make_expsum({{cplx(1.0, 0.0), cplx(2.0 + 1e-3, 1.0)}});
    CHECK(same(f, f));
    CHECK_FALSE(same(f, g));
    CHECK(same(f, g, 1e-2));
    // Different term counts are never equal.
    const ExpSum h = add(f, make_expsum({{cplx(1.0, 0.0), cplx(5.0, 0.0)}}));
    CHECK_FALSE(same(f, h));
}
