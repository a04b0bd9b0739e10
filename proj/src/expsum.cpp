#include "agesis/expsum.hpp"

#include <algorithm>
#include <cmath>

namespace agesis {

namespace {

constexpr double kRateMergeTol = 1e-12;

void check_rate(const cplx& r) {
    if (!(r.real() > 0.0)) {
        throw DivergentError("exponential-sum rate has non-positive real part: Re(" +
                             std::to_string(r.real()) + ") <= 0");
    }
}

ExpSum canonicalize(std::vector<ExpTerm> terms) {
    for (const auto& t : terms) check_rate(t.rate);
    std::sort(terms.begin(), terms.end(), [](const ExpTerm& a, const ExpTerm& b) {
        if (a.rate.real() != b.rate.real()) return a.rate.real() < b.rate.real();
        return a.rate.imag() < b.rate.imag();
    });
    ExpSum out;
    for (const auto& t : terms) {
        if (!out.terms.empty() && std::abs(out.terms.back().rate - t.rate) <= kRateMergeTol) {
            out.terms.back().coeff += t.coeff;
        } else {
            out.terms.push_back(t);
        }
    }
    std::erase_if(out.terms, [](const ExpTerm& t) { return t.coeff == cplx(0.0, 0.0); });
    return out;
}

}  // namespace

ExpSum make_expsum(std::vector<ExpTerm> terms) { return canonicalize(std::move(terms)); }

ExpSum add(const ExpSum& f, const ExpSum& g) {
    std::vector<ExpTerm> terms = f.terms;
    terms.insert(terms.end(), g.terms.begin(), g.terms.end());
    return canonicalize(std::move(terms));
}

ExpSum scale(cplx s, const ExpSum& f) {
    std::vector<ExpTerm> terms = f.terms;
    for (auto& t : terms) t.coeff *= s;
    return canonicalize(std::move(terms));
}

ExpSum mul(const ExpSum& f, const ExpSum& g) {
    std::vector<ExpTerm> terms;
    terms.reserve(f.terms.size() * g.terms.size());
    for (const auto& a : f.terms)
        for (const auto& b : g.terms) terms.push_back({a.coeff * b.coeff, a.rate + b.rate});
    return canonicalize(std::move(terms));
}

ExpSum conj_profile(const ExpSum& f) {
    std::vector<ExpTerm> terms = f.terms;
    for (auto& t : terms) {
        t.coeff = std::conj(t.coeff);
        t.rate = std::conj(t.rate);
    }
    return canonicalize(std::move(terms));
}

cplx eval(const ExpSum& f, double a) {
    cplx s = 0.0;
    for (const auto& t : f.terms) s += t.coeff * std::exp(-t.rate * a);
    return s;
}

cplx integral(const ExpSum& f) {
    cplx s = 0.0;
    for (const auto& t : f.terms) {
        check_rate(t.rate);
        s += t.coeff / t.rate;
    }
    return s;
}

cplx beta_integral(const ExpSum& f, double tau) {
    cplx s = 0.0;
    for (const auto& t : f.terms) {
        check_rate(t.rate);
        s += t.coeff * std::exp(tau - t.rate) / t.rate;
    }
    return s;
}

bool same(const ExpSum& f, const ExpSum& g, double tol) {
    ExpSum a = canonicalize(f.terms), b = canonicalize(g.terms);
    if (a.terms.size() != b.terms.size()) return false;
    for (size_t i = 0; i < a.terms.size(); ++i) {
        if (std::abs(a.terms[i].rate - b.terms[i].rate) > tol) return false;
        double scale = std::max(1.0, std::abs(a.terms[i].coeff));
        if (std::abs(a.terms[i].coeff - b.terms[i].coeff) > tol * scale) return false;
    }
    return true;
}

}  // namespace agesis
