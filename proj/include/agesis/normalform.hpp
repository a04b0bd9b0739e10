#pragma once
#include <array>
#include <string>
#include <vector>

#include "agesis/expsum.hpp"
#include "agesis/model.hpp"
#include "agesis/spectral.hpp"

namespace agesis {

// Everything about one crossing that the coefficient pipeline consumes.
// omega_k is the crossing frequency of the unscaled root variable
// (omega_k = tau_k * omega0); all evaluations below happen at +-i omega_k.
struct HopfContext {
    ModelParams params;
    ReducedCoeffs coeffs;
    HopfPoint point;
    double omega_k = 0.0;
    cplx d_delta_plus;   // d det/d lambda at +i omega_k
    cplx d_delta_minus;  // at -i omega_k (conjugate of the above)
    cplx p_plus, p_minus;
    ExpSum b1, b2, b3, b4;  // eigenprofile basis (b3 = conj b1, b4 = conj b2)
};

// Second-order interaction coefficients of the center-manifold reduction.
struct L2Coeffs {
    cplx c2210, c2310, c3310;
};

// Second-order age profiles; each mode has an infected-side and a
// susceptible-side component.
struct PsiProfiles {
    std::array<ExpSum, 2> psi22, psi23, psi33;
};

// Quadratic planar normal-form coefficients plus the linear coefficient A1.
// A1 is the delay-derivative of the crossing root pair d lambda/d tau at the
// critical delay: by definition the coefficient of tau_hat*rho in the radial
// normal form rho' = iota1 tau_hat rho + iota2 rho^3.
struct QuadCoeffs {
    cplx a20, a11, a02, A1;
};

struct CubicCoeffs {
    cplx C0, C1;
};

struct NormalFormResult {
    cplx a20, a11, a02;
    cplx c2210, c2310, c3310;
    std::array<ExpSum, 2> psi22, psi23, psi33;
    cplx A1, C0, C1;
    double iota1 = 0.0;  // Re(A1)
    double iota2 = 0.0;  // Re(C1)
    std::string classification;
};

struct AuditEntry {
    std::string name;
    cplx value;
};

struct NormalFormAnalysis {
    NormalFormResult result;
    std::vector<AuditEntry> audit;
    std::string reading_note;  // disclosure of the scalar-reading ambiguity
};

// Analytic derivative of the transfer determinant (quotient rule); verified
// against numerical differentiation in the test suite. Throws PoleError at
// poles of the denominator.
cplx d_det_delta(cplx lambda, double tau, const ReducedCoeffs& coeffs);

// Builds the crossing context; requires point.residual < 1e-10.
HopfContext hopf_context(const ModelParams& params, const HopfPoint& point);

// Symmetric quadratic interaction of two perturbation directions through the
// infection boundary condition. Each direction is a pair of age profiles
// (infected side, susceptible side). The second-order coefficients c2210,
// c2310, c3310 are tau_k times this form on the eigenprofile basis pairs.
cplx quadratic_interaction_form(const HopfContext& ctx, const ExpSum& f_inf,
                                const ExpSum& f_sus, const ExpSum& g_inf,
                                const ExpSum& g_sus);

// Second-order coefficients. Computed through the defining interaction form,
// which guarantees the conjugate-pair structure c3310 = conj(c2210) and real
// c2310; the assembled closed-form displays for the same quantities are also
// evaluated and kept in the audit record (the c2210 display breaks the
// conjugate symmetry and is retained for reference only).
L2Coeffs l2_coefficients(const HopfContext& ctx);

// Closed-form displays of the same three coefficients (audit surface).
L2Coeffs l2_closed_forms(const HopfContext& ctx);

// Second-order age profiles. Requires the resolvent to be nonsingular at the
// second harmonic and at zero frequency: throws ResonanceError if
// |det(2 i omega_k)| or |det(0)| < 1e-8.
PsiProfiles psi_profiles(const HopfContext& ctx, const L2Coeffs& l2);

// Quadratic planar coefficients a20, a11, a02 (closed forms) and the linear
// coefficient A1 = d lambda/d tau at the crossing.
QuadCoeffs quadratic_normal_coeffs(const HopfContext& ctx);

// Cubic coefficient pair. C1 is computed by the center-manifold reduction of
// the delay system at the crossing (the dynamics-defining path); C0 is
// normalized so that C1 = C0 / d_delta_plus. The assembled closed-form
// display of C0/C1 is evaluated separately (display_cubic_coefficient) and
// audited; it disagrees with the dynamics-defining value (see README).
CubicCoeffs cubic_coefficient(const HopfContext& ctx, const QuadCoeffs& quad,
                              const PsiProfiles& psi);

// Theorem-style label from the signs of (iota1, iota2):
// supercritical iff iota1*iota2 < 0; orbit stable iff iota2 < 0; degenerate
// when either magnitude is below 1e-12.
std::string classify(double iota1, double iota2);

// ---- Display-path closed forms (audit surface) ----

// The assembled closed-form cubic display. mirrored=true evaluates the same
// expression with the crossing frequency negated (all paired inputs swapped);
// the result must be the conjugate of the unmirrored value.
cplx display_cubic_coefficient(const HopfContext& ctx, const QuadCoeffs& quad,
                               const PsiProfiles& psi, bool mirrored = false);

// The assembled closed-form linear displays. Scalar projector coefficients
// cannot depend on age, yet the source displays contain age-profile-looking
// factors; scalar_reading=true (primary) takes them as the scalars
// e^{-+i omega_k}, false takes them as their age-zero value 1. Both readings
// are audited along with the sensitivity of the display to the choice.
struct DisplayLinear {
    cplx psi_iw12;
    cplx psi_iw34;
    cplx A1;
    cplx A2;
};
DisplayLinear display_linear_coeffs(const HopfContext& ctx, bool scalar_reading);

// Center-manifold reduction internals exposed for the audit record.
struct CenterManifoldCubic {
    cplx g20, g11, g02, g21;
    cplx c1;  // first cubic coefficient; Re(c1) decides orbit stability
};
CenterManifoldCubic center_manifold_cubic(const HopfContext& ctx);

// Full pipeline: context -> L2 -> psi -> quadratic -> cubic -> labels,
// with the complete named-intermediate audit record.
NormalFormAnalysis analyze_normal_form(const ModelParams& params, const HopfPoint& point);

}  // namespace agesis
