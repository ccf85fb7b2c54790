#pragma once

namespace awgnfb {

// Operating point of the analytic bounds. All exponent coefficients are
// leading-order and expressed in A1 units unless stated otherwise;
// finite-blocklength prefactors are reported separately as diagnostics.
struct ExponentParams {
  double beta = 0.5;
  double tau2 = 0.15;
  double tau3 = 0.05;
  double sigma2 = 0.0;
  double A = 1.0;
};

// Windows inside which the case bounds assemble to the headline
// achievable exponent; each independently testable.
struct WindowFlags {
  bool tau2_ok = false;   // tau2 in [(sqrt(5/3)-1)/2, (15-sqrt(105))/30]
  bool tau3_ok = false;   // tau3 in [(sqrt(7/6)-1)/2, 1-tau2]
  bool sigma2_ok = false;  // sigma2 <= 1
  bool beta_ok = false;   // beta in (0, 1/2]
  bool all() const { return tau2_ok && tau3_ok && sigma2_ok && beta_ok; }
};

double tau2_window_lo();  // = 1/(sqrt(15)+3) ~ 0.1455
double tau2_window_hi();  // ~ 0.1584
double tau3_window_lo();  // = 1/(2(sqrt(42)+6)) ~ 0.04006

WindowFlags window_flags(const ExponentParams& p);

// Best zero-rate exponents of the plain channel and of the noiseless
// feedback channel, per block symbol.
double exponent_no_feedback(double A);         // A/4
double exponent_noiseless_feedback(double A);  // A/2

// Achievable per-symbol exponent of the one-switch scheme. Vacuous
// (returns 0, flagged) when sigma2 > 1.
struct OneSwitchBound {
  double value = 0.0;
  bool vacuous = false;
};
OneSwitchBound one_switch_exponent(double A, double sigma2);  // A(1-s2)/3

// Error-event coefficients by realized pair-distance class, in A1 units.
double case_k2(double beta);  // (1+2 beta)/4

struct CaseK0 {
  double combined;   // (1+b)/4 [1 + min{(1+2t2)^2/(3+4b),
                     //               (1+2t3)^2/(2+3b), 1/3}] (1-s2)
  double branch_s2;  // (1+b)(1+b+t2+t2^2)/(3+4b) (1-s2)
  double branch_s3;  // (1+b)[2+3b+(1+2t3)^2]/(4(2+3b)) (1-s2)
  double branch_s4;  // 2(1+b)^2/(5+8b), holds for any sigma
};
CaseK0 case_k0(double beta, double tau2, double tau3, double sigma2);

struct CaseK3 {
  double full;       // (1/4)[(2+3b)/2 + ((1-t2)+(1-t2)^2)/(1+s2)]
  double floor_val;  // (1+b)/3, valid for b<=1/2, t2<=1/3, s2<=1
};
CaseK3 case_k3(double beta, double tau2, double sigma2);

double f4(double beta, double tau2);  // (3+4b)(3+4b-6t2+6t2^2)/(6(3+8b))
double case_k4(double beta, double tau2, double sigma2);  // f4 (1-s2)

struct ExponentReport {
  ExponentParams params;
  double e_k2 = 0.0;
  CaseK0 e_k0{};
  CaseK3 e_k3{};
  double e_k4 = 0.0;
  double overall = 0.0;   // min(e_k2, e_k0.combined, e_k3.full, e_k4)
  double assembly = 0.0;  // (1-s2) min{(1+b)/3, (1+2b)/4, f4}, A1 units
  double per_n = 0.0;     // assembly * A/(1+beta)
  WindowFlags flags{};
  // diagnostics: finite-energy prefactors excluded from the coefficients
  double prefactor_k2 = 0.0;      // sqrt(3)
  double union_slack_log = 0.0;   // ln 4
};
ExponentReport overall(const ExponentParams& p);

// exp(-max(z,0)^2/2), dominating the standard Gaussian upper tail.
double tail_bound(double z);
// Bound on P(xi >= a, eta >= b) for standard Gaussians with correlation
// rho: the rotated single-tail bound when a-b*rho >= 0 and b-a*rho >= 0,
// otherwise the better of the two marginal bounds. Requires |rho| < 1.
double joint_tail_bound(double a, double b, double rho);

// Miscoordination programs: minimize x^2 + y^2 over the constraint set of
// the selected-group-2 / selected-group-3 error event.
enum class OutsideBranch { group2, group3 };

struct InfimumResult {
  double value = 0.0;
  double x = 0.0, y = 0.0;  // minimizer
  bool b_negative = false;  // reduced-offset B < 0 encountered (outside the
                            // parameter windows; value still returned)
};

// Grid search over [-10,10]^2 followed by local refinement to absolute
// tolerance 1e-6; sigma2 == 0 degenerates to the hard-constrained corner.
InfimumResult infimum_2d(OutsideBranch branch, double beta, double tau,
                         double sigma2);

// Same optimizer over the reduced set {(x,y): x - eps (y+a)^2 >= B}.
InfimumResult infimum_parabolic(double eps, double a, double B);

// Parameters (eps, a, B) of the reduced set for a branch.
struct ReducedSet {
  double eps = 0.0, a = 0.0, B = 0.0;
};
ReducedSet reduced_set(OutsideBranch branch, double beta, double tau,
                       double sigma2);

// Closed-form lower bound B^2 + a^2 - a^2/(2 B eps) of the same program.
double closed_form_2d_bound(OutsideBranch branch, double beta, double tau,
                            double sigma2);

// The five-variable quadratic program of the size-4 group event, reduced
// to two variables by activating all three constraints, minimized by
// grid+refine, and cross-checked by an exact KKT active-set solve of the
// full five-variable program. The two agree iff all three constraints
// are active at the optimum (all_active); the `closed_form` field is the
// source derivation's displayed evaluation of the same minimum, which is
// known to overstate it (see the verification report).
struct Infimum5dResult {
  double value = 0.0;        // reduced-problem minimum
  double z1 = 0.0, y3 = 0.0;  // reduced-problem minimizer
  double direct_5d = 0.0;    // exact active-set minimum of the full program
  bool all_active = false;   // all three constraints active at the optimum
  double closed_form = 0.0;  // displayed closed-form evaluation
};
Infimum5dResult infimum_5d_k4(double beta, double tau2, double tau3,
                              double sigma2);

// Final lower bound of the size-4 program: 2 f4(beta,tau2) (1-s2).
double closed_form_k4_bound(double beta, double tau2, double sigma2);
// Its sigma2 -> 0 limit (1-t2)^2 + (3t2+4b)^2/(3(3+8b)).
double k4_limit_sigma0(double beta, double tau2);

}  // namespace awgnfb
