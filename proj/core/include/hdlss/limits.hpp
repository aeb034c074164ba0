#pragma once

#include "hdlss/geometry.hpp"

#include <optional>
#include <vector>

namespace hdlss {

// Score-conditional ingredients of every asymptotic limit.
struct ScoreSummary {
    Regime regime = Regime::WeakWeak;
    int n1 = 0, n2 = 0;
    int m1 = 0, m2 = 0;   // strong spike counts (0 for a weak class)
    int m = 0;
    Mat W1, W2;           // n_k x m_k centered-free raw scores of strong classes
    Mat R1, R2;           // m x m_k, U_(k) = U1 R_(k)
    Mat Phi1, Phi2;       // m_k x m_k
    Mat Phi;              // m x m
    Mat PhiTau;           // (m1+m2) x (m1+m2), strong/strong only
    Vec cos_theta;        // m
    double cos2phi = 0.0;
    double delta2 = 0.0;
    double tau1sq = 0.0, tau2sq = 0.0;
    double eta1 = 0.5, eta2 = 0.5;
    Vec r;                // m, limit of p^{-1/2} u_j^T d

    int n() const { return n1 + n2; }
};

// Orthonormal basis of the span of the columns of A (Gram-Schmidt, near-dependent columns dropped).
Mat common_basis(const Mat& A);

ScoreSummary score_summary(const PopulationPair& pair, const Mat& W1, const Mat& W2, int n1, int n2, Index p);
ScoreSummary score_summary(const PopulationPair& pair, const LabeledData& data);

// Eigen-decomposition helpers of the summary matrices, descending.
struct EigenPairs {
    Vec values;
    Mat vectors;
};
EigenPairs eig_desc(const Mat& A);
Mat sqrtm_psd(const Mat& A);

// Limits of p^{-1} lambda_hat_i for i = 1..n-2 and the crossing index (k0 or k1; -1 if none).
struct EigenvalueLimits {
    Vec values;
    int k_index = -1;
};

EigenvalueLimits eigenvalue_limits_weak_weak(const ScoreSummary& s);
EigenvalueLimits eigenvalue_limits_strong_weak(const ScoreSummary& s);
EigenvalueLimits eigenvalue_limits_weak_strong(const ScoreSummary& s);
EigenvalueLimits eigenvalue_limits_equal(const ScoreSummary& s);
EigenvalueLimits eigenvalue_limits_unequal(const ScoreSummary& s);
EigenvalueLimits eigenvalue_limits(const ScoreSummary& s, Regime regime);

// Signed limits of u_hat_i^T u_j, (n-2) x m, rows oriented so that row . r >= 0
// (the sample eigenvector sign convention u_hat_i^T d >= 0).
Mat loading_limits_strong_weak(const ScoreSummary& s);
Mat loading_limits_weak_strong(const ScoreSummary& s);
Mat loading_limits_equal(const ScoreSummary& s);
Mat loading_limits_unequal(const ScoreSummary& s);
Mat loading_limits(const ScoreSummary& s, Regime regime);

// Limits of cos(Angle(u_hat_i, U)), the row norms of the loading limits.
Vec angle_limits(const ScoreSummary& s, Regime regime);

// Columns M = [R1 Phi1^{1/2}, R2 Phi2^{1/2}] and eigenpairs of PhiTau, used by the unequal-tail formulas.
Mat unequal_mixing(const ScoreSummary& s);
// D' = {1..k0, k0+(n1-m1)..n1+m2-1} for strong/strong unequal tails.
std::vector<int> d_prime(const ScoreSummary& s);

double kappa0(const ScoreSummary& s);
double kappa1(const ScoreSummary& s);
double kappa2(const ScoreSummary& s);
double kappa_limit(const ScoreSummary& s, Regime regime);

struct PilingOffsets {
    double nu1 = 0.0;
    double nu2 = 0.0;
};
PilingOffsets piling_offsets(const ScoreSummary& s, double kappa);
PilingOffsets piling_offsets(const ScoreSummary& s, Regime regime);

double gamma_equal(const ScoreSummary& s);
double gamma_unequal(const ScoreSummary& s, int k);
double upsilon0(const ScoreSummary& s);

struct GammaUpsilon {
    std::optional<double> gamma;
    std::optional<double> gamma1;
    std::optional<double> gamma2;
    std::optional<double> upsilon0;
};
GammaUpsilon gamma_upsilon_limits(const ScoreSummary& s, Regime regime);

// P(F <= ((n2-1) sigma2^2 / tau2^2) / ((n1-1) sigma1^2 / tau1^2)), F ~ F(n1-1, n2-1).
double ridge_preference_zeta(int n1, int n2, double sigma2_1, double sigma2_2, double tau1sq, double tau2sq);
double f_cdf(double x, double d1, double d2);

struct SmdpScaffold {
    Mat Omega_tilde1;       // (m1+m2) x m, rows of the loading limits on D'
    Mat Omega;              // (n-1) x m
    Mat Omega_tilde1_star;  // (m1+m2) x m, test-side counterpart
    Mat Xi;                 // (n-1) x (m1+m2)
    Mat L;                  // (n-1) x (n-1), limit of p^{-1} V^T S_W* V
};
// Limits for strong/strong unequal tails; `test` summarizes the independent data that forms S_W*.
SmdpScaffold smdp_limit_scaffold(const ScoreSummary& train, const ScoreSummary& test);

struct LimitReport {
    Regime regime = Regime::WeakWeak;
    Vec eigenvalue_limits;
    Vec angle_limits;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double kappa = 0.0;
    GammaUpsilon gammas;
    int k_index = -1;
};
LimitReport limit_report(const ScoreSummary& s);

}  // namespace hdlss
