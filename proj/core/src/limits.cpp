#include "hdlss/limits.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hdlss {

EigenPairs eig_desc(const Mat& A) {
    EigenPairs e;
    if (A.rows() == 0) return e;
    symmetric_eig_desc(A, e.values, e.vectors);
    return e;
}

Mat sqrtm_psd(const Mat& A) {
    if (A.rows() == 0) return Mat(0, 0);
    const EigenPairs e = eig_desc(A);
    const Vec s = e.values.cwiseMax(0.0).cwiseSqrt();
    return e.vectors * s.asDiagonal() * e.vectors.transpose();
}

namespace {

Mat centered_scatter(const Mat& W) {
    if (W.cols() == 0) return Mat(0, 0);
    const Mat Wc = W.rowwise() - W.colwise().mean();
    return Wc.transpose() * Wc;
}

void require_strong_strong(const ScoreSummary& s, const char* what) {
    if (s.m1 == 0 || s.m2 == 0) throw ConfigError(std::string(what) + " needs strong spikes in both classes");
}

// Orients each row so that its product with r is nonnegative.
void orient_rows(Mat& A, const Vec& r) {
    for (Index i = 0; i < A.rows(); ++i)
        if (A.row(i).dot(r) < 0.0) A.row(i) *= -1.0;
}

}  // namespace

// Gram-Schmidt over the columns of A, dropping those that fall inside the span so far.
Mat common_basis(const Mat& A) {
    Mat Q(A.rows(), 0);
    for (Index j = 0; j < A.cols(); ++j) {
        Vec v = A.col(j);
        const double scale = v.norm();
        for (int pass = 0; pass < 2; ++pass) v -= Q * (Q.transpose() * v);
        if (v.norm() <= 1e-10 * std::max(scale, 1.0)) continue;
        Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
        Q.col(Q.cols() - 1) = v.normalized();
    }
    return Q;
}

ScoreSummary score_summary(const PopulationPair& pair, const Mat& W1, const Mat& W2, int n1, int n2, Index p) {
    pair.validate();
    ScoreSummary s;
    s.regime = regime_of(pair);
    s.n1 = n1;
    s.n2 = n2;
    s.tau1sq = pair.class1.tail_var;
    s.tau2sq = pair.class2.tail_var;
    s.eta1 = static_cast<double>(n1) / (n1 + n2);
    s.eta2 = static_cast<double>(n2) / (n1 + n2);
    const bool st1 = pair.class1.strong();
    const bool st2 = pair.class2.strong();
    s.m1 = st1 ? pair.class1.m() : 0;
    s.m2 = st2 ? pair.class2.m() : 0;
    if (st1 && (W1.rows() != n1 || W1.cols() != s.m1)) throw ConfigError("class-1 scores have the wrong shape");
    if (st2 && (W2.rows() != n2 || W2.cols() != s.m2)) throw ConfigError("class-2 scores have the wrong shape");

    const Mat U1k = st1 ? realized_eigvecs(pair.class1, p) : Mat(p, 0);
    const Mat U2k = st2 ? realized_eigvecs(pair.class2, p) : Mat(p, 0);
    Mat both(p, s.m1 + s.m2);
    both << U1k, U2k;
    const Mat U = common_basis(both);
    s.m = static_cast<int>(U.cols());
    if (s.m != pair.m) throw ConfigError("common leading eigenspace dimension does not match m");
    s.R1 = U.transpose() * U1k;
    s.R2 = U.transpose() * U2k;
    s.W1 = st1 ? W1 : Mat(n1, 0);
    s.W2 = st2 ? W2 : Mat(n2, 0);
    s.Phi1 = centered_scatter(s.W1);
    s.Phi2 = centered_scatter(s.W2);
    s.Phi = Mat::Zero(s.m, s.m);
    if (s.m1 > 0) s.Phi += s.R1 * s.Phi1 * s.R1.transpose();
    if (s.m2 > 0) s.Phi += s.R2 * s.Phi2 * s.R2.transpose();

    const Vec mu = realized_mean(pair.class1, p) - realized_mean(pair.class2, p);
    const double rp = std::sqrt(static_cast<double>(p));
    s.delta2 = mu.squaredNorm() / static_cast<double>(p);
    const Vec proj = U.transpose() * mu / rp;  // delta * cos(theta_j)
    s.cos_theta = s.delta2 > 0.0 ? Vec(proj / std::sqrt(s.delta2)) : Vec(Vec::Zero(s.m));
    s.cos2phi = s.cos_theta.squaredNorm();
    s.r = proj;
    if (s.m1 > 0) s.r += s.R1 * s.W1.colwise().mean().transpose();
    if (s.m2 > 0) s.r -= s.R2 * s.W2.colwise().mean().transpose();

    if (s.m1 > 0 && s.m2 > 0) {
        const Mat h1 = sqrtm_psd(s.Phi1);
        const Mat h2 = sqrtm_psd(s.Phi2);
        s.PhiTau.resize(s.m1 + s.m2, s.m1 + s.m2);
        s.PhiTau.topLeftCorner(s.m1, s.m1) = s.Phi1 + s.tau1sq * Mat::Identity(s.m1, s.m1);
        s.PhiTau.bottomRightCorner(s.m2, s.m2) = s.Phi2 + s.tau2sq * Mat::Identity(s.m2, s.m2);
        const Mat off = h1 * s.R1.transpose() * s.R2 * h2;
        s.PhiTau.topRightCorner(s.m1, s.m2) = off;
        s.PhiTau.bottomLeftCorner(s.m2, s.m1) = off.transpose();
    }
    return s;
}

ScoreSummary score_summary(const PopulationPair& pair, const LabeledData& data) {
    const Mat W1 = data.W1 ? *data.W1 : Mat(data.n1, 0);
    const Mat W2 = data.W2 ? *data.W2 : Mat(data.n2, 0);
    return score_summary(pair, W1, W2, data.n1, data.n2, data.p());
}

// ---- eigenvalues --------------------------------------------------------------------------

EigenvalueLimits eigenvalue_limits_weak_weak(const ScoreSummary& s) {
    EigenvalueLimits out;
    out.values.resize(s.n() - 2);
    out.values.head(s.n1 - 1).setConstant(s.tau1sq);
    out.values.tail(s.n2 - 1).setConstant(s.tau2sq);
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
}

EigenvalueLimits eigenvalue_limits_strong_weak(const ScoreSummary& s) {
    const EigenPairs e1 = eig_desc(s.Phi1);
    EigenvalueLimits out;
    out.values.resize(s.n() - 2);
    for (int i = 0; i < s.n1 - 1; ++i) out.values(i) = (i < s.m1 ? e1.values(i) : 0.0) + s.tau1sq;
    out.values.tail(s.n2 - 1).setConstant(s.tau2sq);
    out.k_index = s.m1;
    return out;
}

EigenvalueLimits eigenvalue_limits_weak_strong(const ScoreSummary& s) {
    const EigenPairs e2 = eig_desc(s.Phi2);
    int k1 = 0;
    while (k1 < s.m2 && e2.values(k1) + s.tau2sq >= s.tau1sq) ++k1;
    EigenvalueLimits out;
    out.k_index = k1;
    out.values.resize(s.n() - 2);
    int i = 0;
    for (int l = 0; l < k1; ++l) out.values(i++) = e2.values(l) + s.tau2sq;
    for (int l = 0; l < s.n1 - 1; ++l) out.values(i++) = s.tau1sq;
    for (int l = k1; l < s.m2; ++l) out.values(i++) = e2.values(l) + s.tau2sq;
    while (i < s.n() - 2) out.values(i++) = s.tau2sq;
    return out;
}

EigenvalueLimits eigenvalue_limits_equal(const ScoreSummary& s) {
    const EigenPairs e = eig_desc(s.Phi);
    EigenvalueLimits out;
    out.k_index = s.m;
    out.values.setConstant(s.n() - 2, s.tau1sq);
    for (int i = 0; i < s.m; ++i) out.values(i) += e.values(i);
    return out;
}

EigenvalueLimits eigenvalue_limits_unequal(const ScoreSummary& s) {
    require_strong_strong(s, "unequal-tail eigenvalue limits");
    const EigenPairs e = eig_desc(s.PhiTau);
    const int mm = s.m1 + s.m2;
    int k0 = 0;
    while (k0 < mm && e.values(k0) >= s.tau1sq) ++k0;
    EigenvalueLimits out;
    out.k_index = k0;
    out.values.resize(s.n() - 2);
    int i = 0;
    for (int l = 0; l < k0; ++l) out.values(i++) = e.values(l);
    for (int l = 0; l < s.n1 - s.m1 - 1; ++l) out.values(i++) = s.tau1sq;
    for (int l = k0; l < mm; ++l) out.values(i++) = e.values(l);
    while (i < s.n() - 2) out.values(i++) = s.tau2sq;
    return out;
}

EigenvalueLimits eigenvalue_limits(const ScoreSummary& s, Regime regime) {
    switch (regime) {
        case Regime::WeakWeak: return eigenvalue_limits_weak_weak(s);
        case Regime::StrongWeak: return eigenvalue_limits_strong_weak(s);
        case Regime::WeakStrongEqualTail:
        case Regime::WeakStrongUnequalTail: return eigenvalue_limits_weak_strong(s);
        case Regime::StrongStrongEqualTail: return eigenvalue_limits_equal(s);
        case Regime::StrongStrongUnequalTail: return eigenvalue_limits_unequal(s);
    }
    throw ConfigError("unknown regime");
}

// ---- eigenvector loadings -----------------------------------------------------------------

Mat loading_limits_strong_weak(const ScoreSummary& s) {
    const EigenPairs e1 = eig_desc(s.Phi1);
    Mat A = Mat::Zero(s.n() - 2, s.m);
    for (int i = 0; i < s.m1; ++i) {
        const double f = e1.values(i);
        A.row(i) = std::sqrt(f / (f + s.tau1sq)) * (s.R1 * e1.vectors.col(i)).transpose();
    }
    orient_rows(A, s.r);
    return A;
}

Mat loading_limits_weak_strong(const ScoreSummary& s) {
    const EigenPairs e2 = eig_desc(s.Phi2);
    const int k1 = eigenvalue_limits_weak_strong(s).k_index;
    Mat A = Mat::Zero(s.n() - 2, s.m);
    for (int l = 0; l < s.m2; ++l) {
        const int row = l < k1 ? l : l + s.n1 - 1;
        const double f = e2.values(l);
        A.row(row) = std::sqrt(f / (f + s.tau2sq)) * (s.R2 * e2.vectors.col(l)).transpose();
    }
    orient_rows(A, s.r);
    return A;
}

Mat loading_limits_equal(const ScoreSummary& s) {
    const EigenPairs e = eig_desc(s.Phi);
    Mat A = Mat::Zero(s.n() - 2, s.m);
    for (int i = 0; i < s.m; ++i) {
        const double f = e.values(i);
        A.row(i) = std::sqrt(f / (f + s.tau1sq)) * e.vectors.col(i).transpose();
    }
    orient_rows(A, s.r);
    return A;
}

Mat unequal_mixing(const ScoreSummary& s) {
    Mat M(s.m, s.m1 + s.m2);
    M << s.R1 * sqrtm_psd(s.Phi1), s.R2 * sqrtm_psd(s.Phi2);
    return M;
}

std::vector<int> d_prime(const ScoreSummary& s) {
    require_strong_strong(s, "D'");
    const int k0 = eigenvalue_limits_unequal(s).k_index;
    std::vector<int> idx;
    for (int i = 1; i <= k0; ++i) idx.push_back(i);
    for (int i = k0 + (s.n1 - s.m1); i <= s.n1 + s.m2 - 1; ++i) idx.push_back(i);
    return idx;
}

namespace {

// Rows M v_l / sqrt(phi_l) over the eigenpairs of PhiTau, (m1+m2) x m.
Mat omega_tilde1(const ScoreSummary& s) {
    const EigenPairs e = eig_desc(s.PhiTau);
    const Mat M = unequal_mixing(s);
    Mat O(s.m1 + s.m2, s.m);
    for (int l = 0; l < s.m1 + s.m2; ++l)
        O.row(l) = (M * e.vectors.col(l)).transpose() / std::sqrt(e.values(l));
    return O;
}

}  // namespace

Mat loading_limits_unequal(const ScoreSummary& s) {
    const Mat O = omega_tilde1(s);
    const std::vector<int> idx = d_prime(s);
    Mat A = Mat::Zero(s.n() - 2, s.m);
    for (std::size_t l = 0; l < idx.size(); ++l) A.row(idx[l] - 1) = O.row(static_cast<Index>(l));
    orient_rows(A, s.r);
    return A;
}

Mat loading_limits(const ScoreSummary& s, Regime regime) {
    switch (regime) {
        case Regime::WeakWeak: return Mat::Zero(s.n() - 2, s.m);
        case Regime::StrongWeak: return loading_limits_strong_weak(s);
        case Regime::WeakStrongEqualTail:
        case Regime::WeakStrongUnequalTail: return loading_limits_weak_strong(s);
        case Regime::StrongStrongEqualTail: return loading_limits_equal(s);
        case Regime::StrongStrongUnequalTail: return loading_limits_unequal(s);
    }
    throw ConfigError("unknown regime");
}

Vec angle_limits(const ScoreSummary& s, Regime regime) {
    return loading_limits(s, regime).rowwise().norm();
}

// ---- kappa, piling offsets ----------------------------------------------------------------

double kappa0(const ScoreSummary& s) {
    return std::sqrt(s.delta2 + s.tau1sq / s.n1 + s.tau2sq / s.n2);
}

double kappa1(const ScoreSummary& s) {
    const EigenPairs e = eig_desc(s.Phi);
    const double t = s.tau1sq;
    double k2 = (1.0 - s.cos2phi) * s.delta2 + (1.0 / s.n1 + 1.0 / s.n2) * t;
    for (int i = 0; i < s.m; ++i) {
        const double rv = s.r.dot(e.vectors.col(i));
        k2 += t / (e.values(i) + t) * rv * rv;
    }
    return std::sqrt(k2);
}

double kappa2(const ScoreSummary& s) {
    require_strong_strong(s, "kappa2");
    const Mat M = unequal_mixing(s);
    const Mat G = M * s.PhiTau.ldlt().solve(M.transpose());
    const Mat I = Mat::Identity(s.m, s.m);
    const double k2 = (1.0 - s.cos2phi) * s.delta2 + s.tau1sq / s.n1 + s.tau2sq / s.n2 +
                      s.r.dot((I - G) * s.r);
    return std::sqrt(k2);
}

double kappa_limit(const ScoreSummary& s, Regime regime) {
    switch (regime) {
        case Regime::WeakWeak: return kappa0(s);
        case Regime::StrongStrongEqualTail: return kappa1(s);
        case Regime::StrongStrongUnequalTail: return kappa2(s);
        default: break;
    }
    // Single-strong-class regimes: |d|^2/p minus the mass captured by the sample eigenvectors.
    const Mat A = loading_limits(s, regime);
    const Vec Ar = A * s.r;
    const double k2 = (1.0 - s.cos2phi) * s.delta2 + s.tau1sq / s.n1 + s.tau2sq / s.n2 +
                      s.r.squaredNorm() - Ar.squaredNorm();
    return std::sqrt(k2);
}

PilingOffsets piling_offsets(const ScoreSummary& s, double kappa) {
    const double spread = (1.0 - s.cos2phi) * s.delta2;
    const double tail = (s.tau1sq - s.tau2sq) / s.n();
    return {(s.eta2 * spread - tail) / kappa, (-s.eta1 * spread - tail) / kappa};
}

PilingOffsets piling_offsets(const ScoreSummary& s, Regime regime) {
    return piling_offsets(s, kappa_limit(s, regime));
}

// ---- gamma, upsilon -----------------------------------------------------------------------

double gamma_equal(const ScoreSummary& s) {
    const EigenPairs e = eig_desc(s.Phi);
    const double t = s.tau1sq;
    const double k1 = kappa1(s);
    double inv = k1 * k1;
    for (int i = 0; i < s.m; ++i) {
        const double f = e.values(i);
        const double rv = s.r.dot(e.vectors.col(i));
        inv += t * t / (f * (f + t)) * rv * rv;
    }
    return 1.0 / std::sqrt(inv);
}

double gamma_unequal(const ScoreSummary& s, int k) {
    require_strong_strong(s, "gamma");
    if (k != 1 && k != 2) throw ConfigError("gamma index must be 1 or 2");
    const double t = k == 1 ? s.tau1sq : s.tau2sq;
    const EigenPairs e = eig_desc(s.PhiTau);
    const Mat M = unequal_mixing(s);
    const double k2 = kappa2(s);
    const double mscale = M.squaredNorm() + 1.0;
    double inv = k2 * k2;
    for (int l = 0; l < s.m1 + s.m2; ++l) {
        const Vec phi_l = M * e.vectors.col(l);
        // Directions outside the range of M carry no signal; skipping them avoids 0/0 at tau1 = tau2.
        if (phi_l.squaredNorm() <= 1e-20 * mscale) continue;
        const double f = e.values(l);
        const double rp = s.r.dot(phi_l);
        inv += t * t / ((f - t) * (f - t) * f) * rp * rp;
    }
    return 1.0 / std::sqrt(inv);
}

double upsilon0(const ScoreSummary& s) {
    require_strong_strong(s, "upsilon0");
    const Mat O = omega_tilde1(s);
    const Mat G = O.transpose() * O;
    const Mat I = Mat::Identity(s.m, s.m);
    const Mat B = I - G.ldlt().solve(I);
    const double k2 = kappa2(s);
    const double val = k2 * k2 + s.r.dot(B * G * B * s.r);
    return 1.0 / std::sqrt(val);
}

GammaUpsilon gamma_upsilon_limits(const ScoreSummary& s, Regime regime) {
    GammaUpsilon g;
    if (regime == Regime::StrongStrongEqualTail) {
        g.gamma = gamma_equal(s);
    } else if (regime == Regime::StrongStrongUnequalTail) {
        g.gamma1 = gamma_unequal(s, 1);
        g.gamma2 = gamma_unequal(s, 2);
        g.upsilon0 = upsilon0(s);
    }
    return g;
}

// ---- zeta ---------------------------------------------------------------------------------

double f_cdf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw ConfigError("F degrees of freedom must be positive");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    // I_{d1 x/(d1 x + d2)}(d1/2, d2/2); the complement form is used when the argument is near 1.
    const double num = d1 * x;
    const double den = num + d2;
    const double z = num / den;
    if (z <= 0.5) return boost::math::ibeta(d1 / 2.0, d2 / 2.0, z);
    return boost::math::ibetac(d2 / 2.0, d1 / 2.0, d2 / den);
}

double ridge_preference_zeta(int n1, int n2, double sigma2_1, double sigma2_2, double tau1sq, double tau2sq) {
    if (n1 < 2 || n2 < 2) throw ConfigError("zeta needs n1, n2 >= 2");
    if (!(sigma2_1 > 0.0) || !(sigma2_2 > 0.0) || !(tau1sq > 0.0) || !(tau2sq > 0.0))
        throw ConfigError("zeta needs positive variances");
    const double x = ((n2 - 1) * sigma2_2 / tau2sq) / ((n1 - 1) * sigma2_1 / tau1sq);
    return f_cdf(x, n1 - 1, n2 - 1);
}

// ---- SMDP scaffold ------------------------------------------------------------------------

SmdpScaffold smdp_limit_scaffold(const ScoreSummary& train, const ScoreSummary& test) {
    require_strong_strong(train, "SMDP scaffold");
    require_strong_strong(test, "SMDP scaffold");
    if (train.m != test.m) throw ConfigError("train and test summaries disagree on m");
    SmdpScaffold out;
    const int n = train.n();
    const int m = train.m;
    const Mat A = loading_limits_unequal(train);
    const std::vector<int> idx = d_prime(train);
    out.Omega_tilde1.resize(static_cast<Index>(idx.size()), m);
    for (std::size_t l = 0; l < idx.size(); ++l) out.Omega_tilde1.row(static_cast<Index>(l)) = A.row(idx[l] - 1);
    const Mat G = out.Omega_tilde1.transpose() * out.Omega_tilde1;
    const Vec omega1 = (Mat::Identity(m, m) - G) * train.r / kappa2(train);
    out.Omega.resize(n - 1, m);
    out.Omega.topRows(n - 2) = A;
    out.Omega.row(n - 2) = omega1.transpose();

    // Test-side loadings carry the same sign freedom on both factors of L, so orientation is irrelevant.
    const EigenPairs et = eig_desc(test.PhiTau);
    out.Omega_tilde1_star = omega_tilde1(test);
    out.Xi = out.Omega * out.Omega_tilde1_star.transpose();
    out.L = out.Xi * et.values.asDiagonal() * out.Xi.transpose();
    return out;
}

LimitReport limit_report(const ScoreSummary& s) {
    LimitReport rep;
    rep.regime = s.regime;
    const EigenvalueLimits ev = eigenvalue_limits(s, s.regime);
    rep.eigenvalue_limits = ev.values;
    rep.k_index = ev.k_index;
    rep.angle_limits = angle_limits(s, s.regime);
    rep.kappa = kappa_limit(s, s.regime);
    const PilingOffsets nu = piling_offsets(s, rep.kappa);
    rep.nu1 = nu.nu1;
    rep.nu2 = nu.nu2;
    rep.gammas = gamma_upsilon_limits(s, s.regime);
    return rep;
}

}  // namespace hdlss
