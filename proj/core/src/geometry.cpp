#include "hdlss/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hdlss {

void symmetric_eig_desc(const Mat& A, Vec& values, Mat& vectors) {
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    values = es.eigenvalues().reverse();
    vectors = es.eigenvectors().rowwise().reverse();
}

namespace {

Vec class_lambdas(const Mat& Xc) {
    const Index nk = Xc.cols();
    if (nk < 2) return Vec();
    Vec vals;
    Mat vecs;
    symmetric_eig_desc(Xc.transpose() * Xc, vals, vecs);
    return vals.head(nk - 1).cwiseMax(0.0);
}

// Removes the span of orthonormal columns U from x, applied twice for stability.
Vec project_out(const Mat& U, Vec x) {
    for (int pass = 0; pass < 2; ++pass) x.noalias() -= U * (U.transpose() * x);
    return x;
}

}  // namespace

TrainedGeometry fit_geometry(const Mat& X, int n1, int n2) {
    if (n1 < 2 || n2 < 2) throw ConfigError("geometry needs at least two observations per class");
    if (X.cols() != n1 + n2) throw ConfigError("data columns do not match class sizes");
    TrainedGeometry g;
    g.p = X.rows();
    g.n1 = n1;
    g.n2 = n2;
    const int n = n1 + n2;
    g.mean1 = X.leftCols(n1).rowwise().mean();
    g.mean2 = X.rightCols(n2).rowwise().mean();
    g.d = g.mean1 - g.mean2;
    g.xbar = X.rowwise().mean();

    Mat Xc(g.p, n);
    Xc.leftCols(n1) = X.leftCols(n1).colwise() - g.mean1;
    Xc.rightCols(n2) = X.rightCols(n2).colwise() - g.mean2;

    Vec vals;
    Mat vecs;
    symmetric_eig_desc(Xc.transpose() * Xc, vals, vecs);
    int r = n - 2;
    const double tol = 1e-12 * std::max(vals(0), 0.0);
    while (r > 0 && !(vals(r - 1) > tol)) --r;
    g.rank_deficient = r < n - 2;
    g.lambdas = vals.head(r);
    g.U1hat.resize(g.p, r);
    for (int i = 0; i < r; ++i) g.U1hat.col(i) = Xc * vecs.col(i) / std::sqrt(vals(i));
    g.ud = g.U1hat.transpose() * g.d;
    for (int i = 0; i < r; ++i) {
        if (g.ud(i) < 0.0) {
            g.U1hat.col(i) *= -1.0;
            g.ud(i) = -g.ud(i);
        }
    }

    const Vec resid = project_out(g.U1hat, g.d);
    g.mdp_norm = resid.norm();
    if (!(g.mdp_norm >= 1e-12 * g.d.norm()) || g.mdp_norm == 0.0)
        throw NumericalError("degenerate piling: mean difference lies in the sample eigenspace");
    g.w_mdp = resid / g.mdp_norm;
    g.kappa_mdp = g.w_mdp.dot(g.d) / std::sqrt(static_cast<double>(g.p));

    g.lambdas1 = class_lambdas(Xc.leftCols(n1));
    g.lambdas2 = class_lambdas(Xc.rightCols(n2));
    return g;
}

TrainedGeometry fit_geometry(const LabeledData& data) { return fit_geometry(data.X, data.n1, data.n2); }

std::string to_string(Regime r) {
    switch (r) {
        case Regime::WeakWeak: return "weak-weak";
        case Regime::StrongWeak: return "strong-weak";
        case Regime::WeakStrongEqualTail: return "weak-strong-equal-tail";
        case Regime::WeakStrongUnequalTail: return "weak-strong-unequal-tail";
        case Regime::StrongStrongEqualTail: return "strong-strong-equal-tail";
        case Regime::StrongStrongUnequalTail: return "strong-strong-unequal-tail";
    }
    return "unknown";
}

Regime regime_of(const PopulationPair& pair) {
    const bool s1 = pair.class1.strong();
    const bool s2 = pair.class2.strong();
    const bool equal = pair.class1.tail_var == pair.class2.tail_var;
    if ((s1 || s2) && pair.class1.tail_var < pair.class2.tail_var)
        throw ConfigError("strong-spike regimes assume tau1^2 >= tau2^2; swap the class labels");
    if (!s1 && !s2) return Regime::WeakWeak;
    if (s1 && !s2) return Regime::StrongWeak;
    if (!s1) return equal ? Regime::WeakStrongEqualTail : Regime::WeakStrongUnequalTail;
    return equal ? Regime::StrongStrongEqualTail : Regime::StrongStrongUnequalTail;
}

IndexSetD index_set_D(Regime regime, int m, int m1, int m2, int n1) {
    IndexSetD out;
    out.regime = regime;
    auto range = [&](int lo, int hi) {
        for (int i = lo; i <= hi; ++i) out.indices.push_back(i);
    };
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("index set: ") + what);
    };
    require(m >= 0 && m1 >= 0 && m2 >= 0 && n1 >= 2, "counts must be nonnegative and n1 >= 2");
    switch (regime) {
        case Regime::WeakWeak:
            require(m == 0, "weak/weak requires m = 0");
            break;
        case Regime::StrongWeak:
            require(m == m1, "strong/weak requires m = m1");
            range(1, m1);
            break;
        case Regime::WeakStrongEqualTail:
            require(m == m2, "weak/strong requires m = m2");
            range(1, m2);
            break;
        case Regime::WeakStrongUnequalTail:
            require(m == m2, "weak/strong requires m = m2");
            range(1, m2);
            range(n1, n1 + m2 - 1);
            break;
        case Regime::StrongStrongEqualTail:
            require(m >= std::max(m1, m2) && m <= m1 + m2, "m outside [max(m1, m2), m1 + m2]");
            range(1, m);
            break;
        case Regime::StrongStrongUnequalTail:
            require(m >= std::max(m1, m2) && m <= m1 + m2, "m outside [max(m1, m2), m1 + m2]");
            require(m1 + m2 <= n1 - 1 + m2, "too many spikes for n1");
            range(1, m == m1 ? m1 : m1 + m2);
            range(n1, n1 + m2 - 1);
            break;
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
    return out;
}

IndexSetD index_set_D(const PopulationPair& pair, int n1) {
    return index_set_D(regime_of(pair), pair.m, pair.class1.m(), pair.class2.m(), n1);
}

namespace {

// Builds sum_{i in idx} a_p/(lambda_i + a_p) u_i (u_i^T d) + U2 U2^T d and normalizes.
DirectionVector shrunk_direction(const TrainedGeometry& g, double alpha, const std::vector<int>& idx,
                                 DirectionKind kind) {
    const double p = static_cast<double>(g.p);
    const double alpha_p = alpha * p;
    const int r = static_cast<int>(g.lambdas.size());
    Vec coef = Vec::Zero(r);
    for (int i1 : idx) {
        if (i1 < 1 || i1 > r)
            throw ConfigError("index " + std::to_string(i1) + " outside 1.." + std::to_string(r));
        const int i = i1 - 1;
        const double denom = g.lambdas(i) + alpha_p;
        if (std::abs(denom) <= 1e-10 * g.lambdas(0))
            throw NumericalError("ridge pole: alpha*p coincides with -lambda_" + std::to_string(i1));
        coef(i) = alpha_p / denom * g.ud(i);
    }
    DirectionVector out;
    out.kind = kind;
    out.alpha = alpha;
    out.indices = idx;
    Vec raw = g.U1hat * coef + g.mdp_norm * g.w_mdp;
    const double norm = raw.norm();
    out.v = raw / norm;
    out.pre_norm = norm / std::sqrt(p);
    return out;
}

}  // namespace

DirectionVector mdp_direction(const TrainedGeometry& g) {
    DirectionVector out;
    out.v = g.w_mdp;
    out.kind = DirectionKind::MDP;
    out.pre_norm = g.kappa_mdp;
    return out;
}

DirectionVector ridge_direction(const TrainedGeometry& g, double alpha) {
    std::vector<int> all(static_cast<std::size_t>(g.lambdas.size()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i) + 1;
    return shrunk_direction(g, alpha, all, DirectionKind::Ridge);
}

DirectionVector projected_ridge(const TrainedGeometry& g, double alpha, const IndexSetD& D) {
    return shrunk_direction(g, alpha, D.indices, DirectionKind::ProjectedRidge);
}

DirectionVector conditioned_projected_ridge(const TrainedGeometry& g, double alpha, const std::vector<int>& d_prime) {
    return shrunk_direction(g, alpha, d_prime, DirectionKind::ConditionedProjectedRidge);
}

double alpha_hat(const TrainedGeometry& g, int m) {
    const int r = static_cast<int>(g.lambdas.size());
    if (m < 0 || m >= r) throw ConfigError("alpha_hat needs 0 <= m < n - 2");
    return -g.lambdas.tail(r - m).mean() / static_cast<double>(g.p);
}

double alpha_hat_k(const TrainedGeometry& g, int k, int m_k) {
    if (k != 1 && k != 2) throw ConfigError("class index must be 1 or 2");
    const Vec& lam = k == 1 ? g.lambdas1 : g.lambdas2;
    const int r = static_cast<int>(lam.size());
    if (m_k < 0 || m_k >= r) throw ConfigError("alpha_hat_k needs 0 <= m_k < n_k - 1");
    return -lam.tail(r - m_k).mean() / static_cast<double>(g.p);
}

Vec project_scores(const Vec& v, const Mat& Y, const Vec& xbar) {
    if (v.size() != Y.rows() || xbar.size() != Y.rows()) throw ConfigError("dimension mismatch in projection");
    const double scale = 1.0 / std::sqrt(static_cast<double>(Y.rows()));
    return ((Y.transpose() * v).array() - v.dot(xbar)) * scale;
}

}  // namespace hdlss
