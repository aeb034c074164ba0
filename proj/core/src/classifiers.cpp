#include "hdlss/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

namespace hdlss {

Vec rule_scores(const LinearRule& rule, const Mat& Y) {
    if (rule.w.size() != Y.rows()) throw ConfigError("rule dimension does not match data");
    const double scale = 1.0 / std::sqrt(static_cast<double>(Y.rows()));
    return (Y.transpose() * rule.w).array() * scale - rule.offset;
}

std::vector<int> predict(const LinearRule& rule, const Mat& Y) {
    const Vec s = rule_scores(rule, Y);
    std::vector<int> out(static_cast<std::size_t>(s.size()));
    for (Index j = 0; j < s.size(); ++j) out[static_cast<std::size_t>(j)] = s(j) >= 0.0 ? 1 : 2;
    return out;
}

namespace {

double scaled_offset(const Vec& w, const Vec& xbar) {
    return w.dot(xbar) / std::sqrt(static_cast<double>(w.size()));
}

double tail_gap(const TrainedGeometry& g, int m1, int m2) {
    return alpha_hat_k(g, 1, m1) - alpha_hat_k(g, 2, m2);
}

}  // namespace

LinearRule mdp_rule(const TrainedGeometry& g) { return {g.w_mdp, scaled_offset(g.w_mdp, g.xbar)}; }

LinearRule bmdp_rule(const TrainedGeometry& g, int m1, int m2) {
    LinearRule r = mdp_rule(g);
    r.offset += tail_gap(g, m1, m2) / (g.n() * g.kappa_mdp);
    return r;
}

LinearRule prd_rule(const TrainedGeometry& g, double alpha, const IndexSetD& D) {
    const DirectionVector v = projected_ridge(g, alpha, D);
    return {v.v, scaled_offset(v.v, g.xbar)};
}

LinearRule bprd_rule(const TrainedGeometry& g, double alpha, const IndexSetD& D, int m1, int m2) {
    const DirectionVector v = projected_ridge(g, alpha, D);
    return {v.v, scaled_offset(v.v, g.xbar) + tail_gap(g, m1, m2) / (g.n() * v.pre_norm)};
}

std::vector<int> classify_mdp(const TrainedGeometry& g, const Mat& Y) { return predict(mdp_rule(g), Y); }

std::vector<int> classify_bmdp(const TrainedGeometry& g, int m1, int m2, const Mat& Y) {
    return predict(bmdp_rule(g, m1, m2), Y);
}

std::vector<int> classify_prd(const TrainedGeometry& g, double alpha, const IndexSetD& D, const Mat& Y) {
    return predict(prd_rule(g, alpha, D), Y);
}

std::vector<int> classify_bprd(const TrainedGeometry& g, double alpha, const IndexSetD& D, int m1, int m2,
                               const Mat& Y) {
    return predict(bprd_rule(g, alpha, D, m1, m2), Y);
}

double lda_threshold_1d(const Vec& scores, const std::vector<int>& labels) {
    if (static_cast<std::size_t>(scores.size()) != labels.size()) throw ConfigError("scores and labels differ in length");
    double s1 = 0, s2 = 0;
    int c1 = 0, c2 = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] == 1) {
            s1 += scores(static_cast<Index>(j));
            ++c1;
        } else {
            s2 += scores(static_cast<Index>(j));
            ++c2;
        }
    }
    if (c1 == 0 || c2 == 0) throw ConfigError("LDA threshold needs both classes");
    const double m1 = s1 / c1, m2 = s2 / c2;
    double ss = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const double c = labels[j] == 1 ? m1 : m2;
        ss += (scores(static_cast<Index>(j)) - c) * (scores(static_cast<Index>(j)) - c);
    }
    const int dof = c1 + c2 - 2;
    const double pooled = dof > 0 ? ss / dof : 0.0;
    const double mid = 0.5 * (m1 + m2);
    if (m1 == m2) {
        std::clog << "warning: LDA class means coincide, using midpoint threshold\n";
        return mid;
    }
    return mid + pooled * std::log(static_cast<double>(c2) / c1) / (m1 - m2);
}

namespace {

struct Split {
    std::vector<Index> train;  // class-1 columns first
    std::vector<Index> test;
    int n1_tr, n2_tr, n1_te, n2_te;
};

Split random_split(int n1, int n2, int n1_te, int n2_te, Rng& rng) {
    std::vector<Index> c1(static_cast<std::size_t>(n1)), c2(static_cast<std::size_t>(n2));
    std::iota(c1.begin(), c1.end(), Index{0});
    std::iota(c2.begin(), c2.end(), Index{n1});
    std::shuffle(c1.begin(), c1.end(), rng);
    std::shuffle(c2.begin(), c2.end(), rng);
    Split s{{}, {}, n1 - n1_te, n2 - n2_te, n1_te, n2_te};
    std::sort(c1.begin(), c1.begin() + s.n1_tr);
    std::sort(c1.begin() + s.n1_tr, c1.end());
    std::sort(c2.begin(), c2.begin() + s.n2_tr);
    std::sort(c2.begin() + s.n2_tr, c2.end());
    s.train.insert(s.train.end(), c1.begin(), c1.begin() + s.n1_tr);
    s.train.insert(s.train.end(), c2.begin(), c2.begin() + s.n2_tr);
    s.test.insert(s.test.end(), c1.begin() + s.n1_tr, c1.end());
    s.test.insert(s.test.end(), c2.begin() + s.n2_tr, c2.end());
    return s;
}

Mat gather(const Mat& X, const std::vector<Index>& cols) {
    Mat out(X.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = X.col(cols[j]);
    return out;
}

}  // namespace

SmdpFit smdp_fit(const Mat& X, int n1, int n2, const SmdpOptions& opt) {
    if (opt.K < 1) throw ConfigError("SMDP needs K >= 1");
    if (opt.n1_te <= opt.m1 || opt.n2_te <= opt.m2) throw ConfigError("SMDP test split sizes must exceed m_k");
    if (n1 - opt.n1_te < 2 || n2 - opt.n2_te < 2) throw ConfigError("SMDP training split needs two points per class");
    const int n_tr = n1 + n2 - opt.n1_te - opt.n2_te;
    if (opt.m < 0 || opt.m >= n_tr - 1) throw ConfigError("SMDP needs 0 <= m < n_tr - 1");
    const double p = static_cast<double>(X.rows());

    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32), 0x534d4450u};
    Rng rng(seq);

    SmdpFit fit;
    fit.variant = opt.variant;
    fit.K = opt.K;
    fit.w_smdp = Vec::Zero(X.rows());
    for (int j = 0; j < opt.K; ++j) {
        const Split s = random_split(n1, n2, opt.n1_te, opt.n2_te, rng);
        const Mat Xtr = gather(X, s.train);
        const Mat Xte = gather(X, s.test);
        const TrainedGeometry g = fit_geometry(Xtr, s.n1_tr, s.n2_tr);
        const int r = static_cast<int>(g.lambdas.size());
        Mat V(X.rows(), r + 1);
        V.leftCols(r) = g.U1hat;
        V.col(r) = g.w_mdp;

        Mat Xte_c = Xte;
        Xte_c.leftCols(s.n1_te).colwise() -= Xte.leftCols(s.n1_te).rowwise().mean();
        Xte_c.rightCols(s.n2_te).colwise() -= Xte.rightCols(s.n2_te).rowwise().mean();
        const Mat B = V.transpose() * Xte_c;
        SmdpSplit info;
        Mat Q;
        symmetric_eig_desc(B * B.transpose() / p, info.h, Q);
        const Mat Q2 = Q.rightCols(r + 1 - opt.m);
        Vec a = Q2 * Q2.row(r).transpose();
        const double an = a.norm();
        if (!(an > 1e-12)) throw NumericalError("SMDP: e_MDP is orthogonal to the retained subspace");
        a /= an;
        info.a = a;
        info.kappa_mdp = g.kappa_mdp;
        const Vec w = V * a;
        fit.w_smdp += w;
        if (opt.variant == SmdpVariant::TypeI) {
            const double gap = alpha_hat_k(g, 1, opt.m1) - alpha_hat_k(g, 2, opt.m2);
            info.bias = a(r) * gap / (n_tr * g.kappa_mdp);
            fit.xbar_smdp += w.dot(g.xbar);
            fit.g_smdp += info.bias;
        } else {
            const Vec sc = (Xte.transpose() * w) / std::sqrt(p);
            std::vector<int> lab(static_cast<std::size_t>(s.n1_te), 1);
            lab.insert(lab.end(), static_cast<std::size_t>(s.n2_te), 2);
            info.threshold = lda_threshold_1d(sc, lab);
            fit.b_smdp += info.threshold;
        }
        fit.splits.push_back(std::move(info));
    }
    fit.w_smdp /= opt.K;
    fit.xbar_smdp /= opt.K;
    fit.g_smdp /= opt.K;
    fit.b_smdp /= opt.K;
    return fit;
}

LinearRule SmdpFit::rule() const {
    if (variant == SmdpVariant::TypeI)
        return {w_smdp, xbar_smdp / std::sqrt(static_cast<double>(w_smdp.size())) + g_smdp};
    return {w_smdp, b_smdp};
}

std::vector<int> smdp_classify(const SmdpFit& fit, const Mat& Y) { return predict(fit.rule(), Y); }

}  // namespace hdlss
