#pragma once

#include "hdlss/geometry.hpp"

#include <cstdint>
#include <vector>

namespace hdlss {

// Every rule reduces to: label 1 iff p^{-1/2} w^T Y - offset >= 0, else label 2.
struct LinearRule {
    Vec w;
    double offset = 0.0;
};

Vec rule_scores(const LinearRule& rule, const Mat& Y);
std::vector<int> predict(const LinearRule& rule, const Mat& Y);

LinearRule mdp_rule(const TrainedGeometry& g);
// Bias-corrected MDP: threshold shifted by (alpha1_hat - alpha2_hat) / (n kappa_mdp).
LinearRule bmdp_rule(const TrainedGeometry& g, int m1, int m2);
LinearRule prd_rule(const TrainedGeometry& g, double alpha, const IndexSetD& D);
LinearRule bprd_rule(const TrainedGeometry& g, double alpha, const IndexSetD& D, int m1, int m2);

std::vector<int> classify_mdp(const TrainedGeometry& g, const Mat& Y);
std::vector<int> classify_bmdp(const TrainedGeometry& g, int m1, int m2, const Mat& Y);
std::vector<int> classify_prd(const TrainedGeometry& g, double alpha, const IndexSetD& D, const Mat& Y);
std::vector<int> classify_bprd(const TrainedGeometry& g, double alpha, const IndexSetD& D, int m1, int m2,
                               const Mat& Y);

enum class SmdpVariant { TypeI, TypeII };

struct SmdpOptions {
    int K = 10;
    int m = 0;
    int m1 = 0;
    int m2 = 0;
    int n1_te = 6;
    int n2_te = 6;
    SmdpVariant variant = SmdpVariant::TypeI;
    std::uint64_t seed = 0;
};

struct SmdpSplit {
    Vec a;           // unit (n_tr - 1)-vector, last coordinate >= 0
    Vec h;           // eigenvalues of p^{-1} V^T S_te V, descending
    double kappa_mdp = 0.0;
    double bias = 0.0;       // g_j (Type I)
    double threshold = 0.0;  // b_j (Type II)
};

struct SmdpFit {
    SmdpVariant variant = SmdpVariant::TypeI;
    int K = 0;
    Vec w_smdp;             // average of per-split unit directions, not renormalized
    double xbar_smdp = 0.0; // Type I: average of w_j^T Xbar_j
    double g_smdp = 0.0;    // Type I bias
    double b_smdp = 0.0;    // Type II threshold
    std::vector<SmdpSplit> splits;

    LinearRule rule() const;
};

SmdpFit smdp_fit(const Mat& X, int n1, int n2, const SmdpOptions& opt);
std::vector<int> smdp_classify(const SmdpFit& fit, const Mat& Y);

// Gaussian LDA threshold on scalar scores with pooled variance and empirical priors.
double lda_threshold_1d(const Vec& scores, const std::vector<int>& labels);

}  // namespace hdlss
