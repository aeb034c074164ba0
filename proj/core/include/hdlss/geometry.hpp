#pragma once

#include "hdlss/model.hpp"

#include <string>
#include <vector>

namespace hdlss {

// Sample geometry of a two-class training set, computed through n x n dual matrices.
struct TrainedGeometry {
    Index p = 0;
    int n1 = 0;
    int n2 = 0;
    Vec d;          // class-mean difference, X1bar - X2bar
    Vec xbar;       // pooled mean
    Vec mean1;
    Vec mean2;
    Mat U1hat;      // p x r sample eigenvectors of S_W, r = n - 2 unless rank deficient
    Vec lambdas;    // r eigenvalues, nonincreasing
    Vec ud;         // U1hat^T d, entries >= 0 by sign convention
    Vec w_mdp;      // unit vector along d - U1hat U1hat^T d
    double mdp_norm = 0.0;   // |U2 U2^T d|
    double kappa_mdp = 0.0;  // p^{-1/2} w_mdp^T d
    Vec lambdas1;   // n1 - 1 eigenvalues of the class-1 scatter
    Vec lambdas2;
    bool rank_deficient = false;

    int n() const { return n1 + n2; }
};

TrainedGeometry fit_geometry(const Mat& X, int n1, int n2);
TrainedGeometry fit_geometry(const LabeledData& data);

enum class Regime {
    WeakWeak,
    StrongWeak,
    WeakStrongEqualTail,
    WeakStrongUnequalTail,
    StrongStrongEqualTail,
    StrongStrongUnequalTail,
};

std::string to_string(Regime r);
Regime regime_of(const PopulationPair& pair);

// 1-based sample eigenvector indices not asymptotically orthogonal to the common leading eigenspace.
struct IndexSetD {
    Regime regime = Regime::WeakWeak;
    std::vector<int> indices;
};

IndexSetD index_set_D(Regime regime, int m, int m1, int m2, int n1);
IndexSetD index_set_D(const PopulationPair& pair, int n1);

enum class DirectionKind { MDP, Ridge, ProjectedRidge, ConditionedProjectedRidge, SMDP };

struct DirectionVector {
    Vec v;                     // unit vector
    DirectionKind kind = DirectionKind::MDP;
    double alpha = 0.0;
    std::vector<int> indices;  // index set used by projected variants
    double pre_norm = 0.0;     // norm of the unnormalized p^{-1/2}-scaled vector
};

DirectionVector mdp_direction(const TrainedGeometry& g);
DirectionVector ridge_direction(const TrainedGeometry& g, double alpha);
DirectionVector projected_ridge(const TrainedGeometry& g, double alpha, const IndexSetD& D);
DirectionVector conditioned_projected_ridge(const TrainedGeometry& g, double alpha, const std::vector<int>& d_prime);

double alpha_hat(const TrainedGeometry& g, int m);
double alpha_hat_k(const TrainedGeometry& g, int k, int m_k);

// p^{-1/2} v^T (Y - xbar) for every column of Y.
Vec project_scores(const Vec& v, const Mat& Y, const Vec& xbar);

// Descending eigenpairs of a symmetric matrix.
void symmetric_eig_desc(const Mat& A, Vec& values, Mat& vectors);

}  // namespace hdlss
