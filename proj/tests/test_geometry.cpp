#include "hdlss/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hdlss;

namespace {

struct Dense {
    Vec values;  // descending eigenvalues of S_W
    Mat vectors;
    Vec d;
    Mat Sw;
};

Dense dense_scatter(const LabeledData& data) {
    Dense out;
    const Vec m1 = data.X.leftCols(data.n1).rowwise().mean();
    const Vec m2 = data.X.rightCols(data.n2).rowwise().mean();
    Mat Xc = data.X;
    Xc.leftCols(data.n1).colwise() -= m1;
    Xc.rightCols(data.n2).colwise() -= m2;
    out.Sw = Xc * Xc.transpose();
    out.d = m1 - m2;
    Eigen::SelfAdjointEigenSolver<Mat> es(out.Sw);
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

// Unit direction of alpha_p (S_W + alpha_p I)^{-1} d from a dense solve.
Vec dense_ridge(const Dense& D, double alpha) {
    const Index p = D.Sw.rows();
    const double ap = alpha * static_cast<double>(p);
    const Mat A = D.Sw + ap * Mat::Identity(p, p);
    Vec w = ap * A.fullPivLu().solve(D.d);
    return w.normalized();
}

}  // namespace

class DualPrimal : public ::testing::TestWithParam<std::string> {};

TEST_P(DualPrimal, EigenpairsMdpAndRidgeMatchDense) {
    const PopulationPair pair = make_setting(GetParam());
    const Index p = 48;
    const int n1 = 9, n2 = 8;
    const LabeledData data = sample_pair(pair, p, n1, n2, 11);
    const TrainedGeometry g = fit_geometry(data);
    const Dense D = dense_scatter(data);
    const int r = n1 + n2 - 2;
    ASSERT_EQ(g.lambdas.size(), r);
    for (int i = 0; i < r; ++i) {
        EXPECT_NEAR(g.lambdas(i), D.values(i), 1e-8 * D.values(0));
        EXPECT_NEAR(std::abs(g.U1hat.col(i).dot(D.vectors.col(i))), 1.0, 1e-8);
    }
    for (Index i = r; i < p; ++i) EXPECT_NEAR(D.values(i), 0.0, 1e-8 * D.values(0));

    // w_MDP: d projected onto the null space of S_W.
    const Mat N = D.vectors.rightCols(p - r);
    const Vec w = (N * (N.transpose() * D.d)).normalized();
    EXPECT_LT((g.w_mdp - w).norm(), 1e-8);

    for (double alpha : {-45.0, -7.5, -0.3, 0.5, 12.0, 300.0}) {
        const Vec dense = dense_ridge(D, alpha);
        const Vec dual = ridge_direction(g, alpha).v;
        EXPECT_LT((dual - dense).norm(), 1e-8) << "alpha " << alpha;
    }
}

INSTANTIATE_TEST_SUITE_P(Settings, DualPrimal, ::testing::Values("I", "II", "V", "VIII", "IX", "X"));

TEST(Geometry, FirstDataPiling) {
    for (const char* id : {"I", "V", "IX"}) {
        const LabeledData data = sample_pair(make_setting(id), 2000, 20, 20, 5);
        const TrainedGeometry g = fit_geometry(data);
        const Vec proj = data.X.transpose() * g.w_mdp;
        const double scale = g.kappa_mdp * std::sqrt(2000.0);
        const Vec a = proj.head(20), b = proj.tail(20);
        EXPECT_LT((a.maxCoeff() - a.minCoeff()) / scale, 1e-8);
        EXPECT_LT((b.maxCoeff() - b.minCoeff()) / scale, 1e-8);
        EXPECT_NEAR((a.mean() - b.mean()) / scale, 1.0, 1e-10);
    }
}

TEST(Geometry, SignConventionAndKappa) {
    const LabeledData data = sample_pair(make_setting("IX"), 400, 10, 12, 3);
    const TrainedGeometry g = fit_geometry(data);
    EXPECT_TRUE((g.ud.array() >= 0.0).all());
    EXPECT_NEAR(g.kappa_mdp, g.mdp_norm / std::sqrt(400.0), 1e-12);
    EXPECT_NEAR(g.w_mdp.norm(), 1.0, 1e-12);
    EXPECT_LT((g.U1hat.transpose() * g.w_mdp).norm(), 1e-10);
}

TEST(Geometry, RidgeLimits) {
    const LabeledData data = sample_pair(make_setting("V"), 200, 10, 10, 8);
    const TrainedGeometry g = fit_geometry(data);
    // alpha -> infinity gives the mean difference; alpha -> 0 gives w_MDP.
    EXPECT_LT((ridge_direction(g, 1e12).v - g.d.normalized()).norm(), 1e-6);
    EXPECT_LT((ridge_direction(g, 1e-12).v - g.w_mdp).norm(), 1e-6);
    EXPECT_LT((ridge_direction(g, 0.0).v - g.w_mdp).norm(), 1e-15);
}

TEST(Geometry, PoleIsRejected) {
    const LabeledData data = sample_pair(make_setting("V"), 200, 10, 10, 8);
    const TrainedGeometry g = fit_geometry(data);
    const double pole = -g.lambdas(3) / 200.0;
    EXPECT_THROW(ridge_direction(g, pole), NumericalError);
    const IndexSetD D = index_set_D(make_setting("V"), 10);
    EXPECT_NO_THROW(projected_ridge(g, pole, D));
}

TEST(Geometry, AlphaHatTracksTail) {
    const PopulationPair pair = make_setting("IX");
    const LabeledData data = sample_pair(pair, 20000, 20, 20, 4);
    const TrainedGeometry g = fit_geometry(data);
    EXPECT_NEAR(alpha_hat_k(g, 1, 3), -30.0, 1.5);
    EXPECT_NEAR(alpha_hat_k(g, 2, 3), -15.0, 0.8);
}

TEST(Geometry, ProjectScores) {
    const Vec v = Vec::Unit(4, 0);
    Mat Y(4, 2);
    Y << 4, 8, 0, 0, 0, 0, 0, 0;
    const Vec s = project_scores(v, Y, Vec::Constant(4, 2.0));
    EXPECT_DOUBLE_EQ(s(0), 1.0);
    EXPECT_DOUBLE_EQ(s(1), 3.0);
}

TEST(IndexSet, Tables) {
    EXPECT_TRUE(index_set_D(Regime::WeakWeak, 0, 0, 0, 20).indices.empty());
    EXPECT_EQ(index_set_D(Regime::StrongWeak, 2, 2, 0, 20).indices, (std::vector<int>{1, 2}));
    EXPECT_EQ(index_set_D(Regime::WeakStrongEqualTail, 3, 0, 3, 20).indices, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(index_set_D(Regime::WeakStrongUnequalTail, 3, 0, 3, 20).indices,
              (std::vector<int>{1, 2, 3, 20, 21, 22}));
    EXPECT_EQ(index_set_D(Regime::StrongStrongEqualTail, 3, 2, 3, 20).indices, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(index_set_D(Regime::StrongStrongUnequalTail, 2, 2, 1, 20).indices, (std::vector<int>{1, 2, 20}));
    EXPECT_EQ(index_set_D(Regime::StrongStrongUnequalTail, 3, 2, 3, 20).indices,
              (std::vector<int>{1, 2, 3, 4, 5, 20, 21, 22}));
    EXPECT_THROW(index_set_D(Regime::WeakWeak, 1, 0, 0, 20), ConfigError);
}

TEST(IndexSet, FromSettings) {
    EXPECT_EQ(regime_of(make_setting("I")), Regime::WeakWeak);
    EXPECT_EQ(regime_of(make_setting("IV")), Regime::StrongWeak);
    EXPECT_EQ(regime_of(make_setting("V")), Regime::StrongStrongEqualTail);
    EXPECT_EQ(regime_of(make_setting("IX")), Regime::StrongStrongUnequalTail);
    EXPECT_EQ(index_set_D(make_setting("X"), 20).indices.size(), 6u + 3u);
}
