#include "hdlss/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hdlss {

EigvecPattern::EigvecPattern(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw ConfigError("eigenvector pattern needs at least one block");
    std::vector<Block> sorted = blocks_;
    std::sort(sorted.begin(), sorted.end(), [](const Block& a, const Block& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const Block& b = sorted[i];
        if (!(b.start >= 0.0 && b.start < b.end && b.end <= 1.0))
            throw ConfigError("pattern block fractions must satisfy 0 <= start < end <= 1");
        if (i > 0 && b.start < sorted[i - 1].end) throw ConfigError("pattern blocks overlap");
    }
}

Vec EigvecPattern::realize(Index p) const {
    if (p < static_cast<Index>(2 * blocks_.size()))
        throw ConfigError("dimension p too small for pattern with " + std::to_string(blocks_.size()) + " blocks");
    Vec v = Vec::Zero(p);
    for (const Block& b : blocks_) {
        const auto lo = static_cast<Index>(std::floor(b.start * static_cast<double>(p)));
        const auto hi = static_cast<Index>(std::floor(b.end * static_cast<double>(p)));
        for (Index j = lo; j < hi; ++j) v(j) = b.coef;
    }
    const double norm = v.norm();
    if (norm == 0.0) throw ConfigError("pattern realizes to the zero vector");
    return v / norm;
}

void ClassModel::validate() const {
    if (!(tail_var > 0.0)) throw ConfigError("tail_var must be positive");
    if (mean_scale < 0.0) throw ConfigError("mean scale must be nonnegative");
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        const Spike& s = spikes[i];
        if (!(s.sigma2 > 0.0)) throw ConfigError("spike sigma2 must be positive");
        if (!(s.beta >= 0.0 && s.beta <= 1.0)) throw ConfigError("spike beta must lie in [0, 1]");
        if (s.beta != spikes.front().beta) throw ConfigError("all spikes of a class must share one beta");
        if (i > 0 && s.sigma2 > spikes[i - 1].sigma2) throw ConfigError("spike sigma2 values must be nonincreasing");
    }
}

void PopulationPair::validate() const {
    class1.validate();
    class2.validate();
    if (std::abs(prior1 + prior2 - 1.0) > 1e-12 || prior1 <= 0.0 || prior2 <= 0.0)
        throw ConfigError("priors must be positive and sum to 1");
    const int s1 = class1.strong() ? class1.m() : 0;
    const int s2 = class2.strong() ? class2.m() : 0;
    if (m < std::max(s1, s2) || m > s1 + s2)
        throw ConfigError("m = " + std::to_string(m) + " inconsistent with strong spike counts (" +
                          std::to_string(s1) + ", " + std::to_string(s2) + ")");
    if (delta2 < 0.0) throw ConfigError("delta2 must be nonnegative");
}

void fill_standard_normal(Rng& rng, std::span<double> out) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& x : out) x = normal(rng);
}

Vec realized_mean(const ClassModel& model, Index p) {
    if (model.mean_scale == 0.0) return Vec::Zero(p);
    return model.mean_scale * std::sqrt(static_cast<double>(p)) * model.mean_pattern.realize(p);
}

Mat realized_eigvecs(const ClassModel& model, Index p) {
    Mat U(p, model.m());
    for (int i = 0; i < model.m(); ++i) U.col(i) = model.spikes[static_cast<std::size_t>(i)].u.realize(p);
    if (model.m() > 1) {
        const Mat G = U.transpose() * U - Mat::Identity(model.m(), model.m());
        if (G.cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("class eigenvector patterns are not orthogonal at p = " + std::to_string(p));
    }
    return U;
}

Vec spike_eigenvalues(const ClassModel& model, Index p) {
    Vec lam(model.m());
    for (int i = 0; i < model.m(); ++i) {
        const Spike& s = model.spikes[static_cast<std::size_t>(i)];
        lam(i) = s.sigma2 * std::pow(static_cast<double>(p), s.beta) + model.tail_var;
    }
    return lam;
}

Vec apply_covariance(const ClassModel& model, Index p, const Vec& x) {
    const Mat U = realized_eigvecs(model, p);
    Vec out = model.tail_var * x;
    for (int i = 0; i < model.m(); ++i) {
        const Spike& s = model.spikes[static_cast<std::size_t>(i)];
        out += s.sigma2 * std::pow(static_cast<double>(p), s.beta) * U.col(i).dot(x) * U.col(i);
    }
    return out;
}

namespace {

// Draws columns mu + sum_i sigma_i p^{beta_i/2} z_i u_i + tau g; z comes from `scores` when given.
ClassSample draw_class(const ClassModel& model, Index p, int n_k, Rng& rng, const ScoreSampler& sampler,
                       const Mat* scores) {
    if (n_k < 0) throw ConfigError("sample size must be nonnegative");
    const Vec mu = realized_mean(model, p);
    const Mat U = realized_eigvecs(model, p);
    const int m = model.m();
    if (scores && (scores->rows() != n_k || scores->cols() != m))
        throw ConfigError("standardized scores must be n_k x m_k");
    ClassSample out{Mat(p, n_k), Mat(n_k, m)};
    const double tau = std::sqrt(model.tail_var);
    Vec z(m);
    for (int j = 0; j < n_k; ++j) {
        auto col = out.X.col(j);
        if (scores)
            z = scores->row(j).transpose();
        else
            sampler(rng, std::span<double>(z.data(), static_cast<std::size_t>(m)));
        sampler(rng, std::span<double>(col.data(), static_cast<std::size_t>(p)));
        col *= tau;
        col += mu;
        for (int i = 0; i < m; ++i) {
            const Spike& s = model.spikes[static_cast<std::size_t>(i)];
            const double sigma = std::sqrt(s.sigma2);
            out.W(j, i) = sigma * z(i);
            col += (sigma * std::pow(static_cast<double>(p), 0.5 * s.beta) * z(i)) * U.col(i);
        }
    }
    return out;
}

LabeledData assemble(ClassSample s1, ClassSample s2) {
    const int n1 = static_cast<int>(s1.X.cols());
    const int n2 = static_cast<int>(s2.X.cols());
    LabeledData data;
    data.X.resize(s1.X.rows(), n1 + n2);
    data.X.leftCols(n1) = s1.X;
    data.X.rightCols(n2) = s2.X;
    data.labels.assign(static_cast<std::size_t>(n1), 1);
    data.labels.insert(data.labels.end(), static_cast<std::size_t>(n2), 2);
    data.n1 = n1;
    data.n2 = n2;
    data.W1 = std::move(s1.W);
    data.W2 = std::move(s2.W);
    return data;
}

}  // namespace

ClassSample sample_class(const ClassModel& model, Index p, int n_k, Rng& rng, const ScoreSampler& sampler) {
    return draw_class(model, p, n_k, rng, sampler, nullptr);
}

ClassSample sample_class_given_scores(const ClassModel& model, Index p, const Mat& Z, Rng& rng) {
    return draw_class(model, p, static_cast<int>(Z.rows()), rng, fill_standard_normal, &Z);
}

LabeledData sample_pair_given_scores(const PopulationPair& pair, Index p, const Mat& Z1, const Mat& Z2, Rng& rng) {
    if (Z1.rows() < 1 || Z2.rows() < 1) throw ConfigError("each class needs at least one observation");
    ClassSample s1 = sample_class_given_scores(pair.class1, p, Z1, rng);
    ClassSample s2 = sample_class_given_scores(pair.class2, p, Z2, rng);
    return assemble(std::move(s1), std::move(s2));
}

LabeledData sample_pair(const PopulationPair& pair, Index p, int n1, int n2, Rng& rng) {
    if (n1 < 1 || n2 < 1) throw ConfigError("each class needs at least one observation");
    ClassSample s1 = sample_class(pair.class1, p, n1, rng);
    ClassSample s2 = sample_class(pair.class2, p, n2, rng);
    return assemble(std::move(s1), std::move(s2));
}

LabeledData sample_pair(const PopulationPair& pair, Index p, int n1, int n2, std::uint64_t seed) {
    Rng rng(seed);
    return sample_pair(pair, p, n1, n2, rng);
}

namespace {

EigvecPattern quarters(double a, double b, double c, double d) {
    std::vector<Block> blocks;
    const double coefs[4] = {a, b, c, d};
    for (int q = 0; q < 4; ++q)
        if (coefs[q] != 0.0) blocks.push_back({0.25 * q, 0.25 * (q + 1), coefs[q]});
    return EigvecPattern(std::move(blocks));
}

ClassModel base_class(double mean_scale, double tail_var) {
    ClassModel c;
    c.mean_pattern = EigvecPattern({{0.0, 0.125, 1.0}});
    c.mean_scale = mean_scale;
    c.tail_var = tail_var;
    return c;
}

// Class-1 spikes shared by every setting: (20, 10) p^beta along the half-support vectors.
void add_class1_spikes(ClassModel& c, double beta, bool third) {
    c.spikes.push_back({20.0, beta, quarters(1, 1, 0, 0)});
    c.spikes.push_back({10.0, beta, quarters(0, 0, 1, 1)});
    if (third) c.spikes.push_back({5.0, beta, quarters(1, -1, 1, -1)});
}

void add_class2_spikes(ClassModel& c, double beta) {
    c.spikes.push_back({20.0, beta, quarters(1, 1, 1, 1)});
    c.spikes.push_back({10.0, beta, quarters(1, 0, -1, 0)});
    c.spikes.push_back({5.0, beta, quarters(0, 1, 0, -1)});
}

struct SettingSpec {
    double beta1, beta2, tau1, tau2;
    bool common;      // settings I-II: class 2 copies class 1
    bool third;       // class 1 carries the third spike (VI, X)
    int m;
};

const std::map<std::string, SettingSpec>& setting_table() {
    static const std::map<std::string, SettingSpec> table = {
        {"I", {0.5, 0.5, 30, 30, true, false, 0}},    {"II", {1, 1, 30, 30, true, false, 2}},
        {"III", {0.5, 0.5, 30, 30, false, false, 0}}, {"IV", {1, 0.5, 30, 30, false, false, 2}},
        {"V", {1, 1, 30, 30, false, false, 3}},       {"VI", {1, 1, 30, 30, false, true, 4}},
        {"VII", {0.5, 0.5, 30, 15, false, false, 0}}, {"VIII", {1, 0.5, 30, 15, false, false, 2}},
        {"IX", {1, 1, 30, 15, false, false, 3}},      {"X", {1, 1, 30, 15, false, true, 4}},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& setting_ids() {
    static const std::vector<std::string> ids = {"I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"};
    return ids;
}

PopulationPair make_setting(const std::string& id) {
    const auto it = setting_table().find(id);
    if (it == setting_table().end()) throw ConfigError("unknown setting '" + id + "' (expected I..X)");
    const SettingSpec& s = it->second;
    PopulationPair pair;
    pair.label = id;
    pair.class1 = base_class(1.0, s.tau1);
    pair.class2 = base_class(0.0, s.tau2);
    add_class1_spikes(pair.class1, s.beta1, s.third);
    if (s.common)
        add_class1_spikes(pair.class2, s.beta2, false);
    else
        add_class2_spikes(pair.class2, s.beta2);
    pair.m = s.m;
    pair.delta2 = 1.0;
    pair.validate();
    return pair;
}

}  // namespace hdlss
