#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdlss {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Raised for invalid model or experiment configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a computation hits a degenerate numerical state (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Block {
    double start = 0.0;
    double end = 1.0;
    double coef = 1.0;
};

// Block-constant direction; realize(p) gives coef on floor(start*p)..floor(end*p)-1,
// rescaled to unit norm.
class EigvecPattern {
public:
    EigvecPattern() = default;
    explicit EigvecPattern(std::vector<Block> blocks);

    const std::vector<Block>& blocks() const { return blocks_; }
    Vec realize(Index p) const;

private:
    std::vector<Block> blocks_;
};

struct Spike {
    double sigma2 = 1.0;
    double beta = 1.0;
    EigvecPattern u;
};

struct ClassModel {
    EigvecPattern mean_pattern;
    // Realized mean is mean_scale * sqrt(p) * unit(mean_pattern), so p^{-1}|mu|^2 = mean_scale^2.
    double mean_scale = 0.0;
    std::vector<Spike> spikes;
    double tail_var = 1.0;

    int m() const { return static_cast<int>(spikes.size()); }
    // Common spike exponent; 0 when the class has no spikes.
    double beta() const { return spikes.empty() ? 0.0 : spikes.front().beta; }
    bool strong() const { return !spikes.empty() && beta() == 1.0; }
    void validate() const;
};

struct PopulationPair {
    std::string label = "custom";
    ClassModel class1;
    ClassModel class2;
    double prior1 = 0.5;
    double prior2 = 0.5;
    int m = 0;
    double delta2 = 0.0;

    void validate() const;
};

struct LabeledData {
    Mat X;                      // p x n, class 1 columns first
    std::vector<int> labels;    // values in {1, 2}
    int n1 = 0;
    int n2 = 0;
    std::optional<Mat> W1;      // n1 x m1 scores sigma_i * z_i
    std::optional<Mat> W2;

    Index p() const { return X.rows(); }
    int n() const { return n1 + n2; }
};

// Fills a buffer with i.i.d. unit-variance draws; the default is standard normal.
using ScoreSampler = std::function<void(Rng&, std::span<double>)>;

void fill_standard_normal(Rng& rng, std::span<double> out);

struct ClassSample {
    Mat X;   // p x n_k
    Mat W;   // n_k x m_k
};

ClassSample sample_class(const ClassModel& model, Index p, int n_k, Rng& rng,
                         const ScoreSampler& sampler = fill_standard_normal);

// Same draw with standardized scores z held fixed (n_k x m_k), e.g. to compare several p on one score set.
ClassSample sample_class_given_scores(const ClassModel& model, Index p, const Mat& Z, Rng& rng);
LabeledData sample_pair_given_scores(const PopulationPair& pair, Index p, const Mat& Z1, const Mat& Z2, Rng& rng);

LabeledData sample_pair(const PopulationPair& pair, Index p, int n1, int n2, std::uint64_t seed);
LabeledData sample_pair(const PopulationPair& pair, Index p, int n1, int n2, Rng& rng);

// Realized quantities of one class at dimension p.
Vec realized_mean(const ClassModel& model, Index p);
Mat realized_eigvecs(const ClassModel& model, Index p);   // p x m_k
Vec spike_eigenvalues(const ClassModel& model, Index p);  // sigma2 * p^beta + tau^2
// Applies the factored covariance Sigma_k to a vector.
Vec apply_covariance(const ClassModel& model, Index p, const Vec& x);

const std::vector<std::string>& setting_ids();
PopulationPair make_setting(const std::string& id);

}  // namespace hdlss
