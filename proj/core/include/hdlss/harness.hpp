#pragma once

#include "hdlss/classifiers.hpp"
#include "hdlss/limits.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hdlss {

enum class RuleKind { MDP, BMDP, PRD, BPRD, SMDP1, SMDP2, AlwaysClass1 };
enum class AlphaKind { None, Hat, Hat1, Hat2, Value };

struct RuleSpec {
    RuleKind kind = RuleKind::MDP;
    AlphaKind alpha = AlphaKind::None;
    double alpha_value = 0.0;

    std::string name() const;         // "MDP", "b-PRD", ...
    std::string alpha_label() const;  // "", "hat", "hat1", "hat2" or the value
};

// Accepts "mdp", "bmdp", "prd:hat", "bprd:hat1", "prd:-30", "smdp1", "smdp2", "always1".
RuleSpec parse_rule(const std::string& text);
std::vector<RuleSpec> parse_rules(const std::string& comma_list);

struct ExperimentConfig {
    std::string setting = "I";
    PopulationPair pair = make_setting("I");
    Index p = 10000;
    int n1 = 20;
    int n2 = 20;
    int n_test = 500;  // per class
    int reps = 20;
    std::uint64_t seed = 20240101;
    std::vector<RuleSpec> rules;
    int K = 10;
    int n1_te = 6;
    int n2_te = 6;
    int threads = 0;            // 0: hardware concurrency
    bool record_runtime = false;

    void validate() const;
};

struct ResultRow {
    std::string setting;
    std::string rule;
    std::string alpha;
    Index p = 0;
    int reps = 0;
    double acc_mean = 0.0;
    double acc_se = 0.0;
    double acc_class1 = 0.0;
    double acc_class2 = 0.0;
    double runtime_s = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
};

// Per-rep seed from (master seed, setting label, rep, stream).
std::uint64_t derive_seed(std::uint64_t master, const std::string& setting, int rep, std::uint32_t stream);

ResultTable run_experiment(const ExperimentConfig& cfg);

struct RidgeCurve {
    ResultTable table;          // one PRD row per alpha, in grid order
    std::vector<double> alphas;
    std::vector<int> valid_reps;  // reps where the alpha was not a pole
    double argmax_alpha = 0.0;
};

// PRD accuracy over an alpha grid, sharing training and test draws across alphas.
RidgeCurve ridge_curve(const ExperimentConfig& cfg, const std::vector<double>& alpha_grid);

// Long-format diagnostics: one record per (p, rep, quantity, index).
struct DiagnosticRecord {
    std::string setting;
    Index p = 0;
    int rep = 0;
    std::string quantity;
    int index = 0;
    double empirical = 0.0;
    double predicted = 0.0;  // NaN when the limits module has no prediction
};

struct DiagnosticStream {
    std::vector<DiagnosticRecord> records;
};

// For every p and rep: eigenvalues, angles, kappa_MDP, test piling statistics and, on strong/strong
// settings, |w_SMDP^T u_j|. Standardized scores are drawn once per rep and reused across p.
DiagnosticStream convergence_sweep(const ExperimentConfig& cfg, const std::vector<Index>& p_grid);

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& text);

void emit(const ResultTable& table, OutputFormat fmt, std::ostream& out);
void emit(const DiagnosticStream& stream, OutputFormat fmt, std::ostream& out);
void emit(const LimitReport& report, std::ostream& out);
void emit_file(const ResultTable& table, OutputFormat fmt, const std::string& path);
void emit_file(const DiagnosticStream& stream, OutputFormat fmt, const std::string& path);

ResultTable parse_result_json(const std::string& text);

// Model configuration files.
PopulationPair load_model_file(const std::string& path);
PopulationPair parse_model_json(const std::string& text);
std::string model_to_json(const PopulationPair& pair);

}  // namespace hdlss
