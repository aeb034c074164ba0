#include "hdlss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace hdlss {

using json = nlohmann::json;

// ---- rules --------------------------------------------------------------------------------

namespace {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::string RuleSpec::name() const {
    switch (kind) {
        case RuleKind::MDP: return "MDP";
        case RuleKind::BMDP: return "b-MDP";
        case RuleKind::PRD: return "PRD";
        case RuleKind::BPRD: return "b-PRD";
        case RuleKind::SMDP1: return "SMDP-I";
        case RuleKind::SMDP2: return "SMDP-II";
        case RuleKind::AlwaysClass1: return "always-1";
    }
    return "?";
}

std::string RuleSpec::alpha_label() const {
    switch (alpha) {
        case AlphaKind::None: return "";
        case AlphaKind::Hat: return "hat";
        case AlphaKind::Hat1: return "hat1";
        case AlphaKind::Hat2: return "hat2";
        case AlphaKind::Value: return format_number(alpha_value);
    }
    return "";
}

RuleSpec parse_rule(const std::string& text) {
    const std::string t = lower(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : t.substr(colon + 1);
    RuleSpec r;
    if (head == "mdp") r.kind = RuleKind::MDP;
    else if (head == "bmdp" || head == "b-mdp") r.kind = RuleKind::BMDP;
    else if (head == "prd") r.kind = RuleKind::PRD;
    else if (head == "bprd" || head == "b-prd") r.kind = RuleKind::BPRD;
    else if (head == "smdp1" || head == "smdp-i") r.kind = RuleKind::SMDP1;
    else if (head == "smdp2" || head == "smdp-ii") r.kind = RuleKind::SMDP2;
    else if (head == "always1") r.kind = RuleKind::AlwaysClass1;
    else throw ConfigError("unknown rule '" + text + "'");

    const bool ridge = r.kind == RuleKind::PRD || r.kind == RuleKind::BPRD;
    if (!ridge) {
        if (!tail.empty()) throw ConfigError("rule '" + text + "' takes no ridge parameter");
        return r;
    }
    if (tail.empty() || tail == "hat") r.alpha = AlphaKind::Hat;
    else if (tail == "hat1") r.alpha = AlphaKind::Hat1;
    else if (tail == "hat2") r.alpha = AlphaKind::Hat2;
    else {
        std::size_t used = 0;
        try {
            r.alpha_value = std::stod(tail, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tail.size() || !std::isfinite(r.alpha_value))
            throw ConfigError("bad ridge parameter in rule '" + text + "'");
        r.alpha = AlphaKind::Value;
    }
    return r;
}

std::vector<RuleSpec> parse_rules(const std::string& comma_list) {
    std::vector<RuleSpec> out;
    std::stringstream ss(comma_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(parse_rule(item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw ConfigError("rule list is empty");
    return out;
}

void ExperimentConfig::validate() const {
    pair.validate();
    if (p < 8) throw ConfigError("p must be at least 8");
    if (n1 < 3 || n2 < 3) throw ConfigError("n1 and n2 must be at least 3");
    if (n_test < 1) throw ConfigError("n_test must be positive");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (rules.empty()) throw ConfigError("rule list is empty");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    if (pair.m >= n1 + n2 - 2) throw ConfigError("m must be smaller than n - 2");
    for (const RuleSpec& r : rules) {
        if (r.kind == RuleKind::SMDP1 || r.kind == RuleKind::SMDP2) {
            if (K < 1) throw ConfigError("K must be positive");
            if (n1_te < 2 || n2_te < 2 || n1 - n1_te < 2 || n2 - n2_te < 2)
                throw ConfigError("SMDP split sizes leave fewer than two points per class");
            if (n1 + n2 - n1_te - n2_te - 1 - pair.m < 1) throw ConfigError("SMDP training split too small for m");
        }
    }
}

// ---- seeds and workers --------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t master, const std::string& setting, int rep, std::uint32_t stream) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : setting) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(rep), stream};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

constexpr std::uint32_t kTrainStream = 1;
constexpr std::uint32_t kTestStream = 2;
constexpr std::uint32_t kSplitStream = 3;
constexpr std::uint32_t kScoreStream = 4;
constexpr std::uint32_t kSweepStream = 100;
constexpr int kChunk = 100;

// Runs job(rep) for every rep on a worker pool; the first failure by rep index is rethrown.
template <class Job>
void for_each_rep(int reps, int threads, Job&& job) {
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, reps);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    auto loop = [&] {
        for (int r; (r = next.fetch_add(1)) < reps;) {
            try {
                job(r);
            } catch (...) {
                errors[static_cast<std::size_t>(r)] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        loop();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(loop);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double resolve_alpha(const RuleSpec& r, const TrainedGeometry& g, const PopulationPair& pair) {
    switch (r.alpha) {
        case AlphaKind::Hat: return alpha_hat(g, pair.m);
        case AlphaKind::Hat1: return alpha_hat_k(g, 1, pair.class1.m());
        case AlphaKind::Hat2: return alpha_hat_k(g, 2, pair.class2.m());
        case AlphaKind::Value: return r.alpha_value;
        case AlphaKind::None: break;
    }
    throw ConfigError("ridge rule without a ridge parameter");
}

LinearRule build_rule(const RuleSpec& r, const ExperimentConfig& cfg, const LabeledData& data,
                      const TrainedGeometry& g, const IndexSetD& D, int rep) {
    const int m1 = cfg.pair.class1.m();
    const int m2 = cfg.pair.class2.m();
    switch (r.kind) {
        case RuleKind::MDP: return mdp_rule(g);
        case RuleKind::BMDP: return bmdp_rule(g, m1, m2);
        case RuleKind::PRD: return prd_rule(g, resolve_alpha(r, g, cfg.pair), D);
        case RuleKind::BPRD: return bprd_rule(g, resolve_alpha(r, g, cfg.pair), D, m1, m2);
        case RuleKind::SMDP1:
        case RuleKind::SMDP2: {
            SmdpOptions opt;
            opt.K = cfg.K;
            opt.m = cfg.pair.m;
            opt.m1 = m1;
            opt.m2 = m2;
            opt.n1_te = cfg.n1_te;
            opt.n2_te = cfg.n2_te;
            opt.variant = r.kind == RuleKind::SMDP1 ? SmdpVariant::TypeI : SmdpVariant::TypeII;
            opt.seed = derive_seed(cfg.seed, cfg.setting, rep, kSplitStream);
            return smdp_fit(data.X, data.n1, data.n2, opt).rule();
        }
        case RuleKind::AlwaysClass1: return {Vec::Zero(g.p), -1.0};
    }
    throw ConfigError("unknown rule");
}

struct Counts {
    long c1 = 0;
    long c2 = 0;
    bool valid = true;
    double seconds = 0.0;
};

// Streams a balanced test set in chunks and counts correct predictions for every rule.
void score_test_set(const ExperimentConfig& cfg, int rep, const std::vector<LinearRule>& rules,
                    std::vector<Counts>& counts, std::vector<double>& seconds) {
    Rng rng(derive_seed(cfg.seed, cfg.setting, rep, kTestStream));
    for (int k = 1; k <= 2; ++k) {
        const ClassModel& model = k == 1 ? cfg.pair.class1 : cfg.pair.class2;
        for (int done = 0; done < cfg.n_test; done += kChunk) {
            const int nb = std::min(kChunk, cfg.n_test - done);
            const ClassSample Y = sample_class(model, cfg.p, nb, rng);
            for (std::size_t i = 0; i < rules.size(); ++i) {
                if (!counts[i].valid) continue;
                const auto t0 = Clock::now();
                const Vec s = rule_scores(rules[i], Y.X);
                long hit = 0;
                for (Index j = 0; j < s.size(); ++j) hit += (s(j) >= 0.0) == (k == 1);
                (k == 1 ? counts[i].c1 : counts[i].c2) += hit;
                seconds[i] += seconds_since(t0);
            }
        }
    }
}

ResultRow aggregate(const ExperimentConfig& cfg, const std::string& rule, const std::string& alpha,
                    const std::vector<Counts>& per_rep, bool timing) {
    ResultRow row;
    row.setting = cfg.setting;
    row.rule = rule;
    row.alpha = alpha;
    row.p = cfg.p;
    std::vector<double> acc;
    double a1 = 0.0, a2 = 0.0, secs = 0.0;
    for (const Counts& c : per_rep) {
        if (!c.valid) continue;
        acc.push_back(static_cast<double>(c.c1 + c.c2) / (2.0 * cfg.n_test));
        a1 += static_cast<double>(c.c1) / cfg.n_test;
        a2 += static_cast<double>(c.c2) / cfg.n_test;
        secs += c.seconds;
    }
    row.reps = static_cast<int>(acc.size());
    if (acc.empty()) {
        row.acc_mean = row.acc_se = row.acc_class1 = row.acc_class2 = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    const double r = static_cast<double>(acc.size());
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= r;
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    row.acc_mean = mean;
    row.acc_se = acc.size() > 1 ? std::sqrt(ss / (r - 1.0)) / std::sqrt(r) : 0.0;
    row.acc_class1 = a1 / r;
    row.acc_class2 = a2 / r;
    row.runtime_s = timing ? secs : 0.0;
    return row;
}

}  // namespace

// ---- experiments --------------------------------------------------------------------------

ResultTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t nr = cfg.rules.size();
    std::vector<std::vector<Counts>> per_rule(nr, std::vector<Counts>(static_cast<std::size_t>(cfg.reps)));

    for_each_rep(cfg.reps, cfg.threads, [&](int rep) {
        Rng rng(derive_seed(cfg.seed, cfg.setting, rep, kTrainStream));
        const auto t0 = Clock::now();
        const LabeledData data = sample_pair(cfg.pair, cfg.p, cfg.n1, cfg.n2, rng);
        const TrainedGeometry g = fit_geometry(data);
        const IndexSetD D = index_set_D(cfg.pair, cfg.n1);
        const double shared = seconds_since(t0);

        std::vector<LinearRule> rules(nr);
        std::vector<Counts> counts(nr);
        std::vector<double> seconds(nr, shared);
        for (std::size_t i = 0; i < nr; ++i) {
            const auto t1 = Clock::now();
            rules[i] = build_rule(cfg.rules[i], cfg, data, g, D, rep);
            seconds[i] += seconds_since(t1);
        }
        score_test_set(cfg, rep, rules, counts, seconds);
        for (std::size_t i = 0; i < nr; ++i) {
            counts[i].seconds = seconds[i];
            per_rule[i][static_cast<std::size_t>(rep)] = counts[i];
        }
    });

    ResultTable table;
    for (std::size_t i = 0; i < nr; ++i)
        table.rows.push_back(aggregate(cfg, cfg.rules[i].name(), cfg.rules[i].alpha_label(), per_rule[i],
                                       cfg.record_runtime));
    return table;
}

RidgeCurve ridge_curve(const ExperimentConfig& cfg, const std::vector<double>& alpha_grid) {
    cfg.validate();
    if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");
    for (double a : alpha_grid)
        if (!std::isfinite(a)) throw ConfigError("alpha grid must be finite");
    const std::size_t na = alpha_grid.size();
    std::vector<std::vector<Counts>> per_alpha(na, std::vector<Counts>(static_cast<std::size_t>(cfg.reps)));

    for_each_rep(cfg.reps, cfg.threads, [&](int rep) {
        Rng rng(derive_seed(cfg.seed, cfg.setting, rep, kTrainStream));
        const LabeledData data = sample_pair(cfg.pair, cfg.p, cfg.n1, cfg.n2, rng);
        const TrainedGeometry g = fit_geometry(data);
        const IndexSetD D = index_set_D(cfg.pair, cfg.n1);
        std::vector<LinearRule> rules(na);
        std::vector<Counts> counts(na);
        std::vector<double> seconds(na, 0.0);
        for (std::size_t i = 0; i < na; ++i) {
            try {
                rules[i] = prd_rule(g, alpha_grid[i], D);
            } catch (const NumericalError&) {
                counts[i].valid = false;  // pole of the projected ridge at this draw
            }
        }
        score_test_set(cfg, rep, rules, counts, seconds);
        for (std::size_t i = 0; i < na; ++i) {
            counts[i].seconds = seconds[i];
            per_alpha[i][static_cast<std::size_t>(rep)] = counts[i];
        }
    });

    RidgeCurve out;
    out.alphas = alpha_grid;
    double best = -1.0;
    for (std::size_t i = 0; i < na; ++i) {
        RuleSpec spec{RuleKind::PRD, AlphaKind::Value, alpha_grid[i]};
        ResultRow row = aggregate(cfg, spec.name(), spec.alpha_label(), per_alpha[i], cfg.record_runtime);
        out.valid_reps.push_back(row.reps);
        if (row.reps > 0 && row.acc_mean > best) {
            best = row.acc_mean;
            out.argmax_alpha = alpha_grid[i];
        }
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

// ---- convergence sweep --------------------------------------------------------------------

namespace {

Mat standard_scores(int n, int m, Rng& rng) {
    Mat Z(n, m);
    fill_standard_normal(rng, std::span<double>(Z.data(), static_cast<std::size_t>(Z.size())));
    return Z;
}

Mat strong_basis(const PopulationPair& pair, Index p) {
    const Mat U1 = pair.class1.strong() ? realized_eigvecs(pair.class1, p) : Mat(p, 0);
    const Mat U2 = pair.class2.strong() ? realized_eigvecs(pair.class2, p) : Mat(p, 0);
    Mat both(p, U1.cols() + U2.cols());
    both << U1, U2;
    return common_basis(both);
}

}  // namespace

DiagnosticStream convergence_sweep(const ExperimentConfig& cfg, const std::vector<Index>& p_grid) {
    cfg.validate();
    if (p_grid.empty()) throw ConfigError("p grid is empty");
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (p_grid[i] < 8) throw ConfigError("p grid values must be at least 8");
        if (i > 0 && p_grid[i] <= p_grid[i - 1]) throw ConfigError("p grid must be increasing");
    }
    const std::size_t np = p_grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool smdp = cfg.pair.class1.strong() && cfg.pair.class2.strong();
    std::vector<std::vector<DiagnosticRecord>> per_rep(static_cast<std::size_t>(cfg.reps));

    for_each_rep(cfg.reps, cfg.threads, [&](int rep) {
        Rng zr(derive_seed(cfg.seed, cfg.setting, rep, kScoreStream));
        const Mat Z1 = standard_scores(cfg.n1, cfg.pair.class1.m(), zr);
        const Mat Z2 = standard_scores(cfg.n2, cfg.pair.class2.m(), zr);
        auto& out = per_rep[static_cast<std::size_t>(rep)];
        for (std::size_t pi = 0; pi < np; ++pi) {
            const Index p = p_grid[pi];
            auto add = [&](const std::string& q, int idx, double emp, double pred) {
                out.push_back({cfg.setting, p, rep, q, idx, emp, pred});
            };
            Rng rng(derive_seed(cfg.seed, cfg.setting, rep, kSweepStream + static_cast<std::uint32_t>(pi)));
            const LabeledData data = sample_pair_given_scores(cfg.pair, p, Z1, Z2, rng);
            const TrainedGeometry g = fit_geometry(data);
            const ScoreSummary s = score_summary(cfg.pair, data);
            const LimitReport rep_lim = limit_report(s);
            const Mat U = strong_basis(cfg.pair, p);
            const double pd = static_cast<double>(p);

            for (Index i = 0; i < g.lambdas.size(); ++i) {
                const int i1 = static_cast<int>(i) + 1;
                add("eigenvalue", i1, g.lambdas(i) / pd, rep_lim.eigenvalue_limits(i));
                const double ang = U.cols() > 0 ? (U.transpose() * g.U1hat.col(i)).norm() : 0.0;
                add("angle", i1, ang, rep_lim.angle_limits(i));
            }
            add("kappa_mdp", 0, g.kappa_mdp, rep_lim.kappa);

            // Test projections onto w_MDP; the piling offsets are point predictions only when m = 0.
            Rng tr(derive_seed(cfg.seed, cfg.setting, rep, kSweepStream + 1000 + static_cast<std::uint32_t>(pi)));
            const ClassSample Y1 = sample_class(cfg.pair.class1, p, cfg.n_test, tr);
            const ClassSample Y2 = sample_class(cfg.pair.class2, p, cfg.n_test, tr);
            const Vec s1 = project_scores(g.w_mdp, Y1.X, g.xbar);
            const Vec s2 = project_scores(g.w_mdp, Y2.X, g.xbar);
            const bool point = cfg.pair.m == 0;
            const double nu1 = point ? (s.eta2 * s.delta2 - (s.tau1sq - s.tau2sq) / s.n()) / g.kappa_mdp : nan;
            const double nu2 = point ? (-s.eta1 * s.delta2 - (s.tau1sq - s.tau2sq) / s.n()) / g.kappa_mdp : nan;
            add("test_mean_mdp", 1, s1.mean(), nu1);
            add("test_mean_mdp", 2, s2.mean(), nu2);
            auto sd = [](const Vec& v) {
                return std::sqrt((v.array() - v.mean()).square().sum() / std::max<Index>(v.size() - 1, 1));
            };
            add("test_sd_mdp", 1, sd(s1), point ? 0.0 : nan);
            add("test_sd_mdp", 2, sd(s2), point ? 0.0 : nan);

            if (smdp) {
                SmdpOptions opt;
                opt.K = cfg.K;
                opt.m = cfg.pair.m;
                opt.m1 = cfg.pair.class1.m();
                opt.m2 = cfg.pair.class2.m();
                opt.n1_te = cfg.n1_te;
                opt.n2_te = cfg.n2_te;
                opt.seed = derive_seed(cfg.seed, cfg.setting, rep, kSplitStream);
                const SmdpFit fit = smdp_fit(data.X, data.n1, data.n2, opt);
                // The averaged direction is not unit length; the angle statistic uses its normalization.
                const Vec wu = U.transpose() * fit.w_smdp.normalized();
                for (Index j = 0; j < wu.size(); ++j) add("smdp_abs_wu", static_cast<int>(j) + 1, std::abs(wu(j)), 0.0);
                const Vec t1 = project_scores(fit.w_smdp, Y1.X, g.xbar);
                const Vec t2 = project_scores(fit.w_smdp, Y2.X, g.xbar);
                const double pooled = std::sqrt(0.5 * (sd(t1) * sd(t1) + sd(t2) * sd(t2)));
                add("smdp_within_sd", 0, pooled, 0.0);
                add("smdp_gap", 0, std::abs(t1.mean() - t2.mean()), nan);
            }
        }
    });

    DiagnosticStream stream;
    for (auto& v : per_rep)
        for (auto& r : v) stream.records.push_back(std::move(r));
    // Rows ordered by p, then rep, keeping the per-draw order inside.
    std::stable_sort(stream.records.begin(), stream.records.end(),
                     [](const DiagnosticRecord& a, const DiagnosticRecord& b) {
                         return a.p != b.p ? a.p < b.p : a.rep < b.rep;
                     });
    return stream;
}

// ---- output -------------------------------------------------------------------------------

OutputFormat parse_format(const std::string& text) {
    const std::string t = lower(text);
    if (t == "csv") return OutputFormat::Csv;
    if (t == "json") return OutputFormat::Json;
    throw ConfigError("unknown format '" + text + "' (csv or json)");
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const ResultRow& r) {
    return json{{"setting", r.setting},     {"rule", r.rule},
                {"alpha", r.alpha},         {"p", r.p},
                {"reps", r.reps},           {"acc_mean", number_or_null(r.acc_mean)},
                {"acc_se", number_or_null(r.acc_se)},   {"acc_class1", number_or_null(r.acc_class1)},
                {"acc_class2", number_or_null(r.acc_class2)}, {"runtime_s", r.runtime_s}};
}

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void emit(const ResultTable& table, OutputFormat fmt, std::ostream& out) {
    if (fmt == OutputFormat::Json) {
        json rows = json::array();
        for (const ResultRow& r : table.rows) rows.push_back(to_json(r));
        out << json{{"rows", rows}}.dump(2) << '\n';
        return;
    }
    out << "setting,rule,alpha,p,reps,acc_mean,acc_se,acc_class1,acc_class2,runtime_s\n";
    for (const ResultRow& r : table.rows) {
        out << r.setting << ',' << r.rule << ',' << r.alpha << ',' << r.p << ',' << r.reps << ','
            << format_number(r.acc_mean) << ',' << format_number(r.acc_se) << ',' << format_number(r.acc_class1)
            << ',' << format_number(r.acc_class2) << ',' << format_number(r.runtime_s) << '\n';
    }
}

void emit(const DiagnosticStream& stream, OutputFormat fmt, std::ostream& out) {
    if (fmt == OutputFormat::Json) {
        json rows = json::array();
        for (const DiagnosticRecord& r : stream.records)
            rows.push_back(json{{"setting", r.setting}, {"p", r.p}, {"rep", r.rep}, {"quantity", r.quantity},
                                {"index", r.index}, {"empirical", number_or_null(r.empirical)},
                                {"predicted", number_or_null(r.predicted)}});
        out << json{{"records", rows}}.dump(2) << '\n';
        return;
    }
    out << "setting,p,rep,quantity,index,empirical,predicted\n";
    for (const DiagnosticRecord& r : stream.records)
        out << r.setting << ',' << r.p << ',' << r.rep << ',' << r.quantity << ',' << r.index << ','
            << format_number(r.empirical) << ',' << format_number(r.predicted) << '\n';
}

void emit(const LimitReport& report, std::ostream& out) {
    auto vec = [](const Vec& v) {
        json a = json::array();
        for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    json j{{"regime", to_string(report.regime)},
           {"eigenvalue_limits", vec(report.eigenvalue_limits)},
           {"angle_limits", vec(report.angle_limits)},
           {"nu1", report.nu1},
           {"nu2", report.nu2},
           {"kappa", report.kappa},
           {"k_index", report.k_index}};
    if (report.gammas.gamma) j["gamma"] = *report.gammas.gamma;
    if (report.gammas.gamma1) j["gamma1"] = *report.gammas.gamma1;
    if (report.gammas.gamma2) j["gamma2"] = *report.gammas.gamma2;
    if (report.gammas.upsilon0) j["upsilon0"] = *report.gammas.upsilon0;
    out << j.dump(2) << '\n';
}

namespace {

template <class T>
void write_file(const T& obj, OutputFormat fmt, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    emit(obj, fmt, f);
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace

void emit_file(const ResultTable& table, OutputFormat fmt, const std::string& path) { write_file(table, fmt, path); }
void emit_file(const DiagnosticStream& stream, OutputFormat fmt, const std::string& path) {
    write_file(stream, fmt, path);
}

ResultTable parse_result_json(const std::string& text) {
    ResultTable t;
    const json j = json::parse(text);
    for (const json& r : j.at("rows")) {
        ResultRow row;
        row.setting = r.at("setting").get<std::string>();
        row.rule = r.at("rule").get<std::string>();
        row.alpha = r.at("alpha").get<std::string>();
        row.p = r.at("p").get<Index>();
        row.reps = r.at("reps").get<int>();
        row.acc_mean = number_from(r.at("acc_mean"));
        row.acc_se = number_from(r.at("acc_se"));
        row.acc_class1 = number_from(r.at("acc_class1"));
        row.acc_class2 = number_from(r.at("acc_class2"));
        row.runtime_s = r.at("runtime_s").get<double>();
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace hdlss
