#include "hdlss/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace hdlss;

struct CommonOptions {
    std::string setting = "I";
    std::string model_file;
    long long p = 10000;
    int n1 = 20;
    int n2 = 20;
    int n_test = 500;
    int reps = 20;
    std::uint64_t seed = 20240101;
    int threads = 0;
    std::string out;
    std::string format = "csv";
    bool timing = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--setting", o.setting, "Preset setting id (I..X)");
    app->add_option("--model-file", o.model_file, "JSON population model; overrides --setting");
    app->add_option("--p", o.p, "Dimension")->check(CLI::PositiveNumber);
    app->add_option("--n1", o.n1, "Class-1 training size");
    app->add_option("--n2", o.n2, "Class-2 training size");
    app->add_option("--n-test", o.n_test, "Test observations per class");
    app->add_option("--reps", o.reps, "Monte Carlo repetitions");
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app->add_option("--out", o.out, "Output path (default stdout)");
    app->add_option("--format", o.format, "csv or json");
    app->add_flag("--timing", o.timing, "Record wall-clock runtime (output is then not reproducible)");
}

ExperimentConfig make_config(const CommonOptions& o) {
    ExperimentConfig cfg;
    if (!o.model_file.empty()) {
        cfg.pair = load_model_file(o.model_file);
        cfg.setting = cfg.pair.label;
    } else {
        cfg.pair = make_setting(o.setting);
        cfg.setting = o.setting;
    }
    cfg.p = static_cast<Index>(o.p);
    cfg.n1 = o.n1;
    cfg.n2 = o.n2;
    cfg.n_test = o.n_test;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.record_runtime = o.timing;
    return cfg;
}

template <class T>
void write(const T& obj, const CommonOptions& o) {
    const OutputFormat fmt = parse_format(o.format);
    if (o.out.empty())
        emit(obj, fmt, std::cout);
    else
        emit_file(obj, fmt, o.out);
}

std::vector<double> parse_alpha_grid(const std::string& text) {
    std::vector<double> grid;
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(v)) throw ConfigError("bad number '" + s + "' in alpha grid");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string a, b, c;
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        std::getline(ss, c, ':');
        const double lo = num(a), hi = num(b), step = num(c);
        if (!(step > 0.0) || hi < lo) throw ConfigError("alpha range must be lo:hi:step with step > 0");
        const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) grid.push_back(num(item));
    if (grid.empty()) throw ConfigError("alpha grid is empty");
    return grid;
}

std::vector<Index> parse_p_grid(const std::string& text) {
    std::vector<Index> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || v <= 0) throw ConfigError("bad dimension '" + item + "' in p grid");
        grid.push_back(static_cast<Index>(v));
    }
    if (grid.empty()) throw ConfigError("p grid is empty");
    return grid;
}

const char* describe(const std::string& id) {
    const PopulationPair pair = make_setting(id);
    switch (regime_of(pair)) {
        case Regime::WeakWeak: return "weak spikes";
        case Regime::StrongWeak: return "strong/weak spikes";
        case Regime::WeakStrongEqualTail:
        case Regime::WeakStrongUnequalTail: return "weak/strong spikes";
        case Regime::StrongStrongEqualTail: return "strong spikes, equal tails";
        case Regime::StrongStrongUnequalTail: return "strong spikes, unequal tails";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data piling classifiers for high-dimension, low-sample-size data"};
    app.require_subcommand(1);

    CommonOptions sim_opt;
    std::string rules = "mdp,bmdp,prd:hat,bprd:hat1,bprd:hat2,smdp1,smdp2";
    int k_splits = 10;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo accuracy of the chosen rules");
    add_common(sim, sim_opt);
    sim->add_option("--rules", rules, "Comma list: mdp, bmdp, prd[:hat|:<alpha>], bprd[:hat1|:hat2|:<alpha>], smdp1, smdp2");
    sim->add_option("--k-splits", k_splits, "SMDP data splits K");

    CommonOptions rc_opt;
    std::string alpha_text = "-60:60:5";
    auto* rc = app.add_subcommand("ridge-curve", "PRD accuracy over a ridge-parameter grid");
    add_common(rc, rc_opt);
    rc->add_option("--alpha", alpha_text, "Grid as lo:hi:step or a comma list");

    CommonOptions sw_opt;
    sw_opt.reps = 5;
    sw_opt.n_test = 100;
    std::string p_text = "500,2000,8000";
    int sw_k = 10;
    auto* sw = app.add_subcommand("sweep", "Empirical quantities against their limits over a p grid");
    add_common(sw, sw_opt);
    sw->add_option("--p-grid", p_text, "Increasing comma list of dimensions");
    sw->add_option("--k-splits", sw_k, "SMDP data splits K");

    CommonOptions lim_opt;
    lim_opt.p = 2000;
    auto* lim = app.add_subcommand("limits", "Limit report for one training draw (JSON)");
    add_common(lim, lim_opt);

    auto* preset = app.add_subcommand("preset", "Shipped population presets");
    preset->require_subcommand(1);
    auto* plist = preset->add_subcommand("list", "List preset ids");
    std::string show_id;
    auto* pshow = preset->add_subcommand("show", "Print a preset as a model file");
    pshow->add_option("id", show_id, "Preset id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            ExperimentConfig cfg = make_config(sim_opt);
            cfg.rules = parse_rules(rules);
            cfg.K = k_splits;
            write(run_experiment(cfg), sim_opt);
        } else if (*rc) {
            ExperimentConfig cfg = make_config(rc_opt);
            cfg.rules = {parse_rule("prd:0")};
            const RidgeCurve curve = ridge_curve(cfg, parse_alpha_grid(alpha_text));
            write(curve.table, rc_opt);
            std::cerr << "argmax alpha: " << curve.argmax_alpha << '\n';
        } else if (*sw) {
            ExperimentConfig cfg = make_config(sw_opt);
            cfg.rules = {parse_rule("mdp")};
            cfg.K = sw_k;
            write(convergence_sweep(cfg, parse_p_grid(p_text)), sw_opt);
        } else if (*lim) {
            ExperimentConfig cfg = make_config(lim_opt);
            cfg.rules = {parse_rule("mdp")};
            cfg.validate();
            const LabeledData data =
                sample_pair(cfg.pair, cfg.p, cfg.n1, cfg.n2, derive_seed(cfg.seed, cfg.setting, 0, 1));
            const LimitReport report = limit_report(score_summary(cfg.pair, data));
            if (lim_opt.out.empty()) {
                emit(report, std::cout);
            } else {
                std::ofstream f(lim_opt.out);
                if (!f) throw ConfigError("cannot open '" + lim_opt.out + "' for writing");
                emit(report, f);
            }
        } else if (*plist) {
            for (const std::string& id : setting_ids()) std::cout << id << '\t' << describe(id) << '\n';
        } else if (*pshow) {
            std::cout << model_to_json(make_setting(show_id)) << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
