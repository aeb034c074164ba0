#include "hdlss/harness.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hdlss {

using json = nlohmann::json;

namespace {

EigvecPattern pattern_from(const json& j, const std::string& where) {
    if (!j.contains("blocks") || !j.at("blocks").is_array())
        throw ConfigError(where + ": expected a 'blocks' array");
    std::vector<Block> blocks;
    for (const json& b : j.at("blocks")) {
        Block blk;
        if (b.is_array() && b.size() == 3) {
            blk = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
        } else if (b.is_object()) {
            blk = {b.at("start").get<double>(), b.at("end").get<double>(), b.value("coef", 1.0)};
        } else {
            throw ConfigError(where + ": block must be [start, end, coef] or {start, end, coef}");
        }
        blocks.push_back(blk);
    }
    return EigvecPattern(std::move(blocks));
}

json pattern_to(const EigvecPattern& p) {
    json blocks = json::array();
    for (const Block& b : p.blocks()) blocks.push_back(json{{"start", b.start}, {"end", b.end}, {"coef", b.coef}});
    return json{{"blocks", blocks}};
}

ClassModel class_from(const json& j, const std::string& where) {
    ClassModel c;
    if (!j.contains("tail_var")) throw ConfigError(where + ": missing 'tail_var'");
    c.tail_var = j.at("tail_var").get<double>();
    if (j.contains("mean")) {
        const json& mean = j.at("mean");
        c.mean_scale = mean.value("scale", 0.0);
        if (mean.contains("blocks")) c.mean_pattern = pattern_from(mean, where + ".mean");
    }
    if (j.contains("spikes")) {
        int i = 0;
        for (const json& s : j.at("spikes")) {
            const std::string w = where + ".spikes[" + std::to_string(i++) + "]";
            Spike sp;
            sp.sigma2 = s.at("sigma2").get<double>();
            sp.beta = s.at("beta").get<double>();
            sp.u = pattern_from(s.at("u"), w + ".u");
            c.spikes.push_back(std::move(sp));
        }
    }
    return c;
}

json class_to(const ClassModel& c) {
    json spikes = json::array();
    for (const Spike& s : c.spikes)
        spikes.push_back(json{{"sigma2", s.sigma2}, {"beta", s.beta}, {"u", pattern_to(s.u)}});
    json mean = pattern_to(c.mean_pattern);
    mean["scale"] = c.mean_scale;
    return json{{"mean", mean}, {"spikes", spikes}, {"tail_var", c.tail_var}};
}

}  // namespace

PopulationPair parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        PopulationPair pair;
        pair.label = j.value("label", std::string("custom"));
        pair.class1 = class_from(j.at("class1"), "class1");
        pair.class2 = class_from(j.at("class2"), "class2");
        if (j.contains("priors")) {
            pair.prior1 = j.at("priors").at(0).get<double>();
            pair.prior2 = j.at("priors").at(1).get<double>();
        }
        pair.m = j.at("m").get<int>();
        pair.delta2 = j.value("delta2", 0.0);
        pair.validate();
        return pair;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
}

PopulationPair load_model_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_model_json(ss.str());
}

std::string model_to_json(const PopulationPair& pair) {
    const json j{{"label", pair.label},
                 {"class1", class_to(pair.class1)},
                 {"class2", class_to(pair.class2)},
                 {"priors", {pair.prior1, pair.prior2}},
                 {"m", pair.m},
                 {"delta2", pair.delta2}};
    return j.dump(2);
}

}  // namespace hdlss
