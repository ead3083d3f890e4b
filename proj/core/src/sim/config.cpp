#include "remest/sim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace remest::sim {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

Matrix parse_matrix(const json& j, const std::string& key, int rows, int cols) {
    if (!j.contains(key)) throw ConfigError("model is missing key: " + key);
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != rows * cols) {
        std::ostringstream os;
        os << "model key " << key << " must be a flat row-major array of "
           << rows * cols << " numbers";
        throw ConfigError(os.str());
    }
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int c = 0; c < cols; ++c) {
            m(i, c) = arr.at(i * cols + c).get<double>();
        }
    }
    return m;
}

SystemModel parse_model(const json& j) {
    if (j.is_string()) return load_model(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("model must be an object or a path");
    const int n = j.value("n", 0);
    const int m = j.value("m", 0);
    if (n < 1 || m < 1) {
        throw ConfigError("model needs explicit positive dimensions n and m");
    }
    Matrix a = parse_matrix(j, "A", n, n);
    Matrix c = parse_matrix(j, "C", m, n);
    Matrix q = parse_matrix(j, "Q", n, n);
    Matrix r = parse_matrix(j, "R", m, m);
    std::optional<Matrix> pi0;
    if (j.contains("Pi0")) pi0 = parse_matrix(j, "Pi0", n, n);
    return SystemModel::make(std::move(a), std::move(c), std::move(q),
                             std::move(r), std::move(pi0));
}

ChannelParams parse_channel(const json& j) {
    if (!j.is_object()) throw ConfigError("channel must be an object");
    if (!j.contains("alpha") || !j.contains("n0w")) {
        throw ConfigError("channel needs keys alpha and n0w");
    }
    std::optional<FadingParams> fading;
    if (j.contains("fading")) {
        const auto& f = j.at("fading");
        if (!f.contains("mean_gain")) {
            throw ConfigError("channel.fading needs mean_gain");
        }
        fading = FadingParams{f.at("mean_gain").get<double>()};
    }
    return ChannelParams::make(j.at("alpha").get<double>(),
                               j.at("n0w").get<double>(), fading);
}

PolicyConfig parse_policy(const json& j, const ChannelParams& channel) {
    if (!j.is_object()) throw ConfigError("policy must be an object");
    const std::string kind = j.value("kind", "");
    if (kind == "constant" || kind == "baseline") {
        return PolicyConfig::constant_baseline(j.value("budget", 0.0));
    }
    if (kind == "optimal") {
        return PolicyConfig::optimal(j.value("budget", 0.0));
    }
    if (kind == "time_varying") {
        if (j.contains("budget_sequence")) {
            return PolicyConfig::time_varying(
                j.at("budget_sequence").get<std::vector<double>>());
        }
        if (j.contains("h_star")) {
            const double cutoff = j.at("h_star").get<double>();
            double v = j.value("v", 0.0);
            if (v <= 0.0) {
                if (!channel.fading) {
                    throw ConfigError(
                        "time_varying inversion budgets need a fading channel");
                }
                v = calibrate_inversion_v(j.value("budget", 0.0),
                                          channel.fading->mean_gain, cutoff);
            }
            return PolicyConfig::time_varying_inversion(v, cutoff);
        }
        throw ConfigError(
            "time_varying policy needs budget_sequence or h_star (+ v/budget)");
    }
    if (kind == "inversion") {
        if (!j.contains("h_star")) {
            throw ConfigError("inversion policy needs h_star");
        }
        const double cutoff = j.at("h_star").get<double>();
        double v = j.value("v", 0.0);
        double budget = j.value("budget", 0.0);
        if (v <= 0.0) {
            if (!channel.fading) {
                throw ConfigError("inversion calibration needs a fading channel");
            }
            v = calibrate_inversion_v(budget, channel.fading->mean_gain, cutoff);
        }
        PolicyConfig cfg = PolicyConfig::truncated_inversion(v, cutoff);
        cfg.budget = budget;
        return cfg;
    }
    throw ConfigError("unknown policy kind: \"" + kind +
                      "\" (expected constant, optimal, time_varying, inversion)");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (burnin < 0) throw ConfigError("burnin must be >= 0");
    for (double b : sweep) {
        if (b < 0.0) throw ConfigError("sweep budgets must be nonnegative");
    }
}

SystemModel load_model(const std::string& path) {
    return parse_model(parse_file(path));
}

ExperimentConfig load_config(const std::string& path) {
    const json j = parse_file(path);
    if (!j.contains("model")) throw ConfigError("config needs a model section");
    if (!j.contains("channel")) throw ConfigError("config needs a channel section");

    ExperimentConfig cfg;
    cfg.model = parse_model(j.at("model"));
    cfg.channel = parse_channel(j.at("channel"));
    if (j.contains("policies")) {
        for (const auto& p : j.at("policies")) {
            cfg.policies.push_back(parse_policy(p, cfg.channel));
        }
    } else if (j.contains("policy")) {
        cfg.policies.push_back(parse_policy(j.at("policy"), cfg.channel));
    }
    cfg.horizon = j.value("horizon", cfg.horizon);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.burnin = j.value("burnin", cfg.burnin);
    cfg.out = j.value("out", cfg.out);
    if (j.contains("sweep")) {
        cfg.sweep = j.at("sweep").get<std::vector<double>>();
    }
    cfg.validate();
    return cfg;
}

}  // namespace remest::sim
