#include "tbm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tbm/error.hpp"
#include "tbm/io.hpp"
#include "tbm/random.hpp"

namespace tbm {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& want) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not " + want);
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) bad(key, v, "a non-negative integer");
    try {
        return std::stoull(v);
    } catch (const std::out_of_range&) {
        bad(key, v, "in range");
    }
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::logic_error&) {
    }
    bad(key, v, "a number");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    bad(key, v, "a boolean (true/false)");
}

std::vector<std::string> to_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

std::vector<std::size_t> to_uint_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    for (const auto& item : to_list(v)) out.push_back(static_cast<std::size_t>(to_uint(key, item)));
    if (out.empty()) bad(key, v, "a non-empty list");
    return out;
}

std::vector<double> to_real_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : to_list(v)) out.push_back(to_real(key, item));
    if (out.empty()) bad(key, v, "a non-empty list");
    return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            s += format_real(values[i]);
        } else {
            s += std::to_string(values[i]);
        }
    }
    return s;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"r_values", [](RunConfig& c, auto& k, auto& v) { c.r_values = to_uint_list(k, v); }},
        {"r_min",
         [](RunConfig& c, auto& k, auto& v) {
             const auto lo = to_uint(k, v);
             const auto hi = c.r_values.empty() ? lo : c.r_values.back();
             c.r_values.clear();
             for (auto r = lo; r <= hi; ++r) c.r_values.push_back(r);
         }},
        {"r_max",
         [](RunConfig& c, auto& k, auto& v) {
             const auto hi = to_uint(k, v);
             const auto lo = c.r_values.empty() ? hi : c.r_values.front();
             c.r_values.clear();
             for (auto r = lo; r <= hi; ++r) c.r_values.push_back(r);
         }},
        {"feature_r", [](RunConfig& c, auto& k, auto& v) { c.feature_r = to_uint(k, v); }},
        {"hlloyd_max_iters", [](RunConfig& c, auto& k, auto& v) { c.hlloyd_max_iters = to_uint(k, v); }},
        {"hlloyd_tol", [](RunConfig& c, auto& k, auto& v) { c.hlloyd_tol = to_real(k, v); }},
        {"outer_folds", [](RunConfig& c, auto& k, auto& v) { c.cv.outer_folds = to_uint(k, v); }},
        {"inner_folds", [](RunConfig& c, auto& k, auto& v) { c.cv.inner_folds = to_uint(k, v); }},
        {"n_repeats", [](RunConfig& c, auto& k, auto& v) { c.cv.n_repeats = to_uint(k, v); }},
        {"stratified", [](RunConfig& c, auto& k, auto& v) { c.cv.stratified = to_bool(k, v); }},
        {"grid_n_trees", [](RunConfig& c, auto& k, auto& v) { c.grid_n_trees = to_uint_list(k, v); }},
        {"grid_max_depth", [](RunConfig& c, auto& k, auto& v) { c.grid_max_depth = to_uint_list(k, v); }},
        {"grid_learning_rate", [](RunConfig& c, auto& k, auto& v) { c.grid_learning_rate = to_real_list(k, v); }},
        {"grid_subsample", [](RunConfig& c, auto& k, auto& v) { c.grid_subsample = to_real_list(k, v); }},
        {"min_samples_leaf", [](RunConfig& c, auto& k, auto& v) { c.min_samples_leaf = to_uint(k, v); }},
        {"importance_folds", [](RunConfig& c, auto& k, auto& v) { c.importance_folds = to_uint(k, v); }},
        {"importance_repeats", [](RunConfig& c, auto& k, auto& v) { c.importance_repeats = to_uint(k, v); }},
        {"fisher_transform", [](RunConfig& c, auto& k, auto& v) { c.fisher_transform = to_bool(k, v); }},
        {"zscore", [](RunConfig& c, auto& k, auto& v) { c.zscore = to_bool(k, v); }},
        {"symmetry_tol", [](RunConfig& c, auto& k, auto& v) { c.symmetry_tol = to_real(k, v); }},
        {"pca_components", [](RunConfig& c, auto& k, auto& v) { c.pca_components = to_uint(k, v); }},
        {"atlas_map", [](RunConfig& c, auto&, auto& v) { c.atlas_map = v; }},
        {"synth_subjects", [](RunConfig& c, auto& k, auto& v) { c.synth.n_subjects = to_uint(k, v); }},
        {"synth_p", [](RunConfig& c, auto& k, auto& v) { c.synth.p = to_uint(k, v); }},
        {"synth_r", [](RunConfig& c, auto& k, auto& v) { c.synth.r_true = to_uint(k, v); }},
        {"synth_core_gap", [](RunConfig& c, auto& k, auto& v) { c.synth.core_gap = to_real(k, v); }},
        {"synth_grid_levels", [](RunConfig& c, auto& k, auto& v) { c.synth.grid_levels = to_uint(k, v); }},
        {"synth_noise_sigma", [](RunConfig& c, auto& k, auto& v) { c.synth.noise_sigma = to_real(k, v); }},
        {"synth_effect", [](RunConfig& c, auto& k, auto& v) { c.synth_labels.effect = to_real(k, v); }},
        {"synth_prevalence", [](RunConfig& c, auto& k, auto& v) { c.synth_labels.prevalence = to_real(k, v); }},
        {"synth_signal_modality",
         [](RunConfig& c, auto& k, auto& v) { c.synth_labels.signal_modality = to_uint(k, v); }},
        {"synth_signal_a", [](RunConfig& c, auto& k, auto& v) { c.synth_labels.signal_a = to_uint(k, v); }},
        {"synth_signal_b", [](RunConfig& c, auto& k, auto& v) { c.synth_labels.signal_b = to_uint(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
        {"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = to_uint(k, v); }},
        {"out_dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
    };
    return table;
}

}  // namespace

void RunConfig::reseed(std::uint64_t master) {
    seed = master;
    cv.seed = derive_seed(master, {2});
    synth.seed = master;
}

void RunConfig::validate() const {
    if (r_values.empty()) throw ConfigError("config: r_values must not be empty");
    std::set<std::size_t> seen;
    for (auto r : r_values) {
        if (r < 1) throw ConfigError("config: r_values entries must be at least 1");
        if (!seen.insert(r).second) throw ConfigError("config: r_values lists " + std::to_string(r) + " twice");
    }
    if (feature_r != 0 && !seen.contains(feature_r)) {
        throw ConfigError("config: feature_r = " + std::to_string(feature_r) + " is not listed in r_values");
    }
    if (hlloyd_max_iters < 1) throw ConfigError("config: hlloyd_max_iters must be at least 1");
    if (!(hlloyd_tol >= 0.0)) throw ConfigError("config: hlloyd_tol must be non-negative");
    try {
        cv.validate();
        for (const auto& hp : grid()) hp.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (importance_folds < 2) throw ConfigError("config: importance_folds must be at least 2");
    if (importance_repeats < 1) throw ConfigError("config: importance_repeats must be at least 1");
    if (!(symmetry_tol >= 0.0)) throw ConfigError("config: symmetry_tol must be non-negative");
    if (pca_components < 1) throw ConfigError("config: pca_components must be at least 1");
    if (synth.n_modalities != 2) throw ConfigError("config: synthetic datasets have two modalities");
    try {
        synth.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: synth: ") + e.what());
    }
    if (!(synth_labels.prevalence > 0.0 && synth_labels.prevalence < 1.0)) {
        throw ConfigError("config: synth_prevalence must lie in (0, 1)");
    }
    if (synth_labels.signal_modality >= synth.n_modalities || synth_labels.signal_a >= synth.r_true ||
        synth_labels.signal_b >= synth.r_true) {
        throw ConfigError("config: synth signal block lies outside the planted core");
    }
}

std::vector<GbdtHyperparams> RunConfig::grid() const {
    std::vector<GbdtHyperparams> out;
    for (auto t : grid_n_trees)
        for (auto d : grid_max_depth)
            for (auto lr : grid_learning_rate)
                for (auto s : grid_subsample) {
                    GbdtHyperparams hp;
                    hp.n_trees = t;
                    hp.max_depth = d;
                    hp.learning_rate = lr;
                    hp.subsample = s;
                    hp.min_samples_leaf = min_samples_leaf;
                    hp.seed = derive_seed(seed, {3});
                    out.push_back(hp);
                }
    return out;
}

std::string RunConfig::to_text() const {
    std::ostringstream o;
    o << "r_values = " << join(r_values) << '\n'
      << "feature_r = " << feature_r << '\n'
      << "hlloyd_max_iters = " << hlloyd_max_iters << '\n'
      << "hlloyd_tol = " << format_real(hlloyd_tol) << '\n'
      << "outer_folds = " << cv.outer_folds << '\n'
      << "inner_folds = " << cv.inner_folds << '\n'
      << "n_repeats = " << cv.n_repeats << '\n'
      << "stratified = " << (cv.stratified ? "true" : "false") << '\n'
      << "grid_n_trees = " << join(grid_n_trees) << '\n'
      << "grid_max_depth = " << join(grid_max_depth) << '\n'
      << "grid_learning_rate = " << join(grid_learning_rate) << '\n'
      << "grid_subsample = " << join(grid_subsample) << '\n'
      << "min_samples_leaf = " << min_samples_leaf << '\n'
      << "importance_folds = " << importance_folds << '\n'
      << "importance_repeats = " << importance_repeats << '\n'
      << "fisher_transform = " << (fisher_transform ? "true" : "false") << '\n'
      << "zscore = " << (zscore ? "true" : "false") << '\n'
      << "symmetry_tol = " << format_real(symmetry_tol) << '\n'
      << "pca_components = " << pca_components << '\n'
      << "atlas_map = " << atlas_map.string() << '\n'
      << "synth_subjects = " << synth.n_subjects << '\n'
      << "synth_p = " << synth.p << '\n'
      << "synth_r = " << synth.r_true << '\n'
      << "synth_core_gap = " << format_real(synth.core_gap) << '\n'
      << "synth_grid_levels = " << synth.grid_levels << '\n'
      << "synth_noise_sigma = " << format_real(synth.noise_sigma) << '\n'
      << "synth_effect = " << format_real(synth_labels.effect) << '\n'
      << "synth_prevalence = " << format_real(synth_labels.prevalence) << '\n'
      << "synth_signal_modality = " << synth_labels.signal_modality << '\n'
      << "synth_signal_a = " << synth_labels.signal_a << '\n'
      << "synth_signal_b = " << synth_labels.signal_b << '\n'
      << "seed = " << seed << '\n';
    // workers and out_dir are run-local and do not change results.
    return o.str();
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' given twice");
        try {
            it->second(c, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    c.reseed(c.seed);
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

void apply_environment(RunConfig& config) {
    const char* env = std::getenv("TBM_WORKERS");
    if (env == nullptr || *env == '\0') return;
    config.workers = static_cast<std::size_t>(to_uint("TBM_WORKERS", env));
}

}  // namespace tbm
