#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "tbm/error.hpp"
#include "tbm/gbdt.hpp"

namespace tbm {
namespace {

constexpr const char* kMagic = "tbm-gbdt";
constexpr int kVersion = 1;

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void malformed(const std::string& what) { throw DataError("load_model: " + what); }

template <class T>
T expect_field(std::istream& in, const std::string& key) {
    std::string k;
    T value{};
    if (!(in >> k) || k != key) malformed("expected '" + key + "'");
    if (!(in >> value)) malformed("bad value for '" + key + "'");
    return value;
}

double read_real(std::istream& in, const char* what) {
    std::string token;
    if (!(in >> token)) malformed(std::string("missing ") + what);
    try {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) malformed(std::string("bad ") + what);
        return v;
    } catch (const std::logic_error&) {
        malformed(std::string("bad ") + what);
    }
}

}  // namespace

void save_model(std::ostream& out, const GbdtModel& m) {
    out << kMagic << ' ' << kVersion << '\n';
    out << "n_features " << m.n_features << '\n';
    out << "learning_rate " << real(m.learning_rate) << '\n';
    out << "base_score " << real(m.base_score) << '\n';
    out << "trees " << m.trees.size() << '\n';
    for (std::size_t t = 0; t < m.trees.size(); ++t) {
        const auto& nodes = m.trees[t].nodes;
        out << "tree " << t << ' ' << nodes.size() << '\n';
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const auto& nd = nodes[k];
            if (nd.is_leaf()) {
                out << k << " leaf " << real(nd.value) << '\n';
            } else {
                out << k << " split " << nd.feature << ' ' << real(nd.threshold) << ' ' << nd.left << ' ' << nd.right
                    << '\n';
            }
        }
    }
    out << "end\n";
}

GbdtModel load_model(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kMagic) malformed("not a tbm-gbdt model");
    if (version != kVersion) malformed("unsupported version " + std::to_string(version));

    GbdtModel m;
    m.n_features = expect_field<std::size_t>(in, "n_features");
    std::string key;
    if (!(in >> key) || key != "learning_rate") malformed("expected 'learning_rate'");
    m.learning_rate = read_real(in, "learning_rate");
    if (!(in >> key) || key != "base_score") malformed("expected 'base_score'");
    m.base_score = read_real(in, "base_score");
    const auto n_trees = expect_field<std::size_t>(in, "trees");

    m.trees.resize(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        std::size_t index = 0, count = 0;
        if (!(in >> key >> index >> count) || key != "tree" || index != t) malformed("bad tree header");
        auto& nodes = m.trees[t].nodes;
        nodes.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t id = 0;
            std::string kind;
            if (!(in >> id >> kind) || id != k) malformed("bad node record in tree " + std::to_string(t));
            if (kind == "leaf") {
                nodes[k].value = read_real(in, "leaf value");
            } else if (kind == "split") {
                if (!(in >> nodes[k].feature)) malformed("bad split feature");
                nodes[k].threshold = read_real(in, "threshold");
                if (!(in >> nodes[k].left >> nodes[k].right)) malformed("bad child indices");
                if (nodes[k].feature < 0 || static_cast<std::size_t>(nodes[k].feature) >= m.n_features ||
                    nodes[k].left >= count || nodes[k].right >= count || nodes[k].left <= k || nodes[k].right <= k) {
                    malformed("split out of range in tree " + std::to_string(t));
                }
            } else {
                malformed("unknown node kind '" + kind + "'");
            }
        }
    }
    if (!(in >> key) || key != "end") malformed("missing 'end'");
    return m;
}

}  // namespace tbm
