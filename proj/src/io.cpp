#include "tbm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "tbm/error.hpp"

namespace tbm {
namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool is_missing(const std::string& cell) {
    if (cell.empty()) return true;
    std::string lower = cell;
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "na" || lower == "nan";
}

double parse_real(const std::string& cell, const fs::path& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == cell.size()) return v;
    } catch (const std::logic_error&) {
    }
    throw DataError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + cell + "' as a number");
}

// Reads a headed CSV into rows keyed by the first column.
std::map<std::string, std::vector<std::string>> read_keyed_csv(const fs::path& path, std::size_t expected_cols,
                                                               std::vector<std::string>* header_out = nullptr) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::vector<std::string>> rows;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (header) {
            header = false;
            if (header_out) *header_out = cells;
            continue;
        }
        if (cells.size() != expected_cols) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(expected_cols) + " columns, found " + std::to_string(cells.size()));
        }
        if (!rows.emplace(cells[0], cells).second) {
            throw DataError(path.string() + ": duplicate subject id '" + cells[0] + "'");
        }
    }
    return rows;
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(trim(cell));
    return out;
}

DenseMatrix read_matrix_csv(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split_csv_line(line)) row.push_back(is_missing(cell) ? 0.0 : parse_real(cell, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": row has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": empty matrix file");
    return DenseMatrix::from_rows(rows);
}

void write_matrix_csv(const fs::path& path, const DenseMatrix& m) {
    auto out = open_out(path);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_real(m(i, j));
        }
        out << '\n';
    }
}

DatasetManifest load_manifest(const fs::path& path) {
    auto in = open_in(path);
    DatasetManifest m;
    m.root = path.parent_path();
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    for (const char* key : {"subjects", "covariates", "labels"}) {
        if (!kv.contains(key)) throw DataError(path.string() + ": missing key '" + key + "'");
    }
    m.covariates = m.root / kv["covariates"];
    m.labels = m.root / kv["labels"];

    const fs::path subjects_path = m.root / kv["subjects"];
    auto sin = open_in(subjects_path);
    bool header = true;
    std::set<std::string> seen;
    line_no = 0;
    while (std::getline(sin, line)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (header) {
            header = false;
            continue;
        }
        if (cells.size() != 3) {
            throw DataError(subjects_path.string() + ":" + std::to_string(line_no) +
                            ": expected subject_id,functional,diffusion");
        }
        if (!seen.insert(cells[0]).second) {
            throw DataError(subjects_path.string() + ": duplicate subject id '" + cells[0] + "'");
        }
        m.subjects.push_back({cells[0], m.root / cells[1], m.root / cells[2]});
    }
    if (m.subjects.empty()) throw DataError(subjects_path.string() + ": no subjects listed");
    for (const auto& s : m.subjects) {
        for (const auto& f : {s.functional, s.diffusion}) {
            if (!fs::exists(f)) throw DataError("subject '" + s.id + "': missing file " + f.string());
        }
    }
    return m;
}

Dataset ingest(const DatasetManifest& manifest, double symmetry_tol) {
    Dataset d;
    const std::size_t n = manifest.subjects.size();
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = manifest.subjects[i];
        const fs::path files[2] = {s.functional, s.diffusion};
        for (std::size_t k = 0; k < 2; ++k) {
            const DenseMatrix m = read_matrix_csv(files[k]);
            if (m.rows() != m.cols()) {
                throw DataError("subject '" + s.id + "': matrix " + files[k].string() + " is " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", not square");
            }
            if (i == 0 && k == 0) {
                p = m.rows();
                d.y = DenseTensor({n, 2, p, p});
            } else if (m.rows() != p) {
                throw DataError("subject '" + s.id + "': matrix " + files[k].string() + " is " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                                std::to_string(p) + "x" + std::to_string(p));
            }
            double asym = 0.0;
            for (std::size_t b = 0; b < p; ++b) {
                for (std::size_t a = 0; a < p; ++a) {
                    d.y(i, k, a, b) = m(a, b);
                    asym = std::max(asym, std::abs(m(a, b) - m(b, a)));
                }
            }
            if (asym > symmetry_tol) {
                d.warnings.push_back("subject '" + s.id + "': " + files[k].filename().string() +
                                     " is asymmetric (max |a_ij - a_ji| = " + format_real(asym) + ")");
            }
        }
        d.subject_ids.push_back(s.id);
    }

    const auto cov_rows = read_keyed_csv(manifest.covariates, 5);
    const auto label_rows = read_keyed_csv(manifest.labels, 2);
    d.covariates.age.resize(n);
    d.covariates.gender.resize(n);
    d.covariates.race.resize(n);
    d.covariates.hiv.resize(n);
    d.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = d.subject_ids[i];
        auto c = cov_rows.find(id);
        if (c == cov_rows.end()) throw DataError(manifest.covariates.string() + ": no row for subject '" + id + "'");
        d.covariates.age[i] = parse_real(c->second[1], manifest.covariates, 0);
        d.covariates.gender[i] = encode_gender(c->second[2]);
        d.covariates.race[i] = encode_race(c->second[3]);
        d.covariates.hiv[i] = encode_hiv(c->second[4]);
        auto l = label_rows.find(id);
        if (l == label_rows.end()) throw DataError(manifest.labels.string() + ": no label for subject '" + id + "'");
        if (l->second[1] != "0" && l->second[1] != "1") {
            throw DataError(manifest.labels.string() + ": label of subject '" + id + "' is not 0 or 1");
        }
        d.labels[i] = l->second[1] == "1" ? 1 : 0;
    }
    return d;
}

fs::path write_dataset(const fs::path& dir, const DenseTensor& y, const Covariates& covariates,
                       const std::vector<int>& labels, const std::vector<std::string>& subject_ids) {
    require_connectome_shape(y, "write_dataset");
    if (y.dim(1) != 2) throw ArgumentError("write_dataset: expected two modalities");
    const std::size_t n = y.dim(0), p = y.dim(2);
    if (subject_ids.size() != n || labels.size() != n || covariates.size() != n) {
        throw ArgumentError("write_dataset: subject ids, labels, and covariates must match the subject count");
    }
    fs::create_directories(dir / "matrices");
    {
        auto out = open_out(dir / "subjects.csv");
        out << "subject_id,functional,diffusion\n";
        for (const auto& id : subject_ids) out << id << ",matrices/" << id << "_fun.csv,matrices/" << id << "_str.csv\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            DenseMatrix m(p, p);
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t a = 0; a < p; ++a) m(a, b) = y(i, k, a, b);
            write_matrix_csv(dir / "matrices" / (subject_ids[i] + (k == 0 ? "_fun.csv" : "_str.csv")), m);
        }
    }
    {
        auto out = open_out(dir / "covariates.csv");
        out << "subject_id,age,gender,race,hiv\n";
        for (std::size_t i = 0; i < n; ++i) {
            out << subject_ids[i] << ',' << format_real(covariates.age[i]) << ',' << format_real(covariates.gender[i])
                << ',' << format_real(covariates.race[i]) << ',' << format_real(covariates.hiv[i]) << '\n';
        }
    }
    {
        auto out = open_out(dir / "labels.csv");
        out << "subject_id,label\n";
        for (std::size_t i = 0; i < n; ++i) out << subject_ids[i] << ',' << labels[i] << '\n';
    }
    const fs::path manifest = dir / "manifest.txt";
    auto out = open_out(manifest);
    out << "# dataset manifest\nsubjects = subjects.csv\ncovariates = covariates.csv\nlabels = labels.csv\n";
    return manifest;
}

void write_membership(const fs::path& path, const Membership& z) {
    auto out = open_out(path);
    out << "roi_index,cluster_id\n";
    for (std::size_t j = 0; j < z.size(); ++j) out << j + 1 << ',' << z[j] + 1 << '\n';
}

Membership read_membership(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<int> labels;
    int max_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || line[0] == '#' || line.rfind("roi_index", 0) == 0) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected roi_index,cluster_id");
        const auto roi = static_cast<std::size_t>(parse_real(cells[0], path, line_no));
        const int id = static_cast<int>(parse_real(cells[1], path, line_no));
        if (roi != labels.size() + 1) throw DataError(path.string() + ": ROI indices must be listed in order from 1");
        if (id < 1) throw DataError(path.string() + ":" + std::to_string(line_no) + ": cluster ids are one-based");
        labels.push_back(id);
        max_id = std::max(max_id, id);
    }
    return Membership::from_one_based(labels, static_cast<std::size_t>(max_id));
}

void write_feature_table(const fs::path& path, const FeatureTable& table) {
    auto out = open_out(path);
    out << "subject_id";
    for (const auto& name : table.names()) out << ",\"" << name << '"';
    out << ",label\n";
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        out << (table.subject_ids().empty() ? "row" + std::to_string(i + 1) : table.subject_ids()[i]);
        for (std::size_t j = 0; j < table.n_features(); ++j) out << ',' << format_real(table.value(i, j));
        out << ',' << table.labels()[i] << '\n';
    }
}

FeatureTable read_feature_table(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty feature table");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.front() != "subject_id" || header.back() != "label") {
        throw DataError(path.string() + ": header must start with subject_id and end with label");
    }
    std::vector<std::string> names(header.begin() + 1, header.end() - 1);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells");
        }
        ids.push_back(cells.front());
        std::vector<double> row;
        for (std::size_t j = 1; j + 1 < cells.size(); ++j) row.push_back(parse_real(cells[j], path, line_no));
        rows.push_back(std::move(row));
        if (cells.back() != "0" && cells.back() != "1") {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": label is not 0 or 1");
        }
        labels.push_back(cells.back() == "1" ? 1 : 0);
    }
    DenseMatrix values(rows.size(), names.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) values(i, j) = rows[i][j];
    return FeatureTable(std::move(names), std::move(values), std::move(labels), std::move(ids));
}

void write_bic_table(const fs::path& path, const ModelSelection& selection) {
    auto out = open_out(path);
    out << "r,bic,residual,iterations\n";
    for (const auto& row : selection.table) {
        out << row.r << ',' << format_real(row.bic) << ',' << format_real(row.residual) << ',' << row.iterations << '\n';
    }
}

std::vector<BicRow> read_bic_table(const fs::path& path) {
    auto in = open_in(path);
    std::string line;
    std::vector<BicRow> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 4 cells");
        BicRow row;
        row.r = static_cast<std::size_t>(parse_real(cells[0], path, line_no));
        row.bic = cells[1] == "-inf" ? -HUGE_VAL : parse_real(cells[1], path, line_no);
        row.residual = parse_real(cells[2], path, line_no);
        row.iterations = static_cast<std::size_t>(parse_real(cells[3], path, line_no));
        rows.push_back(std::move(row));
    }
    return rows;
}

CsvTable read_csv(const fs::path& path) {
    auto in = open_in(path);
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw DataError(path.string() + ": empty table");
    return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
    auto out = open_out(path);
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j) out << ',';
            if (cells[j].find(',') != std::string::npos) {
                out << '"' << cells[j] << '"';
            } else {
                out << cells[j];
            }
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const auto& cell = rows.at(row).at(col);
    if (cell == "inf") return HUGE_VAL;
    if (cell == "-inf") return -HUGE_VAL;
    return parse_real(cell, "<table>", row + 2);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    throw DataError("table has no column '" + name + "'");
}

void write_metric_report(const fs::path& path, const MetricReport& report) {
    CsvTable t;
    t.header = {"metric", "mean", "max", "min", "repeats"};
    auto row = [&](const char* name, const MetricSummary& s) {
        t.rows.push_back({name, format_real(s.mean), format_real(s.max), format_real(s.min),
                          std::to_string(report.n_repeats)});
    };
    row("accuracy", report.accuracy);
    row("auroc", report.auroc);
    row("auprc", report.auprc);
    row("min_re_p", report.min_re_p);
    write_csv(path, t);
}

MetricReport read_metric_report(const fs::path& path) {
    const auto t = read_csv(path);
    if (t.header != std::vector<std::string>{"metric", "mean", "max", "min", "repeats"} || t.rows.size() != 4) {
        throw DataError(path.string() + ": not a metric report");
    }
    MetricReport r;
    MetricSummary* fields[] = {&r.accuracy, &r.auroc, &r.auprc, &r.min_re_p};
    const char* names[] = {"accuracy", "auroc", "auprc", "min_re_p"};
    for (std::size_t i = 0; i < 4; ++i) {
        if (t.rows[i][0] != names[i]) throw DataError(path.string() + ": unexpected metric '" + t.rows[i][0] + "'");
        *fields[i] = {t.number(i, 1), t.number(i, 2), t.number(i, 3)};
    }
    r.n_repeats = static_cast<std::size_t>(t.number(0, 4));
    return r;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

std::string read_text(const fs::path& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tbm
