#include "hopsi/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hopsi/errors.hpp"
#include "hopsi/linear_model.hpp"

namespace hopsi {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

bool parse_number(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_real(double v) {
    if (std::isfinite(v)) return format_real(v);
    return "\"" + format_real(v) + "\"";
}

std::string itemset_json(const Itemset& s, const std::vector<std::string>& names) {
    std::string out = "[";
    const auto idx = s.indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i > 0) out += ", ";
        out += json_string(Itemset{idx[i]}.label(names));
    }
    return out + "]";
}

}  // namespace

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

bool csv_has_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (blank(line)) continue;
        double tmp;
        for (const auto& cell : split_line(line))
            if (!parse_number(cell, tmp)) return true;
        return false;
    }
    return false;
}

RawTable parse_csv(std::istream& in, bool has_header) {
    RawTable table;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto cells = split_line(line);
        if (header_pending) {
            table.header = std::move(cells);
            width = table.header.size();
            header_pending = false;
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, found " +
                            std::to_string(cells.size()));
        std::vector<double> row(width);
        for (std::size_t j = 0; j < width; ++j)
            if (!parse_number(cells[j], row[j]))
                throw DataError("line " + std::to_string(line_no) + ", column " +
                                std::to_string(j + 1) + ": non-numeric value '" + cells[j] + "'");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("no data rows in CSV input");
    if (width < 2) throw DataError("CSV needs at least one covariate and a response column");
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return table;
}

RawTable ingest_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return parse_csv(in, has_header);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> binarize_continuous(const Eigen::VectorXd& column) {
    const auto n = static_cast<double>(column.size());
    const double mean = column.mean();
    const double var = (column.array() - mean).square().sum() / n;
    if (!(var > 0.0)) throw DataError("cannot standardize a zero-variance column");
    const Eigen::ArrayXd zs = (column.array() - mean) / std::sqrt(var);
    return {(zs > 1.0).cast<double>().matrix(), (zs < -1.0).cast<double>().matrix()};
}

Dataset to_dataset(const RawTable& table, bool binarize) {
    const Eigen::Index n = table.values.rows();
    const Eigen::Index d = table.values.cols() - 1;
    std::vector<std::string> names;
    auto name_of = [&](Eigen::Index j) {
        if (static_cast<std::size_t>(j) < table.header.size())
            return table.header[static_cast<std::size_t>(j)];
        return "z" + std::to_string(j + 1);
    };
    const Eigen::VectorXd y = table.values.col(d);
    if (!binarize) {
        for (Eigen::Index j = 0; j < d; ++j) names.push_back(name_of(j));
        return Dataset(table.values.leftCols(d), y, std::move(names));
    }

    std::vector<Eigen::VectorXd> cols;
    auto add = [&](Eigen::VectorXd col, std::string name) {
        for (const auto& existing : cols)
            if (existing == col) return;
        cols.push_back(std::move(col));
        names.push_back(std::move(name));
    };
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::VectorXd col = table.values.col(j);
        const bool binary = (col.array() == 0.0 || col.array() == 1.0).all();
        if (binary) {
            add(col, name_of(j));
        } else {
            auto [high, low] = binarize_continuous(col);
            add(std::move(high), name_of(j) + ">1");
            add(std::move(low), name_of(j) + "<-1");
        }
    }
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) z.col(static_cast<Eigen::Index>(j)) = cols[j];
    return Dataset(std::move(z), y, std::move(names));
}

std::vector<Eigen::Index> sample_rows(Eigen::Index n, Eigen::Index max_rows, std::uint64_t seed) {
    if (max_rows < 1) throw UsageError("subsample size must be positive");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (max_rows >= n) return idx;
    std::mt19937_64 rng(seed);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < static_cast<std::size_t>(max_rows); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(static_cast<std::size_t>(max_rows));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Dataset subsample(const Dataset& data, Eigen::Index max_rows, std::uint64_t seed) {
    if (max_rows >= data.n() && max_rows >= 1) return data;
    return data.rows(sample_rows(data.n(), max_rows, seed));
}

RawTable subsample(const RawTable& table, Eigen::Index max_rows, std::uint64_t seed) {
    const auto idx = sample_rows(table.values.rows(), max_rows, seed);
    return {table.header, table.values(idx, Eigen::all)};
}

double estimate_sigma(const Dataset& data, const ScreeningResult& sel) {
    const auto k = static_cast<Eigen::Index>(sel.size());
    if (data.n() <= k)
        throw DataError("cannot estimate sigma: need more rows than selected features");
    const GramSolver gram(selected_design(sel.selected, data.z()));
    const double rss = residual_sum_of_squares(gram, data.y());
    // residuals at rounding level mean the selected model fits exactly
    const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * data.y().norm();
    if (rss <= noise_floor * noise_floor) return 0.0;
    return std::sqrt(rss / static_cast<double>(data.n() - k));
}

ReportFormat parse_format(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw UsageError("unknown report format '" + name + "' (expected json or csv)");
}

void emit_report(const InferenceReport& report, const std::vector<std::string>& names,
                 std::ostream& out, ReportFormat format) {
    if (report.features.empty()) throw UsageError("cannot emit an empty inference report");
    if (format == ReportFormat::csv) {
        out << "itemset,order,score,sign,beta_hat,v_minus,v_plus,pivot,p_value,ci_low,ci_high,"
               "significant\n";
        for (const auto& f : report.features) {
            out << quote_csv(f.itemset.label(names)) << ',' << f.itemset.order() << ','
                << format_real(f.score) << ',' << f.sign << ',' << format_real(f.beta_hat) << ','
                << format_real(f.interval.v_minus) << ',' << format_real(f.interval.v_plus) << ','
                << format_real(f.pivot) << ',' << format_real(f.p_value) << ','
                << format_real(f.ci_low) << ',' << format_real(f.ci_high) << ','
                << (f.significant ? "true" : "false") << '\n';
        }
        return;
    }
    out << "{\n";
    out << "  \"alpha\": " << json_real(report.alpha) << ",\n";
    out << "  \"sigma\": " << json_real(report.sigma) << ",\n";
    out << "  \"max_order\": " << report.max_order << ",\n";
    out << "  \"k\": " << report.features.size() << ",\n";
    out << "  \"significant_by_order\": [";
    const auto counts = report.significant_by_order();
    for (std::size_t i = 0; i < counts.size(); ++i) out << (i ? ", " : "") << counts[i];
    out << "],\n";
    out << "  \"features\": [\n";
    for (std::size_t i = 0; i < report.features.size(); ++i) {
        const auto& f = report.features[i];
        out << "    {\"itemset\": " << itemset_json(f.itemset, names)
            << ", \"order\": " << f.itemset.order() << ", \"score\": " << json_real(f.score)
            << ", \"sign\": " << f.sign << ", \"beta_hat\": " << json_real(f.beta_hat)
            << ", \"v_minus\": " << json_real(f.interval.v_minus)
            << ", \"v_plus\": " << json_real(f.interval.v_plus)
            << ", \"pivot\": " << json_real(f.pivot) << ", \"p_value\": " << json_real(f.p_value)
            << ", \"ci_low\": " << json_real(f.ci_low) << ", \"ci_high\": " << json_real(f.ci_high)
            << ", \"significant\": " << (f.significant ? "true" : "false") << "}"
            << (i + 1 < report.features.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

void emit_report(const InferenceReport& report, const std::vector<std::string>& names,
                 const std::string& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    emit_report(report, names, out, format);
    if (!out) throw DataError("write failed for " + path);
}

void emit_screening(const ScreeningResult& sel, const std::vector<std::string>& names,
                    std::ostream& out, ReportFormat format) {
    if (format == ReportFormat::csv) {
        out << "itemset,order,score,sign\n";
        for (std::size_t i = 0; i < sel.size(); ++i)
            out << quote_csv(sel.selected[i].label(names)) << ',' << sel.selected[i].order() << ','
                << format_real(sel.scores[i]) << ',' << sel.signs[i] << '\n';
        return;
    }
    out << "{\n  \"kth_abs_score\": " << json_real(sel.kth_abs_score) << ",\n  \"features\": [\n";
    for (std::size_t i = 0; i < sel.size(); ++i) {
        out << "    {\"itemset\": " << itemset_json(sel.selected[i], names)
            << ", \"order\": " << sel.selected[i].order()
            << ", \"score\": " << json_real(sel.scores[i]) << ", \"sign\": " << sel.signs[i] << "}"
            << (i + 1 < sel.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
}

}  // namespace hopsi
