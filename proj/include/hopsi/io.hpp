#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hopsi/dataset.hpp"
#include "hopsi/inference.hpp"
#include "hopsi/screening.hpp"

namespace hopsi {

/// Numeric CSV contents; the last column is the response.
struct RawTable {
    std::vector<std::string> header;  // empty without a header row
    Eigen::MatrixXd values;
};

/// True when the first non-empty line has a non-numeric cell.
bool csv_has_header(const std::string& path);

/// Parse a numeric CSV. Throws DataError naming the line (and column) for
/// ragged rows, non-numeric cells, or an empty file.
RawTable ingest_csv(const std::string& path, bool has_header);
RawTable parse_csv(std::istream& in, bool has_header);

/// Standardize to mean 0 / variance 1 and split into indicators of
/// value > 1 and value < -1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> binarize_continuous(const Eigen::VectorXd& column);

/// Dataset from a table. With `binarize`, every non-binary covariate is
/// replaced by its two indicator columns and duplicate columns are dropped
/// (first occurrence kept).
Dataset to_dataset(const RawTable& table, bool binarize);

/// Seeded uniform sample of `max_rows` rows without replacement; original
/// row order is kept. Identity when max_rows >= n.
Dataset subsample(const Dataset& data, Eigen::Index max_rows, std::uint64_t seed);
RawTable subsample(const RawTable& table, Eigen::Index max_rows, std::uint64_t seed);
/// The sorted row indices kept by subsample().
std::vector<Eigen::Index> sample_rows(Eigen::Index n, Eigen::Index max_rows, std::uint64_t seed);

/// sqrt(RSS / (n - k)) of the least-squares fit on the selected columns;
/// exactly 0 when the residuals are at rounding level.
double estimate_sigma(const Dataset& data, const ScreeningResult& sel);

enum class ReportFormat { json, csv };

ReportFormat parse_format(const std::string& name);

/// One record per selected feature; non-finite values are written as the
/// strings "inf" / "-inf", finite ones with 17 significant digits.
void emit_report(const InferenceReport& report, const std::vector<std::string>& names,
                 std::ostream& out, ReportFormat format);
void emit_report(const InferenceReport& report, const std::vector<std::string>& names,
                 const std::string& path, ReportFormat format);

void emit_screening(const ScreeningResult& sel, const std::vector<std::string>& names,
                    std::ostream& out, ReportFormat format);

/// %.17g, or "inf" / "-inf" / "nan".
std::string format_real(double value);

}  // namespace hopsi
