#pragma once

// CSV ingestion (header row, RFC 4180 quoting, '.' decimal separator) and
// dataset export.

#include "srr/core.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srr {

enum class CsvErrorKind { Io, EmptyFile, MalformedQuote, RaggedRow, DuplicateHeader, MissingColumn, NonNumeric };

/// row is the 1-based data row (header excluded), 0 when not applicable.
class CsvError : public std::runtime_error {
public:
    CsvError(CsvErrorKind kind, const std::string& what, Index row = 0, std::string column = {})
        : std::runtime_error(what), kind_(kind), row_(row), column_(std::move(column))
    {
    }
    CsvErrorKind kind() const { return kind_; }
    Index row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    CsvErrorKind kind_;
    Index row_;
    std::string column_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Features are all columns except the target, in file order.
Dataset dataset_from_csv(const CsvTable& table, const std::string& target_column);
Dataset ingest_csv(const std::filesystem::path& path, const std::string& target_column);

/// Numeric matrix of the named columns, in the given order.
MatrixX<double> numeric_columns(const CsvTable& table, const std::vector<std::string>& names);
VectorX<double> numeric_column(const CsvTable& table, const std::string& name);

std::string quote_csv_field(const std::string& field);

/// Features followed by the response under `target_name`; reals are written
/// in shortest round-trip form.
std::string dataset_to_csv(const Dataset& data, const std::string& target_name);

}  // namespace srr
