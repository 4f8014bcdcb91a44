#include "srr/csv.hpp"

#include "srr/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace srr {

CsvTable parse_csv(std::string_view text)
{
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // distinguishes an empty last field from no record
    Index line = 1;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        if (!(record.empty() && !field_started && field.empty())) {
            end_field();
            records.push_back(std::move(record));
        }
        record.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty())
                throw CsvError(CsvErrorKind::MalformedQuote, "stray quote on line " + std::to_string(line));
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            field_started = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            break;
        default:
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw CsvError(CsvErrorKind::MalformedQuote, "unterminated quoted field");
    end_record();

    if (records.empty()) throw CsvError(CsvErrorKind::EmptyFile, "CSV file is empty");

    CsvTable table;
    table.header = std::move(records.front());
    std::map<std::string, int> seen;
    for (const auto& h : table.header)
        if (++seen[h] > 1) throw CsvError(CsvErrorKind::DuplicateHeader, "duplicate header name '" + h + "'", 0, h);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw CsvError(CsvErrorKind::RaggedRow,
                           "row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                               " fields, header has " + std::to_string(table.header.size()),
                           static_cast<Index>(r));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError(CsvErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CsvError(CsvErrorKind::Io, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw CsvError(CsvErrorKind::Io, "write failed for '" + path.string() + "'");
}

namespace {

std::size_t column_index(const CsvTable& table, const std::string& name)
{
    for (std::size_t j = 0; j < table.header.size(); ++j)
        if (table.header[j] == name) return j;
    throw CsvError(CsvErrorKind::MissingColumn, "column '" + name + "' not found in header", 0, name);
}

double parse_cell(const std::string& cell, Index row, const std::string& column)
{
    std::string_view s = cell;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw CsvError(CsvErrorKind::NonNumeric,
                       "non-numeric value '" + cell + "' at row " + std::to_string(row) + ", column '" + column + "'",
                       row, column);
    return v;
}

}  // namespace

MatrixX<double> numeric_columns(const CsvTable& table, const std::vector<std::string>& names)
{
    std::vector<std::size_t> cols;
    for (const auto& n : names) cols.push_back(column_index(table, n));
    MatrixX<double> out(static_cast<Index>(table.rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (std::size_t k = 0; k < cols.size(); ++k)
            out(static_cast<Index>(r), static_cast<Index>(k)) =
                parse_cell(table.rows[r][cols[k]], static_cast<Index>(r + 1), names[k]);
    return out;
}

VectorX<double> numeric_column(const CsvTable& table, const std::string& name)
{
    return numeric_columns(table, {name}).col(0);
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& target_column)
{
    column_index(table, target_column);
    std::vector<std::string> names;
    for (const auto& h : table.header)
        if (h != target_column) names.push_back(h);
    if (names.empty()) throw CsvError(CsvErrorKind::MissingColumn, "no feature columns besides the target");
    // Parse in file order so the first bad cell is the one reported.
    MatrixX<double> all = numeric_columns(table, table.header);
    Dataset d;
    d.features.resize(all.rows(), static_cast<Index>(names.size()));
    Index k = 0;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == target_column)
            d.response = all.col(static_cast<Index>(j));
        else
            d.features.col(k++) = all.col(static_cast<Index>(j));
    }
    d.feature_names = std::move(names);
    d.validate();
    return d;
}

Dataset ingest_csv(const std::filesystem::path& path, const std::string& target_column)
{
    return dataset_from_csv(parse_csv(read_text_file(path)), target_column);
}

std::string quote_csv_field(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string dataset_to_csv(const Dataset& data, const std::string& target_name)
{
    std::ostringstream os;
    for (const auto& name : data.feature_names) os << quote_csv_field(name) << ',';
    os << quote_csv_field(target_name) << '\n';
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) os << format_double(data.features(i, j)) << ',';
        os << format_double(data.response(i)) << '\n';
    }
    return os.str();
}

}  // namespace srr
