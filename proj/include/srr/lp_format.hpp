#pragma once

// A small in-memory MILP model and a reader/writer for the LP file format
// (Minimize / Subject To / Bounds / Binaries / End).

#include "srr/simplex.hpp"

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srr {

struct LinearTerm {
    std::string var;
    double coef = 0.0;
    bool operator==(const LinearTerm&) const = default;
};

struct LinearRow {
    std::string name;
    std::vector<LinearTerm> terms;
    lp::RowSense sense = lp::RowSense::LessEqual;
    double rhs = 0.0;
    bool operator==(const LinearRow&) const = default;
};

struct VariableBound {
    std::string var;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool operator==(const VariableBound&) const = default;
};

struct MilpModel {
    bool minimize = true;
    std::string objective_name = "obj";
    std::vector<LinearTerm> objective;
    std::vector<LinearRow> rows;
    std::vector<VariableBound> bounds;
    std::vector<std::string> binaries;
    std::string comment;  // leading "\" line; the reader keeps the first one before any section

    bool equivalent(const MilpModel& other) const
    {
        return minimize == other.minimize && objective_name == other.objective_name &&
               objective == other.objective && rows == other.rows && bounds == other.bounds &&
               binaries == other.binaries;
    }
};

using Assignment = std::map<std::string, double>;

/// Left-hand side value of a row; variables missing from `values` count as 0.
double row_activity(const LinearRow& row, const Assignment& values);

/// Names of rows, bounds and binaries violated by more than `tol`.
std::vector<std::string> violated_rows(const MilpModel& model, const Assignment& values, double tol);

class LpFormatError : public std::runtime_error {
public:
    LpFormatError(const std::string& what, int line) : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

std::string write_lp_format(const MilpModel& model);
MilpModel read_lp_format(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace srr
