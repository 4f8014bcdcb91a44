#pragma once

// JSON model file (schema_version 1).

#include "srr/core.hpp"
#include "srr/milp.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace srr {

struct SolverSummary {
    std::string status;
    double objective = 0.0;
    std::vector<Index> outlier_indices;
    long nodes_explored = 0;
    bool oracle_verified = false;
};

struct ModelFile {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    Model model;
    std::vector<std::string> feature_names;
    std::string target;  // optional; empty when unknown
    SolverSummary solver;
};

class ModelFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ModelFile make_model_file(const FitResult& result, const std::vector<std::string>& feature_names,
                          const std::string& target);

std::string dump_model(const ModelFile& file);
ModelFile parse_model(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace srr
