#include "srr/model_io.hpp"

#include "srr/csv.hpp"

#include <json.hpp>

namespace srr {

using nlohmann::json;

namespace {

json to_array(const VectorX<double>& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

VectorX<double> from_array(const json& a, const char* what)
{
    if (!a.is_array()) throw ModelFileError(std::string("model file: '") + what + "' must be an array");
    VectorX<double> v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) throw ModelFileError(std::string("model file: '") + what + "' holds a non-number");
        v(static_cast<Index>(i)) = a[i].get<double>();
    }
    return v;
}

}  // namespace

ModelFile make_model_file(const FitResult& result, const std::vector<std::string>& feature_names,
                          const std::string& target)
{
    ModelFile f;
    f.model = result.model;
    f.feature_names = feature_names;
    f.target = target;
    f.solver.status = to_string(result.status);
    f.solver.objective = result.objective;
    f.solver.outlier_indices = result.outlier_indices();
    f.solver.nodes_explored = result.nodes_explored;
    f.solver.oracle_verified = result.oracle_verified;
    return f;
}

std::string dump_model(const ModelFile& file)
{
    const Model& m = file.model;
    json j;
    j["schema_version"] = file.schema_version;
    j["weights"] = to_array(m.weights);
    j["intercept"] = m.intercept;
    j["delta"] = m.config_echo.delta;
    j["c"] = m.config_echo.c;
    j["fit_intercept"] = m.config_echo.fit_intercept;
    j["feature_names"] = file.feature_names;
    if (!file.target.empty()) j["target"] = file.target;
    if (m.standardizer)
        j["standardizer"] = {{"means", to_array(m.standardizer->means)}, {"scales", to_array(m.standardizer->scales)}};
    else
        j["standardizer"] = nullptr;
    j["solver"] = {{"status", file.solver.status},
                   {"objective", file.solver.objective},
                   {"outlier_indices", file.solver.outlier_indices},
                   {"nodes_explored", file.solver.nodes_explored},
                   {"oracle_verified", file.solver.oracle_verified}};
    return j.dump(2) + "\n";
}

ModelFile parse_model(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFileError(std::string("model file: ") + e.what());
    }
    try {
        ModelFile f;
        f.schema_version = j.at("schema_version").get<int>();
        if (f.schema_version != ModelFile::kSchemaVersion)
            throw ModelFileError("model file: unsupported schema_version " + std::to_string(f.schema_version));
        Model& m = f.model;
        m.weights = from_array(j.at("weights"), "weights");
        m.intercept = j.at("intercept").get<double>();
        m.config_echo.delta = j.at("delta").get<double>();
        m.config_echo.c = j.at("c").get<double>();
        m.config_echo.fit_intercept = j.value("fit_intercept", false);
        f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        f.target = j.value("target", std::string{});
        if (static_cast<Index>(f.feature_names.size()) != m.weights.size())
            throw ModelFileError("model file: weights and feature_names differ in length");
        if (const auto it = j.find("standardizer"); it != j.end() && !it->is_null()) {
            Standardizer st{from_array(it->at("means"), "means"), from_array(it->at("scales"), "scales")};
            if (st.means.size() != m.weights.size() || st.scales.size() != m.weights.size())
                throw ModelFileError("model file: standardizer length mismatch");
            if ((st.scales.array() <= 0.0).any()) throw ModelFileError("model file: standardizer scale must be > 0");
            m.config_echo.standardize = true;
            m.standardizer = std::move(st);
        }
        if (const auto it = j.find("solver"); it != j.end()) {
            f.solver.status = it->value("status", std::string{});
            f.solver.objective = it->value("objective", 0.0);
            f.solver.outlier_indices = it->value("outlier_indices", std::vector<Index>{});
            f.solver.nodes_explored = it->value("nodes_explored", 0L);
            f.solver.oracle_verified = it->value("oracle_verified", false);
        }
        m.info.method = "sparse-robust";
        return f;
    } catch (const json::exception& e) {
        throw ModelFileError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& file)
{
    write_text_file(path, dump_model(file));
}

ModelFile load_model(const std::filesystem::path& path)
{
    return parse_model(read_text_file(path));
}

}  // namespace srr
