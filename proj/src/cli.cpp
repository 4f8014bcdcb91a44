#include "srr/cli.hpp"

#include "srr/bench.hpp"
#include "srr/csv.hpp"
#include "srr/milp.hpp"
#include "srr/model_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace srr::cli {

namespace {

struct FitFlags {
    std::string data;
    std::string target = "y";
    double delta = 0.0;
    double c = 0.0;
    bool intercept = false;
    bool standardize = false;
    int threads = 1;
};

struct GenFlags {
    GenSpec spec;
    double outlier_magnitude = std::nan("");  // default: 10 * coef_scale
    std::uint64_t seed = 0;

    GenSpec resolved() const
    {
        GenSpec s = spec;
        s.seed = seed;
        s.outlier_magnitude = std::isnan(outlier_magnitude) ? 10.0 * s.coef_scale : outlier_magnitude;
        return s;
    }
};

void add_fit_flags(CLI::App* cmd, FitFlags& f)
{
    cmd->add_option("--data", f.data, "Training CSV (header row)")->required();
    cmd->add_option("--target", f.target, "Response column name")->capture_default_str();
    cmd->add_option("--delta", f.delta, "Tube half-width (response units)")->required()->check(CLI::NonNegativeNumber);
    cmd->add_option("--c", f.c, "Outlier fraction in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--intercept", f.intercept, "Fit an unpenalized intercept");
    cmd->add_flag("--standardize", f.standardize, "Standardize features before fitting");
    cmd->add_option("--threads", f.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_gen_flags(CLI::App* cmd, GenFlags& g)
{
    cmd->add_option("--m", g.spec.m, "Observations")->capture_default_str();
    cmd->add_option("--n", g.spec.n, "Features")->capture_default_str();
    cmd->add_option("--k", g.spec.sparsity, "Nonzero true coefficients")->capture_default_str();
    cmd->add_option("--coef-scale", g.spec.coef_scale, "True coefficient scale")->capture_default_str();
    cmd->add_option("--noise", g.spec.noise_half_width, "Bounded noise half-width")->capture_default_str();
    cmd->add_option("--outliers", g.spec.outlier_count, "Number of gross outliers")->capture_default_str();
    cmd->add_option("--outlier-magnitude", g.outlier_magnitude, "Gross error size (default 10 * coef-scale)");
    cmd->add_option("--seed", g.seed, "Generator seed")->capture_default_str();
}

FitConfig to_config(const FitFlags& f)
{
    FitConfig cfg;
    cfg.delta = f.delta;
    cfg.c = f.c;
    cfg.fit_intercept = f.intercept;
    cfg.standardize = f.standardize;
    cfg.validate();
    return cfg;
}

void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-")
        out << text;
    else
        write_text_file(path, text);
}

std::string join(const std::vector<Index>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

int report_status(const FitResult& res, std::ostream& err)
{
    err << "status: " << to_string(res.status) << " (nodes explored: " << res.nodes_explored << ")\n";
    if (res.optimal()) {
        err << "objective (sum |w_j|): " << format_double(res.objective) << '\n';
        err << "outliers flagged: " << res.outlier_indices().size() << " [" << join(res.outlier_indices()) << "]\n";
        return kOk;
    }
    err << "no model satisfies the tube with at most " << res.outlier_budget << " outliers\n";
    return kInfeasible;
}

int cmd_fit(const FitFlags& f, bool oracle_check, const std::string& out_path, std::ostream& err)
{
    const Dataset data = ingest_csv(f.data, f.target);
    const FitConfig cfg = to_config(f);
    if (oracle_check && data.rows() > 15) {
        err << "error: --oracle-check requires m <= 15 (got " << data.rows() << ")\n";
        return kUsage;
    }
    err << "m=" << data.rows() << " n=" << data.cols() << " delta=" << format_double(cfg.delta)
        << " c=" << format_double(cfg.c) << "\n";
    err << "outlier budget: " << cfg.outlier_budget(data.rows()) << '\n';
    FitResult res = fit(data, cfg, {f.threads});
    if (oracle_check) {
        const FitResult oracle = enumerate_exact(data, cfg, 15, {f.threads});
        const bool same_status = oracle.status == res.status;
        const bool same_obj = !res.optimal() || std::abs(oracle.objective - res.objective) <= 1e-6;
        if (!same_status || !same_obj) {
            err << "oracle check FAILED: branch-and-bound " << to_string(res.status) << " "
                << format_double(res.objective) << " vs enumeration " << to_string(oracle.status) << " "
                << format_double(oracle.objective) << '\n';
            return kNumerical;
        }
        res.oracle_verified = true;
        err << "oracle check passed (" << oracle.nodes_explored << " subsets)\n";
    }
    const int code = report_status(res, err);
    if (code != kOk) return code;
    save_model(out_path, make_model_file(res, data.feature_names, f.target));
    err << "model written to " << out_path << '\n';
    return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path,
                std::ostream& out)
{
    const ModelFile mf = load_model(model_path);
    const CsvTable table = parse_csv(read_text_file(data_path));
    const MatrixX<double> x = numeric_columns(table, mf.feature_names);
    const VectorX<double> preds = predict_rows(mf.model, x);
    std::string text = "prediction\n";
    for (Index i = 0; i < preds.size(); ++i) text += format_double(preds(i)) + "\n";
    emit(out_path, text, out);
    return kOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, std::string target,
             std::optional<double> delta, std::ostream& out)
{
    const ModelFile mf = load_model(model_path);
    if (target.empty()) target = mf.target.empty() ? "y" : mf.target;
    const CsvTable table = parse_csv(read_text_file(data_path));
    Dataset data;
    data.features = numeric_columns(table, mf.feature_names);
    data.response = numeric_column(table, target);
    data.feature_names = mf.feature_names;
    const double d = delta.value_or(mf.model.config_echo.delta);
    const VectorX<double> r = residuals(mf.model, data);
    const double err_mse = mse(mf.model, data);
    const double rate = static_cast<double>(count_within(r, d, 1e-9)) / static_cast<double>(r.size());
    out << "m: " << data.rows() << '\n';
    out << "mse: " << format_double(err_mse) << '\n';
    out << "inlier_rate: " << format_double(rate) << " (|r| <= " << format_double(d) << ")\n";
    return kOk;
}

int cmd_gen(const GenFlags& g, const std::string& out_path, const std::string& truth_path, std::ostream& out)
{
    const Generated gen = generate(g.resolved());
    emit(out_path, dataset_to_csv(gen.data, "y"), out);
    if (!truth_path.empty()) {
        nlohmann::json j;
        std::vector<double> w(gen.true_weights.data(), gen.true_weights.data() + gen.true_weights.size());
        j["weights"] = w;
        j["outlier_indices"] = gen.outlier_indices;
        j["seed"] = g.seed;
        write_text_file(truth_path, j.dump(2) + "\n");
    }
    return kOk;
}

int cmd_export(const FitFlags& f, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    const Dataset data = ingest_csv(f.data, f.target);
    const FitConfig cfg = to_config(f);
    err << "outlier budget: " << cfg.outlier_budget(data.rows()) << '\n';
    const MilpExport ex = export_milp(data, cfg);
    err << "big-M range: [" << format_double(ex.big_m.size() ? ex.big_m.minCoeff() : 0.0) << ", "
        << format_double(ex.big_m.size() ? ex.big_m.maxCoeff() : 0.0) << "]\n";
    emit(out_path, ex.text, out);
    return kOk;
}

struct CompareFlags {
    FitFlags fit;
    GenFlags gen;
    Index folds = 5;
    int grid_points = 20;
    int repeats = 1;
    std::string csv;
    bool timing = false;
};

int cmd_compare(CompareFlags c, std::ostream& out, std::ostream& err)
{
    FitConfig cfg;
    cfg.delta = c.fit.delta;
    cfg.c = c.fit.c;
    cfg.fit_intercept = c.fit.intercept;
    cfg.standardize = c.fit.standardize;
    cfg.validate();
    LassoGrid grid;
    grid.points = c.grid_points;
    grid.base.fit_intercept = c.fit.intercept;
    if (c.repeats < 1) throw std::invalid_argument("--repeats must be >= 1");
    if (!c.fit.data.empty() && c.repeats != 1) throw std::invalid_argument("--repeats applies to generated data only");

    std::string csv;
    int wins = 0;
    for (int rep = 0; rep < c.repeats; ++rep) {
        const std::uint64_t seed = c.gen.seed + static_cast<std::uint64_t>(rep);
        Dataset data;
        if (!c.fit.data.empty()) {
            data = ingest_csv(c.fit.data, c.fit.target);
        } else {
            GenFlags g = c.gen;
            g.seed = seed;
            data = generate(g.resolved()).data;
        }
        const EvalReport report = compare(data, cfg, grid, c.folds, seed, c.fit.threads);
        if (c.repeats > 1) out << "seed " << seed << '\n';
        out << report.to_table(c.timing);
        const auto* robust = report.find(kSparseRobustName);
        const auto* lasso = report.find(kLassoName);
        if (robust && lasso && robust->mse <= lasso->mse) ++wins;
        if (robust && robust->escalations > 0)
            err << "note: outlier budget raised " << robust->escalations
                << " time(s) across folds to reach a feasible fit\n";
        std::string rows = report.to_csv(c.timing);
        if (rep > 0) rows.erase(0, rows.find('\n') + 1);
        csv += rows;
    }
    if (c.repeats > 1)
        out << "sparse-robust MSE <= lasso MSE in " << wins << " of " << c.repeats << " seeds\n";
    out << "welding case-study MSEs (different data, for orientation only):";
    for (const auto& r : kReferenceMse) out << "  " << r.method << " " << std::fixed << std::setprecision(2) << r.mse;
    out << '\n';
    if (!c.csv.empty()) write_text_file(c.csv, csv);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sparse robust tube regression"};
    app.name("srr");
    app.require_subcommand(1, 1);

    FitFlags fit_flags;
    bool oracle_check = false;
    std::string fit_out;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the sparse robust model and save it as JSON");
    add_fit_flags(fit_cmd, fit_flags);
    fit_cmd->add_flag("--oracle-check", oracle_check, "Cross-check against exhaustive enumeration (m <= 15)");
    fit_cmd->add_option("--out", fit_out, "Model file to write")->required();

    std::string model_path, data_path, pred_out;
    auto* predict_cmd = app.add_subcommand("predict", "Predict with a saved model");
    predict_cmd->add_option("--model", model_path, "Model JSON")->required();
    predict_cmd->add_option("--data", data_path, "CSV with the model's feature columns")->required();
    predict_cmd->add_option("--out", pred_out, "Predictions CSV (default: stdout)");

    std::string eval_target;
    std::optional<double> eval_delta;
    auto* eval_cmd = app.add_subcommand("eval", "Report MSE and tube inlier rate of a saved model");
    eval_cmd->add_option("--model", model_path, "Model JSON")->required();
    eval_cmd->add_option("--data", data_path, "Labelled CSV")->required();
    eval_cmd->add_option("--target", eval_target, "Response column (default: from model)");
    eval_cmd->add_option("--delta", eval_delta, "Tube half-width (default: from model)");

    GenFlags gen_flags;
    std::string gen_out, truth_out;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
    add_gen_flags(gen_cmd, gen_flags);
    gen_cmd->add_option("--out", gen_out, "CSV to write (default: stdout)");
    gen_cmd->add_option("--truth", truth_out, "JSON with true weights and outlier indices");

    FitFlags export_flags;
    std::string export_out;
    auto* export_cmd = app.add_subcommand("export", "Write the big-M MILP in LP file format");
    add_fit_flags(export_cmd, export_flags);
    export_cmd->add_option("--out", export_out, "LP file (default: stdout)");

    CompareFlags cmp;
    cmp.fit.delta = 0.144;
    cmp.fit.c = 0.10;
    auto* compare_cmd = app.add_subcommand("compare", "Cross-validated comparison against a tuned lasso");
    compare_cmd->add_option("--data", cmp.fit.data, "Labelled CSV (default: generate one)");
    compare_cmd->add_option("--target", cmp.fit.target, "Response column")->capture_default_str();
    compare_cmd->add_option("--delta", cmp.fit.delta, "Tube half-width")->capture_default_str()->check(CLI::NonNegativeNumber);
    compare_cmd->add_option("--c", cmp.fit.c, "Outlier fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    compare_cmd->add_flag("--intercept", cmp.fit.intercept, "Fit intercepts");
    compare_cmd->add_flag("--standardize", cmp.fit.standardize, "Standardize features (sparse-robust)");
    compare_cmd->add_option("--threads", cmp.fit.threads, "Fold-level worker threads")->capture_default_str();
    compare_cmd->add_option("--folds", cmp.folds, "Cross-validation folds")->capture_default_str();
    compare_cmd->add_option("--grid-points", cmp.grid_points, "Lasso penalty grid size")->capture_default_str();
    compare_cmd->add_option("--repeats", cmp.repeats, "Consecutive seeds to run (generated data)")->capture_default_str();
    compare_cmd->add_option("--csv", cmp.csv, "Write the report as CSV");
    compare_cmd->add_flag("--timing", cmp.timing, "Report full-data fit seconds (makes output run-dependent)");
    add_gen_flags(compare_cmd, cmp.gen);

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("srr");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_flags, oracle_check, fit_out, err);
        if (*predict_cmd) return cmd_predict(model_path, data_path, pred_out, out);
        if (*eval_cmd) return cmd_eval(model_path, data_path, eval_target, eval_delta, out);
        if (*gen_cmd) return cmd_gen(gen_flags, gen_out, truth_out, out);
        if (*export_cmd) return cmd_export(export_flags, export_out, out, err);
        if (*compare_cmd) return cmd_compare(cmp, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const BigMError& e) {
        err << "error: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace srr::cli
