#include "srr/cli.hpp"
#include "srr/csv.hpp"
#include "srr/milp.hpp"
#include "srr/model_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace srr;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("srr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args)
    {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, ExactFitChain)
{
    ASSERT_EQ(run({"gen", "--m", "3", "--n", "1", "--k", "1", "--outliers", "0", "--noise", "0", "--seed", "7",
                   "--out", path("d.csv")}),
              cli::kOk)
        << err_.str();
    ASSERT_EQ(run({"fit", "--data", path("d.csv"), "--delta", "0", "--c", "0", "--out", path("m.json")}), cli::kOk)
        << err_.str();
    ASSERT_EQ(run({"eval", "--model", path("m.json"), "--data", path("d.csv")}), cli::kOk) << err_.str();
    EXPECT_NE(out_.str().find("mse: 0\n"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("inlier_rate: 1 "), std::string::npos) << out_.str();
}

TEST_F(CliTest, FitReportsBudget)
{
    ASSERT_EQ(run({"gen", "--seed", "1", "--out", path("d.csv")}), cli::kOk);
    ASSERT_EQ(run({"fit", "--data", path("d.csv"), "--delta", "0.144", "--c", "0.10", "--out", path("m.json")}),
              cli::kOk)
        << err_.str();
    EXPECT_NE(err_.str().find("outlier budget: 5"), std::string::npos) << err_.str();
    const auto mf = load_model(path("m.json"));
    EXPECT_EQ(mf.schema_version, 1);
    EXPECT_EQ(mf.feature_names.size(), 12u);
    EXPECT_EQ(mf.solver.status, "ProvenOptimal");
    EXPECT_LE(mf.solver.outlier_indices.size(), 5u);
}

TEST_F(CliTest, PredictMatchesInMemoryBitExactly)
{
    ASSERT_EQ(run({"gen", "--m", "14", "--n", "4", "--k", "2", "--outliers", "1", "--seed", "3", "--out",
                   path("d.csv")}),
              cli::kOk);
    ASSERT_EQ(run({"fit", "--data", path("d.csv"), "--delta", "0.144", "--c", "0.1", "--standardize", "--intercept",
                   "--oracle-check", "--out", path("m.json")}),
              cli::kOk)
        << err_.str();
    EXPECT_NE(err_.str().find("oracle check passed"), std::string::npos);
    ASSERT_EQ(run({"predict", "--model", path("m.json"), "--data", path("d.csv"), "--out", path("p.csv")}), cli::kOk);

    const Dataset d = ingest_csv(path("d.csv"), "y");
    FitConfig cfg;
    cfg.delta = 0.144;
    cfg.c = 0.1;
    cfg.standardize = true;
    cfg.fit_intercept = true;
    const FitResult r = fit(d, cfg);
    const VectorX<double> expected = predict_rows(r.model, d.features);
    const auto preds = parse_csv(read_text_file(path("p.csv")));
    ASSERT_EQ(preds.header, std::vector<std::string>{"prediction"});
    ASSERT_EQ(static_cast<Index>(preds.rows.size()), d.rows());
    for (Index i = 0; i < d.rows(); ++i) EXPECT_EQ(std::stod(preds.rows[static_cast<std::size_t>(i)][0]), expected(i));

    const auto loaded = load_model(path("m.json"));
    EXPECT_TRUE(loaded.model.weights == r.model.weights);
    EXPECT_EQ(loaded.model.intercept, r.model.intercept);
    EXPECT_TRUE(residuals(loaded.model, d) == residuals(r.model, d));
    EXPECT_TRUE(loaded.solver.oracle_verified);
}

TEST_F(CliTest, SeededCommandsAreDeterministic)
{
    ASSERT_EQ(run({"gen", "--seed", "5", "--truth", path("t1.json")}), cli::kOk);
    const std::string first = out_.str();
    ASSERT_EQ(run({"gen", "--seed", "5", "--truth", path("t2.json")}), cli::kOk);
    EXPECT_EQ(out_.str(), first);
    EXPECT_EQ(read_text_file(path("t1.json")), read_text_file(path("t2.json")));

    const std::vector<std::string> cmp = {"compare", "--m", "30", "--n", "4", "--k", "2", "--outliers", "3",
                                          "--grid-points", "5", "--seed", "2"};
    auto a = cmp, b = cmp;
    a.insert(a.end(), {"--csv", path("a.csv")});
    b.insert(b.end(), {"--csv", path("b.csv"), "--threads", "3"});
    ASSERT_EQ(run(a), cli::kOk) << err_.str();
    const std::string table = out_.str();
    ASSERT_EQ(run(b), cli::kOk);
    EXPECT_EQ(out_.str(), table);
    EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
    EXPECT_NE(table.find("lasso-cv"), std::string::npos);
}

TEST_F(CliTest, ExportWritesReadableLp)
{
    ASSERT_EQ(run({"gen", "--m", "10", "--n", "2", "--k", "1", "--outliers", "1", "--seed", "4", "--out",
                   path("d.csv")}),
              cli::kOk);
    ASSERT_EQ(run({"export", "--data", path("d.csv"), "--delta", "0.144", "--c", "0.1", "--out", path("m.lp")}),
              cli::kOk)
        << err_.str();
    const auto model = read_lp_format(read_text_file(path("m.lp")));
    EXPECT_EQ(model.rows.size(), 21u);
    EXPECT_EQ(model.binaries.size(), 10u);
}

TEST_F(CliTest, ExitCodes)
{
    EXPECT_EQ(run({}), cli::kUsage);
    EXPECT_EQ(run({"bogus"}), cli::kUsage);
    EXPECT_EQ(run({"gen", "--no-such-flag"}), cli::kUsage);
    EXPECT_EQ(run({"fit", "--data", path("missing.csv"), "--delta", "0", "--c", "0", "--out", path("m.json")}),
              cli::kUsage);
    EXPECT_EQ(run({"fit", "--data", path("x.csv"), "--delta", "-1", "--c", "0", "--out", path("m.json")}),
              cli::kUsage);

    write_text_file(path("bad.csv"), "x,y\n1,0\n1,1\n");
    EXPECT_EQ(run({"fit", "--data", path("bad.csv"), "--delta", "0.2", "--c", "0", "--out", path("m.json")}),
              cli::kInfeasible);
    EXPECT_FALSE(fs::exists(path("m.json")));
    EXPECT_EQ(run({"export", "--data", path("bad.csv"), "--delta", "0.2", "--c", "0"}), cli::kInfeasible);

    write_text_file(path("abc.csv"), "x,y\n1,0\nabc,1\n");
    EXPECT_EQ(run({"fit", "--data", path("abc.csv"), "--delta", "0.2", "--c", "0", "--out", path("m.json")}),
              cli::kUsage);
    EXPECT_NE(err_.str().find("row 2"), std::string::npos) << err_.str();
}

TEST_F(CliTest, OracleCheckRefusesLargeData)
{
    ASSERT_EQ(run({"gen", "--m", "20", "--n", "2", "--k", "1", "--outliers", "1", "--seed", "4", "--out",
                   path("d.csv")}),
              cli::kOk);
    EXPECT_EQ(run({"fit", "--data", path("d.csv"), "--delta", "0.144", "--c", "0.1", "--oracle-check", "--out",
                   path("m.json")}),
              cli::kUsage);
}

TEST(ModelFile, RoundTripAndErrors)
{
    ModelFile f;
    f.model.weights = Eigen::Vector3d(0.1, -1.0 / 3.0, 6.02214076e23);
    f.model.intercept = -0.0;
    f.model.config_echo.delta = 0.144;
    f.model.config_echo.c = 0.1;
    f.model.standardizer = Standardizer{Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(0.5, 1, 2)};
    f.feature_names = {"a", "b", "c"};
    f.solver.status = "ProvenOptimal";
    f.solver.outlier_indices = {4, 9};
    const auto back = parse_model(dump_model(f));
    EXPECT_TRUE(back.model.weights == f.model.weights);
    EXPECT_TRUE(back.model.standardizer->means == f.model.standardizer->means);
    EXPECT_EQ(back.solver.outlier_indices, f.solver.outlier_indices);
    EXPECT_EQ(back.model.config_echo.delta, 0.144);

    EXPECT_THROW(parse_model("{"), ModelFileError);
    EXPECT_THROW(parse_model(R"({"schema_version": 2})"), ModelFileError);
    EXPECT_THROW(parse_model(R"({"schema_version": 1, "weights": [1, 2], "intercept": 0, "delta": 0, "c": 0,
                                 "feature_names": ["a"]})"),
                 ModelFileError);
    EXPECT_THROW(parse_model(R"({"schema_version": 1, "weights": [1], "intercept": 0, "delta": 0, "c": 0,
                                 "feature_names": ["a"], "standardizer": {"means": [0], "scales": [0]}})"),
                 ModelFileError);
}
