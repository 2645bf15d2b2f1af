#include "ipbm/experiment.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ipbm;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config()
{
    std::istringstream in(R"(# small sweep
domain = sphere
solution = sin5
operator = laplace
method = IPBF
space = tensor-product
d = 2
m_list = 3,4
nb = 100
eval_grid = 8
eval_boundary = 100
)");
    return ExperimentConfig::parse(in);
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("ipbm_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& dir)
{
    const std::string cmd = std::string(IPBM_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, ParsesKeysAndComments)
{
    const auto cfg = small_config();
    EXPECT_EQ(cfg.solver.degrees, (std::array<int, 3>{2, 2, 2}));
    EXPECT_EQ(cfg.m_list, (std::vector<int>{3, 4}));
    EXPECT_EQ(cfg.solver.nb, 100);
    EXPECT_EQ(cfg.solver.method, Method::ipbf);
    EXPECT_EQ(cfg.solver.space, SpaceKind::tensor_product);
    EXPECT_EQ(cfg.eval_grid, 8);
}

TEST(Config, ErrorsCarryLineNumbers)
{
    std::istringstream bad_line("domain = sphere\n\nthis has no equals sign\n");
    try {
        ExperimentConfig::parse(bad_line, "x.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("x.cfg:3"), std::string::npos) << e.what();
    }
    std::istringstream bad_key("m_list = 5\nfrobnicate = 1\n");
    try {
        ExperimentConfig::parse(bad_key, "y.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("y.cfg:2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("frobnicate"), std::string::npos);
    }
    std::istringstream bad_num("nb = lots\n");
    EXPECT_THROW(ExperimentConfig::parse(bad_num), ConfigError);
    std::istringstream bad_order("m_list = 6,5\n");
    EXPECT_THROW(ExperimentConfig::parse(bad_order).validate(), ConfigError);
    EXPECT_THROW(ExperimentConfig::load("/nonexistent/file.cfg"), ConfigError);
    EXPECT_THROW(load_domain("stl:/nonexistent.stl"), ConfigError);
}

TEST(Config, EchoRoundTrip)
{
    auto cfg = small_config();
    cfg.set("lambda", "0.5");
    cfg.set("dz", "3");
    cfg.set("solve_path", "dense");
    std::istringstream in(cfg.echo());
    const auto back = ExperimentConfig::parse(in);
    EXPECT_EQ(back.echo(), cfg.echo());
    EXPECT_EQ(back.solver.lambda, 0.5);
    EXPECT_EQ(back.solver.degrees[2], 3);
    EXPECT_EQ(back.solve_path, SolvePath::dense);
}

TEST(Experiment, ReportShapeAndDeterminism)
{
    const auto cfg = small_config();
    const auto a = run_experiment(cfg);
    ASSERT_EQ(a.rows.size(), 2u);
    EXPECT_EQ(a.rates.size(), 1u);
    EXPECT_LT(a.rows[0].m, a.rows[1].m);
    EXPECT_EQ(a.rows[0].nc, 64);  // (m - 1 + d)^3
    EXPECT_GT(a.eval_count, 100u);
    for (const auto& r : a.rows) EXPECT_LE(r.errors.rms, r.errors.emax);
    EXPECT_EQ(a.ellipticity, "elliptic");

    const auto b = run_experiment(cfg);
    std::ostringstream ta, tb, ca, cb;
    write_report_text(a, ta, false);
    write_report_text(b, tb, false);
    write_report_csv(a, ca, false);
    write_report_csv(b, cb, false);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_EQ(ca.str(), cb.str());
}

TEST(Experiment, ReportFiles)
{
    const auto dir = scratch_dir("files");
    const auto report = run_experiment(small_config());
    write_report_files(report, (dir / "out").string());
    EXPECT_TRUE(fs::exists(dir / "out" / "report.txt"));
    EXPECT_TRUE(fs::exists(dir / "out" / "report.csv"));
    ASSERT_TRUE(fs::exists(dir / "out" / "config.echo"));
    std::istringstream echo(slurp(dir / "out" / "config.echo"));
    EXPECT_EQ(ExperimentConfig::parse(echo).echo(), report.config.echo());
    const auto csv = slurp(dir / "out" / "report.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);  // header + one line per m
}

TEST(PatchTest, Outcomes)
{
    auto cfg = small_config();
    cfg.set("dx", "1");
    cfg.set("dy", "2");
    cfg.set("dz", "3");
    cfg.set("solution", "mono123");
    cfg.set("m_list", "5");
    EXPECT_TRUE(patch_test(cfg).pass);

    cfg.set("d", "1");
    cfg.set("solution", "quintic");
    const auto fail = patch_test(cfg);
    EXPECT_FALSE(fail.pass);
    EXPECT_GT(fail.emax, 1e-3);

    auto t5 = small_config();
    t5.set("space", "type5");
    t5.set("d", "5");
    t5.set("solution", "quintic");
    t5.set("m_list", "3");
    EXPECT_TRUE(patch_test(t5).pass);
}

TEST(Cli, ExitCodes)
{
    const auto dir = scratch_dir("cli");
    {
        std::ofstream cfg(dir / "ok.cfg");
        cfg << "solution = sin5\nd = 2\nm_list = 3\nnb = 50\neval_grid = 6\neval_boundary = 50\n";
        std::ofstream bad(dir / "bad.cfg");
        bad << "d = 2\nnonsense key = 3\n";
    }
    EXPECT_EQ(run_cli("run " + (dir / "ok.cfg").string() + " -q -o " + (dir / "run").string(), dir), 0);
    EXPECT_TRUE(fs::exists(dir / "run" / "report.txt"));
    EXPECT_NE(slurp(dir / "stdout.txt").find("rms"), std::string::npos);

    EXPECT_EQ(run_cli("run " + (dir / "bad.cfg").string() + " -q", dir), 2);
    EXPECT_NE(slurp(dir / "stderr.txt").find("bad.cfg:2"), std::string::npos);

    EXPECT_NE(run_cli("run " + (dir / "missing.cfg").string(), dir), 0);

    EXPECT_EQ(run_cli("patch-test -q --degrees 1,2,3 --m 5 --set nb=200 --set eval_grid=10", dir), 0);
    EXPECT_NE(slurp(dir / "stdout.txt").find("patch test PASS"), std::string::npos);
    EXPECT_EQ(run_cli("patch-test -q --degrees 1,1,1 --solution quintic --m 4 --set eval_grid=8", dir), 1);
    EXPECT_EQ(run_cli("patch-test -q --degrees 1,2 --m 4", dir), 2);

    EXPECT_EQ(run_cli("sweep -q " + (dir / "ok.cfg").string() + " -o " + (dir / "sweep").string(), dir), 0);
    EXPECT_TRUE(fs::exists(dir / "sweep" / "ok" / "report.csv"));
}
