// ipbm: run immersed penalized boundary experiments from config files.
//
//   ipbm run <config> [-o DIR] [--set key=value ...]
//   ipbm patch-test [--space tensor-product|type5] [--degrees 1,2,3] [--operator laplace] ...
//   ipbm sweep <config>... [-o DIR]
//
// Exit codes: 0 success, 1 failed patch test, 2 configuration error, 3 runtime error.

#include "ipbm/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitPatchFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void apply_overrides(ipbm::ExperimentConfig& cfg, const std::vector<std::string>& sets)
{
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ipbm::ConfigError("override '" + s + "' is not key=value");
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

int run_one(const std::string& config_path, const std::string& out_dir, const std::vector<std::string>& sets, bool quiet)
{
    auto cfg = ipbm::ExperimentConfig::load(config_path);
    apply_overrides(cfg, sets);
    const auto report = ipbm::run_experiment(cfg, quiet ? nullptr : &std::cerr);
    ipbm::write_report_files(report, out_dir);
    ipbm::write_report_text(report, std::cout);
    std::cout << "reports written to " << out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Immersed penalized boundary methods for elliptic boundary value problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the m-sweep described by a config file");
    run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out_dir, "Output directory (default: out/<config name>)");
    run->add_option("--set", sets, "Override a config key, e.g. --set m_list=5,6");
    run->add_flag("-q,--quiet", quiet, "No progress lines on stderr");

    std::string space = "tensor-product";
    std::string degrees = "1,2,3";
    std::string op = "laplace";
    std::string solution;
    std::string method = "IPBF";
    std::string m_list;
    double tolerance = 1e-9;
    auto* patch = app.add_subcommand("patch-test", "Check that a reproducible solution is recovered exactly");
    patch->add_option("--space", space, "tensor-product or type5")->capture_default_str();
    patch->add_option("--degrees", degrees, "dx,dy,dz (or a single d)")->capture_default_str();
    patch->add_option("--operator", op, "Operator preset")->capture_default_str();
    patch->add_option("--solution", solution, "Solution preset (default: mono123, or quintic for type5)");
    patch->add_option("--method", method, "IPBF or IPBC")->capture_default_str();
    patch->add_option("--m", m_list, "Grid sizes (default: 5,6; 4 for type5)");
    patch->add_option("--tolerance", tolerance, "Pass threshold on emax")->capture_default_str();
    patch->add_option("-o,--output", out_dir, "Also write report files here");
    patch->add_option("--set", sets, "Override any other config key");
    patch->add_flag("-q,--quiet", quiet, "No progress lines on stderr");

    std::vector<std::string> configs;
    auto* sweep = app.add_subcommand("sweep", "Run several configs; one output directory each");
    sweep->add_option("configs", configs, "Config files")->required()->check(CLI::ExistingFile);
    sweep->add_option("-o,--output", out_dir, "Parent output directory (default: out)");
    sweep->add_option("--set", sets, "Override applied to every config");
    sweep->add_flag("-q,--quiet", quiet, "No progress lines on stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return run_one(config_path, out_dir.empty() ? "out/" + stem_of(config_path) : out_dir, sets, quiet);
        }
        if (sweep->parsed()) {
            const std::string parent = out_dir.empty() ? "out" : out_dir;
            for (const auto& c : configs) {
                std::cout << "== " << c << '\n';
                run_one(c, (std::filesystem::path(parent) / stem_of(c)).string(), sets, quiet);
            }
            return 0;
        }
        if (patch->parsed()) {
            ipbm::ExperimentConfig cfg;
            cfg.set("space", space);
            cfg.set("method", method);
            cfg.set("operator", op);
            if (degrees.find(',') == std::string::npos) {
                cfg.set("d", degrees);
            } else {
                std::stringstream ss(degrees);
                std::string item;
                const char* keys[] = {"dx", "dy", "dz"};
                int k = 0;
                while (std::getline(ss, item, ',')) {
                    if (k == 3) throw ipbm::ConfigError("--degrees takes at most three values");
                    cfg.set(keys[k++], item);
                }
                if (k != 3) throw ipbm::ConfigError("--degrees takes one or three values");
            }
            const bool type5 = cfg.solver.space == ipbm::SpaceKind::type5;
            cfg.set("solution", solution.empty() ? (type5 ? "quintic" : "mono123") : solution);
            cfg.set("m_list", m_list.empty() ? (type5 ? "4" : "5,6") : m_list);
            apply_overrides(cfg, sets);
            const auto result = ipbm::patch_test(cfg, tolerance, quiet ? nullptr : &std::cerr);
            if (!out_dir.empty()) ipbm::write_report_files(result.report, out_dir);
            ipbm::write_report_text(result.report, std::cout);
            std::cout << "patch test " << (result.pass ? "PASS" : "FAIL") << ": emax " << result.emax
                      << (result.pass ? " <= " : " > ") << result.tolerance << '\n';
            return result.pass ? 0 : kExitPatchFailed;
        }
    } catch (const ipbm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ipbm::InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
