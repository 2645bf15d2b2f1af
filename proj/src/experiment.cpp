#include "ipbm/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ipbm {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v)
{
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    return out;
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in)
{
    const std::string key = trim(key_in);
    const std::string v = trim(value_in);
    try {
        if (key == "domain") {
            domain = v;
        } else if (key == "solution") {
            solution = v;
        } else if (key == "operator") {
            op = v;
        } else if (key == "method") {
            solver.method = parse_method(v);
        } else if (key == "space") {
            solver.space = parse_space_kind(v);
        } else if (key == "d") {
            const int d = parse_int(key, v);
            solver.degrees = {d, d, d};
        } else if (key == "dx") {
            solver.degrees[0] = parse_int(key, v);
        } else if (key == "dy") {
            solver.degrees[1] = parse_int(key, v);
        } else if (key == "dz") {
            solver.degrees[2] = parse_int(key, v);
        } else if (key == "m_list") {
            m_list = parse_int_list(key, v);
        } else if (key == "nb") {
            solver.nb = parse_int(key, v);
        } else if (key == "lambda") {
            solver.lambda = parse_double(key, v);
        } else if (key == "lambda_s") {
            solver.lambda_s = parse_double(key, v);
        } else if (key == "m_c") {
            solver.m_c = parse_int(key, v);
        } else if (key == "d_c") {
            solver.d_c = parse_int(key, v);
        } else if (key == "seed") {
            solver.seed = static_cast<std::uint64_t>(std::stoull(v));
        } else if (key == "eval_grid") {
            eval_grid = parse_int(key, v);
        } else if (key == "eval_boundary") {
            eval_boundary = parse_int(key, v);
        } else if (key == "box_quad") {
            solver.box_quad_points = parse_int(key, v);
        } else if (key == "tet_quad") {
            solver.tet_quad_degree = parse_int(key, v);
        } else if (key == "solve_path") {
            if (v == "auto") {
                solve_path = SolvePath::automatic;
            } else if (v == "dense") {
                solve_path = SolvePath::dense;
            } else if (v == "iterative") {
                solve_path = SolvePath::iterative;
            } else {
                throw ConfigError("key 'solve_path': expected auto, dense or iterative, got '" + v + "'");
            }
        } else if (key == "dump_system") {
            dump_system = v;
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source)
{
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        }
        try {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
}

void ExperimentConfig::validate() const
{
    try {
        solver.validate();
        make_preset(solution, op);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (m_list.empty()) throw ConfigError("m_list is empty");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 2) throw ConfigError("m_list entries must be >= 2");
        if (i > 0 && m_list[i] <= m_list[i - 1]) throw ConfigError("m_list must be strictly increasing");
    }
    if (eval_grid < 2) throw ConfigError("eval_grid must be >= 2");
    if (eval_boundary < 0) throw ConfigError("eval_boundary must be >= 0");
    if (domain != "sphere" && domain != "torus" && domain.rfind("stl:", 0) != 0) {
        throw ConfigError("domain must be sphere, torus or stl:<path>, got '" + domain + "'");
    }
}

std::string ExperimentConfig::echo() const
{
    std::ostringstream os;
    std::string ms;
    for (int m : m_list) ms += (ms.empty() ? "" : ",") + std::to_string(m);
    os << "domain = " << domain << '\n'
       << "solution = " << solution << '\n'
       << "operator = " << op << '\n'
       << "method = " << to_string(solver.method) << '\n'
       << "space = " << to_string(solver.space) << '\n'
       << "dx = " << solver.degrees[0] << '\n'
       << "dy = " << solver.degrees[1] << '\n'
       << "dz = " << solver.degrees[2] << '\n'
       << "m_list = " << ms << '\n'
       << "nb = " << solver.nb << '\n'
       << "lambda = " << format_double(solver.lambda) << '\n'
       << "lambda_s = " << format_double(solver.lambda_s) << '\n'
       << "m_c = " << solver.m_c << '\n'
       << "d_c = " << solver.d_c << '\n'
       << "seed = " << solver.seed << '\n'
       << "eval_grid = " << eval_grid << '\n'
       << "eval_boundary = " << eval_boundary << '\n'
       << "box_quad = " << solver.box_quad_points << '\n'
       << "tet_quad = " << solver.tet_quad_degree << '\n'
       << "solve_path = "
       << (solve_path == SolvePath::automatic ? "auto" : solve_path == SolvePath::dense ? "dense" : "iterative")
       << '\n';
    if (!dump_system.empty()) os << "dump_system = " << dump_system << '\n';
    return os.str();
}

Domain load_domain(const std::string& spec)
{
    if (spec == "sphere") return Domain::unit_sphere();
    if (spec == "torus") return Domain::from_mesh(make_torus_mesh(Point3::Zero(), 1.0, 0.4, 96, 48));
    if (spec.rfind("stl:", 0) == 0) {
        const std::string path = spec.substr(4);
        if (!std::filesystem::exists(path)) throw ConfigError("domain file not found: '" + path + "'");
        return Domain::from_mesh(load_stl(path));
    }
    throw ConfigError("unknown domain '" + spec + "'");
}

ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream* log)
{
    config.validate();
    ExperimentReport report;
    report.config = config;
    const Domain domain = load_domain(config.domain);
    if (const auto* mesh = std::get_if<TriangleMesh>(&domain.surface)) report.watertight = mesh->is_watertight();
    const BVPDefinition bvp = make_preset(config.solution, config.op);
    const std::uint64_t seed = config.solver.seed;

    const PointSet B = boundary_points(domain, static_cast<std::size_t>(config.solver.nb), seed);
    const PointSet eval = evaluation_points(domain, config.eval_grid, static_cast<std::size_t>(config.eval_boundary), seed);
    report.eval_count = eval.size();
    report.boundary_count = B.size();
    report.ellipticity = to_string(classify_ellipticity(bvp.op, eval.points).classification);
    if (log) {
        *log << "domain " << config.domain << ": " << B.size() << " boundary points, " << eval.size()
             << " evaluation points" << (report.watertight ? "" : " (surface not watertight)") << '\n';
    }

    SolveOptions options;
    options.path = config.solve_path;
    for (int m : config.m_list) {
        SolverConfig sc = config.solver;
        sc.m = m;
        const auto t0 = Clock::now();
        const SplineSpace space = build_space(domain.bbox, sc);
        const LinearSystem sys = sc.method == Method::ipbf
                                     ? assemble_ipbf(space, bvp, B, sc)
                                     : assemble_ipbc(space, bvp, collocation_points(space, sc), B, sc);
        ExperimentRow row;
        row.m = m;
        row.setup_seconds = seconds_since(t0);
        if (!config.dump_system.empty()) {
            std::ofstream dump(config.dump_system + "_m" + std::to_string(m) + ".txt");
            if (!dump) throw Error("cannot write system dump for m = " + std::to_string(m));
            write_system_triplets(sys, dump);
        }
        const SolveResult res = solve_least_squares(sys, options);
        row.solve_seconds = res.solve_seconds;
        row.nc = space_dimension(space);
        row.rows = sys.rows();
        row.condition = res.gram_condition;
        row.condition_exact = res.condition_exact;
        row.rank_deficient = res.rank_deficient;
        row.converged = res.converged;
        row.path = res.path;
        row.residual = res.residual_norm;
        row.errors = evaluate_errors(space, res.c, bvp.u.value, eval);
        if (log) {
            *log << "m = " << m << ": nc " << row.nc << ", rows " << row.rows << ", emax " << row.errors.emax
                 << ", rms " << row.errors.rms << (row.rank_deficient ? " (rank-deficient)" : "")
                 << (row.converged ? "" : " (not converged)") << '\n';
        }
        report.rows.push_back(row);
    }
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        report.rates.push_back({a.m, b.m, convergence_rate(a.errors.emax, b.errors.emax, a.m, b.m),
                                convergence_rate(a.errors.rms, b.errors.rms, a.m, b.m)});
    }
    return report;
}

namespace {

std::string sci(double v, int precision = 2)
{
    std::ostringstream os;
    os << std::scientific << std::setprecision(precision) << v;
    return os.str();
}

std::string condition_text(const ExperimentRow& row)
{
    if (row.rank_deficient || std::isinf(row.condition)) return "Inf";
    if (std::isnan(row.condition)) return "-";
    return (row.condition_exact ? "" : "~") + sci(row.condition);
}

std::string rate_text(const std::optional<double>& r)
{
    if (!r) return "exact";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << *r;
    return os.str();
}

}  // namespace

void write_report_text(const ExperimentReport& report, std::ostream& out, bool include_timing)
{
    const auto& c = report.config;
    out << "domain " << c.domain << ", solution " << c.solution << ", operator " << c.op << " (" << report.ellipticity
        << ")\n";
    out << to_string(c.solver.method) << ", " << to_string(c.solver.space) << " splines, degrees (" << c.solver.degrees[0]
        << "," << c.solver.degrees[1] << "," << c.solver.degrees[2] << "), nb " << report.boundary_count << ", lambda "
        << c.solver.lambda;
    if (c.solver.space == SpaceKind::type5) out << ", lambda_s " << c.solver.lambda_s;
    if (c.solver.method == Method::ipbc) {
        if (c.solver.space == SpaceKind::type5) {
            out << ", d_c " << c.solver.d_c;
        } else {
            out << ", m_c " << c.solver.m_c;
        }
    }
    out << "\nerrors on " << report.eval_count << " points, seed " << c.solver.seed
        << (report.watertight ? "" : ", surface not watertight") << "\n\n";

    out << std::setw(4) << "m";
    if (include_timing) out << std::setw(9) << "setup" << std::setw(9) << "solve";
    out << std::setw(8) << "nc" << std::setw(11) << "CN" << std::setw(11) << "emax" << std::setw(11) << "rms" << '\n';
    bool any_estimate = false;
    bool any_unconverged = false;
    for (const auto& row : report.rows) {
        out << std::setw(4) << row.m;
        if (include_timing) {
            out << std::fixed << std::setprecision(2) << std::setw(9) << row.setup_seconds << std::setw(9)
                << row.solve_seconds;
            out.unsetf(std::ios::floatfield);
        }
        out << std::setw(8) << row.nc << std::setw(11) << condition_text(row) << std::setw(11) << sci(row.errors.emax)
            << std::setw(11) << sci(row.errors.rms) << (row.converged ? "" : "  *") << '\n';
        any_estimate = any_estimate || (!row.condition_exact && !row.rank_deficient);
        any_unconverged = any_unconverged || !row.converged;
    }
    if (any_estimate) out << "~ condition number estimated by power iteration\n";
    if (any_unconverged) out << "* iterative solve stopped before reaching its tolerance\n";
    if (!report.rates.empty()) {
        out << '\n' << std::setw(9) << "m" << std::setw(10) << "max-rate" << std::setw(10) << "rms-rate" << '\n';
        for (const auto& r : report.rates) {
            const std::string mm = std::to_string(r.m_coarse) + "->" + std::to_string(r.m_fine);
            out << std::setw(9) << mm << std::setw(10) << rate_text(r.max_rate) << std::setw(10) << rate_text(r.rms_rate)
                << '\n';
        }
    }
}

void write_report_csv(const ExperimentReport& report, std::ostream& out, bool include_timing)
{
    out << "m,";
    if (include_timing) out << "setup_s,solve_s,";
    out << "nc,rows,cn,cn_exact,rank_deficient,converged,path,residual,emax,rms,max_rate,rms_rate,eval_points\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        out << row.m << ',';
        if (include_timing) out << row.setup_seconds << ',' << row.solve_seconds << ',';
        out << row.nc << ',' << row.rows << ',' << std::setprecision(6)
            << (row.rank_deficient ? std::numeric_limits<double>::infinity() : row.condition) << ','
            << (row.condition_exact ? 1 : 0) << ',' << (row.rank_deficient ? 1 : 0) << ',' << (row.converged ? 1 : 0)
            << ',' << to_string(row.path) << ',' << row.residual << ',' << row.errors.emax << ',' << row.errors.rms << ',';
        if (i > 0) {
            const auto& r = report.rates[i - 1];
            out << rate_text(r.max_rate) << ',' << rate_text(r.rms_rate);
        } else {
            out << ',';
        }
        out << ',' << report.eval_count << '\n';
    }
}

void write_report_files(const ExperimentReport& report, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    std::ofstream txt(base / "report.txt");
    std::ofstream csv(base / "report.csv");
    std::ofstream echo(base / "config.echo");
    if (!txt || !csv || !echo) throw Error("cannot write report files into '" + dir + "'");
    write_report_text(report, txt);
    write_report_csv(report, csv);
    echo << report.config.echo();
}

PatchTestResult patch_test(const ExperimentConfig& config, double tolerance, std::ostream* log)
{
    PatchTestResult result;
    result.tolerance = tolerance;
    result.report = run_experiment(config, log);
    for (const auto& row : result.report.rows) result.emax = std::max(result.emax, row.errors.emax);
    result.pass = result.emax <= tolerance;
    return result;
}

}  // namespace ipbm
