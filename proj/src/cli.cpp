#include "dpoint/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpoint/obj_io.hpp"
#include "dpoint/pipeline.hpp"

namespace dpoint {

namespace {

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot open '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("config: expected key=value at line " +
                                         std::to_string(line_no));
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "runs") cfg.runs = std::stoi(value);
        else if (key == "min_votes") cfg.min_votes = std::stoi(value);
        else if (key == "n_ring") cfg.n_ring = std::stoi(value);
        else if (key == "e_th") cfg.e_th = std::stod(value);
        else if (key == "nv_thres") cfg.nv_thres = std::stoi(value);
        else if (key == "region_n") cfg.region_n = std::stoi(value);
        else if (key == "tol") cfg.optimizer.tol = std::stod(value);
        else if (key == "max_iters") cfg.optimizer.max_iters = std::stoi(value);
        else if (key == "ls_shrink") cfg.optimizer.ls_shrink = std::stod(value);
        else if (key == "ls_max_steps") cfg.optimizer.ls_max_steps = std::stoi(value);
        else if (key == "simplify") cfg.simplify = (value == "1" || value == "true");
        else if (key == "rho") cfg.rho = std::stod(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

DistortionPointSet load_points_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("points: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    DistortionPointSet points;
    for (const auto& p : j.at("points"))
        points.points.push_back({p.at("vertex").get<int>(), p.at("votes").get<int>()});
    return points;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct CliOptions {
    std::string mesh_path;
    std::string points_path;
    std::string output;
    std::string report_path;
    std::string obj_path;
    std::string distortion_path;
    bool no_timings = false;
    PipelineConfig cfg;
};

void add_config_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("mesh", opt.mesh_path, "input OBJ mesh")->required();
    cmd->add_option("--seed", opt.cfg.seed, "random seed")->capture_default_str();
    cmd->add_option("--runs", opt.cfg.runs, "candidate generation runs (R)")
        ->capture_default_str();
    cmd->add_option("--min-votes", opt.cfg.min_votes, "vote threshold")->capture_default_str();
    cmd->add_option("--n-ring", opt.cfg.n_ring, "post-filter ring radius")
        ->capture_default_str();
    cmd->add_option("--e-th", opt.cfg.e_th, "first-iteration distortion threshold")
        ->capture_default_str();
    cmd->add_option("--nv-thres", opt.cfg.nv_thres, "simplification vertex cap")
        ->capture_default_str();
    cmd->add_option("--region-n", [&opt](const CLI::results_t& res) {
        opt.cfg.region_n = std::stoi(res[0]);
        return true;
    }, "override the region-size threshold N");
    cmd->add_option("--tol", opt.cfg.optimizer.tol, "optimizer energy tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iters", opt.cfg.optimizer.max_iters, "optimizer iteration cap")
        ->capture_default_str();
    cmd->add_option("--ls-shrink", opt.cfg.optimizer.ls_shrink, "line-search shrink factor")
        ->capture_default_str();
    cmd->add_option("--ls-max-steps", opt.cfg.optimizer.ls_max_steps, "line-search step cap")
        ->capture_default_str();
    cmd->add_flag("--no-simplify", [&opt](std::int64_t) { opt.cfg.simplify = false; },
                  "disable QEM simplification before detection");
    cmd->add_option("--rho", opt.cfg.rho, "handle-loop weight perturbation")
        ->capture_default_str();
    cmd->add_option("--threads", opt.cfg.threads, "run concurrency (0 = all)")
        ->capture_default_str();
}

void print_error(const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    std::cerr << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"distortion point detection and low-distortion planar parameterization"};
    app.require_subcommand(1);

    // --config is resolved before CLI11 parsing so flags override file values
    PipelineConfig base_cfg;
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") {
                apply_config_file(base_cfg, argv[i + 1]);
            }
        }
    } catch (const std::exception& e) {
        print_error(e.what());
        return 1;
    }

    CliOptions detect_opt, cut_opt, param_opt, pipe_opt;
    detect_opt.cfg = cut_opt.cfg = param_opt.cfg = pipe_opt.cfg = base_cfg;
    std::string config_dummy;

    CLI::App* detect_cmd = app.add_subcommand("detect", "detect distortion points");
    add_config_flags(detect_cmd, detect_opt);
    detect_cmd->add_option("--config", config_dummy, "config file (key=value)");
    detect_cmd->add_option("-o,--output", detect_opt.output, "points JSON path")->required();

    CLI::App* cut_cmd = app.add_subcommand("cut", "build the MST cut through given points");
    add_config_flags(cut_cmd, cut_opt);
    cut_cmd->add_option("--config", config_dummy, "config file (key=value)");
    cut_cmd->add_option("--points", cut_opt.points_path, "points JSON from `detect`")->required();
    cut_cmd->add_option("-o,--output", cut_opt.output, "cut JSON path")->required();
    cut_cmd->add_option("--obj", cut_opt.obj_path, "also write the cut-open mesh as OBJ");

    CLI::App* param_cmd =
        app.add_subcommand("param", "final low-distortion parameterization through points");
    add_config_flags(param_cmd, param_opt);
    param_cmd->add_option("--config", config_dummy, "config file (key=value)");
    param_cmd->add_option("--points", param_opt.points_path, "points JSON from `detect`")
        ->required();
    param_cmd->add_option("-o,--output", param_opt.output, "UV OBJ path")->required();
    param_cmd->add_option("--report", param_opt.report_path, "report JSON path")->required();
    param_cmd->add_flag("--no-timings", param_opt.no_timings, "omit timings from the report");
    param_cmd->add_option("--dump-distortion", param_opt.distortion_path,
                          "write per-triangle E_iso values (one per line)");

    CLI::App* pipe_cmd = app.add_subcommand("pipeline", "detect + cut + param in one go");
    add_config_flags(pipe_cmd, pipe_opt);
    pipe_cmd->add_option("--config", config_dummy, "config file (key=value)");
    pipe_cmd->add_option("-o,--output", pipe_opt.output,
                         "output prefix (<prefix>.points.json, <prefix>.uv.obj, "
                         "<prefix>.report.json)")
        ->required();
    pipe_cmd->add_flag("--no-timings", pipe_opt.no_timings, "omit timings from the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            return app.exit(e);
        }
        std::cerr << app.help() << "\n";
        print_error(e.what());
        return 1;
    }

    try {
        if (detect_cmd->parsed()) {
            const TriMesh mesh = load_obj(detect_opt.mesh_path);
            const DetectResult result = detect_points(mesh, detect_opt.cfg);
            write_file(detect_opt.output,
                       points_to_json(result.points, mesh, detect_opt.cfg, result.simplified));
        } else if (cut_cmd->parsed()) {
            const TriMesh mesh = load_obj(cut_opt.mesh_path);
            const DistortionPointSet points = load_points_json(cut_opt.points_path);
            const auto paths = mst_cut(mesh, points, cut_opt.cfg.seed);
            nlohmann::ordered_json j;
            j["paths"] = nlohmann::ordered_json::array();
            for (const auto& p : paths)
                j["paths"].push_back({{"closed", p.closed}, {"vertices", p.vertices}});
            write_file(cut_opt.output, j.dump(2) + "\n");
            if (!cut_opt.obj_path.empty()) {
                std::set<std::pair<int, int>> edges;
                for (const auto& p : paths) {
                    const int ne = p.num_edges();
                    for (int i = 0; i < ne; ++i) {
                        const int a = p.vertices[i];
                        const int b = p.vertices[(i + 1) % p.vertices.size()];
                        edges.emplace(std::min(a, b), std::max(a, b));
                    }
                }
                save_obj(cut_along_edges(mesh, {edges.begin(), edges.end()}), std::nullopt,
                         cut_opt.obj_path);
            }
        } else if (param_cmd->parsed()) {
            const TriMesh mesh = load_obj(param_opt.mesh_path);
            const DistortionPointSet points = load_points_json(param_opt.points_path);
            const auto paths = mst_cut(mesh, points, param_opt.cfg.seed);
            const FinalParam fp = final_parameterize(mesh, paths, param_opt.cfg);
            save_obj(fp.disk, fp.uv, param_opt.output);
            write_file(param_opt.report_path,
                       report_to_json(fp.report, !param_opt.no_timings));
            if (!param_opt.distortion_path.empty()) {
                std::ostringstream ss;
                for (double e : fp.report.per_triangle) ss << e << "\n";
                write_file(param_opt.distortion_path, ss.str());
            }
        } else if (pipe_cmd->parsed()) {
            const TriMesh mesh = load_obj(pipe_opt.mesh_path);
            const DetectResult result = detect_points(mesh, pipe_opt.cfg);
            write_file(pipe_opt.output + ".points.json",
                       points_to_json(result.points, mesh, pipe_opt.cfg, result.simplified));
            const auto paths = mst_cut(mesh, result.points, pipe_opt.cfg.seed);
            const FinalParam fp = final_parameterize(mesh, paths, pipe_opt.cfg);
            save_obj(fp.disk, fp.uv, pipe_opt.output + ".uv.obj");
            write_file(pipe_opt.output + ".report.json",
                       report_to_json(fp.report, !pipe_opt.no_timings));
        }
    } catch (const std::exception& e) {
        print_error(e.what());
        const std::string what = e.what();
        const bool input_error = what.find("obj:") == 0 || what.find("points:") == 0 ||
                                 what.find("config:") == 0 || what.find("topology:") == 0;
        return input_error ? 1 : 2;
    }
    return 0;
}

}  // namespace dpoint
