#include "porofrac/postio.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

namespace porofrac {

namespace {

std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void export_vtk(const Mesh& mesh, const FieldState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write VTK file '" + path + "'");
    const int n = mesh.num_nodes(), m = mesh.num_elements(), dim = mesh.dim();
    out << "# vtk DataFile Version 3.0\n";
    out << "porofrac snapshot t=" << g9(state.time) << " s\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << n << " double\n";
    for (int i = 0; i < n; ++i) {
        const Vec p = mesh.node(i);
        out << g9(p.x()) << " " << g9(p.y()) << " " << g9(p.z()) << "\n";
    }
    out << "CELLS " << m << " " << m * (dim + 2) << "\n";
    for (int e = 0; e < m; ++e) {
        out << dim + 1;
        for (int k = 0; k <= dim; ++k) out << " " << mesh.element(e)[k];
        out << "\n";
    }
    out << "CELL_TYPES " << m << "\n";
    for (int e = 0; e < m; ++e) out << (dim == 2 ? 5 : 10) << "\n";
    out << "POINT_DATA " << n << "\n";
    out << "VECTORS displacement double\n";
    for (int i = 0; i < n; ++i) {
        out << g9(state.u[dim * i]) << " " << g9(state.u[dim * i + 1]) << " "
            << g9(dim == 3 ? state.u[3 * i + 2] : 0.0) << "\n";
    }
    out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << g9(state.phi[i]) << "\n";
    out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < n; ++i) out << g9(state.p[i]) << "\n";
    out << "CELL_DATA " << m << "\n";
    out << "SCALARS history double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < m; ++e) out << g9(state.history[e]) << "\n";
    if (!out)
        throw IoError("failed writing VTK file '" + path + "'");
}

ProbeSeries probe(const Mesh& mesh, const std::vector<FieldState>& snapshots,
                  const std::vector<double>& times, const Vec& point, const std::string& field) {
    const int element = mesh.locate(point);
    if (element < 0)
        throw InvalidArgumentError("probe point lies outside the mesh");
    ProbeSeries series;
    series.field = field;
    series.position = point;
    Eigen::VectorXd nodal(mesh.num_nodes());
    for (size_t s = 0; s < snapshots.size(); ++s) {
        for (int i = 0; i < mesh.num_nodes(); ++i)
            nodal[i] = probe_nodal_value(mesh, snapshots[s], field, i);
        series.times.push_back(s < times.size() ? times[s] : snapshots[s].time);
        series.values.push_back(mesh.interpolate(nodal, point));
    }
    return series;
}

namespace {

double element_phi(const Mesh& mesh, const Eigen::VectorXd& phi, int e) {
    const int* conn = mesh.element(e);
    double v = 0.0;
    for (int k = 0; k <= mesh.dim(); ++k) v += phi[conn[k]];
    return v / (mesh.dim() + 1);
}

} // namespace

double fracture_extent(const Mesh& mesh, const Eigen::VectorXd& phi, double threshold,
                       const Vec& origin, const Vec& direction) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidArgumentError("fracture threshold must lie in (0, 1)");
    const double norm = direction.norm();
    if (!(norm > 0.0))
        throw InvalidArgumentError("fracture extent direction must be nonzero");
    const Vec dir = direction / norm;
    bool any = false;
    double extent = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        if (element_phi(mesh, phi, e) < threshold) continue;
        const double d = (mesh.element_centroid(e) - origin).dot(dir);
        extent = any ? std::max(extent, d) : d;
        any = true;
    }
    return any ? extent : 0.0;
}

double fractured_measure(const Mesh& mesh, const Eigen::VectorXd& phi, double threshold) {
    double total = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
        if (element_phi(mesh, phi, e) >= threshold) total += mesh.element_measure(e);
    return total;
}

std::vector<std::pair<double, double>> boundary_profile(const Mesh& mesh, const FieldState& state,
                                                        const std::string& tag,
                                                        const std::string& component) {
    const std::vector<Facet>& facets = mesh.boundary_facets(tag);
    if (mesh.dim() != 2)
        throw InvalidArgumentError("boundary profiles are defined for 2D meshes");
    // walk the edge chain from one endpoint to the other
    std::map<int, std::vector<int>> adjacency; // node -> facet indices
    for (size_t f = 0; f < facets.size(); ++f) {
        adjacency[facets[f].nodes[0]].push_back(static_cast<int>(f));
        adjacency[facets[f].nodes[1]].push_back(static_cast<int>(f));
    }
    int start = facets.empty() ? -1 : facets.front().nodes[0];
    for (const auto& [node, incident] : adjacency)
        if (incident.size() == 1) {
            start = node;
            break;
        }
    std::vector<std::pair<double, double>> curve;
    if (start < 0) return curve;
    std::vector<char> used(facets.size(), 0);
    int node = start;
    double arc = 0.0;
    curve.emplace_back(arc, probe_nodal_value(mesh, state, component, node));
    for (;;) {
        int next_facet = -1;
        for (int f : adjacency[node])
            if (!used[f]) {
                next_facet = f;
                break;
            }
        if (next_facet < 0) break;
        used[next_facet] = 1;
        const Facet& facet = facets[next_facet];
        const int other = facet.nodes[0] == node ? facet.nodes[1] : facet.nodes[0];
        arc += (mesh.node(other) - mesh.node(node)).norm();
        node = other;
        curve.emplace_back(arc, probe_nodal_value(mesh, state, component, node));
    }
    return curve;
}

// ---------------------------------------------------------------------------
// run archive

void write_state(const Mesh& mesh, const FieldState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write state file '" + path + "'");
    const int n = mesh.num_nodes(), m = mesh.num_elements(), dim = mesh.dim();
    out << "fields " << dim << " " << n << " " << m << " " << g17(state.time) << "\n";
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < dim; ++c) out << g17(state.u[dim * i + c]) << " ";
        out << g17(state.phi[i]) << " " << g17(state.p[i]) << "\n";
    }
    for (int e = 0; e < m; ++e) out << g17(state.history[e]) << "\n";
    if (!out)
        throw IoError("failed writing state file '" + path + "'");
}

FieldState read_state(const Mesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open state file '" + path + "'");
    std::string word;
    int dim = 0, n = 0, m = 0;
    double time = 0.0;
    if (!(in >> word >> dim >> n >> m >> time) || word != "fields")
        throw MalformedFileError("expected 'fields <dim> <nodes> <elements> <time>'", 1);
    if (dim != mesh.dim() || n != mesh.num_nodes() || m != mesh.num_elements())
        throw MalformedFileError("state file does not match the mesh", 1);
    FieldState state = FieldState::zero(mesh);
    state.time = time;
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < dim; ++c)
            if (!(in >> state.u[dim * i + c]))
                throw MalformedFileError("truncated nodal data", 1 + i);
        if (!(in >> state.phi[i] >> state.p[i]))
            throw MalformedFileError("truncated nodal data", 1 + i);
    }
    for (int e = 0; e < m; ++e)
        if (!(in >> state.history[e]))
            throw MalformedFileError("truncated history data", 1 + n + e);
    state.commit();
    return state;
}

namespace {

std::string probe_unit(const std::string& field) {
    if (field == "pressure" || field == "p") return "Pa";
    if (field == "phi") return "1";
    return "m";
}

std::string state_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "state_%04d.fld", index);
    return buf;
}

std::string vtk_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%04d.vtk", index);
    return buf;
}

} // namespace

void write_run_outputs(const Mesh& mesh, const ScenarioConfig& config,
                       const SimulationResult& result, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    const std::filesystem::path base(dir);

    save_config(config, (base / "config.ini").string());
    save_mesh(mesh, (base / "mesh.msh").string());

    std::ofstream index(base / "states.index");
    if (!index)
        throw IoError("cannot write state index in '" + dir + "'");
    for (size_t s = 0; s < result.snapshots.size(); ++s) {
        const std::string name = state_file_name(static_cast<int>(s));
        write_state(mesh, result.snapshots[s], (base / name).string());
        index << s << " " << g17(result.snapshot_times[s]) << " " << name << "\n";
        if (config.output.vtk)
            export_vtk(mesh, result.snapshots[s], (base / vtk_file_name(static_cast<int>(s))).string());
    }
    index.close();

    for (const ProbeSeries& series : result.probes) {
        std::ofstream csv(base / ("probe_" + series.name + ".csv"));
        if (!csv)
            throw IoError("cannot write probe csv for '" + series.name + "'");
        csv << "time [s]," << series.field << " [" << probe_unit(series.field) << "]\n";
        for (size_t i = 0; i < series.times.size(); ++i)
            csv << g17(series.times[i]) << "," << g17(series.values[i]) << "\n";
    }

    std::ofstream log(base / "convergence.csv");
    log << "time [s],u_iters,u_res0,u_res,phi_iters,phi_res,p_iters,p_res\n";
    for (const StepLog& step : result.log)
        log << g17(step.time) << "," << step.u.iterations << "," << g17(step.u.residual0) << ","
            << g17(step.u.residual) << "," << step.phi.iterations << "," << g17(step.phi.residual)
            << "," << step.p.iterations << "," << g17(step.p.residual) << "\n";
}

std::vector<StateIndexEntry> read_state_index(const std::string& dir) {
    std::ifstream in(std::filesystem::path(dir) / "states.index");
    if (!in)
        throw IoError("cannot open state index in '" + dir + "'");
    std::vector<StateIndexEntry> entries;
    StateIndexEntry e;
    while (in >> e.index >> e.time >> e.file) entries.push_back(e);
    return entries;
}

// ---------------------------------------------------------------------------
// command line

namespace {

Vec parse_vec(const std::string& text, const char* what) {
    Vec v = Vec::Zero();
    std::istringstream in(text);
    std::string part;
    int i = 0;
    while (std::getline(in, part, ',') && i < 3) {
        try {
            v[i++] = std::stod(part);
        } catch (const std::exception&) {
            throw ConfigurationError(std::string(what) + ": expected comma-separated numbers");
        }
    }
    if (i < 2)
        throw ConfigurationError(std::string(what) + ": expected at least two components");
    return v;
}

int run_command(const std::string& config_path, const std::string& preset_name,
                const std::string& out_dir, bool baseline) {
    ScenarioConfig config;
    if (!preset_name.empty() && !config_path.empty()) {
        // the file overrides the preset base
        std::ifstream in(config_path);
        if (!in)
            throw IoError("cannot open config file '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        config = parse_config_text("[preset]\nname = " + preset_name + "\n" + text.str(),
                                   config_path);
    } else if (!preset_name.empty()) {
        config = preset(preset_name);
    } else if (!config_path.empty()) {
        config = parse_config(config_path);
    } else {
        throw ConfigurationError("run: give a config file or --preset");
    }

    const Mesh mesh = build_mesh(config.mesh);
    const Simulator sim(mesh, build_problem(config, mesh, baseline), config.solver);
    std::cout << "running scenario '" << config.name << "'"
              << (baseline ? " (baseline, no initial stress)" : "") << ": "
              << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " elements, t_end = "
              << config.solver.t_end << " s\n";
    const SimulationResult result = sim.run(config.output_times(), config.probes);
    write_run_outputs(mesh, config, result, out_dir);
    std::cout << "wrote " << result.snapshots.size() << " snapshots to " << out_dir << "\n";
    if (result.failed) {
        std::cerr << "error: " << result.failure << "\n";
        return 2;
    }
    return 0;
}

int export_command(const std::string& dir, int index, bool all, std::string out_path) {
    const Mesh mesh = import_mesh((std::filesystem::path(dir) / "mesh.msh").string());
    const auto entries = read_state_index(dir);
    if (entries.empty())
        throw IoError("run directory '" + dir + "' holds no states");
    for (const StateIndexEntry& e : entries) {
        if (!all && e.index != index) continue;
        const FieldState state = read_state(mesh, (std::filesystem::path(dir) / e.file).string());
        std::string path = out_path;
        if (path.empty())
            path = (std::filesystem::path(dir) / vtk_file_name(e.index)).string();
        else if (all)
            path = out_path + "." + std::to_string(e.index) + ".vtk";
        export_vtk(mesh, state, path);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

int probe_command(const std::string& dir, const std::string& point_text, const std::string& field,
                  const std::string& out_path) {
    const Mesh mesh = import_mesh((std::filesystem::path(dir) / "mesh.msh").string());
    const Vec point = parse_vec(point_text, "--point");
    std::vector<FieldState> snapshots;
    std::vector<double> times;
    for (const StateIndexEntry& e : read_state_index(dir)) {
        snapshots.push_back(read_state(mesh, (std::filesystem::path(dir) / e.file).string()));
        times.push_back(e.time);
    }
    const ProbeSeries series = probe(mesh, snapshots, times, point, field);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file)
            throw IoError("cannot write '" + out_path + "'");
        out = &file;
    }
    *out << "time [s]," << field << " [" << probe_unit(field) << "]\n";
    for (size_t i = 0; i < series.times.size(); ++i)
        *out << g17(series.times[i]) << "," << g17(series.values[i]) << "\n";
    return 0;
}

int metrics_command(const std::string& dir, double threshold, const std::string& origin_text,
                    const std::string& direction_text, const std::string& out_path) {
    const Mesh mesh = import_mesh((std::filesystem::path(dir) / "mesh.msh").string());
    const bool with_extent = !origin_text.empty() && !direction_text.empty();
    const Vec origin = with_extent ? parse_vec(origin_text, "--origin") : Vec::Zero();
    const Vec direction = with_extent ? parse_vec(direction_text, "--direction") : Vec::Zero();
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file)
            throw IoError("cannot write '" + out_path + "'");
        out = &file;
    }
    *out << "time [s],fractured_measure [m^" << mesh.dim() << "]";
    if (with_extent) *out << ",extent [m]";
    *out << "\n";
    for (const StateIndexEntry& e : read_state_index(dir)) {
        const FieldState state = read_state(mesh, (std::filesystem::path(dir) / e.file).string());
        *out << g17(e.time) << "," << g17(fractured_measure(mesh, state.phi, threshold));
        if (with_extent)
            *out << "," << g17(fracture_extent(mesh, state.phi, threshold, origin, direction));
        *out << "\n";
    }
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"phase-field hydraulic fracture simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario");
    std::string config_path, preset_name, out_dir = "out";
    bool baseline = false;
    run->add_option("config", config_path, "scenario config file");
    run->add_option("--preset", preset_name, "built-in scenario name");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--baseline-no-sigma0", baseline,
                  "drop the initial stress from the constitutive model, keep the tractions");

    auto* exp = app.add_subcommand("export", "re-export stored snapshots to VTK");
    std::string exp_dir, exp_out;
    int exp_index = 0;
    bool exp_all = false;
    exp->add_option("dir", exp_dir, "run output directory")->required();
    exp->add_option("--index", exp_index, "snapshot index");
    exp->add_flag("--all", exp_all, "export every snapshot");
    exp->add_option("--out", exp_out, "output file");

    auto* prb = app.add_subcommand("probe", "interpolate a field at a point over time");
    std::string prb_dir, prb_point, prb_field = "pressure", prb_out;
    prb->add_option("dir", prb_dir, "run output directory")->required();
    prb->add_option("--point", prb_point, "comma-separated coordinates")->required();
    prb->add_option("--field", prb_field, "pressure | phi | ux | uy | uz");
    prb->add_option("--out", prb_out, "write CSV here instead of stdout");

    auto* met = app.add_subcommand("metrics", "fractured measure and extents per snapshot");
    std::string met_dir, met_origin, met_direction, met_out;
    double met_threshold = 0.95;
    met->add_option("dir", met_dir, "run output directory")->required();
    met->add_option("--threshold", met_threshold, "phase-field threshold");
    met->add_option("--origin", met_origin, "extent origin, comma-separated");
    met->add_option("--direction", met_direction, "extent direction, comma-separated");
    met->add_option("--out", met_out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_command(config_path, preset_name, out_dir, baseline);
        if (exp->parsed()) return export_command(exp_dir, exp_index, exp_all, exp_out);
        if (prb->parsed()) return probe_command(prb_dir, prb_point, prb_field, prb_out);
        if (met->parsed())
            return metrics_command(met_dir, met_threshold, met_origin, met_direction, met_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 1;
    } catch (const ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace porofrac
