#include "porofrac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace porofrac {

namespace {

// component order of StressSpec::comp
constexpr const char* kStressNames[6] = {"sxx", "syy", "szz", "sxy", "syz", "sxz"};
constexpr int kStressIndex[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Eigen::Matrix3d evaluate_sigma0(const StressSpec& spec, const Vec& position) {
    Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
    for (int c = 0; c < 6; ++c) {
        const StressComponent& comp = spec.comp[c];
        const double value = comp.base + comp.gradient[0] * position.x() +
                             comp.gradient[1] * position.y() + comp.gradient[2] * position.z();
        s(kStressIndex[c][0], kStressIndex[c][1]) = value;
        s(kStressIndex[c][1], kStressIndex[c][0]) = value;
    }
    return s;
}

InitialStressField continuum_sigma0(const StressSpec& spec) {
    return [spec](const Vec& x) -> Eigen::Matrix3d { return -evaluate_sigma0(spec, x); };
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
    return mesh == other.mesh && material == other.material && solver == other.solver &&
           sigma0 == other.sigma0 && bcs == other.bcs && notches == other.notches &&
           probes == other.probes && output == other.output;
}

std::vector<double> ScenarioConfig::output_times() const {
    std::vector<double> times{0.0};
    for (double t = output.interval; t <= solver.t_end + 1e-9 * output.interval;
         t += output.interval)
        times.push_back(t);
    if (solver.t_end > 0.0 && times.back() < solver.t_end - 1e-9 * output.interval)
        times.push_back(solver.t_end);
    return times;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& path, const std::string& what) {
        throw ConfigurationError(path + ": " + what);
    };
    if (mesh.dim != 2 && mesh.dim != 3) fail("mesh.dim", "must be 2 or 3");
    if (mesh.kind == MeshSpec::Kind::File) {
        if (mesh.path.empty()) fail("mesh.path", "required for kind = file");
    } else {
        for (int d = 0; d < mesh.dim; ++d) {
            if (!(mesh.extent[d] > 0.0)) fail("mesh.extent", "extents must be positive");
            if (mesh.cells[d] < 1) fail("mesh.cells", "subdivisions must be at least 1");
        }
    }
    material.validate();
    // unit sanity: catch mis-scaled inputs early
    if (material.gc > 1e7) fail("material.gc", "value looks mis-scaled; expected N/m");
    if (material.l0 > 100.0) fail("material.l0", "value looks mis-scaled; expected m");
    if (material.lambda < 1e3 || material.lambda > 1e13)
        fail("material.lambda", "value looks mis-scaled; expected Pa");
    if (material.mu < 1e3 || material.mu > 1e13)
        fail("material.mu", "value looks mis-scaled; expected Pa");
    solver.validate();
    if (!(output.interval > 0.0)) fail("output.interval", "must be positive");
    for (int c = 0; c < 6; ++c)
        if (std::abs(sigma0.comp[c].base) > 1e9)
            fail(std::string("sigma0.") + kStressNames[c], "value looks mis-scaled; expected Pa");
    const std::vector<std::string> tags = mesh.dim == 2
                                              ? std::vector<std::string>{"left", "right", "bottom", "top"}
                                              : std::vector<std::string>{"left", "right", "bottom",
                                                                         "top", "back", "front"};
    if (mesh.kind == MeshSpec::Kind::Generated) {
        for (const auto& [tag, spec] : bcs)
            if (std::find(tags.begin(), tags.end(), tag) == tags.end())
                fail("bc." + tag, "unknown boundary tag of a generated mesh");
    }
    for (const NotchSpec& notch : notches) {
        const std::string path = "notch." + notch.name;
        if (notch.kind == NotchSpec::Kind::Segment) {
            double len2 = 0.0;
            for (int d = 0; d < 3; ++d)
                len2 += (notch.b[d] - notch.a[d]) * (notch.b[d] - notch.a[d]);
            if (!(len2 > 0.0)) fail(path, "segment has zero length");
        } else {
            if (!(notch.radius > 0.0) || !(notch.height > 0.0))
                fail(path, "penny requires positive radius and height");
        }
        if (notch.q < 0.0) fail(path + ".q", "source must be non-negative");
        if (notch.h0 < 0.0) fail(path + ".h0", "seed history must be non-negative");
        if (notch.half_width < 0.0) fail(path + ".half_width", "must be non-negative");
    }
    for (const ProbeSpec& probe : probes) {
        static const std::vector<std::string> fields{"pressure", "p", "phi", "ux", "uy", "uz"};
        if (std::find(fields.begin(), fields.end(), probe.field) == fields.end())
            fail("probe." + probe.name + ".field", "unknown field '" + probe.field + "'");
    }
}

// ---------------------------------------------------------------------------
// sectioned key-value parsing

namespace {

struct Entry {
    std::string key, value;
    int line;
};
struct Section {
    std::string name;
    int line;
    std::vector<Entry> entries;
};

std::vector<Section> lex_sections(const std::string& text, const std::string& origin) {
    std::vector<Section> sections;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw ConfigurationError(origin + ":" + std::to_string(lineno) + ": " + what);
    };
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
            if (sections.back().name.empty()) fail("empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        if (sections.empty()) fail("key outside of any section");
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty() || e.value.empty()) fail("expected 'key = value'");
        sections.back().entries.push_back(std::move(e));
    }
    return sections;
}

struct KeyReader {
    const std::string origin;
    const std::string section;

    [[noreturn]] void fail(const Entry& e, const std::string& what) const {
        throw ConfigurationError(origin + ":" + std::to_string(e.line) + ": " + section + "." +
                                 e.key + ": " + what);
    }
    double number(const Entry& e) const {
        try {
            size_t used = 0;
            const double v = std::stod(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(e, "expected a number, got '" + e.value + "'");
        }
    }
    int integer(const Entry& e) const {
        const double v = number(e);
        if (v != std::floor(v)) fail(e, "expected an integer");
        return static_cast<int>(v);
    }
    bool boolean(const Entry& e) const {
        if (e.value == "true" || e.value == "1") return true;
        if (e.value == "false" || e.value == "0") return false;
        fail(e, "expected true or false");
    }
    [[noreturn]] void unknown(const Entry& e) const { fail(e, "unknown key"); }
};

void apply_mesh(const Section& s, const KeyReader& r, MeshSpec& mesh) {
    for (const Entry& e : s.entries) {
        if (e.key == "kind") {
            if (e.value == "generated")
                mesh.kind = MeshSpec::Kind::Generated;
            else if (e.value == "file")
                mesh.kind = MeshSpec::Kind::File;
            else
                r.fail(e, "expected generated or file");
        } else if (e.key == "dim")
            mesh.dim = r.integer(e);
        else if (e.key == "extent_x")
            mesh.extent[0] = r.number(e);
        else if (e.key == "extent_y")
            mesh.extent[1] = r.number(e);
        else if (e.key == "extent_z")
            mesh.extent[2] = r.number(e);
        else if (e.key == "cells_x")
            mesh.cells[0] = r.integer(e);
        else if (e.key == "cells_y")
            mesh.cells[1] = r.integer(e);
        else if (e.key == "cells_z")
            mesh.cells[2] = r.integer(e);
        else if (e.key == "path")
            mesh.path = e.value;
        else
            r.unknown(e);
    }
}

void apply_material(const Section& s, const KeyReader& r, MaterialParams& mat) {
    std::optional<double> young, poisson;
    for (const Entry& e : s.entries) {
        if (e.key == "lambda")
            mat.lambda = r.number(e);
        else if (e.key == "mu")
            mat.mu = r.number(e);
        else if (e.key == "young")
            young = r.number(e);
        else if (e.key == "poisson")
            poisson = r.number(e);
        else if (e.key == "gc")
            mat.gc = r.number(e);
        else if (e.key == "l0")
            mat.l0 = r.number(e);
        else if (e.key == "k")
            mat.k = r.number(e);
        else if (e.key == "biot")
            mat.biot_r = r.number(e);
        else if (e.key == "porosity")
            mat.porosity = r.number(e);
        else if (e.key == "rho_r")
            mat.rho_r = r.number(e);
        else if (e.key == "rho_f")
            mat.rho_f = r.number(e);
        else if (e.key == "perm_r")
            mat.perm_r = r.number(e);
        else if (e.key == "perm_f")
            mat.perm_f = r.number(e);
        else if (e.key == "compress_r")
            mat.compress_r = r.number(e);
        else if (e.key == "compress_f")
            mat.compress_f = r.number(e);
        else if (e.key == "visc_r")
            mat.visc_r = r.number(e);
        else if (e.key == "visc_f")
            mat.visc_f = r.number(e);
        else if (e.key == "c1")
            mat.c1 = r.number(e);
        else if (e.key == "c2")
            mat.c2 = r.number(e);
        else
            r.unknown(e);
    }
    if (young || poisson) {
        if (!(young && poisson))
            throw ConfigurationError(r.section + ": young and poisson must be given together");
        const auto [lambda, mu] = lame_from_young_poisson(*young, *poisson);
        mat.lambda = lambda;
        mat.mu = mu;
    }
}

void apply_solver(const Section& s, const KeyReader& r, SolverSettings& solver) {
    for (const Entry& e : s.entries) {
        if (e.key == "dt")
            solver.dt = r.number(e);
        else if (e.key == "t_end")
            solver.t_end = r.number(e);
        else if (e.key == "max_newton_iters")
            solver.max_newton_iters = r.integer(e);
        else if (e.key == "rel_tol")
            solver.rel_tol = r.number(e);
        else if (e.key == "abs_tol")
            solver.abs_tol = r.number(e);
        else if (e.key == "sweeps")
            solver.staggered_sweeps = r.integer(e);
        else
            r.unknown(e);
    }
}

void apply_sigma0(const Section& s, const KeyReader& r, StressSpec& spec) {
    for (const Entry& e : s.entries) {
        bool matched = false;
        for (int c = 0; c < 6 && !matched; ++c) {
            const std::string base = kStressNames[c];
            if (e.key == base) {
                spec.comp[c].base = r.number(e);
                matched = true;
            } else if (e.key == base + "_dx") {
                spec.comp[c].gradient[0] = r.number(e);
                matched = true;
            } else if (e.key == base + "_dy") {
                spec.comp[c].gradient[1] = r.number(e);
                matched = true;
            } else if (e.key == base + "_dz") {
                spec.comp[c].gradient[2] = r.number(e);
                matched = true;
            }
        }
        if (!matched) r.unknown(e);
    }
}

void apply_bc(const Section& s, const KeyReader& r, BoundarySpec& bc) {
    for (const Entry& e : s.entries) {
        if (e.key == "traction") {
            if (e.value == "none")
                bc.traction = BoundarySpec::Traction::None;
            else if (e.value == "sigma0")
                bc.traction = BoundarySpec::Traction::FromStress;
            else if (e.value == "fixed")
                bc.traction = BoundarySpec::Traction::Fixed;
            else
                r.fail(e, "expected none, sigma0, or fixed");
        } else if (e.key == "tx") {
            bc.traction_value[0] = r.number(e);
            bc.traction = BoundarySpec::Traction::Fixed;
        } else if (e.key == "ty") {
            bc.traction_value[1] = r.number(e);
            bc.traction = BoundarySpec::Traction::Fixed;
        } else if (e.key == "tz") {
            bc.traction_value[2] = r.number(e);
            bc.traction = BoundarySpec::Traction::Fixed;
        } else if (e.key == "roller")
            bc.roller = r.boolean(e);
        else if (e.key == "pressure")
            bc.pressure = r.number(e);
        else if (e.key == "flux")
            bc.flux = r.number(e);
        else
            r.unknown(e);
    }
}

void apply_notch(const Section& s, const KeyReader& r, NotchSpec& notch) {
    for (const Entry& e : s.entries) {
        if (e.key == "kind") {
            if (e.value == "segment")
                notch.kind = NotchSpec::Kind::Segment;
            else if (e.value == "penny")
                notch.kind = NotchSpec::Kind::Penny;
            else
                r.fail(e, "expected segment or penny");
        } else if (e.key == "x0")
            notch.a[0] = r.number(e);
        else if (e.key == "y0")
            notch.a[1] = r.number(e);
        else if (e.key == "z0")
            notch.a[2] = r.number(e);
        else if (e.key == "x1")
            notch.b[0] = r.number(e);
        else if (e.key == "y1")
            notch.b[1] = r.number(e);
        else if (e.key == "z1")
            notch.b[2] = r.number(e);
        else if (e.key == "cx")
            notch.center[0] = r.number(e);
        else if (e.key == "cy")
            notch.center[1] = r.number(e);
        else if (e.key == "cz")
            notch.center[2] = r.number(e);
        else if (e.key == "radius")
            notch.radius = r.number(e);
        else if (e.key == "height")
            notch.height = r.number(e);
        else if (e.key == "half_width")
            notch.half_width = r.number(e);
        else if (e.key == "h0")
            notch.h0 = r.number(e);
        else if (e.key == "q")
            notch.q = r.number(e);
        else
            r.unknown(e);
    }
}

void apply_probe(const Section& s, const KeyReader& r, ProbeSpec& probe) {
    for (const Entry& e : s.entries) {
        if (e.key == "x")
            probe.position[0] = r.number(e);
        else if (e.key == "y")
            probe.position[1] = r.number(e);
        else if (e.key == "z")
            probe.position[2] = r.number(e);
        else if (e.key == "field")
            probe.field = e.value;
        else
            r.unknown(e);
    }
}

void apply_output(const Section& s, const KeyReader& r, OutputSpec& out) {
    for (const Entry& e : s.entries) {
        if (e.key == "interval")
            out.interval = r.number(e);
        else if (e.key == "vtk")
            out.vtk = r.boolean(e);
        else
            r.unknown(e);
    }
}

} // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    const std::vector<Section> sections = lex_sections(text, origin);

    ScenarioConfig config;
    for (const Section& s : sections) {
        if (s.name != "preset") continue;
        for (const Entry& e : s.entries) {
            if (e.key == "name")
                config = preset(e.value);
            else
                KeyReader{origin, "preset"}.unknown(e);
        }
    }

    for (const Section& s : sections) {
        const KeyReader reader{origin, s.name};
        if (s.name == "preset") {
            continue;
        } else if (s.name == "mesh") {
            apply_mesh(s, reader, config.mesh);
        } else if (s.name == "material") {
            apply_material(s, reader, config.material);
        } else if (s.name == "solver") {
            apply_solver(s, reader, config.solver);
        } else if (s.name == "sigma0") {
            apply_sigma0(s, reader, config.sigma0);
        } else if (s.name.rfind("bc.", 0) == 0) {
            apply_bc(s, reader, config.bcs[s.name.substr(3)]);
        } else if (s.name.rfind("notch.", 0) == 0) {
            const std::string name = s.name.substr(6);
            auto it = std::find_if(config.notches.begin(), config.notches.end(),
                                   [&](const NotchSpec& n) { return n.name == name; });
            if (it == config.notches.end()) {
                config.notches.push_back(NotchSpec{});
                config.notches.back().name = name;
                it = std::prev(config.notches.end());
            }
            apply_notch(s, reader, *it);
        } else if (s.name.rfind("probe.", 0) == 0) {
            const std::string name = s.name.substr(6);
            auto it = std::find_if(config.probes.begin(), config.probes.end(),
                                   [&](const ProbeSpec& p) { return p.name == name; });
            if (it == config.probes.end()) {
                config.probes.push_back(ProbeSpec{});
                config.probes.back().name = name;
                it = std::prev(config.probes.end());
            }
            apply_probe(s, reader, *it);
        } else if (s.name == "output") {
            apply_output(s, reader, config.output);
        } else {
            throw ConfigurationError(origin + ":" + std::to_string(s.line) + ": unknown section [" +
                                     s.name + "]");
        }
    }
    config.validate();
    return config;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

std::string serialize_config(const ScenarioConfig& config) {
    std::ostringstream out;
    out << "# scenario: " << config.name << "\n";
    out << "[mesh]\n";
    out << "kind = " << (config.mesh.kind == MeshSpec::Kind::Generated ? "generated" : "file")
        << "\n";
    out << "dim = " << config.mesh.dim << "\n";
    if (config.mesh.kind == MeshSpec::Kind::File) {
        out << "path = " << config.mesh.path << "\n";
    } else {
        const char* axes = "xyz";
        for (int d = 0; d < config.mesh.dim; ++d) {
            out << "extent_" << axes[d] << " = " << fmt(config.mesh.extent[d]) << "\n";
            out << "cells_" << axes[d] << " = " << config.mesh.cells[d] << "\n";
        }
    }
    const MaterialParams& m = config.material;
    out << "\n[material]\n";
    out << "lambda = " << fmt(m.lambda) << "\nmu = " << fmt(m.mu) << "\ngc = " << fmt(m.gc)
        << "\nl0 = " << fmt(m.l0) << "\nk = " << fmt(m.k) << "\nbiot = " << fmt(m.biot_r)
        << "\nporosity = " << fmt(m.porosity) << "\nrho_r = " << fmt(m.rho_r)
        << "\nrho_f = " << fmt(m.rho_f) << "\nperm_r = " << fmt(m.perm_r)
        << "\nperm_f = " << fmt(m.perm_f) << "\ncompress_r = " << fmt(m.compress_r)
        << "\ncompress_f = " << fmt(m.compress_f) << "\nvisc_r = " << fmt(m.visc_r)
        << "\nvisc_f = " << fmt(m.visc_f) << "\nc1 = " << fmt(m.c1) << "\nc2 = " << fmt(m.c2)
        << "\n";
    out << "\n[solver]\n";
    out << "dt = " << fmt(config.solver.dt) << "\nt_end = " << fmt(config.solver.t_end)
        << "\nmax_newton_iters = " << config.solver.max_newton_iters
        << "\nrel_tol = " << fmt(config.solver.rel_tol)
        << "\nabs_tol = " << fmt(config.solver.abs_tol)
        << "\nsweeps = " << config.solver.staggered_sweeps << "\n";
    out << "\n[sigma0]\n";
    for (int c = 0; c < 6; ++c) {
        const StressComponent& sc = config.sigma0.comp[c];
        out << kStressNames[c] << " = " << fmt(sc.base) << "\n";
        const char* axes = "xyz";
        for (int d = 0; d < 3; ++d)
            if (sc.gradient[d] != 0.0)
                out << kStressNames[c] << "_d" << axes[d] << " = " << fmt(sc.gradient[d]) << "\n";
    }
    for (const auto& [tag, bc] : config.bcs) {
        out << "\n[bc." << tag << "]\n";
        switch (bc.traction) {
        case BoundarySpec::Traction::None: out << "traction = none\n"; break;
        case BoundarySpec::Traction::FromStress: out << "traction = sigma0\n"; break;
        case BoundarySpec::Traction::Fixed:
            out << "traction = fixed\n";
            out << "tx = " << fmt(bc.traction_value[0]) << "\nty = " << fmt(bc.traction_value[1])
                << "\ntz = " << fmt(bc.traction_value[2]) << "\n";
            break;
        }
        out << "roller = " << (bc.roller ? "true" : "false") << "\n";
        if (bc.pressure) out << "pressure = " << fmt(*bc.pressure) << "\n";
        if (bc.flux) out << "flux = " << fmt(*bc.flux) << "\n";
    }
    for (const NotchSpec& notch : config.notches) {
        out << "\n[notch." << notch.name << "]\n";
        if (notch.kind == NotchSpec::Kind::Segment) {
            out << "kind = segment\n";
            out << "x0 = " << fmt(notch.a[0]) << "\ny0 = " << fmt(notch.a[1])
                << "\nz0 = " << fmt(notch.a[2]) << "\n";
            out << "x1 = " << fmt(notch.b[0]) << "\ny1 = " << fmt(notch.b[1])
                << "\nz1 = " << fmt(notch.b[2]) << "\n";
        } else {
            out << "kind = penny\n";
            out << "cx = " << fmt(notch.center[0]) << "\ncy = " << fmt(notch.center[1])
                << "\ncz = " << fmt(notch.center[2]) << "\n";
            out << "radius = " << fmt(notch.radius) << "\nheight = " << fmt(notch.height) << "\n";
        }
        out << "half_width = " << fmt(notch.half_width) << "\n";
        out << "h0 = " << fmt(notch.h0) << "\n";
        out << "q = " << fmt(notch.q) << "\n";
    }
    for (const ProbeSpec& probe : config.probes) {
        out << "\n[probe." << probe.name << "]\n";
        out << "x = " << fmt(probe.position[0]) << "\ny = " << fmt(probe.position[1])
            << "\nz = " << fmt(probe.position[2]) << "\n";
        out << "field = " << probe.field << "\n";
    }
    out << "\n[output]\n";
    out << "interval = " << fmt(config.output.interval) << "\n";
    out << "vtk = " << (config.output.vtk ? "true" : "false") << "\n";
    return out.str();
}

void save_config(const ScenarioConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write config file '" + path + "'");
    out << serialize_config(config);
    if (!out)
        throw IoError("failed writing config file '" + path + "'");
}

// ---------------------------------------------------------------------------
// presets

namespace {

ScenarioConfig square_scenario() {
    ScenarioConfig c;
    c.mesh.dim = 2;
    c.mesh.extent = {10.0, 10.0, 10.0};
    c.mesh.cells = {100, 100, 100};
    c.solver.dt = 0.05;
    c.solver.t_end = 10.0;
    c.sigma0.comp[0].base = 0.5e6;
    c.sigma0.comp[1].base = 0.5e6;
    for (const char* tag : {"left", "right", "bottom", "top"}) {
        BoundarySpec bc;
        bc.traction = BoundarySpec::Traction::FromStress;
        bc.roller = true;
        bc.pressure = 0.0;
        c.bcs[tag] = bc;
    }
    ProbeSpec probe;
    probe.name = "notch_center";
    probe.field = "pressure";
    probe.position = {5.0, 5.0, 0.0};
    c.probes.push_back(probe);
    c.output.interval = 0.5;
    return c;
}

NotchSpec segment_notch(const std::string& name, std::array<double, 3> a, std::array<double, 3> b) {
    NotchSpec n;
    n.name = name;
    n.kind = NotchSpec::Kind::Segment;
    n.a = a;
    n.b = b;
    return n;
}

ScenarioConfig crossed_notches(double sx, double sy) {
    ScenarioConfig c = square_scenario();
    c.sigma0.comp[0].base = sx;
    c.sigma0.comp[1].base = sy;
    c.solver.t_end = 5.0;
    c.notches.push_back(segment_notch("horizontal", {4.6, 5.0, 0.0}, {5.4, 5.0, 0.0}));
    c.notches.push_back(segment_notch("vertical", {5.0, 4.6, 0.0}, {5.0, 5.4, 0.0}));
    return c;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"horizontal_notch",      "inclined_notch",          "crossed_notches_case1",
            "crossed_notches_case2", "crossed_notches_case3",   "crossed_notches_case4",
            "two_horizontal_notches", "linearly_varying",       "penny_3d"};
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    if (name == "horizontal_notch") {
        c = square_scenario();
        c.notches.push_back(segment_notch("main", {4.6, 5.0, 0.0}, {5.4, 5.0, 0.0}));
    } else if (name == "inclined_notch") {
        c = square_scenario();
        c.solver.t_end = 6.0;
        const double half = 0.4 / std::sqrt(2.0); // 0.8 m notch at 45 degrees
        c.notches.push_back(
            segment_notch("main", {5.0 - half, 5.0 - half, 0.0}, {5.0 + half, 5.0 + half, 0.0}));
    } else if (name == "crossed_notches_case1") {
        c = crossed_notches(1.0e6, 0.5e6);
    } else if (name == "crossed_notches_case2") {
        c = crossed_notches(5.0e6, 0.5e6);
    } else if (name == "crossed_notches_case3") {
        c = crossed_notches(0.5e6, 1.0e6);
    } else if (name == "crossed_notches_case4") {
        c = crossed_notches(0.5e6, 5.0e6);
    } else if (name == "two_horizontal_notches") {
        c = square_scenario();
        c.solver.t_end = 2.5;
        c.notches.push_back(segment_notch("upper", {4.2, 5.5, 0.0}, {5.0, 5.5, 0.0}));
        c.notches.push_back(segment_notch("lower", {5.0, 4.5, 0.0}, {5.8, 4.5, 0.0}));
    } else if (name == "linearly_varying") {
        c = square_scenario();
        c.solver.t_end = 14.0;
        c.output.interval = 1.0;
        // horizontal confinement decaying with height: 1.0 MPa at the bottom,
        // 0.25 MPa at the top; divergence-free, so the undisturbed state
        // stays in equilibrium without a body force
        c.sigma0.comp[0].base = 1.0e6;
        c.sigma0.comp[0].gradient[1] = -0.075e6;
        c.sigma0.comp[1].base = 0.5e6;
        c.notches.push_back(segment_notch("main", {5.0, 4.6, 0.0}, {5.0, 5.4, 0.0}));
    } else if (name == "penny_3d") {
        c.mesh.dim = 3;
        c.mesh.extent = {10.0, 10.0, 10.0};
        c.mesh.cells = {20, 20, 20};
        c.material.l0 = 0.25;
        c.material.perm_f = 5.21e-3;
        c.solver.dt = 0.05;
        c.solver.t_end = 27.0;
        c.sigma0.comp[0].base = 1.0e6;
        c.sigma0.comp[1].base = 1.0e6;
        c.sigma0.comp[2].base = 0.5e6;
        for (const char* tag : {"left", "right", "bottom", "top", "back", "front"}) {
            BoundarySpec bc;
            bc.traction = BoundarySpec::Traction::FromStress;
            bc.roller = true;
            bc.pressure = 0.0;
            c.bcs[tag] = bc;
        }
        NotchSpec notch;
        notch.name = "penny";
        notch.kind = NotchSpec::Kind::Penny;
        notch.center = {5.0, 5.0, 5.0};
        notch.radius = 0.8;
        notch.height = 0.4;
        c.notches.push_back(notch);
        ProbeSpec probe;
        probe.name = "notch_center";
        probe.field = "pressure";
        probe.position = {5.0, 5.0, 5.0};
        c.probes.push_back(probe);
        c.output.interval = 3.0;
    } else {
        std::string known;
        for (const std::string& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigurationError("unknown preset '" + name + "'; available: " + known);
    }
    c.name = name;
    return c;
}

// ---------------------------------------------------------------------------
// realization on a mesh

namespace {

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
    const Vec ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

} // namespace

SeededFields seed_notches(const Mesh& mesh, const std::vector<NotchSpec>& notches,
                          const MaterialParams& material) {
    SeededFields fields;
    fields.history = Eigen::VectorXd::Zero(mesh.num_elements());
    fields.source = Eigen::VectorXd::Zero(mesh.num_elements());
    for (const NotchSpec& notch : notches) {
        const double h0 = notch.h0 > 0.0 ? notch.h0 : 1e3 * material.gc / (2.0 * material.l0);
        const double hw =
            notch.half_width > 0.0 ? notch.half_width : 0.5 * mesh.max_element_extent();
        int seeded = 0;
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const Vec c = mesh.element_centroid(e);
            bool inside = false;
            if (notch.kind == NotchSpec::Kind::Segment) {
                inside = point_segment_distance(c, Vec(notch.a[0], notch.a[1], notch.a[2]),
                                                Vec(notch.b[0], notch.b[1], notch.b[2])) <= hw;
            } else {
                const Vec d = c - Vec(notch.center[0], notch.center[1], notch.center[2]);
                inside = std::abs(d.z()) <= 0.5 * notch.height && d.head<2>().norm() <= notch.radius;
            }
            if (inside) {
                fields.history[e] = std::max(fields.history[e], h0);
                fields.source[e] = std::max(fields.source[e], notch.q);
                ++seeded;
            }
        }
        if (seeded == 0)
            throw ConfigurationError("notch." + notch.name + ": region does not intersect the domain");
    }
    return fields;
}

Mesh build_mesh(const MeshSpec& spec) {
    if (spec.kind == MeshSpec::Kind::File) return import_mesh(spec.path);
    if (spec.dim == 2)
        return generate_structured(spec.extent[0], spec.extent[1], spec.cells[0], spec.cells[1]);
    return generate_structured(spec.extent[0], spec.extent[1], spec.extent[2], spec.cells[0],
                               spec.cells[1], spec.cells[2]);
}

Simulator::Problem build_problem(const ScenarioConfig& config, const Mesh& mesh,
                                 bool baseline_no_sigma0) {
    config.validate();
    Simulator::Problem problem;
    problem.material = config.material;

    // The boundary tractions always derive from the configured stress field;
    // the baseline variant only removes it from the constitutive response.
    const InitialStressField applied = continuum_sigma0(config.sigma0);
    problem.sigma0 = baseline_no_sigma0
                         ? InitialStressField([](const Vec&) { return Eigen::Matrix3d::Zero(); })
                         : applied;

    const int dim = mesh.dim();
    for (const auto& [tag, bc] : config.bcs) {
        if (!mesh.has_boundary_tag(tag))
            throw ConfigurationError("bc." + tag + ": mesh has no such boundary tag");
        if (bc.traction == BoundarySpec::Traction::FromStress) {
            problem.tractions.push_back(
                {tag, [applied](const Vec& x, const Vec& n) -> Vec { return applied(x) * n; }});
        } else if (bc.traction == BoundarySpec::Traction::Fixed) {
            const Vec t(bc.traction_value[0], bc.traction_value[1], bc.traction_value[2]);
            problem.tractions.push_back({tag, [t](const Vec&, const Vec&) { return t; }});
        }
        if (bc.roller) {
            const std::vector<Facet>& facets = mesh.boundary_facets(tag);
            if (facets.empty())
                throw ConfigurationError("bc." + tag + ": boundary has no facets");
            const Vec n = mesh.facet_normal(facets.front());
            int axis = 0;
            n.cwiseAbs().maxCoeff(&axis);
            if (std::abs(n[axis]) < 0.99)
                throw ConfigurationError("bc." + tag + ": roller requires an axis-aligned boundary");
            for (const int node : mesh.boundary_nodes(tag))
                for (int c = 0; c < dim; ++c)
                    if (c != axis) problem.displacement_bcs.push_back({dim * node + c, 0.0});
        }
        if (bc.pressure) problem.pressure_bcs.dirichlet.emplace_back(tag, *bc.pressure);
        if (bc.flux) problem.pressure_bcs.flux.emplace_back(tag, *bc.flux);
    }

    const SeededFields seeds = seed_notches(mesh, config.notches, config.material);
    problem.seed_history = seeds.history;
    problem.source = seeds.source;
    return problem;
}

SimulationResult run_simulation(const ScenarioConfig& config, bool baseline_no_sigma0) {
    const Mesh mesh = build_mesh(config.mesh);
    const Simulator sim(mesh, build_problem(config, mesh, baseline_no_sigma0), config.solver);
    return sim.run(config.output_times(), config.probes);
}

} // namespace porofrac
