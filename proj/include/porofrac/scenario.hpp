#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "porofrac/solver.hpp"

namespace porofrac {

struct MeshSpec {
    enum class Kind { Generated, File };
    Kind kind = Kind::Generated;
    int dim = 2;
    std::array<double, 3> extent{10.0, 10.0, 10.0}; ///< m
    std::array<int, 3> cells{100, 100, 100};
    std::string path; ///< mesh file when kind == File
    bool operator==(const MeshSpec&) const = default;
};

/// One component of the in-situ stress: base value plus an affine variation
/// in position, value(x) = base + gradient . x.
struct StressComponent {
    double base = 0.0;                       ///< Pa
    std::array<double, 3> gradient{0, 0, 0}; ///< Pa/m
    bool operator==(const StressComponent&) const = default;
};

/// In-situ stress specification in the geomechanics sign convention:
/// components are compression-positive magnitudes, matching how confining
/// stresses are usually quoted. Component order: xx yy zz xy yz xz.
struct StressSpec {
    std::array<StressComponent, 6> comp{};
    bool operator==(const StressSpec&) const = default;
};

/// In-situ stress tensor at a point (compression-positive convention).
Eigen::Matrix3d evaluate_sigma0(const StressSpec& spec, const Vec& position);

/// The same field in the tension-positive frame of the constitutive model
/// (i.e. the negative of the in-situ magnitudes).
InitialStressField continuum_sigma0(const StressSpec& spec);

struct BoundarySpec {
    enum class Traction { None, FromStress, Fixed };
    Traction traction = Traction::None;
    std::array<double, 3> traction_value{0, 0, 0}; ///< Fixed mode, tension-positive frame
    bool roller = false;                           ///< zero tangential displacement
    std::optional<double> pressure;                ///< prescribed pressure (Pa)
    std::optional<double> flux;                    ///< inward mass flux (kg/(m^2 s))
    bool operator==(const BoundarySpec&) const = default;
};

/// Pre-existing notch, realized as a seeded history field plus a fluid source.
struct NotchSpec {
    std::string name;
    enum class Kind { Segment, Penny };
    Kind kind = Kind::Segment;
    std::array<double, 3> a{0, 0, 0}, b{0, 0, 0}; ///< segment endpoints (m)
    std::array<double, 3> center{0, 0, 0};        ///< penny center (m)
    double radius = 0.0, height = 0.0;            ///< penny, axis along z (m)
    double half_width = 0.0; ///< segment band half-width; 0 = half an element
    double h0 = 0.0;         ///< seeded history; 0 = 1e3 * gc / (2 l0)
    double q = 10.0;         ///< source inside the notch (kg/(m^3 s))
    bool operator==(const NotchSpec&) const = default;
};

struct OutputSpec {
    double interval = 0.5; ///< snapshot spacing (s)
    bool vtk = true;       ///< write VTK snapshots from the CLI runner
    bool operator==(const OutputSpec&) const = default;
};

struct ScenarioConfig {
    std::string name = "custom";
    MeshSpec mesh;
    MaterialParams material;
    SolverSettings solver;
    StressSpec sigma0;
    std::map<std::string, BoundarySpec> bcs;
    std::vector<NotchSpec> notches;
    std::vector<ProbeSpec> probes;
    OutputSpec output;

    /// Field-wise equality; the scenario name is a label and not compared.
    bool operator==(const ScenarioConfig& other) const;

    /// Consistency and unit-sanity checks; names the offending key path.
    void validate() const;
    /// Snapshot times {0, interval, ..., t_end}.
    std::vector<double> output_times() const;
};

/// Parses the sectioned key-value format. Unknown sections or keys raise
/// ConfigurationError naming the key path. A [preset] section with
/// `name = <preset>` starts from that preset before applying overrides.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

std::string serialize_config(const ScenarioConfig& config);
void save_config(const ScenarioConfig& config, const std::string& path);

/// Built-in scenarios. Unknown names raise ConfigurationError listing the
/// available presets.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct SeededFields {
    Eigen::VectorXd history; ///< per element
    Eigen::VectorXd source;  ///< per element
};

/// Rasterize notches onto the mesh: elements whose centroid falls inside a
/// notch region receive the seed history and source values.
SeededFields seed_notches(const Mesh& mesh, const std::vector<NotchSpec>& notches,
                          const MaterialParams& material);

Mesh build_mesh(const MeshSpec& spec);

/// Assembles the solver problem. With `baseline_no_sigma0` the pre-existing
/// stress is removed from the constitutive law and the crack drive while the
/// boundary tractions derived from it are kept.
Simulator::Problem build_problem(const ScenarioConfig& config, const Mesh& mesh,
                                 bool baseline_no_sigma0 = false);

SimulationResult run_simulation(const ScenarioConfig& config, bool baseline_no_sigma0 = false);

} // namespace porofrac
