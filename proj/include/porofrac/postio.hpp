#pragma once

#include <string>
#include <utility>
#include <vector>

#include "porofrac/scenario.hpp"

namespace porofrac {

/// Legacy ASCII unstructured-grid snapshot with point data u/phi/p and cell
/// data history. Values carry 9 significant digits.
void export_vtk(const Mesh& mesh, const FieldState& state, const std::string& path);

/// Linear interpolation of one field at a fixed point over a snapshot series.
ProbeSeries probe(const Mesh& mesh, const std::vector<FieldState>& snapshots,
                  const std::vector<double>& times, const Vec& point, const std::string& field);

/// Maximum signed distance along `direction` from `origin` over centroids of
/// elements whose nodal-average phase field reaches the threshold; 0 when no
/// element qualifies.
double fracture_extent(const Mesh& mesh, const Eigen::VectorXd& phi, double threshold,
                       const Vec& origin, const Vec& direction);

/// Total measure of elements whose nodal-average phase field reaches the
/// threshold.
double fractured_measure(const Mesh& mesh, const Eigen::VectorXd& phi, double threshold);

/// (arc length, value) pairs along the node chain of one boundary tag.
std::vector<std::pair<double, double>> boundary_profile(const Mesh& mesh, const FieldState& state,
                                                        const std::string& tag,
                                                        const std::string& component);

// --- run archive -----------------------------------------------------------

void write_state(const Mesh& mesh, const FieldState& state, const std::string& path);
FieldState read_state(const Mesh& mesh, const std::string& path);

/// Writes mesh, expanded config, snapshots (.fld and .vtk), probe CSV files,
/// and the convergence log into `dir`.
void write_run_outputs(const Mesh& mesh, const ScenarioConfig& config,
                       const SimulationResult& result, const std::string& dir);

struct StateIndexEntry {
    int index;
    double time;
    std::string file;
};
std::vector<StateIndexEntry> read_state_index(const std::string& dir);

/// Command-line entry point (subcommands run/export/probe/metrics).
/// Returns 0 on success, 1 on configuration errors, 2 on convergence
/// failures, 3 on i/o errors.
int cli_main(int argc, const char* const* argv);

} // namespace porofrac
