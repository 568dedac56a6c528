#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "porofrac/errors.hpp"

namespace porofrac {

/// Points are stored padded to 3 components; z is 0 for 2D meshes.
using Vec = Eigen::Vector3d;

/// One boundary face: an edge (2 nodes) in 2D, a triangle (3 nodes) in 3D.
struct Facet {
    std::array<int, 3> nodes{-1, -1, -1};
    int element = -1; ///< adjacent element index
    int num_nodes(int dim) const { return dim; }
};

/// Conforming simplex mesh: 3-node triangles (2D) or 4-node tetrahedra (3D).
/// Immutable after construction; safe for concurrent reads.
class Mesh {
public:
    Mesh(int dim, std::vector<double> coords, std::vector<int> cells);

    int dim() const { return dim_; }
    int nodes_per_element() const { return dim_ + 1; }
    int num_nodes() const { return static_cast<int>(coords_.size()) / 3; }
    int num_elements() const { return static_cast<int>(cells_.size()) / (dim_ + 1); }

    Vec node(int i) const { return Vec(coords_[3 * i], coords_[3 * i + 1], coords_[3 * i + 2]); }
    const int* element(int e) const { return &cells_[static_cast<size_t>(e) * (dim_ + 1)]; }

    double element_measure(int e) const { return measures_[e]; }
    Vec element_centroid(int e) const;
    double total_measure() const { return total_measure_; }
    /// Longest axis-aligned bounding-box edge of any element; used as the
    /// default length for geometric tolerances and notch rasterization.
    double max_element_extent() const { return max_extent_; }
    std::array<Vec, 2> bounding_box() const { return {bbox_min_, bbox_max_}; }

    const std::map<std::string, std::vector<Facet>>& boundary() const { return boundary_; }
    const std::vector<Facet>& boundary_facets(const std::string& tag) const;
    bool has_boundary_tag(const std::string& tag) const { return boundary_.count(tag) > 0; }
    /// Unique node indices carried by the facets of one tag.
    std::vector<int> boundary_nodes(const std::string& tag) const;

    /// Installs boundary facets, resolving each facet's adjacent element.
    /// Throws InvalidGeometryError when a facet is not an element face.
    void set_boundary(std::map<std::string, std::vector<Facet>> boundary);
    /// Identify untagged exterior facets and tag them by the axis-aligned
    /// plane they lie on (left/right/bottom/top/back/front).
    void tag_axis_aligned_boundary();

    /// Unit outward normal of a boundary facet.
    Vec facet_normal(const Facet& facet) const;
    double facet_measure(const Facet& facet) const;

    /// Element index containing the point (barycentric test with tolerance),
    /// or -1 if the point lies outside the mesh.
    int locate(const Vec& point) const;
    /// Linear interpolation of a nodal scalar field at a point.
    double interpolate(const Eigen::VectorXd& nodal, const Vec& point) const;

private:
    void finalize();

    int dim_;
    std::vector<double> coords_; ///< 3 per node, z = 0 in 2D
    std::vector<int> cells_;
    std::map<std::string, std::vector<Facet>> boundary_;
    std::vector<double> measures_;
    double total_measure_ = 0.0;
    double max_extent_ = 0.0;
    Vec bbox_min_ = Vec::Zero(), bbox_max_ = Vec::Zero();
};

/// Shape-function data of one element at its single centroid quadrature point.
struct ElementBasis {
    int nnodes = 0;
    Eigen::Matrix<double, 4, 1> shape = Eigen::Matrix<double, 4, 1>::Zero(); ///< N_i, sums to 1
    Eigen::Matrix<double, 4, 3> grad = Eigen::Matrix<double, 4, 3>::Zero();  ///< row i = grad N_i (1/m)
    double weight = 0.0; ///< quadrature weight x |J| = element measure (m^2 or m^3)
    Vec point = Vec::Zero(); ///< quadrature point = centroid
};

/// Constant-gradient basis of a linear simplex. Throws InvalidGeometryError
/// for degenerate elements.
ElementBasis element_basis(const Mesh& mesh, int element_id);

/// Structured triangle mesh of a rectangle; each cell is split into two
/// triangles along the cell diagonal. Boundary tags: left/right/bottom/top.
Mesh generate_structured(double lx, double ly, int nx, int ny);

/// Structured tetrahedral mesh of a box; each cell is split into six
/// tetrahedra. Boundary tags: left/right/bottom/top/back/front.
Mesh generate_structured(double lx, double ly, double lz, int nx, int ny, int nz);

/// Reads the ASCII mesh format:
///   dim <d>
///   nodes <n>      followed by n coordinate lines
///   elements <m>   followed by m 0-based index lines
///   facets <k>     followed by `tag i0 i1 [i2]` lines
Mesh import_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

} // namespace porofrac
