#include "porofrac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace porofrac {

namespace {

double simplex_measure(const Mesh& mesh, const int* conn, int dim) {
    if (dim == 2) {
        const Vec a = mesh.node(conn[0]), b = mesh.node(conn[1]), c = mesh.node(conn[2]);
        return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
    }
    const Vec a = mesh.node(conn[0]);
    Eigen::Matrix3d m;
    m.col(0) = mesh.node(conn[1]) - a;
    m.col(1) = mesh.node(conn[2]) - a;
    m.col(2) = mesh.node(conn[3]) - a;
    return m.determinant() / 6.0;
}

} // namespace

Mesh::Mesh(int dim, std::vector<double> coords, std::vector<int> cells)
    : dim_(dim), coords_(std::move(coords)), cells_(std::move(cells)) {
    if (dim_ != 2 && dim_ != 3)
        throw InvalidArgumentError("mesh dimension must be 2 or 3");
    if (coords_.size() % 3 != 0)
        throw InvalidArgumentError("node coordinate array must hold 3 values per node");
    if (cells_.size() % (dim_ + 1) != 0)
        throw InvalidArgumentError("element array must hold dim+1 indices per element");
    const int n = num_nodes();
    for (int idx : cells_) {
        if (idx < 0 || idx >= n)
            throw InvalidArgumentError("element references missing node " + std::to_string(idx));
    }
    finalize();
}

void Mesh::finalize() {
    const int ne = num_elements();
    measures_.resize(ne);
    total_measure_ = 0.0;
    max_extent_ = 0.0;
    bbox_min_ = Vec::Constant(std::numeric_limits<double>::max());
    bbox_max_ = Vec::Constant(std::numeric_limits<double>::lowest());
    for (int i = 0; i < num_nodes(); ++i) {
        bbox_min_ = bbox_min_.cwiseMin(node(i));
        bbox_max_ = bbox_max_.cwiseMax(node(i));
    }
    if (dim_ == 2) {
        bbox_min_.z() = bbox_max_.z() = 0.0;
    }
    for (int e = 0; e < ne; ++e) {
        const double m = simplex_measure(*this, element(e), dim_);
        if (!(m > 0.0))
            throw InvalidGeometryError("element " + std::to_string(e) +
                                       " has non-positive measure " + std::to_string(m));
        measures_[e] = m;
        total_measure_ += m;
        Vec lo = Vec::Constant(std::numeric_limits<double>::max());
        Vec hi = Vec::Constant(std::numeric_limits<double>::lowest());
        for (int k = 0; k <= dim_; ++k) {
            lo = lo.cwiseMin(node(element(e)[k]));
            hi = hi.cwiseMax(node(element(e)[k]));
        }
        max_extent_ = std::max(max_extent_, (hi - lo).head(dim_).maxCoeff());
    }
}

Vec Mesh::element_centroid(int e) const {
    Vec c = Vec::Zero();
    const int* conn = element(e);
    for (int k = 0; k <= dim_; ++k) c += node(conn[k]);
    return c / (dim_ + 1);
}

const std::vector<Facet>& Mesh::boundary_facets(const std::string& tag) const {
    auto it = boundary_.find(tag);
    if (it == boundary_.end())
        throw InvalidArgumentError("unknown boundary tag '" + tag + "'");
    return it->second;
}

std::vector<int> Mesh::boundary_nodes(const std::string& tag) const {
    std::vector<int> nodes;
    for (const Facet& f : boundary_facets(tag))
        for (int k = 0; k < dim_; ++k) nodes.push_back(f.nodes[k]);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

void Mesh::set_boundary(std::map<std::string, std::vector<Facet>> boundary) {
    // face -> element lookup for facet/element adjacency
    std::map<std::array<int, 3>, int> owner;
    for (int e = 0; e < num_elements(); ++e) {
        const int* conn = element(e);
        for (int f = 0; f <= dim_; ++f) {
            std::array<int, 3> key{-1, -1, -1};
            int m = 0;
            for (int k = 0; k <= dim_; ++k)
                if (k != f) key[m++] = conn[k];
            std::sort(key.begin(), key.begin() + dim_);
            owner[key] = e;
        }
    }
    for (auto& [tag, facets] : boundary)
        for (Facet& facet : facets) {
            std::array<int, 3> key = facet.nodes;
            std::sort(key.begin(), key.begin() + dim_);
            auto it = owner.find(key);
            if (it == owner.end())
                throw InvalidGeometryError("boundary facet of tag '" + tag +
                                           "' is not a face of any element");
            facet.element = it->second;
        }
    boundary_ = std::move(boundary);
}

Vec Mesh::facet_normal(const Facet& facet) const {
    Vec n;
    if (dim_ == 2) {
        const Vec t = node(facet.nodes[1]) - node(facet.nodes[0]);
        n = Vec(t.y(), -t.x(), 0.0).normalized();
    } else {
        const Vec a = node(facet.nodes[0]);
        n = (node(facet.nodes[1]) - a).cross(node(facet.nodes[2]) - a).normalized();
    }
    if (facet.element >= 0) {
        Vec mid = Vec::Zero();
        for (int k = 0; k < dim_; ++k) mid += node(facet.nodes[k]);
        mid /= dim_;
        if (n.dot(mid - element_centroid(facet.element)) < 0.0) n = -n;
    }
    return n;
}

double Mesh::facet_measure(const Facet& facet) const {
    if (dim_ == 2) return (node(facet.nodes[1]) - node(facet.nodes[0])).norm();
    const Vec a = node(facet.nodes[0]);
    return 0.5 * (node(facet.nodes[1]) - a).cross(node(facet.nodes[2]) - a).norm();
}

void Mesh::tag_axis_aligned_boundary() {
    // Exterior faces are those appearing in exactly one element.
    std::map<std::array<int, 3>, Facet> faces;
    const int ne = num_elements();
    for (int e = 0; e < ne; ++e) {
        const int* conn = element(e);
        const int nf = dim_ + 1;
        for (int f = 0; f < nf; ++f) {
            Facet facet;
            int m = 0;
            for (int k = 0; k < nf; ++k)
                if (k != f) facet.nodes[m++] = conn[k];
            facet.element = e;
            std::array<int, 3> key = facet.nodes;
            std::sort(key.begin(), key.begin() + dim_);
            auto it = faces.find(key);
            if (it == faces.end())
                faces.emplace(key, facet);
            else
                faces.erase(it);
        }
    }
    const double tol = 1e-9 * std::max(1.0, (bbox_max_ - bbox_min_).norm());
    const char* lo_names[3] = {"left", "bottom", "back"};
    const char* hi_names[3] = {"right", "top", "front"};
    boundary_.clear();
    for (auto& [key, facet] : faces) {
        bool tagged = false;
        for (int axis = 0; axis < dim_ && !tagged; ++axis) {
            for (int side = 0; side < 2 && !tagged; ++side) {
                const double plane = side == 0 ? bbox_min_[axis] : bbox_max_[axis];
                bool on_plane = true;
                for (int k = 0; k < dim_; ++k)
                    on_plane = on_plane && std::abs(node(facet.nodes[k])[axis] - plane) < tol;
                if (on_plane) {
                    boundary_[side == 0 ? lo_names[axis] : hi_names[axis]].push_back(facet);
                    tagged = true;
                }
            }
        }
        if (!tagged) boundary_["untagged"].push_back(facet);
    }
}

int Mesh::locate(const Vec& point) const {
    const double tol = 1e-10 * std::max(1.0, (bbox_max_ - bbox_min_).norm());
    const int ne = num_elements();
    for (int e = 0; e < ne; ++e) {
        const int* conn = element(e);
        const Vec a = node(conn[0]);
        if (dim_ == 2) {
            const Vec b = node(conn[1]), c = node(conn[2]);
            const double det = 2.0 * measures_[e];
            const double l1 = ((c.y() - a.y()) * (point.x() - a.x()) - (c.x() - a.x()) * (point.y() - a.y())) / det;
            const double l2 = (-(b.y() - a.y()) * (point.x() - a.x()) + (b.x() - a.x()) * (point.y() - a.y())) / det;
            if (l1 >= -tol && l2 >= -tol && 1.0 - l1 - l2 >= -tol) return e;
        } else {
            Eigen::Matrix3d m;
            m.col(0) = node(conn[1]) - a;
            m.col(1) = node(conn[2]) - a;
            m.col(2) = node(conn[3]) - a;
            const Eigen::Vector3d lam = m.partialPivLu().solve(point - a);
            if (lam.minCoeff() >= -tol && 1.0 - lam.sum() >= -tol) return e;
        }
    }
    return -1;
}

double Mesh::interpolate(const Eigen::VectorXd& nodal, const Vec& point) const {
    const int e = locate(point);
    if (e < 0)
        throw InvalidArgumentError("point lies outside the mesh");
    const int* conn = element(e);
    const Vec a = node(conn[0]);
    if (dim_ == 2) {
        const Vec b = node(conn[1]), c = node(conn[2]);
        const double det = 2.0 * measures_[e];
        const double l1 = ((c.y() - a.y()) * (point.x() - a.x()) - (c.x() - a.x()) * (point.y() - a.y())) / det;
        const double l2 = (-(b.y() - a.y()) * (point.x() - a.x()) + (b.x() - a.x()) * (point.y() - a.y())) / det;
        return (1.0 - l1 - l2) * nodal[conn[0]] + l1 * nodal[conn[1]] + l2 * nodal[conn[2]];
    }
    Eigen::Matrix3d m;
    m.col(0) = node(conn[1]) - a;
    m.col(1) = node(conn[2]) - a;
    m.col(2) = node(conn[3]) - a;
    const Eigen::Vector3d lam = m.partialPivLu().solve(point - a);
    return (1.0 - lam.sum()) * nodal[conn[0]] + lam[0] * nodal[conn[1]] +
           lam[1] * nodal[conn[2]] + lam[2] * nodal[conn[3]];
}

ElementBasis element_basis(const Mesh& mesh, int element_id) {
    if (element_id < 0 || element_id >= mesh.num_elements())
        throw InvalidArgumentError("element id out of range");
    const int dim = mesh.dim();
    const int* conn = mesh.element(element_id);
    ElementBasis basis;
    basis.nnodes = dim + 1;
    basis.weight = mesh.element_measure(element_id);
    if (!(basis.weight > 0.0))
        throw InvalidGeometryError("degenerate element " + std::to_string(element_id));
    basis.point = mesh.element_centroid(element_id);
    for (int k = 0; k <= dim; ++k) basis.shape[k] = 1.0 / (dim + 1);
    if (dim == 2) {
        const Vec a = mesh.node(conn[0]), b = mesh.node(conn[1]), c = mesh.node(conn[2]);
        const double inv2a = 1.0 / (2.0 * basis.weight);
        basis.grad.row(0) << (b.y() - c.y()) * inv2a, (c.x() - b.x()) * inv2a, 0.0;
        basis.grad.row(1) << (c.y() - a.y()) * inv2a, (a.x() - c.x()) * inv2a, 0.0;
        basis.grad.row(2) << (a.y() - b.y()) * inv2a, (b.x() - a.x()) * inv2a, 0.0;
    } else {
        const Vec a = mesh.node(conn[0]);
        Eigen::Matrix3d jac;
        jac.col(0) = mesh.node(conn[1]) - a;
        jac.col(1) = mesh.node(conn[2]) - a;
        jac.col(2) = mesh.node(conn[3]) - a;
        const Eigen::Matrix3d inv = jac.inverse();
        // gradients of the barycentric coordinates l1..l3; l0 = 1 - l1 - l2 - l3
        for (int k = 0; k < 3; ++k) basis.grad.row(k + 1) = inv.row(k);
        basis.grad.row(0) = -(basis.grad.row(1) + basis.grad.row(2) + basis.grad.row(3));
    }
    return basis;
}

Mesh generate_structured(double lx, double ly, int nx, int ny) {
    if (!(lx > 0.0) || !(ly > 0.0))
        throw InvalidArgumentError("mesh extents must be positive");
    if (nx < 1 || ny < 1)
        throw InvalidArgumentError("subdivisions must be at least 1");
    const double hx = lx / nx, hy = ly / ny;
    std::vector<double> coords;
    coords.reserve(static_cast<size_t>(nx + 1) * (ny + 1) * 3);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            coords.push_back(i * hx);
            coords.push_back(j * hy);
            coords.push_back(0.0);
        }
    auto nid = [nx](int i, int j) { return j * (nx + 1) + i; };
    std::vector<int> cells;
    cells.reserve(static_cast<size_t>(nx) * ny * 6);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int n00 = nid(i, j), n10 = nid(i + 1, j);
            const int n01 = nid(i, j + 1), n11 = nid(i + 1, j + 1);
            // split along the cell diagonal n00-n11, counter-clockwise
            cells.insert(cells.end(), {n00, n10, n11});
            cells.insert(cells.end(), {n00, n11, n01});
        }
    Mesh mesh(2, std::move(coords), std::move(cells));
    mesh.tag_axis_aligned_boundary();
    return mesh;
}

Mesh generate_structured(double lx, double ly, double lz, int nx, int ny, int nz) {
    if (!(lx > 0.0) || !(ly > 0.0) || !(lz > 0.0))
        throw InvalidArgumentError("mesh extents must be positive");
    if (nx < 1 || ny < 1 || nz < 1)
        throw InvalidArgumentError("subdivisions must be at least 1");
    const double hx = lx / nx, hy = ly / ny, hz = lz / nz;
    std::vector<double> coords;
    coords.reserve(static_cast<size_t>(nx + 1) * (ny + 1) * (nz + 1) * 3);
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                coords.push_back(i * hx);
                coords.push_back(j * hy);
                coords.push_back(k * hz);
            }
    auto nid = [nx, ny](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    // six-tetrahedra split of each cell along the main diagonal
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::vector<int> cells;
    cells.reserve(static_cast<size_t>(nx) * ny * nz * 24);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int base[3] = {i, j, k};
                for (const auto& perm : perms) {
                    int v[3] = {base[0], base[1], base[2]};
                    std::array<int, 4> tet;
                    tet[0] = nid(v[0], v[1], v[2]);
                    v[perm[0]]++;
                    tet[1] = nid(v[0], v[1], v[2]);
                    v[perm[1]]++;
                    tet[2] = nid(v[0], v[1], v[2]);
                    v[perm[2]]++;
                    tet[3] = nid(v[0], v[1], v[2]);
                    // enforce positive orientation
                    Eigen::Matrix3d m;
                    for (int c = 0; c < 3; ++c) {
                        const int a3 = 3 * tet[0], b3 = 3 * tet[c + 1];
                        m.col(c) = Eigen::Vector3d(coords[b3] - coords[a3], coords[b3 + 1] - coords[a3 + 1],
                                                   coords[b3 + 2] - coords[a3 + 2]);
                    }
                    if (m.determinant() < 0.0) std::swap(tet[2], tet[3]);
                    cells.insert(cells.end(), tet.begin(), tet.end());
                }
            }
    Mesh mesh(3, std::move(coords), std::move(cells));
    mesh.tag_axis_aligned_boundary();
    return mesh;
}

Mesh import_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open mesh file '" + path + "'");
    int lineno = 0;
    auto next_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find('#');
            if (pos != std::string::npos) line.erase(pos);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };
    std::string line, word;
    int dim = 0;
    if (!next_line(line) || !(std::istringstream(line) >> word >> dim) || word != "dim" ||
        (dim != 2 && dim != 3))
        throw MalformedFileError("expected 'dim <2|3>'", lineno);

    auto read_count = [&](const char* keyword) {
        int count = -1;
        if (!next_line(line))
            throw MalformedFileError(std::string("expected '") + keyword + " <count>'", lineno);
        std::istringstream ls(line);
        if (!(ls >> word >> count) || word != keyword || count < 0)
            throw MalformedFileError(std::string("expected '") + keyword + " <count>'", lineno);
        return count;
    };

    const int nnodes = read_count("nodes");
    std::vector<double> coords(static_cast<size_t>(nnodes) * 3, 0.0);
    for (int i = 0; i < nnodes; ++i) {
        if (!next_line(line))
            throw MalformedFileError("unexpected end of node list", lineno);
        std::istringstream ls(line);
        for (int c = 0; c < dim; ++c)
            if (!(ls >> coords[3 * i + c]))
                throw MalformedFileError("malformed node coordinates", lineno);
    }

    const int nelems = read_count("elements");
    std::vector<int> cells(static_cast<size_t>(nelems) * (dim + 1));
    for (int e = 0; e < nelems; ++e) {
        if (!next_line(line))
            throw MalformedFileError("unexpected end of element list", lineno);
        std::istringstream ls(line);
        for (int c = 0; c <= dim; ++c) {
            int idx = -1;
            if (!(ls >> idx))
                throw MalformedFileError("malformed element indices", lineno);
            if (idx < 0 || idx >= nnodes)
                throw MalformedFileError("element references missing node " + std::to_string(idx),
                                         lineno);
            cells[static_cast<size_t>(e) * (dim + 1) + c] = idx;
        }
    }

    std::map<std::string, std::vector<Facet>> boundary;
    if (next_line(line)) {
        std::istringstream ls(line);
        int count = -1;
        if (!(ls >> word >> count) || word != "facets" || count < 0)
            throw MalformedFileError("expected 'facets <count>'", lineno);
        for (int f = 0; f < count; ++f) {
            if (!next_line(line))
                throw MalformedFileError("unexpected end of facet list", lineno);
            std::istringstream fs(line);
            std::string tag;
            Facet facet;
            if (!(fs >> tag))
                throw MalformedFileError("malformed facet line", lineno);
            for (int c = 0; c < dim; ++c) {
                int idx = -1;
                if (!(fs >> idx))
                    throw MalformedFileError("malformed facet indices", lineno);
                if (idx < 0 || idx >= nnodes)
                    throw MalformedFileError("facet references missing node " + std::to_string(idx),
                                             lineno);
                facet.nodes[c] = idx;
            }
            boundary[tag].push_back(facet);
        }
    }

    Mesh mesh(dim, std::move(coords), std::move(cells));
    if (boundary.empty())
        mesh.tag_axis_aligned_boundary();
    else
        mesh.set_boundary(std::move(boundary));
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write mesh file '" + path + "'");
    char buf[128];
    out << "dim " << mesh.dim() << "\n";
    out << "nodes " << mesh.num_nodes() << "\n";
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Vec p = mesh.node(i);
        for (int c = 0; c < mesh.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", p[c]);
            out << (c ? " " : "") << buf;
        }
        out << "\n";
    }
    out << "elements " << mesh.num_elements() << "\n";
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const int* conn = mesh.element(e);
        for (int c = 0; c <= mesh.dim(); ++c) out << (c ? " " : "") << conn[c];
        out << "\n";
    }
    size_t nfacets = 0;
    for (const auto& [tag, facets] : mesh.boundary()) nfacets += facets.size();
    out << "facets " << nfacets << "\n";
    for (const auto& [tag, facets] : mesh.boundary())
        for (const Facet& f : facets) {
            out << tag;
            for (int c = 0; c < mesh.dim(); ++c) out << " " << f.nodes[c];
            out << "\n";
        }
    if (!out)
        throw IoError("failed writing mesh file '" + path + "'");
}

} // namespace porofrac
