#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "simwave/errors.hpp"

namespace simwave {

// Geometry family: nested intervals in 1D, concentric axis-aligned boxes in
// 2D/3D, all centered at the origin.  Layer k occupies the shell between
// bounds[k] and bounds[k+1]; bounds.front() is the inner hole (S1), and
// bounds.back() the outer boundary (S0).  In 1D the "hole" degenerates to the
// left endpoint and bounds are partition points of an interval.
struct GeometrySpec {
    int dimension = 1;
    std::vector<double> bounds;  // m+2 entries, strictly increasing
    double spacing = 0.0;        // uniform cell size, must divide all extents
};

enum class FaceType : std::uint8_t {
    Interior,   // both neighbors in the same layer
    Interface,  // Gamma_k: neighbors in layers k-1 and k
    Outer,      // S0
    Inner,      // S1
};

struct Face {
    int axis = 0;
    long cell_lo = -1;  // bounding-box cell id on the -axis side, -1 if absent
    long cell_hi = -1;
    FaceType type = FaceType::Interior;
    int layer_lo = -1;
    int layer_hi = -1;
    int interface_k = 0;     // Gamma_k index for Interface faces
    double outward = 0.0;    // boundary faces: +1 if domain cell is on the lo side
    double normal = 0.0;     // interface faces: +1 if layer k-1 is on the lo side
    std::array<double, 3> center{0.0, 0.0, 0.0};
};

class LayeredGrid {
public:
    int dimension() const { return dim_; }
    int num_layers() const { return num_layers_; }
    double spacing() const { return dx_; }
    const std::vector<double>& bounds() const { return bounds_; }

    long bbox_cells() const { return ncells_total_; }
    const std::array<long, 3>& cells_per_axis() const { return ncells_; }
    const std::vector<int>& cell_layer() const { return cell_layer_; }
    int layer_of(long cell) const { return cell_layer_[static_cast<std::size_t>(cell)]; }
    bool inside(long cell) const { return layer_of(cell) >= 0; }
    long interior_cell_count() const { return inside_count_; }
    long layer_cell_count(int k) const { return layer_counts_[static_cast<std::size_t>(k)]; }

    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<std::size_t>& s0_faces() const { return s0_faces_; }
    const std::vector<std::size_t>& s1_faces() const { return s1_faces_; }
    // interfaces()[k-1] lists the faces of Gamma_k, k = 1..m.
    const std::vector<std::vector<std::size_t>>& interfaces() const { return interface_faces_; }

    std::array<double, 3> cell_center(long cell) const {
        std::array<long, 3> ijk = unflatten(cell);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + (ijk[a] + 0.5) * dx_;
        return x;
    }

    long flatten(const std::array<long, 3>& ijk) const {
        return ijk[0] + ncells_[0] * (ijk[1] + ncells_[1] * ijk[2]);
    }

    std::array<long, 3> unflatten(long cell) const {
        std::array<long, 3> ijk{0, 0, 0};
        ijk[0] = cell % ncells_[0];
        long rest = cell / ncells_[0];
        ijk[1] = rest % ncells_[1];
        ijk[2] = rest / ncells_[1];
        return ijk;
    }

    // Active-face id for the face of given axis at face-grid position fijk
    // (fijk[axis] in 0..ncells[axis]); -1 when the face is not active.
    long face_at(int axis, std::array<long, 3> fijk) const {
        std::array<long, 3> n = ncells_;
        n[axis] += 1;
        for (int a = 0; a < 3; ++a)
            if (fijk[a] < 0 || fijk[a] >= n[a]) return -1;
        long idx = fijk[0] + n[0] * (fijk[1] + n[1] * fijk[2]);
        return face_lookup_[static_cast<std::size_t>(axis)][static_cast<std::size_t>(idx)];
    }

    // Faces of cell `cell` along `axis`: (lo, hi) active-face ids (or -1).
    std::pair<long, long> cell_faces(long cell, int axis) const {
        std::array<long, 3> ijk = unflatten(cell);
        std::array<long, 3> hi = ijk;
        hi[axis] += 1;
        return {face_at(axis, ijk), face_at(axis, hi)};
    }

    // Neighbor cell id or -1 when off the bounding box.
    long neighbor(long cell, int axis, int dir) const {
        std::array<long, 3> ijk = unflatten(cell);
        ijk[axis] += dir;
        if (ijk[axis] < 0 || ijk[axis] >= ncells_[axis]) return -1;
        return flatten(ijk);
    }

    double volume() const { return inside_count_ * std::pow(dx_, dim_); }
    double area_s0() const { return boundary_area(s0_faces_); }
    double area_s1() const { return boundary_area(s1_faces_); }

    // Point classification used by the builder and by geometry checks.
    // Returns the layer index of x, or -1 outside the domain.
    int classify_point(const std::array<double, 3>& x) const {
        double r;
        if (dim_ == 1) {
            r = x[0];
        } else {
            r = 0.0;
            for (int a = 0; a < dim_; ++a) r = std::max(r, std::abs(x[a]));
        }
        if (r < bounds_.front() || r > bounds_.back()) return -1;
        for (std::size_t k = 0; k + 1 < bounds_.size(); ++k) {
            if (r < bounds_[k + 1]) return static_cast<int>(k);
        }
        return num_layers_ - 1;
    }

    friend LayeredGrid build_layered_grid(const GeometrySpec& spec);

private:
    double boundary_area(const std::vector<std::size_t>& list) const {
        return static_cast<double>(list.size()) * std::pow(dx_, dim_ - 1);
    }

    int dim_ = 1;
    int num_layers_ = 1;
    double dx_ = 0.0;
    std::array<long, 3> ncells_{1, 1, 1};
    long ncells_total_ = 0;
    long inside_count_ = 0;
    std::array<double, 3> lo_{0.0, 0.0, 0.0};
    std::vector<double> bounds_;
    std::vector<int> cell_layer_;
    std::vector<long> layer_counts_;
    std::vector<Face> faces_;
    std::array<std::vector<long>, 3> face_lookup_;
    std::vector<std::size_t> s0_faces_, s1_faces_;
    std::vector<std::vector<std::size_t>> interface_faces_;
};

namespace detail {

inline long checked_ratio(double extent, double dx, const char* what) {
    double r = extent / dx;
    long n = std::lround(r);
    if (n <= 0 || std::abs(r - n) > 1e-9 * std::max(1.0, std::abs(r))) {
        throw ResolutionError(std::string("spacing does not divide ") + what);
    }
    return n;
}

} // namespace detail

inline LayeredGrid build_layered_grid(const GeometrySpec& spec) {
    if (spec.dimension < 1 || spec.dimension > 3)
        throw GeometryError("dimension must be 1, 2 or 3");
    if (spec.bounds.size() < 2)
        throw GeometryError("need at least one layer (two bounds)");
    for (std::size_t i = 0; i + 1 < spec.bounds.size(); ++i) {
        if (!(spec.bounds[i] < spec.bounds[i + 1]))
            throw GeometryError("layer bounds must be strictly increasing");
    }
    if (spec.dimension > 1 && !(spec.bounds.front() > 0.0))
        throw GeometryError("inner hole half-width must be positive in 2D/3D");
    if (!(spec.spacing > 0.0)) throw ResolutionError("spacing must be positive");

    LayeredGrid g;
    g.dim_ = spec.dimension;
    g.num_layers_ = static_cast<int>(spec.bounds.size()) - 1;
    g.dx_ = spec.spacing;
    g.bounds_ = spec.bounds;

    // Every bound must land on a cell face so interfaces are exact.
    if (g.dim_ == 1) {
        for (std::size_t i = 1; i < spec.bounds.size(); ++i)
            detail::checked_ratio(spec.bounds[i] - spec.bounds.front(), g.dx_, "a layer extent");
        long n = detail::checked_ratio(spec.bounds.back() - spec.bounds.front(), g.dx_, "the domain length");
        g.ncells_ = {n, 1, 1};
        g.lo_ = {spec.bounds.front(), 0.0, 0.0};
    } else {
        for (double b : spec.bounds) detail::checked_ratio(b, g.dx_, "a shell half-width");
        long n = 2 * detail::checked_ratio(spec.bounds.back(), g.dx_, "the outer half-width");
        for (int a = 0; a < g.dim_; ++a) g.ncells_[a] = n;
        for (int a = 0; a < g.dim_; ++a) g.lo_[a] = -spec.bounds.back();
    }
    g.ncells_total_ = g.ncells_[0] * g.ncells_[1] * g.ncells_[2];

    g.cell_layer_.assign(static_cast<std::size_t>(g.ncells_total_), -1);
    g.layer_counts_.assign(static_cast<std::size_t>(g.num_layers_), 0);
    for (long c = 0; c < g.ncells_total_; ++c) {
        int k = g.classify_point(g.cell_center(c));
        g.cell_layer_[static_cast<std::size_t>(c)] = k;
        if (k >= 0) {
            ++g.inside_count_;
            ++g.layer_counts_[static_cast<std::size_t>(k)];
        }
    }
    if (g.inside_count_ == 0) throw GeometryError("empty domain");

    g.interface_faces_.assign(static_cast<std::size_t>(g.num_layers_ - 1), {});

    // Enumerate faces axis by axis; keep only faces touching the domain.
    for (int axis = 0; axis < g.dim_; ++axis) {
        std::array<long, 3> n = g.ncells_;
        n[axis] += 1;
        g.face_lookup_[static_cast<std::size_t>(axis)].assign(
            static_cast<std::size_t>(n[0] * n[1] * n[2]), -1);
        for (long k = 0; k < n[2]; ++k) {
            for (long j = 0; j < n[1]; ++j) {
                for (long i = 0; i < n[0]; ++i) {
                    std::array<long, 3> f{i, j, k};
                    std::array<long, 3> hi = f;
                    std::array<long, 3> lo = f;
                    lo[axis] -= 1;
                    long cell_lo = (lo[axis] >= 0) ? g.flatten(lo) : -1;
                    long cell_hi = (hi[axis] < g.ncells_[axis]) ? g.flatten(hi) : -1;
                    int layer_lo = (cell_lo >= 0) ? g.layer_of(cell_lo) : -1;
                    int layer_hi = (cell_hi >= 0) ? g.layer_of(cell_hi) : -1;
                    if (layer_lo < 0 && layer_hi < 0) continue;

                    Face face;
                    face.axis = axis;
                    face.cell_lo = (layer_lo >= 0) ? cell_lo : -1;
                    face.cell_hi = (layer_hi >= 0) ? cell_hi : -1;
                    face.layer_lo = layer_lo;
                    face.layer_hi = layer_hi;
                    for (int a = 0; a < g.dim_; ++a) {
                        double off = (a == axis) ? 0.0 : 0.5;
                        face.center[a] = g.lo_[a] + (f[a] + off) * g.dx_;
                    }

                    std::size_t idx = g.faces_.size();
                    g.face_lookup_[static_cast<std::size_t>(axis)]
                                  [static_cast<std::size_t>(f[0] + n[0] * (f[1] + n[1] * f[2]))] =
                        static_cast<long>(idx);
                    if (layer_lo >= 0 && layer_hi >= 0) {
                        if (layer_lo == layer_hi) {
                            face.type = FaceType::Interior;
                        } else {
                            if (std::abs(layer_lo - layer_hi) != 1)
                                throw GeometryError("non-adjacent layers meet at a face");
                            face.type = FaceType::Interface;
                            face.interface_k = std::max(layer_lo, layer_hi);
                            face.normal = (layer_lo < layer_hi) ? 1.0 : -1.0;
                            g.interface_faces_[static_cast<std::size_t>(face.interface_k - 1)].push_back(idx);
                        }
                    } else {
                        bool inside_lo = (layer_lo >= 0);
                        long missing = inside_lo ? cell_hi : cell_lo;
                        face.outward = inside_lo ? 1.0 : -1.0;
                        if (g.dim_ == 1) {
                            // 1D: the left endpoint plays the S1 role, the
                            // right endpoint the S0 role.
                            face.type = inside_lo ? FaceType::Outer : FaceType::Inner;
                        } else {
                            // Off the bounding box means the outer boundary; a
                            // hole cell on the other side means the inner one.
                            face.type = (missing < 0) ? FaceType::Outer : FaceType::Inner;
                        }
                        if (face.type == FaceType::Outer) g.s0_faces_.push_back(idx);
                        else g.s1_faces_.push_back(idx);
                    }
                    g.faces_.push_back(face);
                }
            }
        }
    }
    if (g.s0_faces_.empty()) throw GeometryError("no outer boundary faces");
    return g;
}

struct SurfaceMeasures {
    double volume;
    double area_s0;
    double area_s1;
};

inline SurfaceMeasures surface_measures(const LayeredGrid& grid) {
    return {grid.volume(), grid.area_s0(), grid.area_s1()};
}

} // namespace simwave
