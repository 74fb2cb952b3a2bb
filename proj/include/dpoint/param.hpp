#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dpoint/obj_io.hpp"
#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Isometric flattening of one 3D triangle: corner 0 at the origin, corner 1
/// on the +x axis, corner 2 in the upper half plane. `shape_inv` is the
/// inverse of the 2x2 edge matrix [p1-p0 | p2-p0], cached for Jacobian
/// assembly; `area` is the intrinsic (3D) triangle area.
struct LocalFrame {
    Vec2 p[3];
    Eigen::Matrix2d shape_inv;
    double area = 0.0;
};

/// Flattens every triangle isometrically. Throws on degenerate triangles
/// (area below 1e-12 of the mean).
std::vector<LocalFrame> local_frames(const TriMesh& mesh);

/// Per-triangle Jacobians of a planar map, with cached determinants and
/// singular values (sigma[0] >= sigma[1]).
struct JacobianField {
    std::vector<Eigen::Matrix2d> J;
    std::vector<double> det;
    std::vector<std::array<double, 2>> sigma;

    int size() const { return static_cast<int>(J.size()); }
    double min_det() const;
};

JacobianField jacobians(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                        const PlanarParam& uv);

/// Closed-form singular values of a 2x2 matrix, largest first.
std::array<double, 2> singular_values_2x2(const Eigen::Matrix2d& J);

/// MIPS conformal energy 0.5*||J||_F^2/det(J) = 0.5*(s1/s2 + s2/s1).
/// Minimum 1 at similarity transforms; +inf when det(J) <= 0.
double mips_energy(const Eigen::Matrix2d& J);

/// Sum over triangles of exp(MIPS). +inf if any triangle is flipped.
double amips_energy(const JacobianField& field);

/// Isometric distortion 0.5*(E_area + E_MIPS) with
/// E_area = 0.5*(det J + det J^-1). Minimum 1 at rotations; +inf when
/// det(J) <= 0.
double iso_distortion(const Eigen::Matrix2d& J);

/// Tutte embedding of a disk-topology mesh: boundary on the unit circle with
/// arc-length-proportional spacing, interior vertices at the uniform average
/// of their neighbors. Flip-free by Tutte's theorem.
PlanarParam tutte_embed(const TriMesh& disk);

}  // namespace dpoint
