#pragma once

#include <bg2/mesh.hpp>

#include <optional>
#include <vector>

namespace bg2 {

/// Regular grid of cloth particles; vertex (i, j) lives at column j * nx + i.
struct ClothGrid {
    int nx = 0;
    int ny = 0;
    double spacing = 0.0;
    Matrix3Xd positions;
    Matrix3Xd prev_positions;
    Matrix3Xd velocities;
    Eigen::VectorXd inv_mass;

    Eigen::Index index(int i, int j) const { return static_cast<Eigen::Index>(j) * nx + i; }
    Eigen::Index size() const { return positions.cols(); }

    void validate() const;
};

struct ClothParams {
    double stretch_compliance = 0.0;
    double shear_compliance = 1e-6;
    double bend_compliance = 1e-2;
    double thickness = 0.005;
    double friction = 0.5;
    int substeps = 4;
    int solver_iterations = 10;
    double gravity_magnitude = 9.81;
    double total_mass = 1.0; // kg, spread evenly over the particles

    void validate() const;
};

/// Oriented box; orientation columns are the box axes in world space.
struct BedBox {
    Vector3d center = Vector3d::Zero();
    Vector3d half_extents = Vector3d::Ones();
    Matrix3d orientation = Matrix3d::Identity();

    void validate() const;
    /// True when p lies strictly inside the box grown by `inflate` on every side.
    bool contains(const Vector3d& p, double inflate = 0.0) const;
};

/// Grid sizing. With nx/ny/spacing left at zero the blanket covers `coverage` times the body
/// extent on both planar axes, `resolution` particles along the longer one.
struct GridSpec {
    int resolution = 48;
    double coverage = 1.6;
    int nx = 0;
    int ny = 0;
    double spacing = 0.0;
};

enum class ConstraintKind { Structural, Shear, Bend };

struct DistanceConstraint {
    Eigen::Index a;
    Eigen::Index b;
    double rest;
    ConstraintKind kind;
};

std::vector<DistanceConstraint> grid_constraints(int nx, int ny, double spacing);

/// One XPBD projection of a distance constraint; returns the lambda increment.
double project_distance(Vector3d& pa, Vector3d& pb, double wa, double wb, double rest,
                        double compliance, double h, double lambda);

/// Gravity rule: lying pulls along -floorUp; standing pulls along the torso facing axis, signed
/// toward bedDirection. Mixed sequences are rejected.
Vector3d gravity_direction(SequenceCategory category, const JointSet& joints_t0, const Vector3d& floor_up,
                           const Vector3d& bed_direction, const TorsoJoints& names = {});

struct Drape {
    ClothGrid cloth;
    bool cloth_too_small = false;
};

/// Flat cloth orthogonal to gravity, centred over the body and lifted clear of it.
Drape drape_init(const GridSpec& grid, const Matrix3Xd& body_vertices, const Vector3d& gravity,
                 const ClothParams& params);

struct Colliders {
    const MeshBvh* body = nullptr;
    const BedBox* bed = nullptr;
};

/// Advances the cloth by dt using params.substeps substeps. Throws NumericalBlowup when a
/// position becomes non-finite or exceeds 1e6 m.
void step(ClothGrid& cloth, const Colliders& colliders, const ClothParams& params,
          const Vector3d& gravity, double dt);

/// Convenience overload that builds the body BVH for this call.
void step(ClothGrid& cloth, const TriMesh& body, const std::optional<BedBox>& bed,
          const ClothParams& params, const Vector3d& gravity, double dt);

/// Fraction of particles outside `body_box` grown by `margin` compared strictly against `fraction`.
bool detect_falloff(const ClothGrid& cloth, const Eigen::AlignedBox3d& body_box, double fraction, double margin);

double kinetic_energy(const ClothGrid& cloth);
double max_structural_strain(const ClothGrid& cloth);

} // namespace bg2
