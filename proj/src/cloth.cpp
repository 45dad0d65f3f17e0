#include <bg2/cloth.hpp>

#include <cmath>
#include <limits>

namespace bg2 {

void ClothGrid::validate() const
{
    if (nx < 2 || ny < 2)
        throw Error(ErrorCode::InvalidArgument, "cloth grid needs at least 2x2 particles");
    if (!(spacing > 0.0))
        throw Error(ErrorCode::InvalidArgument, "cloth spacing must be positive");
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    if (positions.cols() != n || prev_positions.cols() != n || velocities.cols() != n || inv_mass.size() != n)
        throw Error(ErrorCode::InvalidArgument, "cloth buffers do not match nx*ny");
    if (!positions.allFinite())
        throw Error(ErrorCode::NumericalBlowup, "cloth positions are not finite");
    if ((inv_mass.array() < 0.0).any())
        throw Error(ErrorCode::InvalidArgument, "negative inverse mass");
}

void ClothParams::validate() const
{
    if (stretch_compliance < 0.0 || shear_compliance < 0.0 || bend_compliance < 0.0)
        throw Error(ErrorCode::InvalidArgument, "compliances must be non-negative");
    if (!(thickness > 0.0))
        throw Error(ErrorCode::InvalidArgument, "thickness must be positive");
    if (friction < 0.0 || friction > 1.0)
        throw Error(ErrorCode::InvalidArgument, "friction must lie in [0,1]");
    if (substeps < 1 || solver_iterations < 1)
        throw Error(ErrorCode::InvalidArgument, "substeps and iterations must be >= 1");
    if (!(total_mass > 0.0))
        throw Error(ErrorCode::InvalidArgument, "cloth mass must be positive");
}

void BedBox::validate() const
{
    if ((half_extents.array() <= 0.0).any())
        throw Error(ErrorCode::InvalidArgument, "bed half extents must be positive");
    if (!(orientation * orientation.transpose()).isApprox(Matrix3d::Identity(), 1e-6))
        throw Error(ErrorCode::InvalidArgument, "bed orientation is not orthonormal");
}

bool BedBox::contains(const Vector3d& p, double inflate) const
{
    const Vector3d local = orientation.transpose() * (p - center);
    return (local.array().abs() < (half_extents.array() + inflate)).all();
}

std::vector<DistanceConstraint> grid_constraints(int nx, int ny, double spacing)
{
    std::vector<DistanceConstraint> out;
    auto idx = [nx](int i, int j) { return static_cast<Eigen::Index>(j) * nx + i; };
    const double diag = spacing * std::sqrt(2.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (i + 1 < nx)
                out.push_back({idx(i, j), idx(i + 1, j), spacing, ConstraintKind::Structural});
            if (j + 1 < ny)
                out.push_back({idx(i, j), idx(i, j + 1), spacing, ConstraintKind::Structural});
        }
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            out.push_back({idx(i, j), idx(i + 1, j + 1), diag, ConstraintKind::Shear});
            out.push_back({idx(i + 1, j), idx(i, j + 1), diag, ConstraintKind::Shear});
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (i + 2 < nx)
                out.push_back({idx(i, j), idx(i + 2, j), 2.0 * spacing, ConstraintKind::Bend});
            if (j + 2 < ny)
                out.push_back({idx(i, j), idx(i, j + 2), 2.0 * spacing, ConstraintKind::Bend});
        }
    return out;
}

double project_distance(Vector3d& pa, Vector3d& pb, double wa, double wb, double rest,
                        double compliance, double h, double lambda)
{
    const Vector3d delta = pa - pb;
    const double len = delta.norm();
    const double alphaTilde = compliance / (h * h);
    const double denom = wa + wb + alphaTilde;
    if (len < 1e-12 || denom <= 0.0)
        return 0.0;
    const double c = len - rest;
    const double dLambda = (-c - alphaTilde * lambda) / denom;
    const Vector3d grad = delta / len;
    pa += (wa * dLambda) * grad;
    pb -= (wb * dLambda) * grad;
    return dLambda;
}

Vector3d gravity_direction(SequenceCategory category, const JointSet& joints_t0, const Vector3d& floor_up,
                           const Vector3d& bed_direction, const TorsoJoints& names)
{
    switch (category) {
    case SequenceCategory::Mixed:
        throw Error(ErrorCode::MixedExcluded, "mixed standing/lying sequences are not simulated");
    case SequenceCategory::Lying:
        return -floor_up.normalized();
    case SequenceCategory::Standing: {
        const TorsoFrame frame = torso_frame(joints_t0, names);
        const double side = frame.facing.dot(bed_direction);
        if (std::abs(side) < 1e-9)
            throw Error(ErrorCode::InvalidArgument, "bed direction is orthogonal to the torso facing axis");
        return side > 0.0 ? frame.facing : Vector3d(-frame.facing);
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown category");
}

namespace {

// Planar basis orthogonal to g, seeded from the world axis least aligned with it.
std::pair<Vector3d, Vector3d> planar_basis(const Vector3d& g)
{
    int axis = 0;
    g.cwiseAbs().minCoeff(&axis);
    const Vector3d helper = Vector3d::Unit(axis);
    const Vector3d e1 = (helper - helper.dot(g) * g).normalized();
    const Vector3d e2 = g.cross(e1);
    return {e1, e2};
}

double support_width(const Eigen::AlignedBox3d& box, const Vector3d& dir)
{
    return box.sizes().cwiseProduct(dir.cwiseAbs()).sum();
}

} // namespace

Drape drape_init(const GridSpec& grid, const Matrix3Xd& body_vertices, const Vector3d& gravity,
                 const ClothParams& params)
{
    params.validate();
    const Vector3d g = gravity.normalized();
    const Eigen::AlignedBox3d box = bounding_box(body_vertices);
    if (box.isEmpty() || box.sizes().maxCoeff() <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "body bounding box is degenerate");

    const auto [e1, e2] = planar_basis(g);
    const double w1 = support_width(box, e1);
    const double w2 = support_width(box, e2);
    const double wg = support_width(box, g);

    int nx = grid.nx, ny = grid.ny;
    double spacing = grid.spacing;
    if (spacing <= 0.0) {
        if (grid.resolution < 2)
            throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 2");
        spacing = grid.coverage * std::max(w1, w2) / (grid.resolution - 1);
    }
    if (nx <= 0)
        nx = std::max(2, static_cast<int>(std::lround(grid.coverage * w1 / spacing)) + 1);
    if (ny <= 0)
        ny = std::max(2, static_cast<int>(std::lround(grid.coverage * w2 / spacing)) + 1);

    Drape out;
    ClothGrid& c = out.cloth;
    c.nx = nx;
    c.ny = ny;
    c.spacing = spacing;
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    c.positions.resize(3, n);
    const Vector3d origin = box.center() - g * (0.5 * wg + 5.0 * params.thickness);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            c.positions.col(c.index(i, j)) = origin + (i - 0.5 * (nx - 1)) * spacing * e1 +
                                             (j - 0.5 * (ny - 1)) * spacing * e2;
    c.prev_positions = c.positions;
    c.velocities = Matrix3Xd::Zero(3, n);
    c.inv_mass = Eigen::VectorXd::Constant(n, static_cast<double>(n) / params.total_mass);
    out.cloth_too_small = (nx - 1) * spacing < w1 || (ny - 1) * spacing < w2;
    return out;
}

namespace {

double compliance_for(const ClothParams& p, ConstraintKind k)
{
    switch (k) {
    case ConstraintKind::Structural: return p.stretch_compliance;
    case ConstraintKind::Shear: return p.shear_compliance;
    case ConstraintKind::Bend: return p.bend_compliance;
    }
    return 0.0;
}

// Pushes x out of the body; returns the contact normal when a push happened.
std::optional<Vector3d> collide_body(Vector3d& x, const MeshBvh& body, const ClothParams& p)
{
    const ClosestPoint<double> cp = body.closest_point(x);
    if (cp.triangle < 0)
        return std::nullopt;
    const double side = (x - cp.point).dot(cp.normal);
    if (cp.distance < p.thickness || side < 0.0) {
        x = cp.point + p.thickness * cp.normal;
        return cp.normal;
    }
    return std::nullopt;
}

// Offset surface of the box at distance `thickness`: rounded at edges and corners.
std::optional<Vector3d> collide_bed(Vector3d& x, const BedBox& bed, const ClothParams& p)
{
    const Vector3d local = bed.orientation.transpose() * (x - bed.center);
    const Vector3d half = bed.half_extents;
    const Vector3d clamped = local.cwiseMax(-half).cwiseMin(half);
    const Vector3d outside = local - clamped;
    const double dist = outside.norm();
    if (dist >= p.thickness)
        return std::nullopt;
    Vector3d normal;
    Vector3d pushed;
    if (dist > 0.0) {
        normal = outside / dist;
        pushed = clamped + p.thickness * normal;
    } else {
        const Eigen::Array3d depth = half.array() - local.array().abs();
        int axis = 0;
        depth.minCoeff(&axis);
        const double sign = local[axis] >= 0.0 ? 1.0 : -1.0;
        normal = sign * Vector3d::Unit(axis);
        pushed = local;
        pushed[axis] = sign * (half[axis] + p.thickness);
    }
    x = bed.center + bed.orientation * pushed;
    return Vector3d(bed.orientation * normal);
}

} // namespace

void step(ClothGrid& cloth, const Colliders& colliders, const ClothParams& params,
          const Vector3d& gravity, double dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    params.validate();
    cloth.validate();

    const double h = dt / params.substeps;
    const Vector3d accel = gravity * params.gravity_magnitude;
    const std::vector<DistanceConstraint> constraints = grid_constraints(cloth.nx, cloth.ny, cloth.spacing);
    std::vector<double> lambdas(constraints.size());
    const Eigen::Index n = cloth.size();

    for (int s = 0; s < params.substeps; ++s) {
        cloth.prev_positions = cloth.positions;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (cloth.inv_mass[i] == 0.0)
                continue;
            cloth.velocities.col(i) += accel * h;
            cloth.positions.col(i) += cloth.velocities.col(i) * h;
        }

        std::fill(lambdas.begin(), lambdas.end(), 0.0);
        for (int it = 0; it < params.solver_iterations; ++it) {
            for (std::size_t k = 0; k < constraints.size(); ++k) {
                const DistanceConstraint& c = constraints[k];
                Vector3d pa = cloth.positions.col(c.a);
                Vector3d pb = cloth.positions.col(c.b);
                lambdas[k] += project_distance(pa, pb, cloth.inv_mass[c.a], cloth.inv_mass[c.b], c.rest,
                                               compliance_for(params, c.kind), h, lambdas[k]);
                cloth.positions.col(c.a) = pa;
                cloth.positions.col(c.b) = pb;
            }
        }

        if (colliders.body || colliders.bed) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (cloth.inv_mass[i] == 0.0)
                    continue;
                Vector3d x = cloth.positions.col(i);
                std::optional<Vector3d> normal;
                for (int pass = 0; pass < 2; ++pass) {
                    if (colliders.body && !colliders.body->empty())
                        if (auto n = collide_body(x, *colliders.body, params))
                            normal = n;
                    if (colliders.bed)
                        if (auto n = collide_bed(x, *colliders.bed, params))
                            normal = n;
                }
                // Friction once per vertex against the substep displacement, using the last contact normal.
                if (normal) {
                    const Vector3d d = x - cloth.prev_positions.col(i);
                    x -= params.friction * (d - d.dot(*normal) * *normal);
                }
                cloth.positions.col(i) = x;
            }
        }

        cloth.velocities = (cloth.positions - cloth.prev_positions) / h;

        if (!cloth.positions.allFinite() || cloth.positions.cwiseAbs().maxCoeff() > 1e6)
            throw Error(ErrorCode::NumericalBlowup, "cloth diverged; check compliance and time step");
    }
}

void step(ClothGrid& cloth, const TriMesh& body, const std::optional<BedBox>& bed,
          const ClothParams& params, const Vector3d& gravity, double dt)
{
    const MeshBvh bvh(body);
    Colliders colliders;
    colliders.body = bvh.empty() ? nullptr : &bvh;
    colliders.bed = bed ? &*bed : nullptr;
    step(cloth, colliders, params, gravity, dt);
}

bool detect_falloff(const ClothGrid& cloth, const Eigen::AlignedBox3d& body_box, double fraction, double margin)
{
    if (!(fraction > 0.0 && fraction <= 1.0) || margin < 0.0)
        throw Error(ErrorCode::InvalidArgument, "fall-off fraction must be in (0,1] and margin >= 0");
    const Vector3d lo = body_box.min().array() - margin;
    const Vector3d hi = body_box.max().array() + margin;
    Eigen::Index outside = 0;
    for (Eigen::Index i = 0; i < cloth.size(); ++i) {
        const Vector3d p = cloth.positions.col(i);
        if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any())
            ++outside;
    }
    return static_cast<double>(outside) > fraction * static_cast<double>(cloth.size());
}

double kinetic_energy(const ClothGrid& cloth)
{
    double e = 0.0;
    for (Eigen::Index i = 0; i < cloth.size(); ++i)
        if (cloth.inv_mass[i] > 0.0)
            e += 0.5 * cloth.velocities.col(i).squaredNorm() / cloth.inv_mass[i];
    return e;
}

double max_structural_strain(const ClothGrid& cloth)
{
    double worst = 0.0;
    for (const DistanceConstraint& c : grid_constraints(cloth.nx, cloth.ny, cloth.spacing)) {
        if (c.kind != ConstraintKind::Structural)
            continue;
        const double len = (cloth.positions.col(c.a) - cloth.positions.col(c.b)).norm();
        worst = std::max(worst, std::abs(len - c.rest) / c.rest);
    }
    return worst;
}

} // namespace bg2
