#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace bg2 {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vector2d = Vec2<double>;
using Vector3d = Vec3<double>;
using Matrix3d = Mat3<double>;
using Matrix2Xd = Eigen::Matrix<double, 2, Eigen::Dynamic>;
using Matrix3Xd = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Matrix3Xi = Eigen::Matrix<int, 3, Eigen::Dynamic>;

enum class ErrorCode {
    InvalidArgument,
    BehindCamera,
    DegenerateTorso,
    MixedExcluded,
    NumericalBlowup,
    BadRange,
    DimensionMismatch,
    MissingBake,
    MissingSourceFrame,
    InconsistentManifest,
    EmptyJoints,
    JointSetMismatch,
    DegenerateNormalizer,
    MissingSourceJoint,
    FrameMismatch,
    ModelCountMismatch,
    FormatError,
    IoError,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the toolkit carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace bg2
