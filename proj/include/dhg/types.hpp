#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dhg {

// Dense types used across the library. Scalars default to double; the
// templated aliases exist so small kernels can be instantiated on float
// when callers need it.
template <typename S> using Vec3T = Eigen::Matrix<S, 3, 1>;
template <typename S> using Vec6T = Eigen::Matrix<S, 6, 1>;
template <typename S> using Mat3T = Eigen::Matrix<S, 3, 3>;
template <typename S> using VecXT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
// Row-major point lists: one point per row, expression-friendly with
// Eigen::Ref in free-function signatures.
template <typename S>
using PointsT = Eigen::Matrix<S, Eigen::Dynamic, 3, Eigen::RowMajor>;

using Vec3 = Vec3T<double>;
using Vec6 = Vec6T<double>;
using Mat3 = Mat3T<double>;
using VecX = VecXT<double>;
using Points = PointsT<double>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

using Index = Eigen::Index;

// Thrown on violated preconditions and malformed inputs (the "invalid-input
// error" of the public contracts). Internal failures use std::runtime_error.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    return "?";
}

// Reflection matrix across the plane orthogonal to the given axis.
template <typename S = double>
Mat3T<S> reflection_matrix(Axis axis) {
    Mat3T<S> m = Mat3T<S>::Identity();
    m(static_cast<int>(axis), static_cast<int>(axis)) = S(-1);
    return m;
}

}  // namespace dhg
