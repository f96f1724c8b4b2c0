#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace mitotrack {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Sentinel detection id for a frame in which an object was not observed.
inline constexpr int kMissed = -1;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientAugmentations : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyMixture : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateWeights : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownLabel : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyGroundTruth : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateCovariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FrameOrder : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadTensorHeader : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mitotrack
