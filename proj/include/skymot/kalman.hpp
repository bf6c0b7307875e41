#pragma once

#include <Eigen/Dense>

#include "skymot/geometry.hpp"

namespace skymot::assoc {

// Constant-velocity linear-Gaussian filter over (cx, cy, aspect, height).
// Process and measurement noise scale with the box height.
struct KalmanState {
    Eigen::Matrix<double, 8, 1> mean;    // cx, cy, a, h + velocities
    Eigen::Matrix<double, 8, 8> cov;

    Box to_box() const;
};

KalmanState kf_initiate(const Box& box);
KalmanState kf_predict(const KalmanState& state);
// Throws NumericError if the innovation covariance is not positive definite.
KalmanState kf_update(const KalmanState& state, const Box& box);

// Squared Mahalanobis distance of the box measurement against the projected
// state distribution.
double squared_mahalanobis(const KalmanState& state, const Box& box);

// Chi-square 0.95 quantile at 4 dof; the default gate for measurement matching.
inline constexpr double kChi2Gate95_4dof = 9.4877;

}  // namespace skymot::assoc
