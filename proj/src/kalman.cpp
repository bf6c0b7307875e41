#include "skymot/kalman.hpp"

#include "skymot/errors.hpp"

namespace skymot::assoc {

namespace {

constexpr double kStdWeightPos = 1.0 / 20.0;
constexpr double kStdWeightVel = 1.0 / 160.0;

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

Vec4 to_measurement(const Box& box) {
    Vec4 z;
    z << box.cx(), box.cy(), box.width / box.height, box.height;
    return z;
}

Mat8 motion_matrix() {
    Mat8 f = Mat8::Identity();
    for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
    return f;
}

Mat48 update_matrix() {
    Mat48 h = Mat48::Zero();
    for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
    return h;
}

// Project the state distribution into measurement space, adding observation noise.
void project(const KalmanState& s, Vec4& z_mean, Mat4& z_cov) {
    const double h = s.mean(3);
    Vec4 std;
    std << kStdWeightPos * h, kStdWeightPos * h, 1e-1, kStdWeightPos * h;
    const Mat48 hm = update_matrix();
    z_mean = hm * s.mean;
    z_cov = hm * s.cov * hm.transpose();
    z_cov += std.array().square().matrix().asDiagonal().toDenseMatrix();
}

}  // namespace

Box KalmanState::to_box() const {
    const double h = mean(3);
    const double w = mean(2) * h;
    Box b;
    b.width = static_cast<float>(w);
    b.height = static_cast<float>(h);
    b.left = static_cast<float>(mean(0) - 0.5 * w);
    b.top = static_cast<float>(mean(1) - 0.5 * h);
    return b;
}

KalmanState kf_initiate(const Box& box) {
    if (box.width <= 0.0f || box.height <= 0.0f)
        throw ArgumentError("kf_initiate: box sizes must be positive");
    KalmanState s;
    s.mean.setZero();
    s.mean.head<4>() = to_measurement(box);
    const double h = box.height;
    Vec8 std;
    std << 2 * kStdWeightPos * h, 2 * kStdWeightPos * h, 1e-2, 2 * kStdWeightPos * h,
        10 * kStdWeightVel * h, 10 * kStdWeightVel * h, 1e-5, 10 * kStdWeightVel * h;
    s.cov = std.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kf_predict(const KalmanState& state) {
    const double h = state.mean(3);
    Vec8 std;
    std << kStdWeightPos * h, kStdWeightPos * h, 1e-2, kStdWeightPos * h,
        kStdWeightVel * h, kStdWeightVel * h, 1e-5, kStdWeightVel * h;
    const Mat8 q = std.array().square().matrix().asDiagonal();
    const Mat8 f = motion_matrix();

    KalmanState out;
    out.mean = f * state.mean;
    out.cov = f * state.cov * f.transpose() + q;
    return out;
}

KalmanState kf_update(const KalmanState& state, const Box& box) {
    Vec4 z_mean;
    Mat4 z_cov;
    project(state, z_mean, z_cov);

    const Eigen::LLT<Mat4> llt(z_cov);
    if (llt.info() != Eigen::Success)
        throw NumericError("kf_update: innovation covariance is not positive definite");

    const Mat48 hm = update_matrix();
    // gain = cov H^T S^-1, via S K^T = H cov^T
    const Eigen::Matrix<double, 8, 4> gain = llt.solve(hm * state.cov.transpose()).transpose();
    const Vec4 innovation = to_measurement(box) - z_mean;

    KalmanState out;
    out.mean = state.mean + gain * innovation;
    out.cov = state.cov - gain * z_cov * gain.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();  // keep symmetric
    return out;
}

double squared_mahalanobis(const KalmanState& state, const Box& box) {
    Vec4 z_mean;
    Mat4 z_cov;
    project(state, z_mean, z_cov);
    const Eigen::LLT<Mat4> llt(z_cov);
    if (llt.info() != Eigen::Success)
        throw NumericError("squared_mahalanobis: projected covariance is singular");
    const Vec4 d = to_measurement(box) - z_mean;
    const Vec4 y = llt.matrixL().solve(d);
    return y.squaredNorm();
}

}  // namespace skymot::assoc
