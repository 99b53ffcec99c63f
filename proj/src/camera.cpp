#include "labelgrid/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace labelgrid {

void CameraIntrinsics::validate() const
{
    if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: fx, fy must be > 0");
    if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: empty image size");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        throw std::invalid_argument("intrinsics: principal point outside the image");
}

void Pose::validate() const
{
    if (!rotation.allFinite() || !translation.allFinite())
        throw std::invalid_argument("pose: non-finite entries");
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho > 1e-9) throw std::invalid_argument("pose: rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-9)
        throw std::invalid_argument("pose: rotation determinant is not +1");
}

Pose Pose::look_at(const Vec3& eye, const Vec3& target, const Vec3& up)
{
    const Vec3 forward = (target - eye).normalized();
    Vec3 right = forward.cross(up);
    if (right.norm() < 1e-12) throw std::invalid_argument("look_at: up is parallel to the view axis");
    right.normalize();
    const Vec3 down = forward.cross(right);

    Pose pose;
    pose.rotation.col(0) = right;
    pose.rotation.col(1) = down;
    pose.rotation.col(2) = forward;
    pose.translation = eye;
    return pose;
}

Pose Pose::interpolate(const Pose& a, const Pose& b, double t)
{
    const Eigen::Quaterniond qa(a.rotation);
    const Eigen::Quaterniond qb(b.rotation);
    Pose out;
    out.rotation = qa.slerp(t, qb).normalized().toRotationMatrix();
    out.translation = (1.0 - t) * a.translation + t * b.translation;
    return out;
}

bool operator==(const Pose& a, const Pose& b)
{
    return a.rotation == b.rotation && a.translation == b.translation;
}

std::optional<Vec3> deproject(double u, double v, double depth, const CameraIntrinsics& intr)
{
    if (!std::isfinite(depth) || depth <= 0.0) return std::nullopt;
    return Vec3((u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth);
}

std::optional<Vec3> project(const Vec3& p_cam, const CameraIntrinsics& intr)
{
    if (!(p_cam.z() > 0.0)) return std::nullopt;
    return Vec3(intr.fx * p_cam.x() / p_cam.z() + intr.cx,
                intr.fy * p_cam.y() / p_cam.z() + intr.cy, p_cam.z());
}

} // namespace labelgrid
