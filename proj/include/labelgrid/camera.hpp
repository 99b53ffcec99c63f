#pragma once

#include <optional>

#include <Eigen/Geometry>

#include "labelgrid/types.hpp"

namespace labelgrid {

// Pinhole model, no distortion.
struct CameraIntrinsics {
    double fx = 64.0;
    double fy = 64.0;
    double cx = 32.0;
    double cy = 32.0;
    int width = 64;
    int height = 64;

    void validate() const;
    bool operator==(const CameraIntrinsics&) const = default;
};

// Camera-to-world rigid transform. Camera frame: x right, y down, z forward.
struct Pose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    void validate() const;  // orthonormal, det +1 within 1e-9
    Vec3 to_world(const Vec3& p_cam) const { return rotation * p_cam + translation; }
    Vec3 to_camera(const Vec3& p_world) const
    {
        return rotation.transpose() * (p_world - translation);
    }

    // Camera at eye with its optical axis through target. up is the world
    // direction that should appear as "up" (-y) in the image.
    static Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitZ());

    // Interpolate translation linearly and rotation by slerp, t in [0, 1].
    static Pose interpolate(const Pose& a, const Pose& b, double t);
};

bool operator==(const Pose& a, const Pose& b);

// ((u - cx) d / fx, (v - cy) d / fy, d), or none for depth <= 0 / non-finite.
std::optional<Vec3> deproject(double u, double v, double depth, const CameraIntrinsics& intr);

// (u, v, d) for a camera-frame point with z > 0.
std::optional<Vec3> project(const Vec3& p_cam, const CameraIntrinsics& intr);

} // namespace labelgrid
