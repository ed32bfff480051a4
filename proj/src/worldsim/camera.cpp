#include "beliefgraph/worldsim/camera.hpp"

#include <cmath>

namespace beliefgraph::worldsim {

namespace {
constexpr double kMinDepth = 1e-9;
}

Camera Camera::from_pose(int id, Point2 position, double yaw, double hfov, int width, int height,
                         double mount_height, double pitch) {
    Camera c;
    c.id = id;
    c.position = position;
    c.yaw = yaw;
    c.hfov = hfov;
    c.width = width;
    c.height = height;
    c.mount_height = mount_height;
    c.pitch = pitch;

    const Eigen::Vector3d forward(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch),
                                  -std::sin(pitch));
    const Eigen::Vector3d right(std::sin(yaw), -std::cos(yaw), 0.0);
    const Eigen::Vector3d down = forward.cross(right);
    const Eigen::Vector3d centre(position.x, position.y, mount_height);

    // Rows map (X, Y, 1) on the ground to camera-frame coordinates.
    Eigen::Matrix3d m;
    int row = 0;
    for (const Eigen::Vector3d& axis : {right, down, forward}) {
        m(row, 0) = axis.x();
        m(row, 1) = axis.y();
        m(row, 2) = -axis.dot(centre);
        ++row;
    }
    const double focal = (width / 2.0) / std::tan(hfov / 2.0);
    Eigen::Matrix3d k;
    k << focal, 0.0, width / 2.0, 0.0, focal, height / 2.0, 0.0, 0.0, 1.0;
    const Eigen::Matrix3d world_to_image = k * m;
    c.set_homography(world_to_image.inverse());
    return c;
}

Camera Camera::from_homography(int id, Point2 position, double yaw, double hfov, int width, int height,
                               const Eigen::Matrix3d& image_to_world) {
    Camera c;
    c.id = id;
    c.position = position;
    c.yaw = yaw;
    c.hfov = hfov;
    c.width = width;
    c.height = height;
    c.set_homography(image_to_world);
    return c;
}

void Camera::set_homography(const Eigen::Matrix3d& image_to_world) {
    if (!image_to_world.allFinite()) throw CalibrationError("homography has non-finite entries");
    const double det = image_to_world.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-15) {
        throw CalibrationError("homography of camera " + std::to_string(id) + " is singular");
    }
    image_to_world_ = image_to_world;
    world_to_image_ = image_to_world.inverse();
    // Normalise sign so that points in front of the camera have positive scale.
    const Eigen::Vector3d probe = world_to_image_ * Eigen::Vector3d(
        position.x + std::cos(yaw) * 3.0, position.y + std::sin(yaw) * 3.0, 1.0);
    if (probe.z() < 0.0) world_to_image_ = -world_to_image_;
}

Point2 Camera::project_unchecked(const Point2& world, double* depth) const {
    const Eigen::Vector3d q = world_to_image_ * Eigen::Vector3d(world.x, world.y, 1.0);
    if (depth != nullptr) *depth = q.z();
    return {q.x() / q.z(), q.y() / q.z()};
}

Point2 Camera::lift_unchecked(const Point2& pixel) const {
    const Eigen::Vector3d q = image_to_world_ * Eigen::Vector3d(pixel.x, pixel.y, 1.0);
    return {q.x() / q.z(), q.y() / q.z()};
}

std::optional<Point2> Camera::project(const Point2& world) const {
    double depth = 0.0;
    const Point2 px = project_unchecked(world, &depth);
    if (depth <= kMinDepth || !in_image(px)) return std::nullopt;
    return px;
}

std::optional<Point2> Camera::lift(const Point2& pixel) const {
    if (!in_image(pixel)) return std::nullopt;
    const Point2 world = lift_unchecked(pixel);
    if (!std::isfinite(world.x) || !std::isfinite(world.y)) return std::nullopt;
    double depth = 0.0;
    project_unchecked(world, &depth);
    if (depth <= kMinDepth) return std::nullopt;
    return world;
}

Point2 Camera::right_axis() const { return {std::sin(yaw), -std::cos(yaw)}; }

double Camera::pixels_per_meter(const Point2& ground) const {
    const Point2 r = right_axis() * 0.5;
    const Point2 a = project_unchecked(ground - r);
    const Point2 b = project_unchecked(ground + r);
    return std::abs(b.x - a.x);
}

Box Camera::render_box(const Point2& ground, double width_m, double aspect) const {
    const Point2 base = project_unchecked(ground);
    const double half = pixels_per_meter(ground) * width_m / 2.0;
    return {base.x - half, base.y - 2.0 * half * aspect, base.x + half, base.y};
}

}  // namespace beliefgraph::worldsim
