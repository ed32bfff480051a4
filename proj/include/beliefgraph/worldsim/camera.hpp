#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "beliefgraph/geometry.hpp"

namespace beliefgraph::worldsim {

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed camera observing the ground plane. `image_to_world` is the
/// ground-plane homography (pixels -> meters); its inverse renders world
/// points into the image.
class Camera {
public:
    int id = 0;
    Point2 position;
    double yaw = 0.0;
    double hfov = 1.2;
    int width = 640;
    int height = 480;
    // Mount height and downward pitch; only used to derive the homography.
    double mount_height = 2.8;
    double pitch = 0.6;

    /// Pinhole camera at `position` (height `mount_height`) looking along `yaw`,
    /// tilted down by `pitch`.
    static Camera from_pose(int id, Point2 position, double yaw, double hfov, int width, int height,
                            double mount_height, double pitch);

    /// Camera with an explicitly declared image->world homography.
    static Camera from_homography(int id, Point2 position, double yaw, double hfov, int width,
                                  int height, const Eigen::Matrix3d& image_to_world);

    const Eigen::Matrix3d& image_to_world() const { return image_to_world_; }
    const Eigen::Matrix3d& world_to_image() const { return world_to_image_; }

    /// Pixel of a ground point, or nullopt when behind the camera or outside the image.
    std::optional<Point2> project(const Point2& world) const;

    /// Ground point of a pixel, or nullopt when the pixel is outside the image
    /// or above the horizon.
    std::optional<Point2> lift(const Point2& pixel) const;

    /// Homography evaluation without any frustum test. `depth` receives the
    /// homogeneous scale (positive in front of the camera).
    Point2 project_unchecked(const Point2& world, double* depth = nullptr) const;
    Point2 lift_unchecked(const Point2& pixel) const;

    bool in_image(const Point2& px) const {
        return px.x >= 0.0 && px.y >= 0.0 && px.x <= width && px.y <= height;
    }
    bool in_image(const Box& b) const { return box_inside(b, width, height); }

    /// Ground-plane unit vector that maps to the image's +u direction.
    Point2 right_axis() const;

    /// Upright box of an object standing at `ground` with physical width
    /// `width_m` and height/width ratio `aspect`. The box bottom-center is the
    /// projection of `ground`. No frustum test.
    Box render_box(const Point2& ground, double width_m, double aspect) const;

    /// Pixels per ground meter along the image rows at `ground`.
    double pixels_per_meter(const Point2& ground) const;

private:
    void set_homography(const Eigen::Matrix3d& image_to_world);

    Eigen::Matrix3d image_to_world_ = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d world_to_image_ = Eigen::Matrix3d::Identity();
};

}  // namespace beliefgraph::worldsim
