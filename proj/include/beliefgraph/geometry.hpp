#pragma once

#include <algorithm>
#include <cmath>

namespace beliefgraph {

/// A point on the world ground plane (meters) or in an image (pixels).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Point2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

inline Point2 normalized(const Point2& p) {
    const double n = p.norm();
    return n > 0.0 ? p * (1.0 / n) : Point2{};
}

/// Axis-aligned image box, corners (x1, y1) top-left and (x2, y2) bottom-right.
struct Box {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
    Point2 center() const { return {(x1 + x2) / 2.0, (y1 + y2) / 2.0}; }
    // Ground contact point of an upright object.
    Point2 bottom_center() const { return {(x1 + x2) / 2.0, y2}; }
    double diagonal() const { return std::hypot(width(), height()); }
    bool valid() const { return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
                                std::isfinite(y2) && x2 >= x1 && y2 >= y1; }
    bool operator==(const Box&) const = default;
};

inline bool box_inside(const Box& b, double width, double height) {
    return b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= width && b.y2 <= height;
}

inline Box clip_box(const Box& b, double width, double height) {
    Box c{std::clamp(b.x1, 0.0, width), std::clamp(b.y1, 0.0, height),
          std::clamp(b.x2, 0.0, width), std::clamp(b.y2, 0.0, height)};
    return c;
}

}  // namespace beliefgraph
