#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace clutter::geom {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    Vec3 normalized() const;   // zero vector stays zero
};

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

/// Rigid pose: translation plus roll-pitch-yaw orientation.
struct Pose {
    Vec3 position;
    double roll = 0.0, pitch = 0.0, yaw = 0.0;

    static Pose identity() { return {}; }

    Vec3 apply(const Vec3& p) const;          // rotate then translate
    Vec3 rotate(const Vec3& p) const;         // rotation only
    Pose compose(const Pose& local) const;    // this * local
    Pose inverse() const;
    bool finite() const;
};

enum class ShapeKind { Box, Cylinder, Sphere };

/// Primitive solid used in place of mesh assets.
/// Box: dims = full extents (x, y, z). Cylinder: dims[0] = radius,
/// dims[1] = height (axis +z). Sphere: dims[0] = radius.
struct ShapeDescriptor {
    ShapeKind kind = ShapeKind::Box;
    std::array<double, 3> dims{0.04, 0.04, 0.04};

    void validate() const;      // throws std::invalid_argument on bad extents
    double surface_area() const;
    double half_height() const; // distance from center to lowest point
    std::string kind_name() const;
};

struct PointCloud {
    std::vector<Vec3> points;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

struct NearestHit {
    Vec3 vector;      // cloud[index] - query
    double distance = 0.0;
    std::size_t index = 0;
};

/// Deterministic surface sampling; point allocation across faces is
/// proportional to face area.
PointCloud sample_primitive_cloud(const ShapeDescriptor& shape, std::size_t n,
                                  std::uint64_t seed);

/// One primitive of a compound object, offset from the object frame.
struct ShapePart {
    ShapeDescriptor shape;
    Vec3 offset;
};

/// Irregular objects are unions of primitives; points are allocated across
/// parts proportional to surface area.
PointCloud sample_compound_cloud(const std::vector<ShapePart>& parts,
                                 std::size_t n, std::uint64_t seed);

/// Linear scan, ties broken by lowest index. Throws on empty cloud.
NearestHit nearest_vector(const Vec3& query, const PointCloud& cloud);

/// Sum of nearest-neighbor distances over all keypoints (D_nn).
double total_nn_distance(const std::vector<Vec3>& keypoints,
                         const PointCloud& cloud);

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose);

/// Portable uniform double in [0, 1) from a 64-bit word.
inline double u64_to_unit(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

}  // namespace clutter::geom
