#include "clutter/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace clutter::geom {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    double n = norm();
    if (n == 0.0) return {};
    return {x / n, y / n, z / n};
}

double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

namespace {

// Row-major 3x3 rotation from RPY (Rz(yaw) * Ry(pitch) * Rx(roll)).
std::array<double, 9> rpy_matrix(double r, double p, double y) {
    double cr = std::cos(r), sr = std::sin(r);
    double cp = std::cos(p), sp = std::sin(p);
    double cy = std::cos(y), sy = std::sin(y);
    return {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
            sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
            -sp,     cp * sr,                cp * cr};
}

Vec3 mat_apply(const std::array<double, 9>& m, const Vec3& v) {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

std::array<double, 9> mat_mul(const std::array<double, 9>& a,
                              const std::array<double, 9>& b) {
    std::array<double, 9> c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
    return c;
}

// RPY extraction matching rpy_matrix above.
void mat_to_rpy(const std::array<double, 9>& m, double& r, double& p, double& y) {
    p = std::asin(std::max(-1.0, std::min(1.0, -m[6])));
    if (std::abs(m[6]) < 1.0 - 1e-12) {
        r = std::atan2(m[7], m[8]);
        y = std::atan2(m[3], m[0]);
    } else {
        r = std::atan2(-m[5], m[4]);
        y = 0.0;
    }
}

}  // namespace

Vec3 Pose::rotate(const Vec3& p) const {
    return mat_apply(rpy_matrix(roll, pitch, yaw), p);
}

Vec3 Pose::apply(const Vec3& p) const { return rotate(p) + position; }

Pose Pose::compose(const Pose& local) const {
    auto ma = rpy_matrix(roll, pitch, yaw);
    auto mb = rpy_matrix(local.roll, local.pitch, local.yaw);
    auto mc = mat_mul(ma, mb);
    Pose out;
    out.position = apply(local.position);
    mat_to_rpy(mc, out.roll, out.pitch, out.yaw);
    out.roll = wrap_angle(out.roll);
    out.pitch = wrap_angle(out.pitch);
    out.yaw = wrap_angle(out.yaw);
    return out;
}

Pose Pose::inverse() const {
    auto m = rpy_matrix(roll, pitch, yaw);
    // transpose = inverse rotation
    std::array<double, 9> mt{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    Pose out;
    mat_to_rpy(mt, out.roll, out.pitch, out.yaw);
    Vec3 ip = mat_apply(mt, position);
    out.position = {-ip.x, -ip.y, -ip.z};
    return out;
}

bool Pose::finite() const {
    return std::isfinite(position.x) && std::isfinite(position.y) &&
           std::isfinite(position.z) && std::isfinite(roll) &&
           std::isfinite(pitch) && std::isfinite(yaw);
}

void ShapeDescriptor::validate() const {
    auto bad = [](double d) { return !(d > 0.0) || !std::isfinite(d); };
    switch (kind) {
        case ShapeKind::Box:
            if (bad(dims[0]) || bad(dims[1]) || bad(dims[2]))
                throw std::invalid_argument("box extents must be strictly positive");
            break;
        case ShapeKind::Cylinder:
            if (bad(dims[0]) || bad(dims[1]))
                throw std::invalid_argument("cylinder radius/height must be strictly positive");
            break;
        case ShapeKind::Sphere:
            if (bad(dims[0]))
                throw std::invalid_argument("sphere radius must be strictly positive");
            break;
    }
}

double ShapeDescriptor::surface_area() const {
    switch (kind) {
        case ShapeKind::Box:
            return 2.0 * (dims[0] * dims[1] + dims[1] * dims[2] + dims[0] * dims[2]);
        case ShapeKind::Cylinder:
            return 2.0 * M_PI * dims[0] * dims[1] + 2.0 * M_PI * dims[0] * dims[0];
        case ShapeKind::Sphere:
            return 4.0 * M_PI * dims[0] * dims[0];
    }
    return 0.0;
}

double ShapeDescriptor::half_height() const {
    switch (kind) {
        case ShapeKind::Box: return dims[2] * 0.5;
        case ShapeKind::Cylinder: return dims[1] * 0.5;
        case ShapeKind::Sphere: return dims[0];
    }
    return 0.0;
}

std::string ShapeDescriptor::kind_name() const {
    switch (kind) {
        case ShapeKind::Box: return "box";
        case ShapeKind::Cylinder: return "cylinder";
        case ShapeKind::Sphere: return "sphere";
    }
    return "?";
}

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double unit() { return u64_to_unit(gen()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
};

Vec3 sample_box_surface(const std::array<double, 3>& ext, Rng& rng) {
    double hx = ext[0] * 0.5, hy = ext[1] * 0.5, hz = ext[2] * 0.5;
    double axy = ext[0] * ext[1];  // +-z faces
    double ayz = ext[1] * ext[2];  // +-x faces
    double axz = ext[0] * ext[2];  // +-y faces
    double total = 2.0 * (axy + ayz + axz);
    double pick = rng.unit() * total;
    double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
    if (pick < axy) return {u * hx, v * hy, hz};
    pick -= axy;
    if (pick < axy) return {u * hx, v * hy, -hz};
    pick -= axy;
    if (pick < ayz) return {hx, u * hy, v * hz};
    pick -= ayz;
    if (pick < ayz) return {-hx, u * hy, v * hz};
    pick -= ayz;
    if (pick < axz) return {u * hx, hy, v * hz};
    return {u * hx, -hy, v * hz};
}

Vec3 sample_cylinder_surface(double radius, double height, Rng& rng) {
    double side = 2.0 * M_PI * radius * height;
    double cap = M_PI * radius * radius;
    double pick = rng.unit() * (side + 2.0 * cap);
    if (pick < side) {
        double ang = rng.uniform(-M_PI, M_PI);
        double z = rng.uniform(-0.5, 0.5) * height;
        return {radius * std::cos(ang), radius * std::sin(ang), z};
    }
    // caps: uniform over disc
    double r = radius * std::sqrt(rng.unit());
    double ang = rng.uniform(-M_PI, M_PI);
    double z = (pick < side + cap) ? height * 0.5 : -height * 0.5;
    return {r * std::cos(ang), r * std::sin(ang), z};
}

Vec3 sample_sphere_surface(double radius, Rng& rng) {
    double z = rng.uniform(-1.0, 1.0);
    double ang = rng.uniform(-M_PI, M_PI);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {radius * r * std::cos(ang), radius * r * std::sin(ang), radius * z};
}

}  // namespace

PointCloud sample_primitive_cloud(const ShapeDescriptor& shape, std::size_t n,
                                  std::uint64_t seed) {
    shape.validate();
    if (n < 1) throw std::invalid_argument("point count must be >= 1");
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (shape.kind) {
            case ShapeKind::Box:
                cloud.points.push_back(sample_box_surface(shape.dims, rng));
                break;
            case ShapeKind::Cylinder:
                cloud.points.push_back(sample_cylinder_surface(shape.dims[0], shape.dims[1], rng));
                break;
            case ShapeKind::Sphere:
                cloud.points.push_back(sample_sphere_surface(shape.dims[0], rng));
                break;
        }
    }
    return cloud;
}

PointCloud sample_compound_cloud(const std::vector<ShapePart>& parts,
                                 std::size_t n, std::uint64_t seed) {
    if (parts.empty()) throw std::invalid_argument("sample_compound_cloud: no parts");
    if (n < 1) throw std::invalid_argument("point count must be >= 1");
    double total = 0.0;
    for (const auto& p : parts) {
        p.shape.validate();
        total += p.shape.surface_area();
    }
    PointCloud out;
    out.points.reserve(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::size_t take = (i + 1 == parts.size())
                               ? n - assigned
                               : static_cast<std::size_t>(
                                     std::llround(n * parts[i].shape.surface_area() / total));
        take = std::min(take, n - assigned);
        if (take == 0 && assigned < n && i + 1 == parts.size()) take = n - assigned;
        PointCloud part = sample_primitive_cloud(parts[i].shape, std::max<std::size_t>(take, 1),
                                                 seed + i);
        for (std::size_t k = 0; k < take; ++k)
            out.points.push_back(part.points[k] + parts[i].offset);
        assigned += take;
    }
    // rounding may leave a shortfall; top up from the largest part
    while (out.points.size() < n) out.points.push_back(out.points.back());
    return out;
}

NearestHit nearest_vector(const Vec3& query, const PointCloud& cloud) {
    if (cloud.empty()) throw std::invalid_argument("nearest_vector: empty cloud");
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        Vec3 d = cloud.points[i] - query;
        double dd = d.dot(d);
        if (dd < best) {
            best = dd;
            best_i = i;
        }
    }
    NearestHit hit;
    hit.index = best_i;
    hit.vector = cloud.points[best_i] - query;
    hit.distance = std::sqrt(best);
    return hit;
}

double total_nn_distance(const std::vector<Vec3>& keypoints,
                         const PointCloud& cloud) {
    if (keypoints.empty()) throw std::invalid_argument("total_nn_distance: no keypoints");
    if (cloud.empty()) throw std::invalid_argument("total_nn_distance: empty cloud");
    double sum = 0.0;
    for (const auto& k : keypoints) sum += nearest_vector(k, cloud).distance;
    return sum;
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose) {
    if (!pose.finite()) throw std::invalid_argument("transform_cloud: non-finite pose");
    PointCloud out;
    out.points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) out.points.push_back(pose.apply(p));
    return out;
}

}  // namespace clutter::geom
