#ifndef OPALSHIFT_VEC_HPP
#define OPALSHIFT_VEC_HPP

#include <array>
#include <cmath>
#include <complex>

namespace opalshift {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double norm2(Vec3 a) { return dot(a, a); }

// complex 3-vector (field envelopes)
using Cvec3 = std::array<std::complex<double>, 3>;

inline double abs2(const Cvec3& v) {
    return std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]);
}

}  // namespace opalshift

#endif
