#pragma once

#include <array>
#include <cmath>

namespace bilat {

// 3-element per-joint quantity: angle [rad], velocity [rad/s] or torque [Nm]
// depending on context.
struct JointVector {
    std::array<double, 3> v{0.0, 0.0, 0.0};

    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }

    JointVector& operator+=(const JointVector& o) {
        for (int i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    JointVector& operator-=(const JointVector& o) {
        for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    JointVector& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }

    friend JointVector operator+(JointVector a, const JointVector& b) { return a += b; }
    friend JointVector operator-(JointVector a, const JointVector& b) { return a -= b; }
    friend JointVector operator*(JointVector a, double s) { return a *= s; }
    friend JointVector operator*(double s, JointVector a) { return a *= s; }
    friend JointVector operator-(JointVector a) { return a *= -1.0; }

    bool all_finite() const {
        return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
    }

    double max_abs() const {
        return std::max(std::fabs(v[0]), std::max(std::fabs(v[1]), std::fabs(v[2])));
    }
};

}  // namespace bilat
