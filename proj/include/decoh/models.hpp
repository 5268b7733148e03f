// models.hpp: two-dimensional Hamiltonian families H = p²/2m + V(q)

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace decoh::models {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
    double norm() const { return std::hypot(x, y); }
};

// Symmetric 2x2 matrix; only the upper triangle is stored.
struct Sym2 {
    double xx{0.0};
    double xy{0.0};
    double yy{0.0};

    Vec2 operator*(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    friend bool operator==(Sym2, Sym2) = default;
};

// Point (or displacement) in the four-dimensional phase space.
struct PhasePoint {
    double qx{0.0};
    double qy{0.0};
    double px{0.0};
    double py{0.0};

    Vec2 q() const { return {qx, qy}; }
    Vec2 p() const { return {px, py}; }

    friend PhasePoint operator+(const PhasePoint& a, const PhasePoint& b) {
        return {a.qx + b.qx, a.qy + b.qy, a.px + b.px, a.py + b.py};
    }
    friend PhasePoint operator-(const PhasePoint& a, const PhasePoint& b) {
        return {a.qx - b.qx, a.qy - b.qy, a.px - b.px, a.py - b.py};
    }
    friend PhasePoint operator*(double s, const PhasePoint& a) {
        return {s * a.qx, s * a.qy, s * a.px, s * a.py};
    }
    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

    double norm() const { return std::sqrt(qx * qx + qy * qy + px * px + py * py); }
    bool finite() const {
        return std::isfinite(qx) && std::isfinite(qy) && std::isfinite(px) && std::isfinite(py);
    }
};

// Each family exposes inline kernels so hot loops can dispatch once per run.

// V = m/2 (ωx² qx² + ωy² qy²)
struct Harmonic2D {
    double omega_x{1.0};
    double omega_y{1.0};

    double V(Vec2 q, double m) const {
        return 0.5 * m * (omega_x * omega_x * q.x * q.x + omega_y * omega_y * q.y * q.y);
    }
    Vec2 grad(Vec2 q, double m) const {
        return {m * omega_x * omega_x * q.x, m * omega_y * omega_y * q.y};
    }
    Sym2 hess(Vec2, double m) const { return {m * omega_x * omega_x, 0.0, m * omega_y * omega_y}; }
    friend bool operator==(const Harmonic2D&, const Harmonic2D&) = default;
};

// V = -k qx²/2; qy is a free direction. Linear saddle with exponent sqrt(k/m).
struct InvertedHarmonic1DEmbedded {
    double k{1.0};

    double V(Vec2 q, double) const { return -0.5 * k * q.x * q.x; }
    Vec2 grad(Vec2 q, double) const { return {-k * q.x, 0.0}; }
    Sym2 hess(Vec2, double) const { return {-k, 0.0, 0.0}; }
    friend bool operator==(const InvertedHarmonic1DEmbedded&, const InvertedHarmonic1DEmbedded&) = default;
};

// V = a qx⁴/4 + b qy⁴/4. a = b = 0 is free motion.
struct SeparableQuartic {
    double a{1.0};
    double b{1.0};

    double V(Vec2 q, double) const {
        const double x2 = q.x * q.x;
        const double y2 = q.y * q.y;
        return 0.25 * (a * x2 * x2 + b * y2 * y2);
    }
    Vec2 grad(Vec2 q, double) const { return {a * q.x * q.x * q.x, b * q.y * q.y * q.y}; }
    Sym2 hess(Vec2 q, double) const { return {3.0 * a * q.x * q.x, 0.0, 3.0 * b * q.y * q.y}; }
    friend bool operator==(const SeparableQuartic&, const SeparableQuartic&) = default;
};

// V = (qx² + qy²)/2 + λ (qx² qy - qy³/3). Bounded motion for E < 1/(6λ²).
struct HenonHeiles {
    double lambda{1.0};

    double V(Vec2 q, double) const {
        const double x = q.x;
        const double y = q.y;
        return 0.5 * (x * x + y * y) + lambda * (x * x * y - y * y * y / 3.0);
    }
    Vec2 grad(Vec2 q, double) const {
        return {q.x + 2.0 * lambda * q.x * q.y, q.y + lambda * (q.x * q.x - q.y * q.y)};
    }
    Sym2 hess(Vec2 q, double) const {
        return {1.0 + 2.0 * lambda * q.y, 2.0 * lambda * q.x, 1.0 - 2.0 * lambda * q.y};
    }
    friend bool operator==(const HenonHeiles&, const HenonHeiles&) = default;
};

// V = (qx² + qy²)/2 + α qx² qy²
struct PullenEdmonds {
    double alpha{1.0};

    double V(Vec2 q, double) const {
        return 0.5 * (q.x * q.x + q.y * q.y) + alpha * q.x * q.x * q.y * q.y;
    }
    Vec2 grad(Vec2 q, double) const {
        return {q.x + 2.0 * alpha * q.x * q.y * q.y, q.y + 2.0 * alpha * q.x * q.x * q.y};
    }
    Sym2 hess(Vec2 q, double) const {
        return {1.0 + 2.0 * alpha * q.y * q.y, 4.0 * alpha * q.x * q.y, 1.0 + 2.0 * alpha * q.x * q.x};
    }
    friend bool operator==(const PullenEdmonds&, const PullenEdmonds&) = default;
};

using Family = std::variant<Harmonic2D, InvertedHarmonic1DEmbedded, SeparableQuartic, HenonHeiles,
                            PullenEdmonds>;

inline constexpr std::array<std::string_view, 5> kFamilyNames = {
    "Harmonic2D", "InvertedHarmonic1DEmbedded", "SeparableQuartic", "HenonHeiles", "PullenEdmonds"};

class HamiltonianModel {
public:
    // Throws DomainError if the parameters violate the family's constraints.
    explicit HamiltonianModel(Family family, double mass = 1.0);

    const Family& family() const noexcept { return family_; }
    double mass() const noexcept { return mass_; }
    std::string_view family_name() const noexcept;

    friend bool operator==(const HamiltonianModel&, const HamiltonianModel&) = default;

private:
    Family family_;
    double mass_;
};

double potential(const HamiltonianModel& model, Vec2 q);
Vec2 grad_potential(const HamiltonianModel& model, Vec2 q);
Sym2 hessian_potential(const HamiltonianModel& model, Vec2 q);
double total_energy(const HamiltonianModel& model, const PhasePoint& z);

}  // namespace decoh::models
