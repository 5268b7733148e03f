#include "decoh/models.hpp"

#include "decoh/errors.hpp"

namespace decoh::models {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(Vec2 q) {
    if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
        throw DomainError("non-finite position passed to potential evaluation");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

HamiltonianModel::HamiltonianModel(Family family, double mass) : family_(family), mass_(mass) {
    require(positive(mass), "mass must be positive and finite");
    std::visit(overloaded{
                   [](const Harmonic2D& f) {
                       require(positive(f.omega_x) && positive(f.omega_y),
                               "Harmonic2D: omega_x and omega_y must be positive");
                   },
                   [](const InvertedHarmonic1DEmbedded& f) {
                       require(positive(f.k), "InvertedHarmonic1DEmbedded: k must be positive");
                   },
                   [](const SeparableQuartic& f) {
                       require(non_negative(f.a) && non_negative(f.b),
                               "SeparableQuartic: a and b must be non-negative");
                   },
                   [](const HenonHeiles& f) {
                       require(positive(f.lambda), "HenonHeiles: lambda must be positive");
                   },
                   [](const PullenEdmonds& f) {
                       require(positive(f.alpha), "PullenEdmonds: alpha must be positive");
                   },
               },
               family_);
}

std::string_view HamiltonianModel::family_name() const noexcept {
    return kFamilyNames[family_.index()];
}

double potential(const HamiltonianModel& model, Vec2 q) {
    require_finite(q);
    return std::visit([&](const auto& f) { return f.V(q, model.mass()); }, model.family());
}

Vec2 grad_potential(const HamiltonianModel& model, Vec2 q) {
    require_finite(q);
    return std::visit([&](const auto& f) { return f.grad(q, model.mass()); }, model.family());
}

Sym2 hessian_potential(const HamiltonianModel& model, Vec2 q) {
    require_finite(q);
    return std::visit([&](const auto& f) { return f.hess(q, model.mass()); }, model.family());
}

double total_energy(const HamiltonianModel& model, const PhasePoint& z) {
    if (!z.finite()) throw DomainError("non-finite phase point passed to total_energy");
    return (z.px * z.px + z.py * z.py) / (2.0 * model.mass()) + potential(model, z.q());
}

}  // namespace decoh::models
