#include "cutfrac/fields.hpp"

#include <cmath>

#include "cutfrac/errors.hpp"

namespace cutfrac {

ScalarField ScalarField::constant(double c) {
    ScalarField f;
    f.kind_ = Kind::constant;
    f.c_ = c;
    return f;
}

ScalarField ScalarField::affine(double c, double ax, double ay) {
    ScalarField f;
    f.kind_ = Kind::affine;
    f.c_ = c;
    f.ax_ = ax;
    f.ay_ = ay;
    return f;
}

ScalarField ScalarField::builtin(const std::string& name) {
    if (name != "exp_neg2y")
        throw FieldError("unknown builtin field '" + name + "'");
    ScalarField f;
    f.kind_ = Kind::builtin;
    f.builtin_name_ = name;
    return f;
}

ScalarField ScalarField::custom(std::function<double(Vec2)> value,
                                std::function<Vec2(Vec2)> gradient) {
    ScalarField f;
    f.kind_ = Kind::custom;
    f.fval_ = std::move(value);
    f.fgrad_ = std::move(gradient);
    return f;
}

double ScalarField::value(Vec2 p) const {
    switch (kind_) {
    case Kind::constant:
        return c_;
    case Kind::affine:
        return c_ + ax_ * p.x + ay_ * p.y;
    case Kind::builtin:
        return std::exp(-2.0 * p.y);
    case Kind::custom:
        if (!fval_) throw FieldError("custom scalar field has no value callback");
        return fval_(p);
    }
    return 0.0;
}

Vec2 ScalarField::gradient(Vec2 p) const {
    switch (kind_) {
    case Kind::constant:
        return {0.0, 0.0};
    case Kind::affine:
        return {ax_, ay_};
    case Kind::builtin:
        return {0.0, -2.0 * std::exp(-2.0 * p.y)};
    case Kind::custom:
        if (!fgrad_) throw FieldError("custom scalar field has no gradient callback");
        return fgrad_(p);
    }
    return {0.0, 0.0};
}

VectorField VectorField::constant(Vec2 c) {
    VectorField f;
    f.c_ = c;
    return f;
}

VectorField VectorField::affine(Vec2 c, const std::array<std::array<double, 2>, 2>& jac) {
    VectorField f;
    f.c_ = c;
    f.jac_ = jac;
    return f;
}

Vec2 VectorField::value(Vec2 p) const {
    return {c_.x + jac_[0][0] * p.x + jac_[0][1] * p.y,
            c_.y + jac_[1][0] * p.x + jac_[1][1] * p.y};
}

} // namespace cutfrac
