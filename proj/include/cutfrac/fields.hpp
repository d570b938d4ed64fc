#ifndef CUTFRAC_FIELDS_HPP
#define CUTFRAC_FIELDS_HPP

#include <functional>
#include <string>

#include "cutfrac/geometry.hpp"

namespace cutfrac {

/// Scalar coefficient field: constant, affine c + ax*x + ay*y, a named builtin,
/// or (C++ API only) a custom callable with its gradient.
class ScalarField {
public:
    ScalarField() = default; // zero field
    static ScalarField constant(double c);
    static ScalarField affine(double c, double ax, double ay);
    static ScalarField builtin(const std::string& name);
    static ScalarField custom(std::function<double(Vec2)> value,
                              std::function<Vec2(Vec2)> gradient);

    double value(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;

    bool is_constant() const { return kind_ == Kind::constant; }

private:
    enum class Kind { constant, affine, builtin, custom };
    Kind kind_ = Kind::constant;
    double c_ = 0.0, ax_ = 0.0, ay_ = 0.0;
    std::string builtin_name_;
    std::function<double(Vec2)> fval_;
    std::function<Vec2(Vec2)> fgrad_;
};

/// Vector coefficient field (bulk convection): constant or affine c + J*x
/// with closed-form divergence trace(J).
class VectorField {
public:
    VectorField() = default; // zero field
    static VectorField constant(Vec2 c);
    static VectorField affine(Vec2 c, const std::array<std::array<double, 2>, 2>& jac);

    Vec2 value(Vec2 p) const;
    double divergence(Vec2 /*p*/) const { return jac_[0][0] + jac_[1][1]; }

private:
    Vec2 c_{0, 0};
    std::array<std::array<double, 2>, 2> jac_{{{0, 0}, {0, 0}}};
};

} // namespace cutfrac

#endif
