#pragma once

// Eigenpairs of the plate operator (double Laplacian, simply supported or
// clamped) and of the membrane-like network operator (-Laplacian, grounded
// edges) on the unit square.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "piezoplate/errors.hpp"
#include "piezoplate/quadrature.hpp"

namespace piezoplate {

inline constexpr double pi = std::numbers::pi;

/// Position of a mode in the global ordering plus its half-wave counts.
struct ModeIndex {
    int ordinal = 1;  // 1-based
    int i = 1;
    int j = 1;

    int wave_number_sq() const { return i * i + j * j; }
    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

namespace detail {

inline constexpr std::array<std::pair<int, int>, 9> table_one{
    {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {3, 3}}};

}  // namespace detail

/// The first `count` modes. Ordinals 1..9 are the 3x3 table; beyond that the
/// remaining pairs follow by ascending i^2 + j^2, ties by ascending i.
inline std::vector<ModeIndex> mode_sequence(int count) {
    require(count >= 0, "mode count must be non-negative");
    std::vector<ModeIndex> out;
    out.reserve(count);
    for (int k = 0; k < std::min(count, 9); ++k)
        out.push_back({k + 1, detail::table_one[k].first, detail::table_one[k].second});
    if (count <= 9) return out;

    // Every pair with i^2 + j^2 <= reach^2 has i, j <= reach, so each candidate
    // set below is complete up to its radius.
    for (int reach = 4;; ++reach) {
        std::vector<std::pair<int, int>> extra;
        for (int i = 1; i <= reach; ++i)
            for (int j = 1; j <= reach; ++j)
                if ((i > 3 || j > 3) && i * i + j * j <= reach * reach) extra.emplace_back(i, j);
        if (static_cast<int>(extra.size()) < count - 9) continue;
        std::sort(extra.begin(), extra.end(), [](auto a, auto b) {
            const int sa = a.first * a.first + a.second * a.second;
            const int sb = b.first * b.first + b.second * b.second;
            return sa != sb ? sa < sb : a.first < b.first;
        });
        for (int k = 9; k < count; ++k) out.push_back({k + 1, extra[k - 9].first, extra[k - 9].second});
        return out;
    }
}

inline ModeIndex mode_index(int ordinal) {
    require(ordinal >= 1, "mode ordinal must be >= 1");
    return mode_sequence(ordinal).back();
}

// ---------------------------------------------------------------------------
// Clamped-clamped beam functions

/// n-th positive root of cos(b) cosh(b) = 1, solved as cos(b) = sech(b).
inline double clamped_beam_root(int n) {
    require(n >= 1, "beam mode ordinal must be >= 1");
    auto g = [](double b) { return std::cos(b) - 1.0 / std::cosh(b); };
    boost::uintmax_t max_iter = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, n * pi, (n + 1) * pi, tol, max_iter);
    return 0.5 * (lo + hi);
}

/// phi(x) = cosh(bx) - cos(bx) - s (sinh(bx) - sin(bx)) on [0, 1].
///
/// The growing exponentials are combined analytically: cosh - s sinh keeps
/// only the factor (1 - s) e^{bx}, and (1 - s) is formed from decaying terms,
/// so evaluation stays accurate for large b.
class BeamMode {
public:
    explicit BeamMode(int n) : n_(n), root_(clamped_beam_root(n)) {
        const double b = root_;
        const double em = std::exp(-b);
        // sinh b - sin b = e^b (1 - e^{-2b} - 2 sin(b) e^{-b}) / 2
        const double reduced = 1.0 - em * em - 2.0 * std::sin(b) * em;
        sigma_ = (std::cosh(b) - std::cos(b)) / (std::sinh(b) - std::sin(b));
        // (1 - s) e^{b x} / 2 = grow_ * e^{b (x - 1)}
        grow_ = (std::cos(b) - std::sin(b) - em) / reduced;
        scale_ = 1.0;
        const GaussLegendre rule = gauss_legendre(64);
        scale_ = 1.0 / std::sqrt(rule.integrate([&](double x) { return value(x) * value(x); }));
    }

    int ordinal() const { return n_; }
    double root() const { return root_; }
    double sigma() const { return sigma_; }

    double value(double x) const {
        const double bx = root_ * x;
        return scale_ * (rising(x) + 0.5 * (1.0 + sigma_) * std::exp(-bx) - std::cos(bx) + sigma_ * std::sin(bx));
    }
    double slope(double x) const {
        const double bx = root_ * x;
        return scale_ * root_ *
               (rising(x) - 0.5 * (1.0 + sigma_) * std::exp(-bx) + std::sin(bx) + sigma_ * std::cos(bx));
    }
    double curvature(double x) const {
        const double bx = root_ * x;
        return scale_ * root_ * root_ *
               (rising(x) + 0.5 * (1.0 + sigma_) * std::exp(-bx) + std::cos(bx) - sigma_ * std::sin(bx));
    }

private:
    double rising(double x) const { return grow_ * std::exp(root_ * (x - 1.0)); }

    int n_;
    double root_;
    double sigma_ = 0.0;
    double grow_ = 0.0;
    double scale_ = 1.0;
};

// ---------------------------------------------------------------------------
// Mode shapes on the unit square

enum class BasisKind { mechanical_ss, mechanical_clamped, electrical_membrane };

inline std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::mechanical_ss: return "mechanical-ss";
        case BasisKind::mechanical_clamped: return "mechanical-clamped";
        case BasisKind::electrical_membrane: return "electrical-membrane";
    }
    return "unknown";
}

/// Anything a Rayleigh quotient can be taken of.
template <class F>
concept PlateField = requires(const F& f, double x) {
    { f.value(x, x) } -> std::convertible_to<double>;
    { f.laplacian(x, x) } -> std::convertible_to<double>;
};

/// Unit-L2-norm separable shape: 2 sin(i pi x1) sin(j pi x2), or a product of
/// clamped beam functions.
class ModeShape {
public:
    static ModeShape sine(ModeIndex idx) { return ModeShape(idx); }
    static ModeShape clamped(ModeIndex idx) {
        ModeShape s(idx);
        s.beam_x_ = BeamMode(idx.i);
        s.beam_y_ = BeamMode(idx.j);
        return s;
    }

    const ModeIndex& index() const { return index_; }
    bool is_clamped() const { return beam_x_.has_value(); }

    double factor_x(double x) const { return beam_x_ ? beam_x_->value(x) : sine_value(index_.i, x); }
    double factor_y(double y) const { return beam_y_ ? beam_y_->value(y) : sine_value(index_.j, y); }

    double value(double x, double y) const { return factor_x(x) * factor_y(y); }

    std::array<double, 2> gradient(double x, double y) const {
        if (beam_x_) return {beam_x_->slope(x) * beam_y_->value(y), beam_x_->value(x) * beam_y_->slope(y)};
        return {sine_slope(index_.i, x) * sine_value(index_.j, y), sine_value(index_.i, x) * sine_slope(index_.j, y)};
    }

    double laplacian(double x, double y) const {
        if (beam_x_)
            return beam_x_->curvature(x) * beam_y_->value(y) + beam_x_->value(x) * beam_y_->curvature(y);
        return -pi * pi * index_.wave_number_sq() * value(x, y);
    }

private:
    explicit ModeShape(ModeIndex idx) : index_(idx) {}

    static double sine_value(int i, double x) { return std::numbers::sqrt2 * std::sin(i * pi * x); }
    static double sine_slope(int i, double x) { return std::numbers::sqrt2 * i * pi * std::cos(i * pi * x); }

    ModeIndex index_;
    std::optional<BeamMode> beam_x_;
    std::optional<BeamMode> beam_y_;
};

struct Mode {
    ModeIndex index;
    double eigenvalue;
    ModeShape shape;
};

struct ModalBasis {
    BasisKind kind;
    std::vector<Mode> modes;

    std::size_t size() const { return modes.size(); }
    const Mode& operator[](std::size_t k) const { return modes[k]; }

    std::vector<double> eigenvalues() const {
        std::vector<double> out;
        out.reserve(modes.size());
        for (const auto& m : modes) out.push_back(m.eigenvalue);
        return out;
    }
};

/// lambda = pi^4 (i^2 + j^2)^2 with the unit-norm sine product.
inline Mode ss_mech_eigenpair(ModeIndex idx) {
    const double s = idx.wave_number_sq();
    return {idx, std::pow(pi, 4) * s * s, ModeShape::sine(idx)};
}

/// nu = pi^2 (i^2 + j^2), same shape as the simply supported plate mode.
inline Mode membrane_eigenpair(ModeIndex idx) {
    return {idx, pi * pi * idx.wave_number_sq(), ModeShape::sine(idx)};
}

inline ModeShape clamped_mech_mode(ModeIndex idx) { return ModeShape::clamped(idx); }

/// int (Laplacian f)^2 / int f^2 by tensor Gauss-Legendre quadrature.
template <PlateField F>
double rayleigh_quotient(const F& f, const SquareQuadrature& quad) {
    const double mass = quad.integrate([&](double x, double y) {
        const double v = f.value(x, y);
        return v * v;
    });
    if (!(mass > 1e-280)) throw NumericalError("rayleigh_quotient: squared norm underflows");
    const double stiff = quad.integrate([&](double x, double y) {
        const double l = f.laplacian(x, y);
        return l * l;
    });
    return stiff / mass;
}

template <PlateField F>
double rayleigh_quotient(const F& f, int order = default_quadrature_order) {
    return rayleigh_quotient(f, SquareQuadrature(order));
}

/// c_k = lambda_k(clamped) / lambda_k(simply supported).
inline double stiffening_ratio(ModeIndex idx, const SquareQuadrature& quad) {
    return rayleigh_quotient(clamped_mech_mode(idx), quad) / ss_mech_eigenpair(idx).eigenvalue;
}

inline double stiffening_ratio(ModeIndex idx, int order = default_quadrature_order) {
    return stiffening_ratio(idx, SquareQuadrature(order));
}

/// First `count` modes of the requested operator. Clamped eigenvalues are
/// Rayleigh estimates on the beam-product shapes.
inline ModalBasis make_basis(BasisKind kind, int count, const SquareQuadrature& quad) {
    ModalBasis basis{kind, {}};
    for (const ModeIndex& idx : mode_sequence(count)) {
        switch (kind) {
            case BasisKind::mechanical_ss: basis.modes.push_back(ss_mech_eigenpair(idx)); break;
            case BasisKind::electrical_membrane: basis.modes.push_back(membrane_eigenpair(idx)); break;
            case BasisKind::mechanical_clamped: {
                ModeShape shape = clamped_mech_mode(idx);
                const double lambda = rayleigh_quotient(shape, quad);
                basis.modes.push_back({idx, lambda, std::move(shape)});
                break;
            }
        }
    }
    return basis;
}

inline ModalBasis make_basis(BasisKind kind, int count, int order = default_quadrature_order) {
    return make_basis(kind, count, SquareQuadrature(order));
}

}  // namespace piezoplate
