#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "piezoplate/errors.hpp"

namespace piezoplate {

inline constexpr int default_quadrature_order = 32;

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    int order() const { return static_cast<int>(nodes.size()); }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }
};

namespace detail {

// (P_n(x), P_n'(x)) from the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

/// Nodes by Newton iteration on P_n from the Chebyshev initial guess.
inline GaussLegendre gauss_legendre(int order) {
    require(order >= 1, "quadrature order must be >= 1");
    const int n = order;
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = detail::legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre_with_derivative(n, x).second;
        const double w = 1.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Tensor-product rule on the unit square.
class SquareQuadrature {
public:
    explicit SquareQuadrature(int order = default_quadrature_order) : rule_(gauss_legendre(order)) {}

    int order() const { return rule_.order(); }
    const GaussLegendre& axis() const { return rule_; }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < rule_.nodes.size(); ++j)
                row += rule_.weights[j] * f(rule_.nodes[i], rule_.nodes[j]);
            sum += rule_.weights[i] * row;
        }
        return sum;
    }

private:
    GaussLegendre rule_;
};

}  // namespace piezoplate
