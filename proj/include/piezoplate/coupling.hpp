#pragma once

// Modal electro-mechanical coupling C_hk = <m_h, Laplacian(e_k)> and the
// coupling criterion C_hk != 0. Indices are 0-based throughout the library;
// reports print 1-based mode numbers.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "piezoplate/errors.hpp"
#include "piezoplate/modal_basis.hpp"
#include "piezoplate/quadrature.hpp"

namespace piezoplate {

inline constexpr double default_coupling_tol = 1e-6;

struct CouplingMatrix {
    Eigen::MatrixXd entries;  // rows: mechanical modes h, cols: electrical modes k
    BasisKind mech_kind = BasisKind::mechanical_ss;
    BasisKind elec_kind = BasisKind::electrical_membrane;

    Eigen::Index size() const { return entries.rows(); }
    double operator()(Eigen::Index h, Eigen::Index k) const { return entries(h, k); }
};

/// Simply supported plate with grounded network: C = diag(-pi^2 (i^2 + j^2)).
inline CouplingMatrix coupling_analytic_ss(int n) {
    require(n >= 1, "coupling matrix needs at least one mode");
    CouplingMatrix c;
    c.entries = Eigen::MatrixXd::Zero(n, n);
    const auto modes = mode_sequence(n);
    for (int h = 0; h < n; ++h) c.entries(h, h) = -pi * pi * modes[h].wave_number_sq();
    return c;
}

namespace detail {

// C_hk = -nu_k <m_h, e_k>, using Laplacian(e_k) = -nu_k e_k.
inline Eigen::MatrixXd coupling_entries(const ModalBasis& mech, const ModalBasis& elec, int n,
                                        const SquareQuadrature& quad) {
    Eigen::MatrixXd out(n, n);
    for (int h = 0; h < n; ++h) {
        for (int k = 0; k < n; ++k) {
            const ModeShape& m = mech[h].shape;
            const ModeShape& e = elec[k].shape;
            const double overlap = quad.integrate([&](double x, double y) { return m.value(x, y) * e.value(x, y); });
            out(h, k) = -elec[k].eigenvalue * overlap;
        }
    }
    return out;
}

}  // namespace detail

/// Coupling matrix by tensor quadrature. The result is taken at twice the
/// requested order; if any entry moved by more than 1e-6 between the two
/// orders the requested order is reported as insufficient.
inline CouplingMatrix coupling_quadrature(const ModalBasis& mech, const ModalBasis& elec, int n,
                                          int order = default_quadrature_order) {
    require(n >= 1, "coupling matrix needs at least one mode");
    require(static_cast<int>(mech.size()) >= n && static_cast<int>(elec.size()) >= n,
            "coupling_quadrature: bases hold fewer modes than requested");
    require(elec.kind == BasisKind::electrical_membrane, "coupling_quadrature: electrical basis must be the membrane");
    const Eigen::MatrixXd coarse = detail::coupling_entries(mech, elec, n, SquareQuadrature(order));
    const Eigen::MatrixXd fine = detail::coupling_entries(mech, elec, n, SquareQuadrature(2 * order));
    const double change = (fine - coarse).cwiseAbs().maxCoeff();
    if (change > 1e-6) {
        std::ostringstream msg;
        msg << "coupling_quadrature: order " << order << " insufficient (entries change by " << change
            << " when doubled)";
        throw NumericalError(msg.str());
    }
    return {fine, mech.kind, elec.kind};
}

/// Necessary condition for energy exchange between mechanical mode h and
/// electrical mode k.
inline bool is_coupled(Eigen::Index h, Eigen::Index k, const CouplingMatrix& c, double tol = default_coupling_tol) {
    require(tol > 0.0, "is_coupled: tolerance must be positive");
    require(h >= 0 && k >= 0 && h < c.entries.rows() && k < c.entries.cols(), "is_coupled: index out of range");
    return std::abs(c.entries(h, k)) > tol;
}

struct CoupledPair {
    int mech;  // 0-based
    int elec;
    double value;
};

inline std::vector<CoupledPair> coupled_pairs(const CouplingMatrix& c, double tol = default_coupling_tol) {
    std::vector<CoupledPair> out;
    for (Eigen::Index h = 0; h < c.entries.rows(); ++h)
        for (Eigen::Index k = 0; k < c.entries.cols(); ++k)
            if (is_coupled(h, k, c, tol)) out.push_back({static_cast<int>(h), static_cast<int>(k), c.entries(h, k)});
    return out;
}

/// Text rendering of the coupling pattern: one block listing every coupled
/// pair with its magnitude relative to the row diagonal, then a character map
/// ('#' diagonal-scale, '+' >= 10% of the row diagonal, '.' smaller, ' ' zero).
inline std::string coupling_report(const CouplingMatrix& c, double tol = default_coupling_tol) {
    const auto modes = mode_sequence(static_cast<int>(c.size()));
    std::ostringstream out;
    out << "coupling matrix " << to_string(c.mech_kind) << " x " << to_string(c.elec_kind) << ", " << c.size()
        << " modes, tol " << tol << "\n";
    for (const CoupledPair& p : coupled_pairs(c, tol)) {
        const double diag = std::abs(c.entries(p.mech, p.mech));
        out << "  m" << p.mech + 1 << " (" << modes[p.mech].i << "," << modes[p.mech].j << ")  <->  e" << p.elec + 1
            << " (" << modes[p.elec].i << "," << modes[p.elec].j << ")  C = " << p.value;
        if (diag > 0.0) out << "  |C|/|C_hh| = " << std::abs(p.value) / diag;
        out << "\n";
    }
    out << "pattern (rows m_h, cols e_k):\n";
    for (Eigen::Index h = 0; h < c.entries.rows(); ++h) {
        const double diag = std::abs(c.entries(h, h));
        out << "  ";
        for (Eigen::Index k = 0; k < c.entries.cols(); ++k) {
            const double v = std::abs(c.entries(h, k));
            char mark = ' ';
            if (v > tol) mark = v >= 0.5 * diag ? '#' : (v >= 0.1 * diag ? '+' : '.');
            out << mark;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace piezoplate
