// Generated by tools/derive_cheb.py; do not edit.
#pragma once

#include <array>

namespace gmono::cheb_coeffs {

// rho_tau(theta) = 6*(6*theta**3 + 22*theta**2 + 43*theta + 64)/(35*(2*theta + 7))
inline constexpr std::array<double, 4> rho_tau_num{192.0 / 35.0, 129.0 / 35.0, 66.0 / 35.0, 18.0 / 35.0};
inline constexpr std::array<double, 2> rho_tau_den{7.0 / 2.0, 1.0 / 1.0};

// tau_tau(theta) = -12*(2*theta**2 + 11*theta + 32)/(5*(theta - 1)*(2*theta + 7)**2)
inline constexpr std::array<double, 3> tau_tau_num{-96.0 / 5.0, -33.0 / 5.0, -6.0 / 5.0};
inline constexpr std::array<double, 4> tau_tau_den{-49.0 / 4.0, 21.0 / 4.0, 6.0 / 1.0, 1.0 / 1.0};

}  // namespace gmono::cheb_coeffs
