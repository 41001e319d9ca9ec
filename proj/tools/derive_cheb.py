#!/usr/bin/env python3
"""Derive r(rho, tau_t) and r(tau_t, tau_t) against the standard Cauchy law.

With v = arctan x + pi/2 and w = v/pi in (0, 1), the Cauchy law becomes dw and
    rho   = pi^2 (w + 1/2) w
    tau_t = pi^2 (w + 1/2) (w - theta)_+,   theta = (arctan t + pi/2)/pi.
All powers of pi cancel in the ratio, leaving rational functions of theta.
Writes include/gmono/cheb_coeffs.hpp (coefficients in increasing powers).
"""
import pathlib
import sympy as sp

w, th = sp.symbols("w theta")


def integ(expr, lo):
    return sp.expand(sp.integrate(expr, (w, lo, 1)))


J0 = integ((w + sp.Rational(1, 2)) * w, 0)
Jt = integ((w + sp.Rational(1, 2)) * (w - th), th)
rho_rho = sp.nsimplify(integ((w + sp.Rational(1, 2)) ** 2 * w**2, 0) / J0**2)
rho_tau = sp.cancel(integ((w + sp.Rational(1, 2)) ** 2 * w * (w - th), th) / (J0 * Jt))
tau_tau = sp.cancel(integ((w + sp.Rational(1, 2)) ** 2 * (w - th) ** 2, th) / Jt**2)

assert rho_rho == sp.Rational(384, 245), rho_rho
assert sp.limit(rho_tau, th, 1) == sp.Rational(18, 7)
assert sp.simplify(rho_tau.subs(th, 0) - rho_rho) == 0
assert sp.simplify(tau_tau.subs(th, 0) - rho_rho) == 0


def coeffs(expr):
    num, den = sp.fraction(sp.together(expr))
    pn, pd = sp.Poly(num, th), sp.Poly(den, th)
    lead = pd.LC()
    return [c / lead for c in reversed(pn.all_coeffs())], [c / lead for c in reversed(pd.all_coeffs())]


def cxx(vals):
    return ", ".join(f"{sp.Rational(v).p}.0 / {sp.Rational(v).q}.0" for v in vals)


out = ["// Generated by tools/derive_cheb.py; do not edit.", "#pragma once", "", "#include <array>", "",
       "namespace gmono::cheb_coeffs {", ""]
for name, expr in (("rho_tau", rho_tau), ("tau_tau", tau_tau)):
    n, d = coeffs(expr)
    out.append(f"// {name}(theta) = {sp.sstr(sp.factor(expr))}")
    out.append(f"inline constexpr std::array<double, {len(n)}> {name}_num{{{cxx(n)}}};")
    out.append(f"inline constexpr std::array<double, {len(d)}> {name}_den{{{cxx(d)}}};")
    out.append("")
out += ["}  // namespace gmono::cheb_coeffs", ""]
target = pathlib.Path(__file__).resolve().parent.parent / "include" / "gmono" / "cheb_coeffs.hpp"
target.write_text("\n".join(out))
print("r(rho,rho) =", rho_rho)
print("r(rho,tau) =", sp.factor(rho_tau))
print("r(tau,tau) =", sp.factor(tau_tau))
