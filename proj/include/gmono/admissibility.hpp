#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gderiv.hpp"
#include "measures.hpp"
#include "wpoly.hpp"

namespace gmono {

enum class AdmissibilityBranch { k_le_n, even_k_or_a_in, exceptional };

inline std::string to_string(AdmissibilityBranch b) {
    switch (b) {
    case AdmissibilityBranch::k_le_n: return "k<=n";
    case AdmissibilityBranch::even_k_or_a_in: return "k even or a in I";
    default: return "exceptional (k=n+1 odd, a not in I)";
    }
}

struct AdmissibilityReport {
    bool admissible = true;
    AdmissibilityBranch branch = AdmissibilityBranch::k_le_n;
    std::optional<std::string> failing_poly;
    int failing_degree = -1;
    std::string note;
};

// A convenient expansion point inside I for the basis p_{s;0,i}.
inline double default_center(const Interval& I) {
    if (I.contains(0.0) && I.valid_base(0.0)) return 0.0;
    return detail::reference_point(I);
}

// nu(p_+) and nu(p_-) for a w-polynomial, with t as a quadrature break for positive parts.
inline MomentParts wpoly_moment(const MeasureRep& nu, const WPoly& p, const QuadOptions& o = {}) {
    std::vector<double> br;
    if (auto* c = std::get_if<ChainT>(&p.family())) br.push_back(c->t);
    if (auto* c = std::get_if<ChainAZ>(&p.family())) br.push_back(c->z);
    return moment_parts(nu, [&p](double x) { return p(x); }, br, o);
}

// Membership of nu in the admissible set for the cone (k, n), following the
// three-way case split by k, the parity of k and whether a belongs to I.
inline AdmissibilityReport admissibility(const MeasureRep& nu, const ConeSpec& c, const QuadOptions& o = {}) {
    c.validate();
    nu.validate();
    const GaugeSpec& g = c.g;
    const Interval& I = g.interval();
    const int k = c.k, n = c.n;
    AdmissibilityReport rep;
    if (k <= n) rep.branch = AdmissibilityBranch::k_le_n;
    else if (k % 2 == 0 || I.a_in()) rep.branch = AdmissibilityBranch::even_k_or_a_in;
    else rep.branch = AdmissibilityBranch::exceptional;
    const double s = default_center(I);
    auto fail = [&](const WPoly& p, int deg, const std::string& why) {
        rep.admissible = false;
        rep.failing_poly = p.describe();
        rep.failing_degree = deg;
        rep.note = why;
        return rep;
    };
    for (int i = 0; i < k; ++i) {
        WPoly p = WPoly::chain_t(g, s, 0, i);
        MomentParts m;
        try {
            m = wpoly_moment(nu, p, o);
        } catch (const UndefinedMoment& e) {
            return fail(p, i, e.what());
        }
        if (!std::isfinite(m.pos) || !std::isfinite(m.neg)) return fail(p, i, "nu(p) is not finite");
    }
    if (rep.branch == AdmissibilityBranch::k_le_n) {
        WPoly p = WPoly::chain_t(g, s, 0, k);
        MomentParts m;
        try {
            m = wpoly_moment(nu, p, o);
        } catch (const UndefinedMoment& e) {
            return fail(p, k, e.what());
        }
        if (!std::isfinite(m.neg)) return fail(p, k, "nu(p) = -inf");
    }
    if (rep.branch == AdmissibilityBranch::exceptional) {
        double lo = nu.support_lo();
        if (!(lo > I.a)) {
            rep.admissible = false;
            rep.note = "support of nu is not bounded away from a; admissible only for smaller classes G";
            return rep;
        }
        rep.note = "support bounded away from a";
    }
    return rep;
}

}  // namespace gmono
