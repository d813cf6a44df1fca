#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ttcone/retraction.hpp"

namespace ttcone {

/// Secant-limit probe of the curve against its stated derivative:
/// error(m) = ||m (gamma(1/m) - A) - X||, expected to decay like 1/m.
/// These checks deliberately avoid the extraction path; they use only the
/// curve, dense arithmetic and SVD ranks.
struct SecantReport {
    std::vector<std::pair<Index, double>> errors;  // (m, error), m increasing
    bool verdict = false;
    bool degenerate = false;     // all errors at floating noise
    double estimated_rate = 0.0; // decay exponent p in error ~ m^-p
};

inline SecantReport secant_limit_check(const TangentConeVector& v, std::span<const Index> m_list) {
    if (m_list.size() < 3) throw std::invalid_argument("need at least 3 secant indices");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] <= 0) throw std::invalid_argument("secant indices must be positive");
        if (i > 0 && m_list[i] <= m_list[i - 1])
            throw std::invalid_argument("secant indices must be increasing");
    }
    const DenseTensor a = tt_evaluate(v.base);
    const DenseTensor xv = tc_evaluate(v);

    SecantReport rep;
    for (Index m : m_list) {
        const DenseTensor g = gamma(v, 1.0 / static_cast<double>(m));
        const double err = norm(static_cast<double>(m) * (g - a) - xv);
        rep.errors.emplace_back(m, err);
    }

    // scaling by m amplifies floating noise by m, so the noise floor grows
    // with m as well
    const double unit = 1e-12 * std::max({1.0, norm(a), norm(xv)});
    bool all_tiny = true;
    for (const auto& [m, err] : rep.errors)
        all_tiny = all_tiny && err <= unit * static_cast<double>(m);
    if (all_tiny) {
        rep.degenerate = true;
        rep.verdict = true;
        return rep;
    }

    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i)
        if (rep.errors[i + 1].first == 2 * rep.errors[i].first && rep.errors[i].second > 0.0)
            ratios.push_back(rep.errors[i + 1].second / rep.errors[i].second);
    bool ok = !ratios.empty();
    const std::size_t first = ratios.size() >= 2 ? ratios.size() - 2 : 0;
    for (std::size_t i = first; i < ratios.size(); ++i)
        ok = ok && ratios[i] >= 0.4 && ratios[i] <= 0.6;
    rep.verdict = ok;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    Index count = 0;
    for (const auto& [m, err] : rep.errors) {
        if (err <= 0.0) continue;
        const double lx = std::log(static_cast<double>(m));
        const double ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count >= 2) {
        const double n = static_cast<double>(count);
        rep.estimated_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return rep;
}

/// Certifies that the represented vector is the first derivative of an
/// analytic arc inside the bounded-rank variety: secant convergence plus
/// rank containment of the curve along a t sample. The certificate never
/// consults the orthogonality constraints; the curve argument holds for
/// arbitrary blocks.
inline bool first_derivative_certificate(const TangentConeVector& v, const Tolerance& tol = {}) {
    static constexpr std::array<Index, 5> kSecants = {8, 16, 32, 64, 128};
    const SecantReport rep = secant_limit_check(v, kSecants);
    if (!rep.verdict) return false;

    static constexpr std::array<double, 10> kTimes = {1.0,  0.75,  0.5,  0.25,  0.05,
                                                      -1.0, -0.75, -0.5, -0.25, -0.05};
    const Dims ranks = v.base.ranks();
    for (double t : kTimes) {
        const CurveSample sample = sample_curve(v, t, tol);
        for (std::size_t i = 0; i < sample.ranks.ranks.size(); ++i)
            if (sample.ranks.ranks[i] > ranks[i] + v.effective_slack[i]) return false;
    }
    return true;
}

} // namespace ttcone
