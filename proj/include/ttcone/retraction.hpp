#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ttcone/tangent_cone.hpp"

namespace ttcone {

namespace detail {

inline DenseTensor curve_first_factor(const TangentConeVector& v, double t) {
    const Index n = v.base.dims()[0];
    const Index k = v.base.ranks()[0];
    const Index s = v.effective_slack[0];
    DenseTensor out({n, k + s});
    const DenseTensor& a = v.base.core(0);
    for (Index j = 0; j < n; ++j) {
        for (Index b = 0; b < k; ++b) out.at({j, b}) = a.at({j, b}) + t * v.x_at(1).at({j, b});
        for (Index b = 0; b < s; ++b) out.at({j, k + b}) = v.u_at(1).at({j, b});
    }
    return out;
}

inline DenseTensor curve_middle_factor(const TangentConeVector& v, Index pos, double t) {
    const Dims dims = v.base.dims();
    const Dims ranks = v.base.ranks();
    const Index kp = ranks[static_cast<std::size_t>(pos - 2)];
    const Index kc = ranks[static_cast<std::size_t>(pos - 1)];
    const Index sp = v.effective_slack[static_cast<std::size_t>(pos - 2)];
    const Index sc = v.effective_slack[static_cast<std::size_t>(pos - 1)];
    const Index n = dims[static_cast<std::size_t>(pos - 1)];
    const DenseTensor& a = v.base.core(pos - 1);
    DenseTensor out({kp + sp, n, kc + sc});
    for (Index j = 0; j < n; ++j) {
        for (Index r = 0; r < kp; ++r) {
            for (Index c = 0; c < kc; ++c) out.at({r, j, c}) = a.at({r, j, c}) + t * v.x_at(pos).at({r, j, c});
            for (Index c = 0; c < sc; ++c) out.at({r, j, kc + c}) = v.u_at(pos).at({r, j, c});
        }
        for (Index r = 0; r < sp; ++r) {
            for (Index c = 0; c < kc; ++c) out.at({kp + r, j, c}) = t * v.v_at(pos).at({r, j, c});
            for (Index c = 0; c < sc; ++c) out.at({kp + r, j, kc + c}) = v.z_at(pos).at({r, j, c});
        }
    }
    return out;
}

inline DenseTensor curve_last_factor(const TangentConeVector& v, double t) {
    const Index d = v.base.order();
    const Index n = v.base.dims()[static_cast<std::size_t>(d - 1)];
    const Index k = v.base.ranks()[static_cast<std::size_t>(d - 2)];
    const Index s = v.effective_slack[static_cast<std::size_t>(d - 2)];
    DenseTensor out({k + s, n});
    const DenseTensor& a = v.base.core(d - 1);
    for (Index j = 0; j < n; ++j) {
        for (Index r = 0; r < k; ++r) out.at({r, j}) = a.at({r, j}) + t * v.x_at(d).at({r, j});
        for (Index r = 0; r < s; ++r) out.at({k + r, j}) = t * v.v_at(d).at({r, j});
    }
    return out;
}

} // namespace detail

/// TT representation of the curve point at parameter t: first factor
/// (A1 + t X1 | U1), middle factors ((Ai + t Xi, Ui) / (t Vi, Zi)), last
/// factor (Ad + t Xd; t Vd). Bond sizes k_i + s~_i for every t.
inline TTTensor curve_tt(const TangentConeVector& v, double t) {
    v.validate();
    const Index d = v.base.order();
    std::vector<DenseTensor> cores;
    cores.reserve(static_cast<std::size_t>(d));
    cores.push_back(detail::curve_first_factor(v, t));
    for (Index pos = 2; pos <= d - 1; ++pos)
        cores.push_back(detail::curve_middle_factor(v, pos, t));
    cores.push_back(detail::curve_last_factor(v, t));
    return TTTensor(std::move(cores));
}

/// Analytic curve through the base point with derivative tc_evaluate(v).
inline DenseTensor gamma(const TangentConeVector& v, double t) {
    return tt_evaluate(curve_tt(v, t));
}

/// Retraction onto the bounded-rank variety: the curve at t = 1, kept at
/// bond sizes k + s~ without re-truncation.
inline TTTensor retract(const TangentConeVector& v) { return curve_tt(v, 1.0); }

struct CurveSample {
    double t = 0.0;
    DenseTensor value;
    RankProfile ranks;
};

inline CurveSample sample_curve(const TangentConeVector& v, double t, const Tolerance& tol = {}) {
    CurveSample out;
    out.t = t;
    out.value = gamma(v, t);
    out.ranks = rank_profile(out.value, tol);
    return out;
}

/// Least-squares slope of log ||gamma(t) - A - t X|| against log t. The
/// remainder of the curve is quadratic, so generic directions give a slope
/// of 2; a vanishing remainder is reported as degenerate instead of fitted.
struct RetractionOrderFit {
    double slope = 0.0;
    bool degenerate = false;
    std::vector<std::pair<double, double>> samples;  // (t, error)
};

inline RetractionOrderFit retraction_order(const TangentConeVector& v,
                                           std::span<const double> t_grid) {
    if (t_grid.size() < 4) throw std::invalid_argument("t grid needs at least 4 points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw std::invalid_argument("t grid must be positive");
        if (i > 0 && t_grid[i] >= t_grid[i - 1])
            throw std::invalid_argument("t grid must be decreasing");
    }
    const DenseTensor a = tt_evaluate(v.base);
    const DenseTensor xv = tc_evaluate(v);
    const double floor = 1e-14 * std::max({1.0, norm(a), norm(xv)});

    RetractionOrderFit fit;
    bool all_tiny = true;
    for (double t : t_grid) {
        const double err = norm(gamma(v, t) - a - t * xv);
        fit.samples.emplace_back(t, err);
        all_tiny = all_tiny && err <= floor;
    }
    if (all_tiny) {
        fit.degenerate = true;
        return fit;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    Index count = 0;
    for (const auto& [t, err] : fit.samples) {
        if (err <= 0.0) continue;
        const double lx = std::log(t);
        const double ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    if (count < 2) {
        fit.degenerate = true;
        return fit;
    }
    const double n = static_cast<double>(count);
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

} // namespace ttcone
