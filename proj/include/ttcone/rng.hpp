#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ttcone/dense_tensor.hpp"

namespace ttcone {

/// Deterministic stream of standard Gaussian draws. Built on mt19937_64 with
/// an explicit Box-Muller transform so a seed yields the same sequence on
/// every standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in (0, 1].
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform();
        const double v = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 2.0 * kPi * v;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Entries drawn in row-major order.
    Matrix gaussian_matrix(Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) m(r, c) = gaussian();
        return m;
    }

    DenseTensor gaussian_tensor(const Dims& dims) {
        DenseTensor t(dims);
        for (auto& x : t.data()) x = gaussian();
        return t;
    }

    std::uint64_t raw() { return engine_(); }

private:
    static constexpr double kPi = 3.14159265358979323846;

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ttcone
