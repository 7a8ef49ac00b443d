#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fkpde {

using Vec = std::vector<double>;

// Axis-aligned box: the only domain shape handled. lo[k] < hi[k] for all k.
struct Hyperrectangle {
    Vec lo;
    Vec hi;

    Hyperrectangle() = default;
    Hyperrectangle(Vec lower, Vec upper) : lo(std::move(lower)), hi(std::move(upper)) {
        if (lo.size() != hi.size()) throw std::invalid_argument("hyperrectangle: dim mismatch");
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (!(lo[k] < hi[k])) throw std::invalid_argument("hyperrectangle: lo must be < hi");
    }

    int dim() const { return static_cast<int>(lo.size()); }

    bool contains(const Vec& x) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (x[k] < lo[k] || x[k] > hi[k]) return false;
        return true;
    }

    bool strictly_inside(const Vec& x) const {
        for (std::size_t k = 0; k < lo.size(); ++k)
            if (x[k] <= lo[k] || x[k] >= hi[k]) return false;
        return true;
    }

    double shortest_edge() const {
        double e = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < lo.size(); ++k) e = std::min(e, hi[k] - lo[k]);
        return e;
    }

    // Componentwise clamp onto the closed box.
    Vec clamp(const Vec& x) const {
        Vec y = x;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            if (y[k] < lo[k]) y[k] = lo[k];
            if (y[k] > hi[k]) y[k] = hi[k];
        }
        return y;
    }
};

}  // namespace fkpde
