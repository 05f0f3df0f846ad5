#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ccreal/rational.hpp"

namespace ccreal {

// Seeded standard-normal sampler whose draws are converted exactly to dyadic
// rationals, so every downstream sign decision stays exact.  Box-Muller on
// explicit 53-bit uniforms keeps the stream independent of the standard
// library's distribution internals.
class GaussianRationalSampler {
public:
    explicit GaussianRationalSampler(std::uint64_t seed) : rng_(seed) {}

    double draw_double() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Rational draw() { return rational_from_double(draw_double()); }

    std::vector<Rational> draw_vector(int dim) {
        std::vector<Rational> v;
        v.reserve(dim);
        for (int i = 0; i < dim; ++i) v.push_back(draw());
        return v;
    }

private:
    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline std::vector<Rational> gaussian_rational_sample(std::uint64_t seed, int dim) {
    if (dim < 1) throw std::invalid_argument("gaussian sample: dim >= 1");
    return GaussianRationalSampler(seed).draw_vector(dim);
}

}  // namespace ccreal
