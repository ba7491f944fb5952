#pragma once

#include <cstdint>
#include <random>

#include "pgnudge/domain.hpp"

namespace pgnudge {

/// Seeded generator of smooth low-mode fields: superpositions of
/// cos(pi l x/Lx) cos(pi m y/Ly) cos(pi n (z+H)/H) with random amplitudes
/// damped by mode order. Deterministic for a given seed; the same engine is
/// used for initial data, c0 calibration samples and perturbations.
class SmoothFieldSampler {
public:
    SmoothFieldSampler(const DomainSpec& d, std::uint64_t seed, int max_mode = 3,
                       double amplitude = 1.0)
        : domain_(d), rng_(seed), max_mode_(max_mode), amplitude_(amplitude) {}

    Field3D sample3d() {
        Field3D f(domain_);
        const auto& d = domain_;
        for (int l = 0; l <= max_mode_; ++l)
            for (int m = 0; m <= max_mode_; ++m)
                for (int n = 0; n <= max_mode_; ++n) {
                    double damp = 1.0 / (1.0 + l * l + m * m + n * n);
                    double a = amplitude_ * damp * uniform();
                    if (l == 0 && m == 0 && n == 0) a *= 0.25;
                    for (int i = 0; i <= d.nx; ++i) {
                        double cx = std::cos(M_PI * l * d.x(i) / d.lx);
                        for (int j = 0; j <= d.ny; ++j) {
                            double cy = std::cos(M_PI * m * d.y(j) / d.ly);
                            for (int k = 0; k <= d.nz; ++k) {
                                double cz = std::cos(M_PI * n * (d.z(k) + d.h_depth) / d.h_depth);
                                f.at(i, j, k) += a * cx * cy * cz;
                            }
                        }
                    }
                }
        return f;
    }

    Field2D sample2d() {
        Field2D f(domain_);
        const auto& d = domain_;
        for (int l = 0; l <= max_mode_; ++l)
            for (int m = 0; m <= max_mode_; ++m) {
                double damp = 1.0 / (1.0 + l * l + m * m);
                double a = amplitude_ * damp * uniform();
                if (l == 0 && m == 0) a *= 0.25;
                for (int i = 0; i <= d.nx; ++i) {
                    double cx = std::cos(M_PI * l * d.x(i) / d.lx);
                    for (int j = 0; j <= d.ny; ++j)
                        f.at(i, j) += a * cx * std::cos(M_PI * m * d.y(j) / d.ly);
                }
            }
        return f;
    }

private:
    // explicit mapping to (-1,1) so sequences are identical across platforms
    double uniform() {
        return 2.0 * (static_cast<double>(rng_()) / static_cast<double>(UINT64_MAX)) - 1.0;
    }

    DomainSpec domain_;
    std::mt19937_64 rng_;
    int max_mode_;
    double amplitude_;
};

}  // namespace pgnudge
