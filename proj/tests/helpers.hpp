#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "uot/grid.hpp"

namespace uot::test {

inline ScalarField random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = u(rng);
    return f;
}

inline StaggeredFlux random_flux(const GridSpec& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    StaggeredFlux m(g);
    for (double& v : m.mx_data())
        v = u(rng);
    for (double& v : m.my_data())
        v = u(rng);
    m.zero_boundary();
    return m;
}

inline double rel_diff(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

}  // namespace uot::test
