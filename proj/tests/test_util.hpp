#pragma once

#include <random>

#include "soergel/poly.hpp"

namespace soergel::testutil {

// deterministic random polynomials for property tests
template <class K>
Poly<K> random_poly(std::mt19937_64& rng, RingCtx<K> ctx, unsigned nvars, unsigned max_deg,
                    unsigned nterms = 4, bool homogeneous = false) {
    std::uniform_int_distribution<unsigned> deg_of(0, max_deg);
    std::uniform_int_distribution<int> coef_of(-5, 5);
    unsigned target = homogeneous ? deg_of(rng) : 0;
    Poly<K> p;
    for (unsigned t = 0; t < nterms; ++t) {
        unsigned d = homogeneous ? target : deg_of(rng);
        std::vector<std::uint16_t> e(nvars, 0);
        for (unsigned k = 0; k < d; ++k) {
            std::uniform_int_distribution<unsigned> var_of(0, nvars - 1);
            e[var_of(rng)] += 1;
        }
        int c = coef_of(rng);
        if (c == 0) c = 1;
        p += Poly<K>(Monomial(e), ctx.from_int(c));
    }
    return p;
}

} // namespace soergel::testutil
