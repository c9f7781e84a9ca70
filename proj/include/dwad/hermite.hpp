#pragma once
// Probabilists' Hermite polynomials He_k, orthogonal against the standard
// normal density:  He_0 = 1, He_1 = x, He_{k+1} = x He_k - k He_{k-1}.

#include "dwad/errors.hpp"

namespace dwad {

inline double hermite(int k, double x) {
    if (k < 0 || k > 12)
        throw ConfigError("hermite: degree must lie in [0, 12]");
    double prev = 1.0;  // He_0
    if (k == 0) return prev;
    double cur = x;  // He_1
    for (int m = 1; m < k; ++m) {
        const double next = x * cur - m * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace dwad
