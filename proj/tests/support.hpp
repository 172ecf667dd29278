#pragma once

// Shared helpers for the test binaries: seeded random draws and a random
// expression generator for property checks.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "curvelab/expr.hpp"

namespace testing {

using curvelab::cplx;
using curvelab::Expr;
using curvelab::Function;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_{seed} {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>{lo, hi}(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>{lo, hi}(gen_); }

    /// Uniform in the disk |z - c| <= r.
    cplx in_disk(double r, cplx c = {}) {
        const double rho = r * std::sqrt(uniform(0.0, 1.0));
        const double t = uniform(0.0, 2.0 * M_PI);
        return c + std::polar(rho, t);
    }

    cplx complex(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale)}; }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Random tree over z, the parameter n, complex literals, the four operations,
/// small integer powers and the six functions.
inline Expr random_expr(Rng& rng, int depth) {
    if (depth <= 0 || rng.integer(0, 5) == 0) {
        switch (rng.integer(0, 3)) {
            case 0: return Expr::variable();
            case 1: return Expr::parameter("n");
            case 2: return Expr::constant(std::round(rng.uniform(-30, 30)) / 8.0);
            default: return Expr::constant(cplx{std::round(rng.uniform(-20, 20)) / 4.0, std::round(rng.uniform(-20, 20)) / 4.0});
        }
    }
    const Expr a = random_expr(rng, depth - 1);
    switch (rng.integer(0, 8)) {
        case 0: return a + random_expr(rng, depth - 1);
        case 1: return a - random_expr(rng, depth - 1);
        case 2: return a * random_expr(rng, depth - 1);
        case 3: return a / random_expr(rng, depth - 1);
        case 4: return -a;
        case 5: return pow(a, rng.integer(-3, 4));
        default: {
            static const Function fs[] = {Function::Exp, Function::Sin, Function::Cos, Function::Tan, Function::Log, Function::Sqrt};
            return apply(fs[rng.integer(0, 5)], a);
        }
    }
}

inline double rel_err(cplx got, cplx want) {
    const double d = std::abs(got - want);
    const double s = std::abs(want);
    return s > 0.0 ? d / s : d;
}

}  // namespace testing
