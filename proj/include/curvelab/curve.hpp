#pragma once

// Holomorphic curves D -> P^N(C) through reduced representations.

#include <vector>

#include "curvelab/expr.hpp"
#include "curvelab/proj.hpp"
#include "curvelab/region.hpp"

namespace curvelab {

/// Relative floor below which max_i |f_i(z)|, compared with the same quantity
/// over the neighbouring grid points, signals a common zero.
inline constexpr double kCommonZeroRatio = 1e-9;

/// N+1 component expressions, parameters bound, validated to have no
/// near-common zero on a sample grid of the declared region.
class ReducedCurve {
public:
    /// Throws DomainError when the components nearly vanish together on the
    /// check grid, and EvalError when a component has a pole there.
    ReducedCurve(std::vector<Expr> components, Disk region, ParamMap params = {}, GridSpec check = {33, 33});

    std::size_t dim() const { return components_.size() - 1; }
    const std::vector<Expr>& components() const { return components_; }
    const ParamMap& params() const { return params_; }
    const Disk& region() const { return region_; }

    std::vector<Jet> jets(cplx z) const;
    CVector values(cplx z) const;
    Jet component(std::size_t i, cplx z) const { return compiled_.at(i).eval(z); }

    /// g(xi) = f(center + scale * xi), built by substituting into each tree.
    ReducedCurve rescaled(cplx center, cplx scale, Disk xi_region) const;

    /// Multiplies every component by h (another reduced representation when h has no zeros).
    ReducedCurve scaled_by(const Expr& h) const;

private:
    std::vector<Expr> components_;
    Disk region_;
    ParamMap params_;
    std::vector<CompiledExpr> compiled_;
};

/// A family {f_n}: component templates plus fixed parameters; the member for
/// index value n binds the parameter named `index`.
struct CurveFamily {
    std::vector<Expr> components;
    ParamMap params;
    std::string index = "n";

    ReducedCurve member(cplx n, const Disk& region) const;
    ParamMap bindings(cplx n) const;
};

/// f g' - f' g
inline cplx wronskian(const Jet& f, const Jet& g) { return f.value * g.deriv - f.deriv * g.value; }

cplx wronskian(const Expr& f, const Expr& g, cplx z, const ParamMap& params = {});

/// One representative (common divisor d = 1) of the mu-th derived map:
/// slot mu holds f_mu^2, slot i != mu holds W(f_mu, f_i).
struct DerivedRep {
    CVector components;
    std::size_t mu = 0;
};

DerivedRep derived_map(const ReducedCurve& c, std::size_t mu, cplx z);

/// <f~(z), alpha(z)>
cplx incidence(const ReducedCurve& c, const BoundHyperplane& h, cplx z);
cplx incidence(const ReducedCurve& c, const Hyperplane& h, cplx z);
/// Incidence with its z-derivative, for root finding.
Jet incidence_jet(const ReducedCurve& c, const BoundHyperplane& h, cplx z);

/// <derived_map(c, mu)(z), alpha(z)>
cplx derived_incidence(const ReducedCurve& c, const BoundHyperplane& h, std::size_t mu, cplx z);

/// <derived_map(c, mu)(z), alpha(z)> / f_mu(z)^2. Throws DomainError when f_mu(z) = 0.
cplx derived_incidence_ratio(const ReducedCurve& c, const BoundHyperplane& h, std::size_t mu, cplx z);
cplx derived_incidence_ratio(const ReducedCurve& c, const Hyperplane& h, std::size_t mu, cplx z);

/// Fubini-Study derivative sqrt(|f|^2|f'|^2 - |(f, f')|^2) / |f|^2, computed as
/// sqrt(sum_{i<j} |W(f_i, f_j)|^2) / |f|^2. Invariant under f -> h f.
double fs_derivative(const ReducedCurve& c, cplx z);
double fs_derivative(std::span<const Jet> jets);

}  // namespace curvelab
