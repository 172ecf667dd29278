#include "curvelab/curve.hpp"

#include <algorithm>
#include <cmath>

#include "curvelab/error.hpp"

namespace curvelab {

ReducedCurve::ReducedCurve(std::vector<Expr> components, Disk region, ParamMap params, GridSpec check)
    : components_{std::move(components)}, region_{region}, params_{std::move(params)} {
    if (components_.size() < 2) throw DomainError("a curve needs at least two components");
    compiled_.reserve(components_.size());
    for (const auto& e : components_) compiled_.emplace_back(e, params_);

    // The floor is taken against the largest value in each grid point's 3x3
    // neighbourhood, so exponential growth across the region is not mistaken
    // for a common zero.
    const DiskGrid lattice{region_, check};
    std::vector<double> peak(lattice.size(), -1.0);
    for (int iy = 0; iy < lattice.ny(); ++iy) {
        for (int ix = 0; ix < lattice.nx(); ++ix) {
            if (!lattice.inside(ix, iy)) continue;
            const cplx z = lattice.point(ix, iy);
            double m = 0.0;
            for (const auto& f : compiled_) m = std::max(m, std::abs(f.value(z)));
            peak[lattice.index(ix, iy)] = m;
        }
    }
    for (int iy = 0; iy < lattice.ny(); ++iy) {
        for (int ix = 0; ix < lattice.nx(); ++ix) {
            if (!lattice.inside(ix, iy)) continue;
            double local = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int jx = ix + dx;
                    const int jy = iy + dy;
                    if (jx < 0 || jy < 0 || jx >= lattice.nx() || jy >= lattice.ny()) continue;
                    local = std::max(local, peak[lattice.index(jx, jy)]);
                }
            }
            if (!(peak[lattice.index(ix, iy)] > kCommonZeroRatio * local)) {
                throw DomainError("components have a (near-)common zero on the region; representation is not reduced");
            }
        }
    }
}

std::vector<Jet> ReducedCurve::jets(cplx z) const {
    std::vector<Jet> out;
    out.reserve(compiled_.size());
    for (const auto& f : compiled_) out.push_back(f.eval(z));
    return out;
}

CVector ReducedCurve::values(cplx z) const {
    CVector out;
    out.reserve(compiled_.size());
    for (const auto& f : compiled_) out.push_back(f.value(z));
    return out;
}

ReducedCurve ReducedCurve::rescaled(cplx center, cplx scale, Disk xi_region) const {
    std::vector<Expr> g;
    g.reserve(components_.size());
    for (const auto& f : components_) g.push_back(rescale(f, center, scale));
    return ReducedCurve{std::move(g), xi_region, params_};
}

ReducedCurve ReducedCurve::scaled_by(const Expr& h) const {
    std::vector<Expr> g;
    g.reserve(components_.size());
    for (const auto& f : components_) g.push_back(h * f);
    return ReducedCurve{std::move(g), region_, params_};
}

ParamMap CurveFamily::bindings(cplx n) const {
    ParamMap p = params;
    p[index] = n;
    return p;
}

ReducedCurve CurveFamily::member(cplx n, const Disk& region) const {
    return ReducedCurve{components, region, bindings(n)};
}

cplx wronskian(const Expr& f, const Expr& g, cplx z, const ParamMap& params) {
    return wronskian(eval_jet(f, z, params), eval_jet(g, z, params));
}

namespace {

CVector derived_components(std::span<const Jet> f, std::size_t mu) {
    CVector out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = i == mu ? f[mu].value * f[mu].value : wronskian(f[mu], f[i]);
    }
    return out;
}

}  // namespace

DerivedRep derived_map(const ReducedCurve& c, std::size_t mu, cplx z) {
    if (mu > c.dim()) throw DomainError("derived map: index mu out of range");
    if (c.component(mu, z).value == cplx{}) {
        // f_mu must not vanish identically near z; probe a small ring.
        const double h = 1e-3 * c.region().radius;
        bool nonzero = false;
        for (cplx dir : {cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}}) {
            if (c.component(mu, z + h * dir).value != cplx{}) nonzero = true;
        }
        if (!nonzero) throw DomainError("derived map: component f_mu vanishes identically near z");
    }
    const auto f = c.jets(z);
    return {derived_components(f, mu), mu};
}

cplx incidence(const ReducedCurve& c, const BoundHyperplane& h, cplx z) {
    return incidence_pairing(c.values(z), h.coefficients(z));
}

cplx incidence(const ReducedCurve& c, const Hyperplane& h, cplx z) {
    return incidence_pairing(c.values(z), h.alpha());
}

Jet incidence_jet(const ReducedCurve& c, const BoundHyperplane& h, cplx z) {
    if (c.dim() != h.dim()) throw DomainError("incidence: dimension mismatch");
    (void)h.coefficients(z);  // rejects vanishing coefficients
    const auto f = c.jets(z);
    const auto a = h.jets(z);
    Jet s;
    for (std::size_t i = 0; i < f.size(); ++i) s += a[i] * f[i];
    return s;
}

cplx derived_incidence(const ReducedCurve& c, const BoundHyperplane& h, std::size_t mu, cplx z) {
    if (c.dim() != h.dim()) throw DomainError("derived incidence: dimension mismatch");
    if (mu > c.dim()) throw DomainError("derived incidence: index mu out of range");
    const auto f = c.jets(z);
    return incidence_pairing(derived_components(f, mu), h.coefficients(z));
}

cplx derived_incidence_ratio(const ReducedCurve& c, const BoundHyperplane& h, std::size_t mu, cplx z) {
    if (mu > c.dim()) throw DomainError("derived incidence ratio: index mu out of range");
    const cplx fmu = c.component(mu, z).value;
    if (fmu == cplx{}) throw DomainError("derived incidence ratio: f_mu(z) = 0");
    return derived_incidence(c, h, mu, z) / (fmu * fmu);
}

cplx derived_incidence_ratio(const ReducedCurve& c, const Hyperplane& h, std::size_t mu, cplx z) {
    return derived_incidence_ratio(c, BoundHyperplane{h}, mu, z);
}

double fs_derivative(std::span<const Jet> jets) {
    double scale = 0.0;
    for (const auto& j : jets) scale = std::max(scale, std::abs(j.value));
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError("fs_derivative: all components vanish (non-reduced point)");
    }
    std::vector<Jet> f(jets.begin(), jets.end());
    for (auto& j : f) {
        j.value /= scale;
        j.deriv /= scale;
    }
    double norm2 = 0.0;
    double wedge = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        norm2 += std::norm(f[i].value);
        for (std::size_t j = i + 1; j < f.size(); ++j) wedge += std::norm(wronskian(f[i], f[j]));
    }
    return std::sqrt(wedge) / norm2;
}

double fs_derivative(const ReducedCurve& c, cplx z) {
    const auto f = c.jets(z);
    return fs_derivative(std::span<const Jet>{f});
}

}  // namespace curvelab
