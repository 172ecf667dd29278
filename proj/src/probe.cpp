#include "curvelab/probe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "curvelab/error.hpp"
#include "curvelab/parallel.hpp"

namespace curvelab {

ScalarField::ScalarField(ValueFn value, SlopeFn slope) : value_{std::move(value)}, slope_{std::move(slope)} {}

ScalarField ScalarField::from_jet(std::function<Jet(cplx)> f, std::function<double(cplx)> scale) {
    auto value = [f, scale](cplx z) {
        const Jet j = f(z);
        return FieldSample{j.value, scale ? scale(z) : 1.0};
    };
    auto slope = [f](cplx z) { return f(z).deriv; };
    return ScalarField{value, slope};
}

cplx ScalarField::slope(cplx z) const {
    if (slope_) return slope_(z);
    const double h = 1e-6 * (1.0 + std::abs(z));
    return (value_(z + h).value - value_(z - h).value) / (2.0 * h);
}

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct Refined {
    bool ok = false;
    Zero zero;
};

Refined newton_refine(const ScalarField& field, cplx z, const Disk& region, const ZeroSearchOptions& opt) {
    Refined out;
    double multiplicity = 1.0;
    double previous_step = 0.0;
    int linear_streak = 0;
    bool flagged_multiple = false;
    try {
        FieldSample s = field(z);
        for (int it = 0; it <= opt.max_iterations; ++it) {
            if (!finite(s.value) || !std::isfinite(s.scale)) return out;
            const double r = std::abs(s.value);
            if (r <= opt.tol * s.scale) {
                // Polish while the residual keeps dropping.
                for (int extra = 0; extra < 3 && r > 0.0; ++extra) {
                    const cplx d = field.slope(z);
                    if (d == cplx{} || !finite(d)) break;
                    const cplx next = z - multiplicity * s.value / d;
                    if (!region.contains(next, 1e-9 * region.radius)) break;
                    const FieldSample ns = field(next);
                    if (!(std::abs(ns.value) < std::abs(s.value))) break;
                    z = next;
                    s = ns;
                }
                out.ok = true;
                out.zero = Zero{z, std::abs(s.value), s.scale, it,
                                flagged_multiple || it > opt.stagnation_iterations,
                                static_cast<int>(multiplicity)};
                if (out.zero.multiple && out.zero.multiplicity == 1) out.zero.multiplicity = 2;
                return out;
            }
            if (it == opt.max_iterations) return out;
            const cplx d = field.slope(z);
            if (d == cplx{} || !finite(d)) return out;
            cplx step = multiplicity * s.value / d;
            const double step_size = std::abs(step);
            // A multiple root shows up as linear contraction of the Newton steps,
            // ratio (m-1)/m; switch to the modified step m * f/f'.
            if (multiplicity == 1.0 && previous_step > 0.0) {
                const double ratio = step_size / previous_step;
                linear_streak = (ratio > 0.35 && ratio < 0.9) ? linear_streak + 1 : 0;
                if (linear_streak >= 2) {
                    multiplicity = std::max(2.0, std::round(1.0 / (1.0 - ratio)));
                    flagged_multiple = true;
                    step = multiplicity * s.value / d;
                }
            }
            previous_step = step_size;
            cplx next = z - step;
            FieldSample ns = field(next);
            if (multiplicity > 1.0 && !(std::abs(ns.value) < r)) {
                // Wrong multiplicity guess; fall back to plain Newton.
                multiplicity = 1.0;
                flagged_multiple = false;
                linear_streak = 0;
                next = z - s.value / d;
                ns = field(next);
            }
            z = next;
            s = ns;
            if (!region.contains(z, 1e-9 * region.radius)) return out;
        }
    } catch (const EvalError&) {
        return out;
    } catch (const DomainError&) {
        return out;
    }
    return out;
}

}  // namespace

ZeroSet find_zeros(const ScalarField& field, const Disk& region, GridSpec grid, const ZeroSearchOptions& options) {
    ZeroSet result;
    result.region = region;
    result.grid = grid;
    const DiskGrid lattice{region, grid};
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> modulus(lattice.size(), inf);
    std::vector<double> scale(lattice.size(), 0.0);
    parallel_for(static_cast<std::size_t>(lattice.ny()), [&](std::size_t row) {
        const int iy = static_cast<int>(row);
        for (int ix = 0; ix < lattice.nx(); ++ix) {
            if (!lattice.inside(ix, iy)) continue;
            try {
                const FieldSample s = field(lattice.point(ix, iy));
                if (finite(s.value)) {
                    modulus[lattice.index(ix, iy)] = std::abs(s.value);
                    scale[lattice.index(ix, iy)] = s.scale;
                }
            } catch (const EvalError&) {
            } catch (const DomainError&) {
            }
        }
    });

    double peak = 0.0;
    bool all_vanish = true;
    bool any_finite = false;
    for (std::size_t k = 0; k < modulus.size(); ++k) {
        if (!std::isfinite(modulus[k])) continue;
        any_finite = true;
        peak = std::max(peak, modulus[k]);
        if (modulus[k] > 1e-13 * std::max(scale[k], 1e-300)) all_vanish = false;
    }
    if (any_finite && all_vanish) {
        result.identically_zero = true;
        return result;
    }

    std::vector<cplx> seeds;
    for (int iy = 0; iy < lattice.ny(); ++iy) {
        for (int ix = 0; ix < lattice.nx(); ++ix) {
            if (!lattice.inside(ix, iy)) continue;
            const double m = modulus[lattice.index(ix, iy)];
            if (!std::isfinite(m)) continue;
            bool minimum = true;
            double spread = 0.0;
            for (int dy = -1; dy <= 1 && minimum; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int jx = ix + dx;
                    const int jy = iy + dy;
                    if (jx < 0 || jy < 0 || jx >= lattice.nx() || jy >= lattice.ny() || !lattice.inside(jx, jy)) continue;
                    const double mn = modulus[lattice.index(jx, jy)];
                    if (mn < m) {
                        minimum = false;
                        break;
                    }
                    if (std::isfinite(mn)) spread = std::max(spread, mn - m);
                }
            }
            // A zero between lattice points leaves a minimum that is small next to the
            // rise towards the neighbours even when it is not small against the peak.
            if (minimum && (m <= options.candidate_fraction * peak || m <= spread)) seeds.push_back(lattice.point(ix, iy));
        }
    }
    result.candidates = seeds.size();

    std::vector<Refined> refined(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) { refined[k] = newton_refine(field, seeds[k], region, options); });

    std::vector<Zero> found;
    for (const auto& r : refined) {
        if (r.ok) found.push_back(r.zero);
    }
    std::sort(found.begin(), found.end(), [](const Zero& a, const Zero& b) {
        return a.z.real() != b.z.real() ? a.z.real() < b.z.real() : a.z.imag() < b.z.imag();
    });
    for (const auto& z : found) {
        auto same = std::find_if(result.zeros.begin(), result.zeros.end(),
                                 [&](const Zero& kept) { return std::abs(kept.z - z.z) <= options.dedup_radius; });
        if (same == result.zeros.end()) {
            result.zeros.push_back(z);
        } else {
            const bool multiple = same->multiple || z.multiple;
            const int multiplicity = std::max(same->multiplicity, z.multiplicity);
            if (z.residual / z.scale < same->residual / same->scale) *same = z;
            same->multiple = multiple;
            same->multiplicity = multiplicity;
        }
    }
    return result;
}

namespace {

MartyEntry scan_member(const CurveFamily& family, cplx n, const Disk& region, GridSpec grid, std::vector<double>& values) {
    const ReducedCurve curve = family.member(n, region);
    const DiskGrid lattice{region, grid};
    const auto points = lattice.points();
    values.assign(points.size(), -1.0);
    parallel_for(points.size(), [&](std::size_t k) {
        try {
            values[k] = fs_derivative(curve, points[k]);
            if (!std::isfinite(values[k])) values[k] = -1.0;
        } catch (const EvalError&) {
        } catch (const DomainError&) {
        }
    });

    MartyEntry entry;
    entry.n = n;
    double best = -1.0;
    for (double v : values) best = std::max(best, v);
    for (double v : values) entry.skipped += v < 0.0 ? 1 : 0;
    if (best < 0.0) throw DomainError("marty scan: no evaluable grid point");

    // Near-ties resolve toward the centre.
    std::size_t pick = values.size();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < best * (1.0 - 1e-12)) continue;
        if (pick == values.size() || std::abs(points[k] - region.center) < std::abs(points[pick] - region.center)) {
            pick = k;
        }
    }
    cplx at = points[pick];
    double value = values[pick];

    // Compass search from the grid argmax; strict improvements only.
    const double spacing = 2.0 * region.radius / std::max(1, grid.nx - 1);
    double step = spacing;
    while (step > 1e-10 * region.radius && value > 0.0) {
        bool moved = false;
        for (int dir = 0; dir < 8; ++dir) {
            const double angle = dir * 0.78539816339744830962;
            const cplx trial = at + step * cplx{std::cos(angle), std::sin(angle)};
            if (!region.contains(trial)) continue;
            double v = -1.0;
            try {
                v = fs_derivative(curve, trial);
            } catch (const EvalError&) {
            } catch (const DomainError&) {
            }
            if (std::isfinite(v) && v > value * (1.0 + 1e-13)) {
                value = v;
                at = trial;
                moved = true;
                break;
            }
        }
        if (!moved) step *= 0.5;
    }
    entry.max_fs_derivative = value;
    entry.argmax = at;
    return entry;
}

}  // namespace

MartyEntry marty_entry(const CurveFamily& family, cplx n, const Disk& region, GridSpec grid) {
    std::vector<double> values;
    return scan_member(family, n, region, grid, values);
}

MartyScan marty_scan(const CurveFamily& family, const std::vector<cplx>& schedule, const Disk& region, GridSpec grid) {
    MartyScan scan;
    scan.region = region;
    scan.grid = grid;
    const auto points = DiskGrid{region, grid}.points();
    const std::size_t tail_start = schedule.size() - (schedule.size() + 1) / 2;
    std::vector<double> persistence(points.size(), std::numeric_limits<double>::infinity());
    std::vector<double> values;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        scan.entries.push_back(scan_member(family, schedule[k], region, grid, values));
        if (k < tail_start) continue;
        const double top = scan.entries.back().max_fs_derivative;
        for (std::size_t p = 0; p < points.size(); ++p) {
            const double ratio = top > 0.0 ? std::max(values[p], 0.0) / top : 0.0;
            persistence[p] = std::min(persistence[p], ratio);
        }
    }
    if (!points.empty()) {
        double best = -1.0;
        for (double v : persistence) best = std::max(best, v);
        std::size_t pick = points.size();
        for (std::size_t p = 0; p < points.size(); ++p) {
            if (persistence[p] < best - 1e-12) continue;
            if (pick == points.size() || std::abs(points[p] - region.center) < std::abs(points[pick] - region.center)) {
                pick = p;
            }
        }
        scan.persistent_point = points[pick];
        scan.persistence = best;
    }
    if (scan.entries.size() >= 2) {
        bool monotone = true;
        for (std::size_t k = 1; k < scan.entries.size(); ++k) {
            if (scan.entries[k].max_fs_derivative < scan.entries[k - 1].max_fs_derivative * (1.0 - 1e-9)) {
                monotone = false;
            }
        }
        scan.growth = monotone && scan.entries.back().max_fs_derivative >= 2.0 * scan.entries.front().max_fs_derivative;
    }
    return scan;
}

RescalingRecord zalcman_rescale(const CurveFamily& family, const MartyEntry& entry, const Disk& region,
                                double xi_radius, GridSpec xi_grid) {
    RescalingRecord rec;
    rec.n = entry.n;
    rec.z_n = entry.argmax;
    if (!(entry.max_fs_derivative > 1e-300)) {
        rec.degenerate = true;
        return rec;
    }
    const double rho = 1.0 / entry.max_fs_derivative;
    rec.rho = rho;
    const double room = (region.radius - std::abs(entry.argmax - region.center)) / rho;
    rec.xi_radius = xi_radius;
    if (room < xi_radius) {
        rec.truncated = true;
        rec.xi_radius = std::max(0.0, room);
    }
    const ReducedCurve f = family.member(entry.n, region);
    for (const auto& c : f.components()) rec.components.push_back(rescale(c, entry.argmax, rho));

    const CurveFamily g_family{rec.components, family.params, family.index};
    if (rec.xi_radius <= 0.0) {
        const ReducedCurve g = g_family.member(entry.n, Disk{0.0, 1e-12});
        rec.fs_derivative_at_origin = fs_derivative(g, 0.0);
        rec.sup_fs_derivative = rec.fs_derivative_at_origin;
        rec.samples.push_back({0.0, g.values(0.0), rec.fs_derivative_at_origin});
        return rec;
    }
    const Disk xi_disk{0.0, rec.xi_radius};
    const ReducedCurve g = g_family.member(entry.n, xi_disk);
    rec.fs_derivative_at_origin = fs_derivative(g, 0.0);
    for (cplx xi : DiskGrid{xi_disk, xi_grid}.points()) {
        XiSample s{xi, g.values(xi), 0.0};
        try {
            s.fs_derivative = fs_derivative(g, xi);
        } catch (const DomainError&) {
            s.fs_derivative = 0.0;
        }
        rec.sup_fs_derivative = std::max(rec.sup_fs_derivative, s.fs_derivative);
        rec.samples.push_back(std::move(s));
    }
    rec.sup_fs_derivative = std::max(rec.sup_fs_derivative, rec.fs_derivative_at_origin);
    return rec;
}

std::string Verdict::label() const {
    if (kind == Kind::SuggestsNormal) return "suggests-normal";
    std::ostringstream os;
    os << "suggests-nonnormal";
    if (cluster) {
        // Rounded so that float dust around an exact cluster point prints cleanly.
        auto r = [](double x) {
            const double y = std::round(x * 1e6) / 1e6;
            return y == 0.0 ? 0.0 : y;
        };
        const double re = r(cluster->real());
        const double im = r(cluster->imag());
        os << "(" << re << (im < 0 ? "-" : "+") << std::abs(im) << "i)";
    }
    return os.str();
}

Verdict normality_verdict(const MartyScan& scan) {
    if (scan.entries.size() < 5) throw std::invalid_argument("normality verdict needs a schedule of length >= 5");
    Verdict v;
    if (!scan.growth) return v;
    v.kind = Verdict::Kind::SuggestsNonnormal;
    const cplx cluster = scan.persistent_point;
    v.cluster = cluster;
    v.boundary_cluster = std::abs(cluster - scan.region.center) > 0.95 * scan.region.radius;
    return v;
}

namespace {

template <class Distance>
double max_distance(const Disk& region, GridSpec grid, Distance&& distance) {
    const auto points = DiskGrid{region, grid}.points();
    std::vector<double> d(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t k) { d[k] = distance(points[k]); });
    return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

}  // namespace

double max_fs_distance(const ReducedCurve& a, const ReducedCurve& b, const Disk& region, GridSpec grid) {
    return max_distance(region, grid, [&](cplx z) {
        const CVector p = a.values(z);
        const CVector q = b.values(z);
        return fs_distance(p, q);
    });
}

double max_fs_distance(const ReducedCurve& a, const ProjectivePoint& p, const Disk& region, GridSpec grid) {
    return max_distance(region, grid, [&](cplx z) {
        const CVector v = a.values(z);
        return fs_distance(v, p.rep());
    });
}

namespace {

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

std::string scan_csv(const MartyScan& scan) {
    std::string out = "n,max_fs_derivative,argmax_re,argmax_im,rho_n\n";
    for (const auto& e : scan.entries) {
        std::string n = num(e.n.real());
        if (e.n.imag() != 0.0) n = num(e.n.real()) + (e.n.imag() < 0 ? "-" : "+") + num(std::abs(e.n.imag())) + "i";
        const std::string rho = e.max_fs_derivative > 0.0 ? num(1.0 / e.max_fs_derivative) : std::string("nan");
        out += n + "," + num(e.max_fs_derivative) + "," + num(e.argmax.real()) + "," + num(e.argmax.imag()) + "," + rho + "\n";
    }
    return out;
}

}  // namespace curvelab
