#pragma once

// Empirical normality probes: zero finding for analytic scalar fields,
// Fubini-Study derivative scans over a family, and Zalcman-type rescaling.
//
// Nothing here proves normality. A growing maximum of the Fubini-Study
// derivative that keeps clustering at one interior point is the numerical
// signature of a non-normal family; a bounded one is consistent with normality.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvelab/curve.hpp"
#include "curvelab/region.hpp"

namespace curvelab {

struct FieldSample {
    cplx value{};
    double scale = 1.0;  // magnitude of the terms that cancel at a zero
};

/// Holomorphic scalar field on a region. Supplies values, a reference scale for
/// relative residuals, and a slope for Newton steps: exact when built from jets,
/// otherwise a central difference of the values.
class ScalarField {
public:
    using ValueFn = std::function<FieldSample(cplx)>;
    using SlopeFn = std::function<cplx(cplx)>;

    explicit ScalarField(ValueFn value, SlopeFn slope = {});
    static ScalarField from_jet(std::function<Jet(cplx)> f, std::function<double(cplx)> scale = {});

    FieldSample operator()(cplx z) const { return value_(z); }
    cplx slope(cplx z) const;
    bool exact_slope() const { return static_cast<bool>(slope_); }

private:
    ValueFn value_;
    SlopeFn slope_;
};

struct Zero {
    cplx z{};
    double residual = 0.0;  // |field(z)|
    double scale = 1.0;     // field scale at z
    int iterations = 0;
    bool multiple = false;  // Newton stagnated or contracted linearly
    int multiplicity = 1;   // estimate; 1 unless `multiple`
};

struct ZeroSet {
    std::vector<Zero> zeros;  // sorted by (re, im)
    Disk region;
    GridSpec grid;
    std::size_t candidates = 0;
    bool identically_zero = false;  // the field vanishes at every grid point

    bool empty() const { return zeros.empty(); }
};

struct ZeroSearchOptions {
    double tol = 1e-9;                 // residual <= tol * scale
    double candidate_fraction = 1e-3;  // local minima below this fraction of max |field|
    int max_iterations = 50;
    int stagnation_iterations = 25;
    double dedup_radius = 1e-6;
};

/// Grid scan for local minima of |field|, Newton refinement, deduplication.
ZeroSet find_zeros(const ScalarField& field, const Disk& region, GridSpec grid, const ZeroSearchOptions& options = {});

struct MartyEntry {
    cplx n{};
    double max_fs_derivative = 0.0;
    cplx argmax{};
    std::size_t skipped = 0;  // non-reduced or singular grid points
};

struct MartyScan {
    std::vector<MartyEntry> entries;
    Disk region;
    GridSpec grid;
    bool growth = false;  // maxima nondecreasing and at least doubled across the schedule
    /// Grid point where fs_derivative / max stays largest over the last half of
    /// the schedule (ties toward the centre), and that smallest ratio.
    cplx persistent_point{};
    double persistence = 0.0;
};

/// Max of the Fubini-Study derivative over the grid for each index value.
/// Ties (within 1e-12 relative) resolve to the point nearest the centre, and
/// the grid argmax is then polished by a compass search that never lowers it.
MartyScan marty_scan(const CurveFamily& family, const std::vector<cplx>& schedule, const Disk& region, GridSpec grid);
MartyEntry marty_entry(const CurveFamily& family, cplx n, const Disk& region, GridSpec grid);

struct XiSample {
    cplx xi{};
    CVector values;
    double fs_derivative = 0.0;
};

struct RescalingRecord {
    cplx n{};
    cplx z_n{};
    std::optional<double> rho;  // empty for degenerate records
    double xi_radius = 0.0;     // effective radius after truncation
    bool degenerate = false;    // zero derivative everywhere: no blow-up to rescale
    bool truncated = false;     // z_n + rho * xi left the region for the requested radius
    std::vector<Expr> components;  // g_n(xi) = f_n(z_n + rho_n xi)
    std::vector<XiSample> samples;
    double sup_fs_derivative = 0.0;
    double fs_derivative_at_origin = 0.0;
};

RescalingRecord zalcman_rescale(const CurveFamily& family, const MartyEntry& entry, const Disk& region,
                                double xi_radius, GridSpec xi_grid = {21, 21});

struct Verdict {
    enum class Kind { SuggestsNormal, SuggestsNonnormal };
    Kind kind = Kind::SuggestsNormal;
    std::optional<cplx> cluster;  // set for SuggestsNonnormal
    bool boundary_cluster = false;  // cluster point hugs the rim; treat with suspicion

    std::string label() const;
};

/// Heuristic reading of a scan. Requires at least five schedule entries.
/// The cluster point is the scan's persistent point: single argmaxes can hop
/// between equally bad spots (e^{nz} + z peaks near alternating rim points),
/// while the place where the blow-up keeps its share of the maximum is stable.
Verdict normality_verdict(const MartyScan& scan);

/// sup over grid of fs_distance(a(z), b(z)).
double max_fs_distance(const ReducedCurve& a, const ReducedCurve& b, const Disk& region, GridSpec grid);
/// sup over grid of fs_distance(a(z), p).
double max_fs_distance(const ReducedCurve& a, const ProjectivePoint& p, const Disk& region, GridSpec grid);

/// `n,max_fs_derivative,argmax_re,argmax_im,rho_n` rows.
std::string scan_csv(const MartyScan& scan);

}  // namespace curvelab
