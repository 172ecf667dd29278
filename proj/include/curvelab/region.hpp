#pragma once

#include <cstddef>
#include <vector>

#include "curvelab/jet.hpp"

namespace curvelab {

/// Closed disk {|z - center| <= radius}.
struct Disk {
    cplx center{};
    double radius = 1.0;

    bool contains(cplx z, double slack = 0.0) const { return std::abs(z - center) <= radius + slack; }

    /// The concentric disk scaled by `factor`.
    Disk shrunk(double factor) const { return {center, radius * factor}; }
};

struct GridSpec {
    int nx = 201;
    int ny = 201;
};

/// Fraction of a scenario region that scans cover; keeps probes off the rim.
inline constexpr double kScanMargin = 0.9;

/// Lattice points of the bounding square of a disk, restricted to the disk.
///
/// Point (ix, iy) sits at center + R(2ix/(nx-1) - 1) + iR(2iy/(ny-1) - 1), so
/// odd grids hit the center exactly. Points outside the disk are kept in the
/// lattice but marked, which keeps neighbour lookups trivial.
class DiskGrid {
public:
    DiskGrid(const Disk& disk, GridSpec spec);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    const Disk& disk() const { return disk_; }

    cplx point(int ix, int iy) const;
    bool inside(int ix, int iy) const { return inside_[index(ix, iy)] != 0; }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }
    std::size_t size() const { return inside_.size(); }

    /// All inside points, row-major.
    std::vector<cplx> points() const;

private:
    Disk disk_;
    int nx_;
    int ny_;
    std::vector<unsigned char> inside_;
};

}  // namespace curvelab
