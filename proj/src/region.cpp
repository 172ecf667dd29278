#include "curvelab/region.hpp"

#include "curvelab/error.hpp"

namespace curvelab {

DiskGrid::DiskGrid(const Disk& disk, GridSpec spec) : disk_{disk}, nx_{spec.nx}, ny_{spec.ny} {
    if (nx_ < 2 || ny_ < 2) throw DomainError("grid needs at least 2 points per axis");
    if (!(disk.radius > 0.0)) throw DomainError("disk radius must be positive");
    inside_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            inside_[index(ix, iy)] = disk_.contains(point(ix, iy), 1e-12 * disk_.radius) ? 1 : 0;
        }
    }
}

cplx DiskGrid::point(int ix, int iy) const {
    const double x = disk_.radius * (2.0 * ix / (nx_ - 1) - 1.0);
    const double y = disk_.radius * (2.0 * iy / (ny_ - 1) - 1.0);
    return disk_.center + cplx{x, y};
}

std::vector<cplx> DiskGrid::points() const {
    std::vector<cplx> out;
    out.reserve(size());
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            if (inside(ix, iy)) out.push_back(point(ix, iy));
        }
    }
    return out;
}

}  // namespace curvelab
