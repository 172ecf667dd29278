#include "curvelab/proj.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvelab/error.hpp"

namespace curvelab {

namespace {

bool all_zero(std::span<const cplx> v) {
    return std::all_of(v.begin(), v.end(), [](cplx c) { return c == cplx{}; });
}

}  // namespace

ProjectivePoint::ProjectivePoint(CVector rep) : rep_{std::move(rep)} {
    if (rep_.empty() || all_zero(rep_)) throw DomainError("projective point needs a nonzero representative");
}

Hyperplane::Hyperplane(CVector alpha) : alpha_{std::move(alpha)} {
    if (alpha_.size() < 2) throw DomainError("hyperplane needs at least two coefficients");
    if (all_zero(alpha_)) throw DomainError("hyperplane coefficient vector is zero");
    normalized_ = norm() == 1.0;
}

double Hyperplane::norm() const {
    double m = 0.0;
    for (cplx a : alpha_) m = std::max(m, std::abs(a));
    return m;
}

Hyperplane normalize_hyperplane(std::span<const cplx> alpha) {
    Hyperplane h{CVector(alpha.begin(), alpha.end())};
    const double m = h.norm();
    if (m != 1.0) {
        for (cplx& a : h.alpha_) a /= m;
        // Pin the largest entry to modulus 1 up to its phase.
        auto top = std::max_element(h.alpha_.begin(), h.alpha_.end(),
                                    [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
        if (top->imag() == 0.0) {
            *top = cplx{top->real() < 0 ? -1.0 : 1.0, 0.0};
        } else if (top->real() == 0.0) {
            *top = cplx{0.0, top->imag() < 0 ? -1.0 : 1.0};
        }
    }
    h.normalized_ = true;
    return h;
}

cplx incidence_pairing(std::span<const cplx> w, std::span<const cplx> alpha) {
    if (w.size() != alpha.size()) throw DomainError("incidence pairing: dimension mismatch");
    cplx s{};
    for (std::size_t i = 0; i < w.size(); ++i) s += alpha[i] * w[i];
    return s;
}

cplx hermitian_product(std::span<const cplx> p, std::span<const cplx> q) {
    if (p.size() != q.size()) throw DomainError("hermitian product: dimension mismatch");
    cplx s{};
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * std::conj(q[i]);
    return s;
}

double euclidean_norm(std::span<const cplx> v) {
    double s = 0.0;
    for (cplx c : v) s += std::norm(c);
    return std::sqrt(s);
}

cplx determinant(std::vector<CVector> rows) {
    const std::size_t n = rows.size();
    for (const auto& r : rows) {
        if (r.size() != n) throw DomainError("determinant: matrix is not square");
    }
    cplx det{1.0, 0.0};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(rows[r][col]) > std::abs(rows[pivot][col])) pivot = r;
        }
        if (rows[pivot][col] == cplx{}) return cplx{};
        if (pivot != col) {
            std::swap(rows[pivot], rows[col]);
            det = -det;
        }
        det *= rows[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const cplx factor = rows[r][col] / rows[col][col];
            for (std::size_t c = col; c < n; ++c) rows[r][c] -= factor * rows[col][c];
        }
    }
    return det;
}

double gen_position_measure(std::span<const CVector> rows) {
    if (rows.empty()) throw DomainError("general position: no hyperplanes");
    const std::size_t width = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != width) throw DomainError("general position: dimension mismatch");
    }
    const std::size_t q = rows.size();
    if (q < width) throw DomainError("general position: need at least N+1 hyperplanes");

    // Enumerate (N+1)-subsets in lexicographic order.
    std::vector<std::size_t> pick(width);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<double> dets;
    std::vector<CVector> matrix(width);
    for (;;) {
        for (std::size_t k = 0; k < width; ++k) matrix[k] = rows[pick[k]];
        const double d = std::abs(determinant(matrix));
        if (d <= kDegenerateDeterminant) return 0.0;
        dets.push_back(d);

        std::size_t k = width;
        while (k > 0 && pick[k - 1] == q - width + (k - 1)) --k;
        if (k == 0) break;
        ++pick[k - 1];
        for (std::size_t j = k; j < width; ++j) pick[j] = pick[j - 1] + 1;
    }
    // Sorted accumulation makes the product independent of input order
    // whenever the individual determinants agree.
    std::sort(dets.begin(), dets.end());
    double product = 1.0;
    for (double d : dets) product *= d;
    return product;
}

double gen_position_measure(std::span<const Hyperplane> hyperplanes) {
    std::vector<CVector> rows;
    rows.reserve(hyperplanes.size());
    for (const auto& h : hyperplanes) {
        if (!h.normalized()) throw DomainError("general position: hyperplanes must be normalized");
        rows.push_back(h.alpha());
    }
    return gen_position_measure(std::span<const CVector>{rows});
}

double fs_distance(std::span<const cplx> p, std::span<const cplx> q) {
    if (p.size() != q.size()) throw DomainError("fs_distance: dimension mismatch");
    const double np = euclidean_norm(p);
    const double nq = euclidean_norm(q);
    if (np == 0.0 || nq == 0.0) throw DomainError("fs_distance: zero representative");
    // |p|^2|q|^2 - |(p,q)|^2 = sum_{i<j} |p_i q_j - p_j q_i|^2
    double wedge = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            wedge += std::norm((p[i] / np) * (q[j] / nq) - (p[j] / np) * (q[i] / nq));
        }
    }
    return std::min(1.0, std::sqrt(wedge));
}

double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q) {
    return fs_distance(std::span<const cplx>{p.rep()}, std::span<const cplx>{q.rep()});
}

MovingHyperplane::MovingHyperplane(std::vector<Expr> alpha) : alpha_{std::move(alpha)} {
    if (alpha_.size() < 2) throw DomainError("moving hyperplane needs at least two coefficients");
}

MovingHyperplane MovingHyperplane::fixed(const Hyperplane& h) {
    std::vector<Expr> alpha;
    for (cplx a : h.alpha()) alpha.push_back(Expr::constant(a));
    return MovingHyperplane{std::move(alpha)};
}

BoundHyperplane::BoundHyperplane(const MovingHyperplane& h, const ParamMap& params) {
    for (const auto& e : h.alpha()) alpha_.emplace_back(e, params);
}

BoundHyperplane::BoundHyperplane(const Hyperplane& h) {
    for (cplx a : h.alpha()) alpha_.emplace_back(Expr::constant(a), ParamMap{});
}

std::vector<Jet> BoundHyperplane::jets(cplx z) const {
    std::vector<Jet> out;
    out.reserve(alpha_.size());
    for (const auto& a : alpha_) out.push_back(a.eval(z));
    return out;
}

CVector BoundHyperplane::coefficients(cplx z) const {
    CVector out;
    out.reserve(alpha_.size());
    double m = 0.0;
    for (const auto& a : alpha_) {
        out.push_back(a.value(z));
        m = std::max(m, std::abs(out.back()));
    }
    if (!(m > kVanishingCoefficients)) throw DomainError("moving hyperplane coefficients all vanish at a point");
    return out;
}

void BoundHyperplane::check_nonvanishing(const Disk& region, GridSpec grid) const {
    for (cplx z : DiskGrid{region, grid}.points()) (void)coefficients(z);
}

}  // namespace curvelab
