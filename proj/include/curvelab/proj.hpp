#pragma once

// Projective-space primitives for P^N(C).
//
// Two pairings live here and must not be confused:
//   incidence_pairing  <w, a> = sum a_i w_i         (bilinear, defines hyperplanes)
//   hermitian_product  (p, q) = sum p_i conj(q_i)   (sesquilinear, defines the metric)

#include <span>
#include <vector>

#include "curvelab/expr.hpp"
#include "curvelab/jet.hpp"
#include "curvelab/region.hpp"

namespace curvelab {

using CVector = std::vector<cplx>;

/// Below this modulus a determinant of N+1 hyperplanes counts as singular.
inline constexpr double kDegenerateDeterminant = 1e-14;

class ProjectivePoint {
public:
    /// Throws DomainError when every coordinate is zero.
    explicit ProjectivePoint(CVector rep);

    const CVector& rep() const { return rep_; }
    std::size_t dim() const { return rep_.size() - 1; }

private:
    CVector rep_;
};

class Hyperplane {
public:
    /// Keeps `alpha` as given. Throws DomainError for the zero vector.
    explicit Hyperplane(CVector alpha);

    const CVector& alpha() const { return alpha_; }
    std::size_t dim() const { return alpha_.size() - 1; }
    bool normalized() const { return normalized_; }

    /// max_i |a_i|
    double norm() const;

private:
    friend Hyperplane normalize_hyperplane(std::span<const cplx> alpha);
    CVector alpha_;
    bool normalized_ = false;
};

/// Divides alpha by max_i |a_i| so that the largest entry has modulus 1.
/// Entries already of max modulus 1 are left bit-for-bit unchanged.
Hyperplane normalize_hyperplane(std::span<const cplx> alpha);

cplx incidence_pairing(std::span<const cplx> w, std::span<const cplx> alpha);
cplx hermitian_product(std::span<const cplx> p, std::span<const cplx> q);
double euclidean_norm(std::span<const cplx> v);

/// Determinant of a square complex matrix given as rows (partial pivoting).
cplx determinant(std::vector<CVector> rows);

/// Product of |det| over all (N+1)-subsets of the coefficient vectors.
/// Returns exactly 0 when some subset has |det| <= kDegenerateDeterminant.
/// Requires normalized hyperplanes of one dimension and at least N+1 of them.
double gen_position_measure(std::span<const Hyperplane> hyperplanes);

/// Same product on raw coefficient rows (caller guarantees normalization).
double gen_position_measure(std::span<const CVector> rows);

/// Fubini-Study (chordal) distance in [0, 1]:
///   sqrt(1 - |(p,q)|^2 / (|p|^2 |q|^2)),
/// evaluated through the Lagrange identity so nearby points keep full precision.
double fs_distance(const ProjectivePoint& p, const ProjectivePoint& q);
double fs_distance(std::span<const cplx> p, std::span<const cplx> q);

/// Hyperplane whose coefficients are holomorphic functions of the domain
/// variable, H(z) = {<w, alpha(z)> = 0}. Entries may carry parameters.
class MovingHyperplane {
public:
    explicit MovingHyperplane(std::vector<Expr> alpha);
    static MovingHyperplane fixed(const Hyperplane& h);

    const std::vector<Expr>& alpha() const { return alpha_; }
    std::size_t dim() const { return alpha_.size() - 1; }

private:
    std::vector<Expr> alpha_;
};

/// Below this max-modulus the coefficients of a moving hyperplane count as vanishing.
inline constexpr double kVanishingCoefficients = 1e-12;

/// A moving hyperplane with parameters frozen, ready for pointwise use.
class BoundHyperplane {
public:
    BoundHyperplane(const MovingHyperplane& h, const ParamMap& params);
    explicit BoundHyperplane(const Hyperplane& h);

    std::size_t dim() const { return alpha_.size() - 1; }

    std::vector<Jet> jets(cplx z) const;
    /// Raw coefficients alpha(z). Throws DomainError when they all vanish.
    CVector coefficients(cplx z) const;
    /// Pointwise normalized hyperplane at z.
    Hyperplane at(cplx z) const { return normalize_hyperplane(coefficients(z)); }

    /// Throws DomainError if the coefficients vanish together somewhere on the grid.
    void check_nonvanishing(const Disk& region, GridSpec grid) const;

private:
    std::vector<CompiledExpr> alpha_;
};

}  // namespace curvelab
