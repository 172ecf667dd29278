#pragma once

// Executable hypothesis checkers for the normality criteria.
//
// Each checker takes a FamilyScenario, scans every family member on the
// margin-shrunk region, and reports one verdict per condition. Implications
// "A(z) => B(z)" are decided by locating the zeros of the antecedent field and
// testing the consequent at each refined zero. An implication with an empty
// antecedent zero set is reported as vacuous, never silently as holding.
//
// The checkers validate hypotheses only. Whether a family is normal is the
// conclusion, not something these functions decide.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "curvelab/curve.hpp"
#include "curvelab/probe.hpp"
#include "curvelab/proj.hpp"

namespace curvelab {

enum class Outcome { Holds, Violated, Vacuous };

std::string_view outcome_name(Outcome o);

struct Witness {
    cplx z{};
    cplx n{};
    double value = 0.0;  // measured quantity that broke the condition
    std::string detail;
};

/// A point where a condition was tested (a refined zero, or a grid point).
struct Site {
    cplx z{};
    cplx n{};
    int target = -1;  // hyperplane or target index, 0-based; -1 when not applicable
};

struct ConditionReport {
    std::string id;
    std::string description;
    Outcome outcome = Outcome::Vacuous;
    std::vector<Witness> witnesses;  // sorted by (n, re z, im z); at most kMaxWitnesses
    std::size_t violations = 0;
    std::size_t examined = 0;  // sites tested, including grid points
    std::vector<Site> sites;   // refined zeros only; grid scans are just counted
    /// Smallest slack (bound - measured) seen over all sites; negative iff violated.
    double worst_margin = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kMaxWitnesses = 64;

struct CheckReport {
    std::string criterion;  // "thm1", "thm2", "cor24", "thm5"
    std::vector<ConditionReport> conditions;
    std::optional<double> min_measure;  // min over grid of the general-position measure
    std::optional<double> delta;
    std::optional<double> delta_star;
    std::optional<double> delta_star_bound;
    std::size_t zeros_examined = 0;
    std::vector<CheckReport> delegated;

    /// True if this report or any delegated report has a violated condition.
    bool violated() const;
    const ConditionReport* find(std::string_view id) const;
};

struct FamilyScenario {
    CurveFamily family;
    std::vector<cplx> schedule;
    std::vector<MovingHyperplane> hyperplanes;  // moving-hyperplane criterion
    std::vector<Expr> targets;                  // target-function criteria
    std::optional<double> delta;
    std::optional<double> epsilon;
    std::optional<double> M;
    Disk region{0.0, 1.0};
    GridSpec grid{201, 201};
    double consequent_tol = 1e-6;  // relative tolerance for "consequent holds"

    /// Throws ScenarioError on a broken invariant: delta outside (0,1),
    /// nonpositive epsilon or M, empty schedule, grid below 32x32.
    void validate() const;
    Disk scan_region() const { return region.shrunk(kScanMargin); }
};

/// Relative slack applied to the inequality bounds (|a| <= M, |a_j - a_k| >= eps,
/// |f'| <= M) so that exact equalities survive rounding.
inline constexpr double kBoundSlack = 1e-12;

/// 2N+1 moving hyperplanes, general-position bound delta, conditions (i)-(iii).
CheckReport check_moving_hyperplanes(const FamilyScenario& s);

/// N = 1 curve (f0, f1), three targets a_j, constants epsilon and M.
CheckReport check_wandering_targets(const FamilyScenario& s);

/// f and f' share the three targets; emits the induced target-criterion report.
CheckReport check_shared_targets(const FamilyScenario& s);

/// f holomorphic (one component), targets a_1, a_2 with ranges in disjoint
/// compacts of the punctured unit disk, constant M. Lifts to P^2, builds the
/// five hyperplanes, picks delta, delegates, and checks the scalar conditions.
CheckReport check_fixed_point_criterion(const FamilyScenario& s);

/// (1, z, f)
ReducedCurve lift_curve(const Expr& f, const Disk& region, const ParamMap& params = {});
CurveFamily lift_family(const Expr& f, const ParamMap& params = {}, std::string index = "n");

/// (a1,0,-1), (a2,0,-1), (0,1,-1), (1,-1/2,0), (1,-1/3,0). Normalized whenever |a_j| <= 1.
std::vector<MovingHyperplane> build_fixed_point_hyperplanes(const Expr& a1, const Expr& a2);

/// Closed form of the general-position measure of the five hyperplanes:
/// 6^-4 |a1/2 - 1| |a2/2 - 1| |a1/3 - 1| |a2/3 - 1| |a2 - a1|^3.
double fixed_point_measure(cplx a1, cplx a2);

/// Min of fixed_point_measure over all sample pairs. Throws on empty input.
double delta_star(std::span<const cplx> a1_samples, std::span<const cplx> a2_samples);

/// Range-only lower bound 6^-4 (1 - d1/2)(1 - d2/2)(1 - d1/3)(1 - d2/3) d3^3 with
/// d1, d2 the largest moduli and d3 the distance between the sample sets.
double delta_star_bound(std::span<const cplx> a1_samples, std::span<const cplx> a2_samples);

/// The delta used for the lifted family: min{delta*, 1/sqrt(3), 1/(1+M)}.
double fixed_point_delta(double delta_star, double M);

}  // namespace curvelab
