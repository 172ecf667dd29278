#include <doctest.h>

#include "curvelab/criteria.hpp"
#include "curvelab/error.hpp"
#include "support.hpp"

using namespace curvelab;
using testing::Rng;

namespace {

std::vector<Expr> exprs(std::initializer_list<const char*> texts) {
    std::vector<Expr> out;
    for (const char* t : texts) out.push_back(parse_expr(t));
    return out;
}

std::vector<cplx> range(int from, int to) {
    std::vector<cplx> out;
    for (int n = from; n <= to; ++n) out.emplace_back(n);
    return out;
}

FamilyScenario targets_scenario(std::initializer_list<const char*> curve, std::initializer_list<const char*> targets,
                                double eps, double M, std::vector<cplx> schedule, GridSpec grid = {101, 101}) {
    FamilyScenario s;
    s.family.components = exprs(curve);
    s.targets = exprs(targets);
    s.epsilon = eps;
    s.M = M;
    s.schedule = std::move(schedule);
    s.grid = grid;
    return s;
}

FamilyScenario example21(GridSpec grid = {101, 101}) {
    return targets_scenario({"1", "exp(n*z)"}, {"2*n*exp(n*z)", "3*n*exp(n*z)", "4*n*exp(n*z)"}, 0.5, 1.0, range(1, 20), grid);
}

FamilyScenario example22(GridSpec grid = {101, 101}) {
    return targets_scenario({"sin(n*z)", "1/2 + z/(8*n)"}, {"1/2 + z/(8*n)", "-(1/2 + z/(8*n))", "0"}, 0.375, 1.0,
                            range(1, 30), grid);
}

FamilyScenario example23(GridSpec grid = {101, 101}) {
    return targets_scenario({"1", "n*z"}, {"1/2", "1/3", "1/4"}, 1.0 / 12.0, 1.0, range(1, 10), grid);
}

FamilyScenario fixed_point(const char* f, const char* a1, const char* a2, double M, std::vector<cplx> schedule,
                           GridSpec grid = {101, 101}) {
    FamilyScenario s;
    s.family.components = exprs({f});
    s.targets = exprs({a1, a2});
    s.M = M;
    s.schedule = std::move(schedule);
    s.grid = grid;
    return s;
}

Outcome outcome(const CheckReport& r, std::string_view id) {
    const ConditionReport* c = r.find(id);
    REQUIRE(c != nullptr);
    return c->outcome;
}

void check_witnessed(const CheckReport& r) {
    for (const auto& c : r.conditions) {
        if (c.outcome == Outcome::Violated) CHECK_FALSE(c.witnesses.empty());
        CHECK(c.witnesses.size() <= kMaxWitnesses);
    }
    for (const auto& d : r.delegated) check_witnessed(d);
}

}  // namespace

TEST_SUITE_BEGIN("criteria");

TEST_CASE("moving hyperplanes: z/n against three coordinate-like hyperplanes") {
    FamilyScenario s;
    s.family.components = exprs({"1", "z/n"});
    s.hyperplanes = {MovingHyperplane{exprs({"1", "0"})}, MovingHyperplane{exprs({"0", "1"})},
                     MovingHyperplane{exprs({"1", "-1"})}};
    s.delta = 0.1;
    s.region = Disk{0.0, 0.5};
    s.schedule = range(2, 6);
    s.grid = {65, 65};
    const CheckReport r = check_moving_hyperplanes(s);
    CHECK(r.criterion == "thm1");
    REQUIRE(r.min_measure);
    CHECK(*r.min_measure == doctest::Approx(1.0));
    CHECK(outcome(r, "hypothesis") == Outcome::Holds);
    CHECK(outcome(r, "i") == Outcome::Vacuous);
    CHECK(outcome(r, "ii") == Outcome::Holds);
    CHECK(outcome(r, "iii") == Outcome::Holds);
    CHECK_FALSE(r.violated());
    // the only incidence zero is z/n = 0
    for (const Site& site : r.find("ii")->sites) {
        CHECK(std::abs(site.z) < 1e-12);
        CHECK(site.target == 1);
    }
}

TEST_CASE("moving hyperplanes: a repeated hyperplane breaks the hypothesis") {
    FamilyScenario s;
    s.family.components = exprs({"1", "z/n"});
    s.hyperplanes = {MovingHyperplane{exprs({"1", "0"})}, MovingHyperplane{exprs({"0", "1"})},
                     MovingHyperplane{exprs({"1", "0"})}};
    s.delta = 0.1;
    s.region = Disk{0.0, 0.5};
    s.schedule = range(2, 3);
    s.grid = {33, 33};
    const CheckReport r = check_moving_hyperplanes(s);
    REQUIRE(r.min_measure);
    CHECK(*r.min_measure == 0.0);
    CHECK(outcome(r, "hypothesis") == Outcome::Violated);
    CHECK(r.violated());
    check_witnessed(r);
}

TEST_CASE("moving hyperplanes: wrong hyperplane count is a scenario error") {
    FamilyScenario s;
    s.family.components = exprs({"1", "z"});
    s.hyperplanes = {MovingHyperplane{exprs({"1", "0"})}, MovingHyperplane{exprs({"0", "1"})}};
    s.delta = 0.1;
    s.schedule = {1.0};
    CHECK_THROWS_AS((void)check_moving_hyperplanes(s), ScenarioError);
}

TEST_CASE("scenario invariants are validated") {
    FamilyScenario s = example23();
    s.schedule.clear();
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = example23();
    s.grid = {16, 16};
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = example23();
    s.M = -1.0;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = example23();
    s.delta = 1.5;
    CHECK_THROWS_AS(s.validate(), ScenarioError);
    s = example23();
    s.epsilon.reset();
    CHECK_THROWS_AS((void)check_wandering_targets(s), ScenarioError);
}

TEST_CASE("targets: unbounded targets with f' never equal to them") {
    const CheckReport r = check_wandering_targets(example21());
    CHECK(r.criterion == "thm2");
    CHECK(outcome(r, "i") == Outcome::Violated);
    CHECK(outcome(r, "ii") == Outcome::Vacuous);
    CHECK(outcome(r, "iii") == Outcome::Vacuous);
    check_witnessed(r);
    CHECK(r.find("i")->witnesses.front().value > 1.0);
}

TEST_CASE("targets: 1/sin(nz) family keeps |f'| <= 1 where f hits a target") {
    const CheckReport r = check_wandering_targets(example22());
    CHECK(outcome(r, "i") == Outcome::Holds);
    CHECK(outcome(r, "iii") == Outcome::Holds);
    const ConditionReport& c3 = *r.find("iii");
    CHECK_FALSE(c3.sites.empty());
    for (const Site& site : c3.sites) CHECK(site.target != 2);
    CHECK(c3.worst_margin >= 0.0);
}

TEST_CASE("targets: nz hits 1/(j+1) with slope n") {
    const FamilyScenario s = example23();
    const CheckReport r = check_wandering_targets(s);
    CHECK(outcome(r, "i") == Outcome::Holds);
    CHECK(outcome(r, "ii") == Outcome::Vacuous);
    CHECK(outcome(r, "iii") == Outcome::Violated);
    const ConditionReport& c3 = *r.find("iii");
    CHECK(c3.violations == 27);  // n = 2..10, three targets each
    for (const Witness& w : c3.witnesses) {
        CHECK(w.value == doctest::Approx(w.n.real()));
        bool hit = false;
        for (int j = 1; j <= 3; ++j) hit = hit || std::abs(w.n * w.z - 1.0 / (j + 1)) <= 1e-9;
        CHECK(hit);
    }
}

TEST_CASE("shared targets: e^z shares everything with itself") {
    FamilyScenario s = targets_scenario({"1", "exp(z)"}, {"1/2", "-1/2", "2i"}, 1.0, 3.0, {1.0});
    const CheckReport r = check_shared_targets(s);
    CHECK(r.criterion == "cor24");
    CHECK(outcome(r, "i") == Outcome::Holds);
    CHECK(outcome(r, "sharing") == Outcome::Holds);
    REQUIRE(r.delegated.size() == 1);
    CHECK(r.delegated[0].criterion == "thm2");
    CHECK_FALSE(r.violated());
}

TEST_CASE("shared targets: nz hits the targets but its derivative never does") {
    const CheckReport r = check_shared_targets(example23());
    CHECK(outcome(r, "sharing") == Outcome::Violated);
    check_witnessed(r);
}

TEST_CASE("shared targets: omitted values give a vacuous verdict") {
    const CheckReport r = check_shared_targets(targets_scenario({"1", "exp(z)"}, {"-1", "-2", "-3"}, 1.0, 3.0, {1.0}));
    CHECK(outcome(r, "i") == Outcome::Holds);
    CHECK(outcome(r, "sharing") == Outcome::Vacuous);
}

TEST_CASE("lift: derived map of (1, z, f) is (1, 1, f')") {
    const ReducedCurve a = lift_curve(parse_expr("2*z"), Disk{0.0, 1.0});
    CHECK(derived_map(a, 0, 1.0).components == CVector{1.0, 1.0, 2.0});
    const ReducedCurve b = lift_curve(parse_expr("5"), Disk{0.0, 1.0});
    CHECK(derived_map(b, 0, 0.3).components == CVector{1.0, 1.0, 0.0});
    const ReducedCurve c = lift_curve(parse_expr("exp(n*z) + z"), Disk{0.0, 1.0}, {{"n", 3.0}});
    const cplx z{0.2, -0.1};
    const CVector d = derived_map(c, 0, z).components;
    CHECK(d[0] == cplx{1.0, 0.0});
    CHECK(d[1] == cplx{1.0, 0.0});
    CHECK(testing::rel_err(d[2], 3.0 * std::exp(3.0 * z) + 1.0) <= 1e-14);
}

TEST_CASE("fixed-point hyperplanes") {
    const auto hs = build_fixed_point_hyperplanes(parse_expr("1/2"), parse_expr("-1/2"));
    REQUIRE(hs.size() == 5);
    const std::vector<CVector> want{{0.5, 0.0, -1.0}, {-0.5, 0.0, -1.0}, {0.0, 1.0, -1.0}, {1.0, -0.5, 0.0},
                                    {1.0, -1.0 / 3.0, 0.0}};
    for (std::size_t k = 0; k < 5; ++k) {
        const BoundHyperplane b{hs[k], {}};
        CHECK(b.coefficients(0.4) == want[k]);
        CHECK(b.at(0.4).alpha() == want[k]);
    }
    const ReducedCurve f = lift_curve(parse_expr("z^2"), Disk{0.0, 1.0});
    const cplx z{0.3, 0.4};
    CHECK(testing::rel_err(incidence(f, BoundHyperplane{hs[2], {}}, z), z - z * z) <= 1e-15);
    CHECK(derived_incidence(f, BoundHyperplane{hs[3], {}}, 0, z) == cplx{0.5, 0.0});
    CHECK(std::abs(derived_incidence(f, BoundHyperplane{hs[4], {}}, 0, z) - 2.0 / 3.0) < 1e-15);
}

TEST_CASE("delta_star: closed form, brute force, and the range bound") {
    const std::vector<cplx> a{0.5};
    const std::vector<cplx> b{-0.5};
    const double d = delta_star(a, b);
    CHECK(d == doctest::Approx((1.0 / 1296.0) * 0.75 * 1.25 * (5.0 / 6.0) * (7.0 / 6.0)).epsilon(1e-14));
    CHECK(delta_star_bound(a, b) <= d * (1.0 + 1e-12));
    CHECK_THROWS((void)delta_star({}, b));
    CHECK(fixed_point_delta(d, 2.0) == d);
    CHECK(fixed_point_delta(0.9, 2.0) == doctest::Approx(1.0 / 3.0));
    CHECK(fixed_point_delta(0.9, 0.1) == doctest::Approx(1.0 / std::sqrt(3.0)));

    // cubic collapse as the targets merge: delta* / gap^3 tends to 6^-4 |a/2 - 1|^2 |a/3 - 1|^2
    const double limit = (1.0 / 1296.0) * 0.75 * 0.75 * (5.0 / 6.0) * (5.0 / 6.0);
    for (double gap : {1e-1, 1e-2, 1e-3}) {
        const std::vector<cplx> c{0.5 + gap};
        CHECK(delta_star(a, c) / (gap * gap * gap) == doctest::Approx(limit).epsilon(2.0 * gap));
    }
}

TEST_CASE("delta_star equals the brute-force measure on random draws") {
    Rng rng{31};
    for (int k = 0; k < 200; ++k) {
        const cplx a1 = rng.in_disk(0.99);
        const cplx a2 = rng.in_disk(0.99);
        const auto hs = build_fixed_point_hyperplanes(Expr::constant(a1), Expr::constant(a2));
        std::vector<Hyperplane> bound;
        for (const auto& h : hs) bound.push_back(BoundHyperplane{h, {}}.at(0.0));
        const double brute = gen_position_measure(bound);
        const std::vector<cplx> s1{a1};
        const std::vector<cplx> s2{a2};
        if (brute == 0.0) continue;
        CHECK(delta_star(s1, s2) == doctest::Approx(brute).epsilon(1e-12));
        CHECK(delta_star_bound(s1, s2) <= brute * (1.0 + 1e-12));
    }
}

TEST_CASE("fixed points: f = 2z meets every condition") {
    const CheckReport r = check_fixed_point_criterion(fixed_point("2*z", "1/2", "-1/2", 2.0, {1.0}));
    CHECK(r.criterion == "thm5");
    CHECK_FALSE(r.violated());
    REQUIRE(r.delta_star);
    REQUIRE(r.delta);
    CHECK(*r.delta_star == doctest::Approx(7.032857510288e-4).epsilon(1e-12));
    CHECK(*r.delta == *r.delta_star);
    REQUIRE(r.delegated.size() == 1);
    REQUIRE(r.delegated[0].min_measure);
    CHECK(*r.delegated[0].min_measure == doctest::Approx(*r.delta_star).epsilon(1e-12));
    CHECK(outcome(r.delegated[0], "hypothesis") == Outcome::Holds);
    CHECK(outcome(r, "i") == Outcome::Holds);
    CHECK(outcome(r, "ii") == Outcome::Vacuous);
    CHECK(outcome(r, "iii") == Outcome::Holds);
}

TEST_CASE("fixed points: e^{nz} + z has no fixed points and never slope one") {
    const CheckReport r = check_fixed_point_criterion(fixed_point("exp(n*z) + z", "1/2", "-1/2", 2.0, range(1, 6)));
    CHECK(outcome(r, "ii") == Outcome::Vacuous);
    CHECK(outcome(r, "iii") == Outcome::Vacuous);
}

TEST_CASE("fixed points: target ranges must sit in disjoint compacts of the punctured disk") {
    CHECK_THROWS_AS((void)check_fixed_point_criterion(fixed_point("2*z", "z/2", "z/4 + 1/10", 2.0, {1.0})), ScenarioError);
    CHECK_THROWS_AS((void)check_fixed_point_criterion(fixed_point("2*z", "0", "1/2", 2.0, {1.0})), ScenarioError);
    CHECK_THROWS_AS((void)check_fixed_point_criterion(fixed_point("2*z", "1", "1/2", 2.0, {1.0})), ScenarioError);
    const CheckReport moving = check_fixed_point_criterion(fixed_point("2*z", "1/2 + z/20", "-1/2 + z/20", 2.0, {1.0}));
    REQUIRE(moving.delta_star);
    CHECK(*moving.delta_star > 0.0);
    CHECK(*moving.delta_star_bound <= *moving.delta_star);
}

TEST_CASE("eps^3 lower bound for three separated targets") {
    Rng rng{41};
    for (double eps : {0.1, 0.375, 0.9}) {
        int drawn = 0;
        while (drawn < 500) {
            const cplx a[3] = {rng.in_disk(1.0), rng.in_disk(1.0), rng.in_disk(1.0)};
            if (std::abs(a[0] - a[1]) < eps || std::abs(a[0] - a[2]) < eps || std::abs(a[1] - a[2]) < eps) continue;
            ++drawn;
            std::vector<Hyperplane> hs;
            for (cplx x : a) hs.push_back(normalize_hyperplane(CVector{x, -1.0}));
            CHECK(gen_position_measure(hs) >= eps * eps * eps - 1e-12);
        }
    }
}

TEST_CASE("target sites: sqrt(2) bound and the derivative ratio identity") {
    for (const FamilyScenario& s : {example22(), example23()}) {
        const CheckReport r = check_wandering_targets(s);
        const ConditionReport& c3 = *r.find("iii");
        REQUIRE_FALSE(c3.sites.empty());
        const Expr quotient = s.family.components[1] / s.family.components[0];
        for (const Site& site : c3.sites) {
            const ParamMap p = s.family.bindings(site.n);
            const ReducedCurve f = s.family.member(site.n, s.region);
            const cplx a = eval_jet(s.targets[site.target], site.z, p).value;
            REQUIRE(std::abs(a) <= 1.0);
            const CVector v = f.values(site.z);
            CHECK(std::abs(v[0]) / euclidean_norm(v) >= 1.0 / std::sqrt(2.0) - 1e-12);
            const cplx fprime = eval_jet(quotient, site.z, p).deriv;
            for (const Expr& ak : s.targets) {
                const BoundHyperplane h{MovingHyperplane{{ak, Expr::constant(-1.0)}}, p};
                const cplx want = eval_jet(ak, site.z, p).value - fprime;
                const cplx got = derived_incidence_ratio(f, h, 0, site.z);
                CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
            }
        }
    }
}

TEST_CASE("reports are reproducible") {
    const CheckReport a = check_wandering_targets(example23());
    const CheckReport b = check_wandering_targets(example23());
    const auto& wa = a.find("iii")->witnesses;
    const auto& wb = b.find("iii")->witnesses;
    REQUIRE(wa.size() == wb.size());
    for (std::size_t k = 0; k < wa.size(); ++k) {
        CHECK(wa[k].z == wb[k].z);
        CHECK(wa[k].n == wb[k].n);
        CHECK(wa[k].value == wb[k].value);
    }
}

TEST_SUITE_END();
