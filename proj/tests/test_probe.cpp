#include <doctest.h>

#include "curvelab/error.hpp"
#include "curvelab/probe.hpp"
#include "support.hpp"

using namespace curvelab;

namespace {

const Disk kUnit{0.0, 1.0};
const Disk kScan{0.0, 0.9};

ScalarField field_of(const char* text) {
    const CompiledExpr f{parse_expr(text), {}};
    return ScalarField::from_jet([f](cplx z) { return f.eval(z); });
}

CurveFamily family(std::initializer_list<const char*> parts) {
    CurveFamily fam;
    for (const char* p : parts) fam.components.push_back(parse_expr(p));
    return fam;
}

std::vector<cplx> schedule(int from, int to) {
    std::vector<cplx> out;
    for (int n = from; n <= to; ++n) out.emplace_back(n);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("probe");

TEST_CASE("find_zeros: simple zero") {
    const ZeroSet s = find_zeros(field_of("z - 2*z"), kUnit, {201, 201});
    REQUIRE(s.zeros.size() == 1);
    CHECK(std::abs(s.zeros[0].z) < 1e-12);
    CHECK_FALSE(s.zeros[0].multiple);
    CHECK_FALSE(s.identically_zero);
}

TEST_CASE("find_zeros: a double zero is located and flagged") {
    const ZeroSet s = find_zeros(field_of("sin(3*z) - 1"), kUnit, {201, 201});
    REQUIRE(s.zeros.size() == 1);
    CHECK(std::abs(s.zeros[0].z - M_PI / 6.0) < 1e-6);
    CHECK(s.zeros[0].multiple);
    CHECK(s.zeros[0].multiplicity == 2);
}

TEST_CASE("find_zeros: zero-free fields give an empty set") {
    CHECK(find_zeros(field_of("exp(z)"), kUnit, {201, 201}).empty());
    CHECK(find_zeros(field_of("1 + z/4"), kUnit, {101, 101}).empty());
}

TEST_CASE("find_zeros: off-lattice zeros and the residual invariant") {
    const ZeroSearchOptions opt;
    const ZeroSet s = find_zeros(field_of("(z - 0.3137 - 0.2718i)*(z + 0.55 - 0.1i)*(z - 0.0123i)"), kUnit, {64, 64}, opt);
    REQUIRE(s.zeros.size() == 3);
    for (const Zero& z : s.zeros) {
        CHECK(z.residual <= opt.tol * z.scale);
        CHECK(kUnit.contains(z.z));
    }
    CHECK(std::abs(s.zeros[0].z - cplx{-0.55, 0.1}) < 1e-9);
    CHECK(std::abs(s.zeros[1].z - cplx{0.0, 0.0123}) < 1e-9);
    CHECK(std::abs(s.zeros[2].z - cplx{0.3137, 0.2718}) < 1e-9);
}

TEST_CASE("find_zeros: identically zero fields are reported as such") {
    const ZeroSet s = find_zeros(field_of("z - z"), kUnit, {41, 41});
    CHECK(s.identically_zero);
}

TEST_CASE("marty_scan: e^{nz} peaks at n/2 on the imaginary axis, ties to the centre") {
    const MartyScan scan = marty_scan(family({"1", "exp(n*z)"}), schedule(1, 10), kScan, {201, 201});
    REQUIRE(scan.entries.size() == 10);
    for (const auto& e : scan.entries) {
        CHECK(e.max_fs_derivative == doctest::Approx(e.n.real() / 2.0).epsilon(1e-12));
        CHECK(std::abs(e.argmax) < 1e-12);
    }
    CHECK(scan.growth);
    const Verdict v = normality_verdict(scan);
    CHECK(v.kind == Verdict::Kind::SuggestsNonnormal);
    REQUIRE(v.cluster);
    CHECK(std::abs(*v.cluster) < 1e-12);
    CHECK(v.label() == "suggests-nonnormal(0+0i)");
}

TEST_CASE("marty_scan: nz and z/n") {
    const MartyScan up = marty_scan(family({"1", "n*z"}), schedule(1, 8), kScan, {101, 101});
    for (const auto& e : up.entries) CHECK(e.max_fs_derivative == doctest::Approx(e.n.real()));
    CHECK(normality_verdict(up).kind == Verdict::Kind::SuggestsNonnormal);

    const MartyScan down = marty_scan(family({"1", "z/n"}), schedule(1, 8), kScan, {101, 101});
    for (const auto& e : down.entries) CHECK(e.max_fs_derivative == doctest::Approx(1.0 / e.n.real()));
    CHECK_FALSE(down.growth);
    const Verdict v = normality_verdict(down);
    CHECK(v.kind == Verdict::Kind::SuggestsNormal);
    CHECK(v.label() == "suggests-normal");
    CHECK_THROWS((void)normality_verdict(marty_scan(family({"1", "z/n"}), schedule(1, 4), kScan, {41, 41})));
}

TEST_CASE("marty_scan: e^{nz} + z blows up") {
    const MartyScan scan = marty_scan(family({"1", "exp(n*z) + z"}), schedule(1, 20), kScan, {101, 101});
    CHECK(scan.growth);
    const Verdict v = normality_verdict(scan);
    CHECK(v.kind == Verdict::Kind::SuggestsNonnormal);
    REQUIRE(v.cluster);
    CHECK(std::abs(v.cluster->real()) <= 2.0 * 0.9 / 100.0);
}

TEST_CASE("zalcman_rescale: e^{nz} rescales to e^{2 xi}") {
    const CurveFamily fam = family({"1", "exp(n*z)"});
    const MartyEntry e = marty_entry(fam, 10.0, kScan, {201, 201});
    const RescalingRecord r = zalcman_rescale(fam, e, kScan, 2.0);
    REQUIRE(r.rho);
    CHECK(*r.rho == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_FALSE(r.truncated);
    CHECK_FALSE(r.degenerate);
    CHECK(r.fs_derivative_at_origin == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& s : r.samples) {
        CHECK(testing::rel_err(s.values[1], std::exp(2.0 * s.xi)) <= 1e-12);
    }
    CHECK(r.sup_fs_derivative == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zalcman_rescale: nz rescales to xi, constants are degenerate") {
    const CurveFamily line = family({"1", "n*z"});
    const RescalingRecord r = zalcman_rescale(line, marty_entry(line, 10.0, kScan, {101, 101}), kScan, 2.0);
    REQUIRE(r.rho);
    CHECK(*r.rho == doctest::Approx(0.1));
    for (const auto& s : r.samples) CHECK(std::abs(s.values[1] - s.xi) < 1e-12);
    CHECK(r.fs_derivative_at_origin == doctest::Approx(1.0));

    const CurveFamily flat = family({"1", "2"});
    const RescalingRecord d = zalcman_rescale(flat, marty_entry(flat, 3.0, kScan, {41, 41}), kScan, 2.0);
    CHECK(d.degenerate);
    CHECK_FALSE(d.rho);
}

TEST_CASE("zalcman_rescale truncates near the rim") {
    const CurveFamily fam = family({"1", "exp(n*z)"});
    MartyEntry e = marty_entry(fam, 4.0, kScan, {101, 101});
    e.argmax = cplx{0.0, 0.85};
    const RescalingRecord r = zalcman_rescale(fam, e, kScan, 2.0);
    CHECK(r.truncated);
    CHECK(r.xi_radius == doctest::Approx(0.05 / 0.5));
}

TEST_CASE("max_fs_distance") {
    const ReducedCurve a{{parse_expr("1"), parse_expr("z")}, kUnit};
    const ReducedCurve b{{parse_expr("1"), parse_expr("z + 1/100")}, kUnit};
    CHECK(max_fs_distance(a, a, kUnit, {41, 41}) == doctest::Approx(0.0));
    CHECK(max_fs_distance(a, b, kUnit, {41, 41}) == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(max_fs_distance(a, ProjectivePoint{CVector{1.0, 0.0}}, kUnit, {41, 41}) == doctest::Approx(std::sqrt(0.5)));
}

TEST_SUITE_END();
