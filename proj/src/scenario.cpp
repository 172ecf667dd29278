#include "curvelab/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "curvelab/error.hpp"

namespace curvelab {

namespace builtin {
const std::vector<std::pair<std::string_view, std::string_view>>& scenario_sources();
std::string_view expectations_source();
}  // namespace builtin

using nlohmann::json;

namespace {

const std::set<std::string> kTheorems{"thm1", "thm2", "cor24", "thm5", "probe"};

// Collects schema problems so that one run reports all of them.
class Schema {
public:
    void fail(std::string msg) { errors_.push_back(std::move(msg)); }

    void allow(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (auto key : keys) known = known || key == k;
            if (!known) fail("unknown key '" + where + k + "'");
        }
    }

    std::optional<cplx> complex(const json& j, const std::string& where) {
        if (j.is_number()) return cplx{j.get<double>(), 0.0};
        if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
            return cplx{j[0].get<double>(), j[1].get<double>()};
        }
        fail(where + ": expected a number or [re, im]");
        return std::nullopt;
    }

    std::optional<double> real(const json& j, const std::string& where) {
        if (j.is_number()) return j.get<double>();
        fail(where + ": expected a number");
        return std::nullopt;
    }

    std::optional<Expr> expr(const json& j, const std::string& where, const ParseOptions& opts) {
        if (j.is_number() || j.is_array()) {
            if (auto c = complex(j, where)) return Expr::constant(*c);
            return std::nullopt;
        }
        if (!j.is_string()) {
            fail(where + ": expected an expression string");
            return std::nullopt;
        }
        try {
            return parse_expr(j.get<std::string>(), opts);
        } catch (const ParseError& e) {
            fail(where + ": " + e.what());
        }
        return std::nullopt;
    }

    void raise() const {
        if (errors_.empty()) return;
        std::string msg = "invalid scenario:";
        for (const auto& e : errors_) msg += "\n  " + e;
        throw ScenarioError(msg);
    }

private:
    std::vector<std::string> errors_;
};

std::optional<Disk> parse_region(Schema& sc, const json& j, const std::string& where) {
    if (!j.is_object()) {
        sc.fail(where + ": expected an object {center, radius}");
        return std::nullopt;
    }
    sc.allow(j, where + ".", {"center", "radius"});
    Disk d{0.0, 1.0};
    if (j.contains("center")) {
        if (auto c = sc.complex(j["center"], where + ".center")) d.center = *c;
    }
    if (j.contains("radius")) {
        if (auto r = sc.real(j["radius"], where + ".radius")) d.radius = *r;
    }
    if (!(d.radius > 0.0)) sc.fail(where + ".radius: must be positive");
    return d;
}

std::optional<GridSpec> parse_grid(Schema& sc, const json& j, const std::string& where) {
    if (!j.is_object()) {
        sc.fail(where + ": expected an object {nx, ny}");
        return std::nullopt;
    }
    sc.allow(j, where + ".", {"nx", "ny"});
    GridSpec g;
    for (auto [key, slot] : {std::pair{"nx", &g.nx}, std::pair{"ny", &g.ny}}) {
        if (!j.contains(key)) continue;
        if (j[key].is_number_integer() && j[key].get<long long>() > 1 && j[key].get<long long>() < 100000) {
            *slot = j[key].get<int>();
        } else {
            sc.fail(where + "." + key + ": expected an integer in [2, 99999]");
        }
    }
    return g;
}

std::vector<cplx> parse_schedule(Schema& sc, const json& j) {
    std::vector<cplx> out;
    if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (auto c = sc.complex(j[k], "family.schedule[" + std::to_string(k) + "]")) out.push_back(*c);
        }
    } else if (j.is_object()) {
        sc.allow(j, "family.schedule.", {"from", "to", "step"});
        const bool ranged = j.contains("from") && j.contains("to");
        const double lo = ranged ? sc.real(j["from"], "family.schedule.from").value_or(0.0) : 0.0;
        const double hi = ranged ? sc.real(j["to"], "family.schedule.to").value_or(0.0) : 0.0;
        const double step = j.contains("step") ? sc.real(j["step"], "family.schedule.step").value_or(1.0) : 1.0;
        if (!ranged) {
            sc.fail("family.schedule: range needs 'from' and 'to'");
        } else if (!(step > 0.0) || (hi - lo) / step > 1e6) {
            sc.fail("family.schedule.step: must be positive and give at most 1e6 entries");
        } else {
            for (double x = lo; x <= hi + 1e-9 * step; x += step) out.emplace_back(x, 0.0);
        }
    } else {
        sc.fail("family.schedule: expected an array or {from, to, step}");
    }
    return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string{"invalid JSON: "} + e.what());
    }
    if (!doc.is_object()) throw ScenarioError("invalid scenario: top level must be an object");

    Schema sc;
    sc.allow(doc, "", {"name", "theorem", "family", "targets", "hyperplanes", "constants", "region", "grid", "probe",
                       "output", "consequent_tol"});
    Scenario s;
    s.name = "scenario";
    if (doc.contains("name")) {
        if (doc["name"].is_string()) {
            s.name = doc["name"].get<std::string>();
        } else {
            sc.fail("name: expected a string");
        }
    }
    if (!doc.contains("theorem") || !doc["theorem"].is_string() || !kTheorems.count(doc["theorem"].get<std::string>())) {
        sc.fail("theorem: expected one of thm1, thm2, cor24, thm5, probe");
    } else {
        s.theorem = doc["theorem"].get<std::string>();
    }

    ParseOptions opts;
    std::set<std::string> allowed;
    if (!doc.contains("family") || !doc["family"].is_object()) {
        sc.fail("family: required object {components, schedule}");
        sc.raise();
    }
    const json& fam = doc["family"];
    sc.allow(fam, "family.", {"components", "params", "schedule", "index"});
    if (fam.contains("index")) {
        if (fam["index"].is_string()) {
            s.setup.family.index = fam["index"].get<std::string>();
        } else {
            sc.fail("family.index: expected a string");
        }
    }
    allowed.insert(s.setup.family.index);
    if (fam.contains("params")) {
        if (!fam["params"].is_object()) {
            sc.fail("family.params: expected an object");
        } else {
            for (const auto& [k, v] : fam["params"].items()) {
                if (auto c = sc.complex(v, "family.params." + k)) s.setup.family.params[k] = *c;
                allowed.insert(k);
            }
        }
    }
    opts.allowed_params = allowed;

    if (!fam.contains("components") || !fam["components"].is_array() || fam["components"].empty()) {
        sc.fail("family.components: required non-empty array of expressions");
    } else {
        for (std::size_t k = 0; k < fam["components"].size(); ++k) {
            if (auto e = sc.expr(fam["components"][k], "family.components[" + std::to_string(k) + "]", opts)) {
                s.setup.family.components.push_back(*e);
            }
        }
    }
    if (!fam.contains("schedule")) {
        sc.fail("family.schedule: required");
    } else {
        s.setup.schedule = parse_schedule(sc, fam["schedule"]);
    }

    if (doc.contains("targets")) {
        if (!doc["targets"].is_array()) {
            sc.fail("targets: expected an array of expressions");
        } else {
            for (std::size_t k = 0; k < doc["targets"].size(); ++k) {
                if (auto e = sc.expr(doc["targets"][k], "targets[" + std::to_string(k) + "]", opts)) {
                    s.setup.targets.push_back(*e);
                }
            }
        }
    }
    if (doc.contains("hyperplanes")) {
        if (!doc["hyperplanes"].is_array()) {
            sc.fail("hyperplanes: expected an array of coefficient arrays");
        } else {
            for (std::size_t k = 0; k < doc["hyperplanes"].size(); ++k) {
                const json& h = doc["hyperplanes"][k];
                const std::string where = "hyperplanes[" + std::to_string(k) + "]";
                if (!h.is_array() || h.size() < 2) {
                    sc.fail(where + ": expected at least two coefficients");
                    continue;
                }
                std::vector<Expr> alpha;
                for (std::size_t i = 0; i < h.size(); ++i) {
                    if (auto e = sc.expr(h[i], where + "[" + std::to_string(i) + "]", opts)) alpha.push_back(*e);
                }
                if (alpha.size() == h.size()) s.setup.hyperplanes.emplace_back(std::move(alpha));
            }
        }
    }
    if (doc.contains("constants")) {
        const json& c = doc["constants"];
        if (!c.is_object()) {
            sc.fail("constants: expected an object");
        } else {
            sc.allow(c, "constants.", {"delta", "epsilon", "M"});
            if (c.contains("delta")) s.setup.delta = sc.real(c["delta"], "constants.delta");
            if (c.contains("epsilon")) s.setup.epsilon = sc.real(c["epsilon"], "constants.epsilon");
            if (c.contains("M")) s.setup.M = sc.real(c["M"], "constants.M");
        }
    }
    if (doc.contains("consequent_tol")) {
        if (auto t = sc.real(doc["consequent_tol"], "consequent_tol")) s.setup.consequent_tol = *t;
    }
    if (doc.contains("region")) {
        if (auto d = parse_region(sc, doc["region"], "region")) s.setup.region = *d;
    }
    if (doc.contains("grid")) {
        if (auto g = parse_grid(sc, doc["grid"], "grid")) s.setup.grid = *g;
    }
    if (doc.contains("probe")) {
        const json& p = doc["probe"];
        ProbeSpec spec;
        if (!p.is_object()) {
            sc.fail("probe: expected an object");
        } else {
            sc.allow(p, "probe.", {"region", "xi_radius", "xi_grid"});
            if (p.contains("region")) spec.region = parse_region(sc, p["region"], "probe.region");
            if (p.contains("xi_radius")) spec.xi_radius = sc.real(p["xi_radius"], "probe.xi_radius").value_or(2.0);
            if (p.contains("xi_grid")) spec.xi_grid = parse_grid(sc, p["xi_grid"], "probe.xi_grid").value_or(spec.xi_grid);
            if (!(spec.xi_radius > 0.0)) sc.fail("probe.xi_radius: must be positive");
        }
        s.probe = spec;
    } else if (s.theorem == "probe") {
        s.probe = ProbeSpec{};
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (!o.is_object()) {
            sc.fail("output: expected an object {dir}");
        } else {
            sc.allow(o, "output.", {"dir"});
            if (o.contains("dir")) {
                if (o["dir"].is_string()) {
                    s.output_dir = o["dir"].get<std::string>();
                } else {
                    sc.fail("output.dir: expected a string");
                }
            }
        }
    }
    sc.raise();

    // Shape rules that depend on the theorem.
    const auto& th = s.theorem;
    const std::size_t ncomp = s.setup.family.components.size();
    if ((th == "thm2" || th == "cor24") && (ncomp != 2 || s.setup.targets.size() != 3)) {
        sc.fail(th + ": needs components [f0, f1] and three targets");
    }
    if (th == "thm5" && (ncomp != 1 || s.setup.targets.size() != 2)) {
        sc.fail("thm5: needs one component f and two targets");
    }
    if (th == "thm1" && s.setup.hyperplanes.size() != 2 * ncomp - 1) {
        sc.fail("thm1: needs 2N+1 = " + std::to_string(2 * ncomp - 1) + " hyperplanes");
    }
    if (th == "probe" && ncomp < 2) sc.fail("probe: needs at least two components");
    if (s.probe && s.setup.schedule.size() < 5) sc.fail("probe: schedule needs at least five entries");
    sc.raise();
    try {
        s.setup.validate();
    } catch (const ScenarioError& e) {
        throw ScenarioError(std::string{"invalid scenario:\n  "} + e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw ScenarioError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

namespace {

json pair(cplx z) { return json::array({z.real(), z.imag()}); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string show(cplx z) {
    std::ostringstream os;
    os.precision(9);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

std::string show_n(cplx n) {
    std::ostringstream os;
    os.precision(9);
    if (n.imag() == 0.0) {
        os << n.real();
        return os.str();
    }
    return show(n);
}

void summarize(const CheckReport& r, std::string& out, const std::string& indent) {
    for (const auto& c : r.conditions) {
        out += indent + r.criterion + " (" + c.id + ") " + std::string{outcome_name(c.outcome)};
        out += "  [" + std::to_string(c.examined) + " sites";
        if (c.violations) out += ", " + std::to_string(c.violations) + " violations";
        out += "]\n";
        for (std::size_t k = 0; k < c.witnesses.size() && k < 3; ++k) {
            const auto& w = c.witnesses[k];
            out += indent + "    witness n=" + show_n(w.n) + " z=" + show(w.z) + ": " + w.detail + "\n";
        }
    }
    for (const auto& d : r.delegated) {
        out += indent + "delegated:\n";
        summarize(d, out, indent + "  ");
    }
}

}  // namespace

json to_json(const CheckReport& r) {
    json j;
    j["criterion"] = r.criterion;
    j["violated"] = r.violated();
    j["zeros_examined"] = r.zeros_examined;
    if (r.min_measure) j["min_measure"] = *r.min_measure;
    if (r.delta) j["delta"] = *r.delta;
    if (r.delta_star) j["delta_star"] = *r.delta_star;
    if (r.delta_star_bound) j["delta_star_bound"] = *r.delta_star_bound;
    j["conditions"] = json::array();
    for (const auto& c : r.conditions) {
        json cj;
        cj["id"] = c.id;
        cj["description"] = c.description;
        cj["outcome"] = std::string{outcome_name(c.outcome)};
        cj["examined"] = c.examined;
        cj["refined_sites"] = c.sites.size();
        cj["violations"] = c.violations;
        cj["worst_margin"] = finite_or_null(c.worst_margin);
        cj["witnesses"] = json::array();
        for (const auto& w : c.witnesses) {
            cj["witnesses"].push_back({{"z", pair(w.z)}, {"n", pair(w.n)}, {"value", finite_or_null(w.value)}, {"detail", w.detail}});
        }
        j["conditions"].push_back(std::move(cj));
    }
    j["delegated"] = json::array();
    for (const auto& d : r.delegated) j["delegated"].push_back(to_json(d));
    return j;
}

json to_json(const MartyScan& s) {
    json j;
    j["region"] = {{"center", pair(s.region.center)}, {"radius", s.region.radius}};
    j["grid"] = {{"nx", s.grid.nx}, {"ny", s.grid.ny}};
    j["growth"] = s.growth;
    j["entries"] = json::array();
    for (const auto& e : s.entries) {
        j["entries"].push_back({{"n", pair(e.n)},
                                {"max_fs_derivative", e.max_fs_derivative},
                                {"argmax", pair(e.argmax)},
                                {"rho", e.max_fs_derivative > 0 ? json(1.0 / e.max_fs_derivative) : json(nullptr)},
                                {"skipped", e.skipped}});
    }
    return j;
}

json to_json(const RescalingRecord& r) {
    json j;
    j["n"] = pair(r.n);
    j["z_n"] = pair(r.z_n);
    j["rho"] = r.rho ? json(*r.rho) : json(nullptr);
    j["xi_radius"] = r.xi_radius;
    j["degenerate"] = r.degenerate;
    j["truncated"] = r.truncated;
    j["components"] = json::array();
    for (const auto& c : r.components) j["components"].push_back(print_expr(c));
    j["sup_fs_derivative"] = r.sup_fs_derivative;
    j["fs_derivative_at_origin"] = r.fs_derivative_at_origin;
    j["samples"] = r.samples.size();
    return j;
}

RunReport run_scenario(const Scenario& s, std::string_view source) {
    const auto start = std::chrono::steady_clock::now();
    RunReport out;
    out.json["tool_version"] = CURVELAB_VERSION;
    out.json["name"] = s.name;
    out.json["theorem"] = s.theorem;
    out.json["input_hash"] = "fnv1a64:" + fnv1a_hex(source);

    std::string text = s.name + " [" + s.theorem + "]\n";
    CheckReport check;
    if (s.theorem == "thm1") {
        check = check_moving_hyperplanes(s.setup);
    } else if (s.theorem == "thm2") {
        check = check_wandering_targets(s.setup);
    } else if (s.theorem == "cor24") {
        check = check_shared_targets(s.setup);
    } else if (s.theorem == "thm5") {
        check = check_fixed_point_criterion(s.setup);
    }
    if (s.theorem != "probe") {
        summarize(check, text, "  ");
        if (check.delta_star) text += "  delta* = " + std::to_string(*check.delta_star) + ", delta = " + std::to_string(*check.delta) + "\n";
        text += check.violated() ? "  some " + s.theorem + " condition is violated\n" : "  all " + s.theorem + " conditions hold\n";
        out.json["check"] = to_json(check);
        if (check.violated()) out.exit_code = kExitViolated;
        out.check = std::move(check);
    }

    if (s.probe) {
        CurveFamily fam = s.setup.family;
        if (s.theorem == "thm5") fam.components = {Expr::constant(1.0), s.setup.family.components[0]};
        const Disk declared = s.probe->region.value_or(s.setup.region);
        const Disk scan_region = declared.shrunk(kScanMargin);
        MartyScan scan = marty_scan(fam, s.setup.schedule, scan_region, s.setup.grid);
        const Verdict verdict = normality_verdict(scan);
        json pj = to_json(scan);
        pj["verdict"] = verdict.label();
        pj["boundary_cluster"] = verdict.boundary_cluster;
        pj["rescaling"] = json::array();
        for (const auto& e : scan.entries) {
            pj["rescaling"].push_back(to_json(zalcman_rescale(fam, e, scan_region, s.probe->xi_radius, s.probe->xi_grid)));
        }
        out.json["probe"] = std::move(pj);
        out.scan_csv = scan_csv(scan);
        text += "  probe: " + verdict.label();
        if (verdict.boundary_cluster) text += " (cluster near the rim; unreliable)";
        text += "\n";
        out.scan = std::move(scan);
        out.verdict = verdict;
    }

    out.json["exit_code"] = out.exit_code;
    out.json["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.summary = std::move(text);
    return out;
}

void write_report(const RunReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f{dir / "report.json", std::ios::binary};
        f << r.json.dump(2) << "\n";
        if (!f) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    }
    if (!r.scan_csv.empty()) {
        std::ofstream f{dir / "scan.csv", std::ios::binary};
        f << r.scan_csv;
        if (!f) throw std::runtime_error("cannot write " + (dir / "scan.csv").string());
    }
}

std::vector<std::pair<std::string, std::string>> builtin_scenarios() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, body] : builtin::scenario_sources()) out.emplace_back(std::string{name}, std::string{body});
    return out;
}

namespace {

std::optional<std::string> actual_cell(const RunReport& r, const std::string& key) {
    if (key == "exit") return std::to_string(r.exit_code);
    if (key == "verdict") {
        if (!r.verdict) return std::nullopt;
        return std::string{r.verdict->kind == Verdict::Kind::SuggestsNormal ? "suggests-normal" : "suggests-nonnormal"};
    }
    if (!r.check) return std::nullopt;
    const CheckReport* rep = &*r.check;
    std::string id = key;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
        const std::string crit = key.substr(0, dot);
        id = key.substr(dot + 1);
        rep = nullptr;
        for (const auto& d : r.check->delegated) {
            if (d.criterion == crit) rep = &d;
        }
        if (!rep) return std::nullopt;
    }
    const auto* c = rep->find(id);
    if (!c) return std::nullopt;
    return std::string{outcome_name(c->outcome)};
}

std::string cell_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

std::vector<ExampleRow> run_builtin_examples(std::optional<std::string> only, std::optional<GridSpec> grid) {
    const json expectations = json::parse(builtin::expectations_source());
    const auto sources = builtin_scenarios();
    if (only) {
        const bool known = std::any_of(sources.begin(), sources.end(), [&](const auto& p) { return p.first == *only; });
        if (!known) throw ScenarioError("unknown example '" + *only + "'");
    }
    std::vector<ExampleRow> rows;
    for (const auto& [name, body] : sources) {
        if (only && name != *only) continue;
        ExampleRow row;
        row.name = name;
        Scenario s = parse_scenario(body);
        if (grid) s.setup.grid = *grid;
        const RunReport r = run_scenario(s, body);
        row.exit_code = r.exit_code;

        const json* expected = nullptr;
        for (const auto& e : expectations.at("examples")) {
            if (e.at("name") == name) expected = &e;
        }
        if (!expected) {
            row.matches = false;
            row.mismatches.push_back("no expectation row");
        } else {
            for (const auto& cell : expected->at("cells")) {
                const std::string key = cell.at("key").get<std::string>();
                if (key == "cluster.re" || key == "cluster.im") {
                    // One coordinate of the probe's cluster point, compared within a tolerance.
                    const double want = cell.at("expect").get<double>();
                    // A grid-located point cannot be pinned finer than one lattice cell.
                    double tol = cell.value("tolerance", 0.0);
                    if (r.scan && cell.contains("tolerance_cells")) {
                        const double cells = cell.at("tolerance_cells").get<double>();
                        const int lines = std::min(r.scan->grid.nx, r.scan->grid.ny);
                        tol += cells * 2.0 * r.scan->region.radius / std::max(1, lines - 1);
                    }
                    std::optional<double> got;
                    if (r.verdict && r.verdict->cluster) {
                        got = key == "cluster.re" ? r.verdict->cluster->real() : r.verdict->cluster->imag();
                    }
                    std::ostringstream text;
                    if (got) {
                        text << *got;
                    } else {
                        text << "missing";
                    }
                    row.cells.push_back(key + "=" + text.str());
                    if (!got || !(std::abs(*got - want) <= tol)) {
                        row.matches = false;
                        row.mismatches.push_back(key + ": expected " + cell_text(cell.at("expect")) + " +- " +
                                                 std::to_string(tol) + ", got " + text.str());
                    }
                    continue;
                }
                const std::string want = cell_text(cell.at("expect"));
                const auto got = actual_cell(r, key);
                row.cells.push_back(key + "=" + got.value_or("missing"));
                if (!got || *got != want) {
                    row.matches = false;
                    row.mismatches.push_back(key + ": expected " + want + ", got " + got.value_or("missing"));
                }
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace curvelab
