#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hiercon/scenario_io.hpp"
#include "test_support.hpp"

using namespace hiercon;
using test_support::scenario_path;

namespace {

const char* kShipped[] = {"fig1.json",       "fig1_case1.json",   "fig1_case2.json", "fig1_case3.json",
                          "fig1_case4.json", "single_layer.json", "unstable.json"};

Json minimal() {
    return Json::parse(R"({
      "layers": [{"groups": [{"size": 2, "edges": [[1, 2]]}]}],
      "physical_weights": [1, 2],
      "hop_delays": []
    })");
}

std::string schema_location(const Json& doc) {
    try {
        (void)parse_scenario(doc);
    } catch (const SchemaError& e) {
        return e.location();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("shipped scenarios parse, validate and round-trip") {
    for (const char* name : kShipped) {
        CAPTURE(name);
        const auto s = load_scenario(scenario_path(name));
        CHECK(validate_scenario(s).empty());
        const auto again = parse_scenario(Json::parse(to_json(s).dump()));
        CHECK(again == s);
        CHECK(to_json(again) == to_json(s));
    }
}

TEST_CASE("fig1 file matches the built-in hierarchy") {
    const auto s = load_scenario(scenario_path("fig1.json"));
    CHECK(s.spec == fig1());
    REQUIRE(s.fleet.has_value());
    CHECK(*s.fleet == fig1_fleet());
}

TEST_CASE("case files carry the delays") {
    using std::numbers::pi;
    CHECK(load_scenario(scenario_path("fig1_case1.json")).spec == fig1({pi / 7, pi / 9}));
    CHECK(load_scenario(scenario_path("fig1_case2.json")).spec == fig1({pi / 6, pi / 6}));
    CHECK(load_scenario(scenario_path("fig1_case3.json")).spec == fig1({3 * pi / 16, pi / 12}));
    CHECK(load_scenario(scenario_path("fig1_case4.json")).spec == fig1({3 * pi / 16, 7 * pi / 48}));
}

TEST_CASE("indices are 1-based in files") {
    auto doc = minimal();
    const auto s = parse_scenario(doc);
    REQUIRE(s.spec.layers[0].groups[0].edges.size() == 1);
    CHECK(s.spec.layers[0].groups[0].edges[0].a == 0);
    CHECK(s.spec.layers[0].groups[0].edges[0].b == 1);
    CHECK(to_json(s)["layers"][0]["groups"][0]["edges"][0] == Json::array({1, 2}));
}

TEST_CASE("schema errors carry their location") {
    auto unknown = minimal();
    unknown["layers"][0]["groups"][0]["colour"] = "red";
    CHECK(schema_location(unknown) == "/layers/0/groups/0/colour");

    auto top_unknown = minimal();
    top_unknown["extra"] = 1;
    CHECK(schema_location(top_unknown) == "/extra");

    auto zero_index = minimal();
    zero_index["layers"][0]["groups"][0]["edges"][0] = Json::array({0, 1});
    CHECK(schema_location(zero_index) == "/layers/0/groups/0/edges/0/0");

    auto wrong_type = minimal();
    wrong_type["physical_weights"][1] = "two";
    CHECK(schema_location(wrong_type) == "/physical_weights/1");

    auto missing = minimal();
    missing.erase("layers");
    CHECK(schema_location(missing) == "/layers");

    auto no_weights = minimal();
    no_weights.erase("physical_weights");
    CHECK(schema_location(no_weights) == "/physical_weights");

    auto bad_sim = minimal();
    bad_sim["sim"] = Json{{"t_end", 5}, {"horizon", 3}};
    CHECK(schema_location(bad_sim) == "/sim/horizon");

    auto bad_weights = minimal();
    bad_weights["layers"][0]["groups"][0]["edge_weights"] = Json::array({1, 2});
    CHECK(schema_location(bad_weights) == "/layers/0/groups/0/edge_weights");

    auto bad_m = minimal();
    bad_m["M"] = 2;
    CHECK(schema_location(bad_m) == "/M");

    CHECK_THROWS_AS((void)parse_scenario(Json::array()), SchemaError);
}

TEST_CASE("semantic validation") {
    auto doc = minimal();
    doc["physical_weights"] = Json::array({1, -2});
    CHECK_FALSE(validate_scenario(parse_scenario(doc)).empty());

    auto gens = minimal();
    gens["generators"] = Json::array({Json{{"p_max", 1.0}, {"p_init", 0.5}}, Json{{"p_max", 3.0}, {"p_init", 1.0}}});
    CHECK_FALSE(validate_scenario(parse_scenario(gens)).empty());  // weight 2 disagrees with p_max 3
    gens.erase("physical_weights");
    const auto derived = parse_scenario(gens);
    CHECK(derived.spec.physical_weights == std::vector<double>{1.0, 3.0});
    CHECK(validate_scenario(derived).empty());
    gens["demand"] = 2.0;
    CHECK_FALSE(validate_scenario(parse_scenario(gens)).empty());

    auto sim = minimal();
    sim["sim"] = Json{{"initial_state", Json::array({1.0})}};
    CHECK_FALSE(validate_scenario(parse_scenario(sim)).empty());
    sim["sim"] = Json{{"step", -1.0}};
    CHECK_FALSE(validate_scenario(parse_scenario(sim)).empty());
}

TEST_CASE("initial state and options") {
    auto doc = minimal();
    std::string source;
    auto s = parse_scenario(doc);
    const auto ramp = initial_state(s, &source);
    CHECK(ramp(0) == 0.5);
    CHECK(ramp(1) == 1.0);
    CHECK(source.find("default") != std::string::npos);
    CHECK(sim_options(s).t_end == SimOptions{}.t_end);

    doc["sim"] = Json{{"initial_state", Json::array({0.2, 0.4})}, {"t_end", 9.0}, {"tolerance", 1e-3},
                      {"sample_stride", 3}, {"align_activation", true}};
    s = parse_scenario(doc);
    CHECK(initial_state(s)(1) == 0.4);
    const auto o = sim_options(s);
    CHECK(o.t_end == 9.0);
    CHECK(o.convergence_tol == 1e-3);
    CHECK(o.sample_stride == 3);
    CHECK(o.align_activation);
    CHECK_FALSE(o.step.has_value());

    const auto fig = load_scenario(scenario_path("fig1.json"));
    const auto x0 = initial_state(fig, &source);
    CHECK(x0(0) == doctest::Approx(0.3));
    CHECK(source.find("generator") != std::string::npos);
}

TEST_CASE("load errors") {
    CHECK_THROWS_AS((void)load_scenario("/nonexistent/file.json"), std::runtime_error);
    const auto path = std::filesystem::temp_directory_path() / "hiercon_malformed.json";
    {
        std::ofstream f(path);
        f << "{ \"layers\": [";
    }
    try {
        (void)load_scenario(path.string());
        FAIL("malformed JSON accepted");
    } catch (const SchemaError&) {
        FAIL("syntax error reported as schema error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("malformed JSON") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv output") {
    Trajectory tr;
    tr.times = {0.0, 0.5};
    Vector a(2), b(2);
    a << 1.0 / 3.0, 2.0;
    b << 0.25, 1e-20;
    tr.states = {a, b};
    tr.conservation = {3.0, 4.0};
    std::ostringstream os;
    write_csv(os, tr);
    CHECK(os.str() == "t,x1,x2,conservation\n0,0.333333333333,2,3\n0.5,0.25,1e-20,4\n");
}

TEST_CASE("report serialization") {
    const auto m = assemble(fig1());
    Vector x0(6);
    x0 << 0.3, 0.8, 0.6, 0.9, 0.7, 0.2;
    const auto spectral = analyze_spectrum(m, x0);
    const auto js = to_json(spectral);
    CHECK(js["lambda_max"].size() == 3);
    CHECK(std::abs(js["lambda_max"][1].get<double>() - 4.0 / 3.0) < 1e-12);
    CHECK(js["full_spectrum"][0].size() == 2);
    CHECK(js["union_check"]["passed"] == true);
    CHECK(js["consensus_value"].get<double>() == doctest::Approx(0.566667).epsilon(1e-6));

    using std::numbers::pi;
    const auto jb = to_json(stability_verdict(fig1({3 * pi / 16, 7 * pi / 48}), spectral));
    CHECK(jb["verdict"] == "Critical");
    CHECK(jb["binding_layers"] == Json::array({2, 3}));
    CHECK(jb["layers"][0]["layer"] == 2);
    CHECK(jb["layers"][1]["rightmost_root"].size() == 2);

    Classification c;
    c.regime = Regime::CriticalOscillation;
    CHECK(to_json(c)["regime"] == "CriticalOscillation");
}
