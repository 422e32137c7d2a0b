#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>

#include "thzqi/raster_io.hpp"
#include "thzqi/scenario.hpp"

using namespace thzqi;

TEST_CASE("catalog lists the seven bundled scenarios")
{
    const auto& cat = scenario::catalog();
    REQUIRE(cat.size() == 7);
    const std::regex figure_tag("^(fig[0-9]+_|fov_).*");
    for (const auto& entry : cat) {
        CHECK(std::regex_match(entry.name, figure_tag));
        CHECK_FALSE(entry.summary.empty());
    }
}

TEST_CASE("every bundled scenario parses and validates")
{
    for (const auto& entry : scenario::catalog()) {
        const auto s = scenario::load_scenario(entry.name);
        CHECK(s.name == entry.name);
        CHECK(optics::validate(s.bundle).empty());
        CHECK(s.source.qmc_samples == 65536);
        // scene constructors must build
        CHECK_NOTHROW(s.scene_spec.build());
    }
}

TEST_CASE("validation failures name the broken field")
{
    const char* bad = R"({
  "name": "broken",
  "optics": { "lambda_thz": -1e-6 }
})";
    try {
        scenario::parse_scenario(bad, "inline");
        CHECK(false);
    } catch (const scenario::ValidationError& e) {
        CHECK(std::string(e.what()).find("lambda_thz") != std::string::npos);
    }
}

TEST_CASE("parse errors carry the source line")
{
    const char* garbled = "{\n  \"name\": \"x\",\n  oops\n}";
    try {
        scenario::parse_scenario(garbled, "inline");
        CHECK(false);
    } catch (const scenario::ValidationError& e) {
        CHECK(std::string(e.what()).find("inline:3") != std::string::npos);
    }
}

TEST_CASE("unknown scenario name is a validation error")
{
    CHECK_THROWS_AS(scenario::load_scenario("fig9_nothing"),
                    scenario::ValidationError);
}

TEST_CASE("fnv checksum is stable")
{
    CHECK(scenario::fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(scenario::fnv1a64_hex("abc") == scenario::fnv1a64_hex("abc"));
    CHECK(scenario::fnv1a64_hex("abc") != scenario::fnv1a64_hex("abd"));
}

TEST_CASE("seeded scenario runs reproduce byte-identical manifests")
{
    auto s = scenario::load_scenario("fig2_reference");
    scenario::RunOptions opts;
    opts.qmc_samples = 16384;  // keep the unit test quick
    opts.seed = 42;
    opts.noise_mode = "experimental";

    const auto a = scenario::run_scenario(s, "test_run_a", opts);
    const auto b = scenario::run_scenario(s, "test_run_b", opts);
    CHECK(a.manifest_json == b.manifest_json);

    opts.seed = 43;
    const auto c = scenario::run_scenario(s, "test_run_c", opts);
    CHECK(a.manifest_json != c.manifest_json);

    // manifest files landed next to the artifacts
    CHECK(std::filesystem::exists("test_run_a/manifest.json"));
    CHECK(std::filesystem::exists("test_run_a/reference_amplitude.csv"));
    CHECK(std::filesystem::exists("test_run_a/waveform_center.csv"));

    std::filesystem::remove_all("test_run_a");
    std::filesystem::remove_all("test_run_b");
    std::filesystem::remove_all("test_run_c");
}

TEST_CASE("every bundled scenario runs end to end at reduced sample count")
{
    scenario::RunOptions opts;
    opts.qmc_samples = 8192;
    for (const auto& entry : scenario::catalog()) {
        const auto s = scenario::load_scenario(entry.name);
        const std::string out = "test_all_" + entry.name;
        const auto r = scenario::run_scenario(s, out, opts);
        CHECK_FALSE(r.manifest_json.empty());
        CHECK(std::filesystem::exists(out + "/manifest.json"));
        if (entry.name == "fig4_absorber_1p5THz") {
            REQUIRE(r.measured_extinction.has_value());
            // configured half-absorber difference K_r - K_l = 1.0; a 2%
            // amplitude-ratio tolerance is 0.017 on the extinction scale
            CHECK(*r.measured_extinction ==
                  doctest::Approx(1.0).epsilon(0.017));
            REQUIRE(r.tds_lines.has_value());
            CHECK(r.tds_lines->first - r.tds_lines->second ==
                  doctest::Approx(0.60 - 0.21).epsilon(1e-9));
        }
        if (entry.name == "fig6_knife_edge") {
            REQUIRE(r.knife.has_value());
            CHECK(r.knife->fit.converged);
            // response grows as the edge uncovers the column; equivalently it
            // is non-increasing as the edge sweeps left
            REQUIRE(r.knife_amplitudes.size() >= 8);
            double span = 0.0;
            for (double v : r.knife_amplitudes)
                span = std::max(span, v);
            for (std::size_t i = 1; i < r.knife_amplitudes.size(); ++i)
                CHECK(r.knife_amplitudes[i] >=
                      r.knife_amplitudes[i - 1] - 0.01 * span);
        }
        std::filesystem::remove_all(out);
    }
}

TEST_CASE("dumped scenario text reloads identically")
{
    const auto text = scenario::bundled_scenario_text("fig3_tape");
    const auto s = scenario::parse_scenario(text, "fig3_tape");
    CHECK(s.scene_spec.type == "tape_stripes");
    CHECK(s.scene_spec.tape.stripe_width == doctest::Approx(0.5e-3));
}

TEST_CASE("csv matrix and pgm writers")
{
    const std::vector<double> data = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    raster_io::write_csv_matrix("test_mat.csv", data, 2, 3);
    int rows = 0, cols = 0;
    const auto back = raster_io::read_csv_matrix("test_mat.csv", rows, cols);
    CHECK(rows == 2);
    CHECK(cols == 3);
    CHECK(back == data);

    raster_io::write_pgm16("test_img.pgm", data, 2, 3);
    std::ifstream in("test_img.pgm");
    std::string magic;
    in >> magic;
    CHECK(magic == "P2");
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(rest.find("65535") != std::string::npos);
    CHECK(rest.find("linear scaling") != std::string::npos);

    std::remove("test_mat.csv");
    std::remove("test_img.pgm");
}
