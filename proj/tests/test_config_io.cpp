#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nmor/config.hpp"
#include "nmor/io.hpp"

using namespace nmor;

namespace {

std::string config_dir() {
    if (const char* env = std::getenv("NMOR_CONFIG_DIR"); env && *env) return env;
    return "configs";
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults validate and survive a canonical round-trip") {
    const ExperimentConfig cfg = default_config();
    CHECK(validation_errors(cfg).empty());
    const ExperimentConfig back = parse_config(canonical_text(cfg), "canonical");
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(contains(canonical_text(cfg), "[probe]\npower_mw = 6\n"));
    CHECK(contains(canonical_text(cfg), "density_cm3 = auto\n"));
}

TEST_CASE("every shipped preset parses and validates") {
    const char* names[] = {"default", "fig2",  "fig3",  "fig4",  "fig5a", "fig5b", "fig5c",
                           "fig5d",   "fig5e", "fig5f", "fig6",  "fig7",  "fig8"};
    for (const char* name : names) {
        INFO(name);
        const ExperimentConfig cfg = load_config(config_dir() + "/" + std::string(name) + ".ini");
        CHECK(validation_errors(cfg).empty());
    }
    // The untouched preset equals the built-in defaults key for key.
    CHECK(config_hash(load_config(config_dir() + "/default.ini")) ==
          config_hash(default_config()));
}

TEST_CASE("keys carry their units") {
    const ExperimentConfig cfg = parse_config(
        "[probe]\n"
        "power_mw = 3\n"
        "wavelength_nm = 780\n"
        "[squeezer]\n"
        "theta_deg = 90\n"
        "[cell]\n"
        "length_mm = 50\n"
        "[sweep]\n"
        "b_min_ut = -10  # inline comment\n"
        "b_max_ut = 10\n"
        "[spectrum]\n"
        "mod_freq_hz = 220\n"
        "mod_b_amp_nt = 2\n",
        "inline");
    CHECK(cfg.power_w == doctest::Approx(3e-3));
    CHECK(cfg.wavelength_m == doctest::Approx(780e-9));
    CHECK(cfg.squeeze.theta_rad == doctest::Approx(constants::pi / 2));
    CHECK(cfg.cell.length_m == doctest::Approx(0.05));
    CHECK(cfg.b_min_t == doctest::Approx(-10e-6));
    CHECK(cfg.mod_b_amp_t == doctest::Approx(2e-9));
}

TEST_CASE("lists, booleans and the density override") {
    const ExperimentConfig cfg = parse_config(
        "[noise]\n"
        "balanced = off\n"
        "dark_peaks = 50:1.5, 100:0.5\n"
        "[sweep]\n"
        "temperatures_c = 30, 40, 50\n"
        "[cell]\n"
        "density_cm3 = 2.5e11\n"
        "[output]\n"
        "formats = svg\n",
        "inline");
    CHECK_FALSE(cfg.noise.balanced);
    REQUIRE(cfg.noise.dark_peaks.size() == 2);
    CHECK(cfg.noise.dark_peaks[1].freq_hz == 100.0);
    CHECK(cfg.temperatures_c == std::vector<double>{30, 40, 50});
    REQUIRE(cfg.density_cm3.has_value());
    CHECK(*cfg.density_cm3 == 2.5e11);
    CHECK(cfg.formats == std::vector<std::string>{"svg"});

    ExperimentConfig back_to_auto = cfg;
    apply_key(back_to_auto, "cell.density_cm3", "auto");
    CHECK_FALSE(back_to_auto.density_cm3.has_value());
}

TEST_CASE("parse errors point at file, line and key") {
    try {
        parse_config("[cell]\ndensty_cm3 = 0\n", "bad.ini");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(contains(e.what(), "bad.ini:2"));
        CHECK(contains(e.what(), "densty_cm3"));
        CHECK(contains(e.what(), "unknown key"));
    }
    CHECK_THROWS_AS(parse_config("[nonsense]\n", "x"), config_error);
    CHECK_THROWS_AS(parse_config("power_mw = 6\n", "x"), config_error);  // outside any section
    CHECK_THROWS_AS(parse_config("[probe]\npower_mw == 6\n", "x"), config_error);
    try {
        parse_config("[probe]\npower_mw = six\n", "x.ini");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(contains(e.what(), "[probe] power_mw"));
        CHECK(contains(e.what(), "not a number"));
    }
    CHECK_THROWS_AS(load_config(temp_path("does_not_exist_0421.ini")), config_error);
}

TEST_CASE("validation names the field and the legal range") {
    ExperimentConfig cfg = default_config();
    cfg.noise.eta = 1.3;
    auto errs = validation_errors(cfg);
    REQUIRE(errs.size() == 1);
    CHECK(contains(errs[0], "[noise] eta"));
    CHECK(contains(errs[0], "[0, 1]"));

    cfg = default_config();
    cfg.cell.temperature_c = 300.0;  // beyond the vapor-pressure fit
    errs = validation_errors(cfg);
    REQUIRE(errs.size() == 1);
    CHECK(contains(errs[0], "[cell] temperature_c"));

    // An out-of-range temperature is fine when the density is overridden.
    cfg.density_cm3 = 1e11;
    CHECK(validation_errors(cfg).empty());

    cfg = default_config();
    cfg.b_min_t = 5e-6;
    cfg.b_max_t = -5e-6;
    cfg.temperatures_c.clear();
    errs = validation_errors(cfg);
    CHECK(errs.size() == 2);  // both problems reported at once

    cfg = default_config();
    cfg.duration_s = 0.01;  // cannot hold 300 averages at 2 kHz rbw
    errs = validation_errors(cfg);
    REQUIRE(errs.size() == 1);
    CHECK(contains(errs[0], "[spectrum] duration_s"));
    CHECK(contains(errs[0], "need at least"));

    cfg = default_config();
    cfg.formats = {"csv", "pdf"};
    errs = validation_errors(cfg);
    REQUIRE(errs.size() == 1);
    CHECK(contains(errs[0], "pdf"));
}

TEST_CASE("apply_key edits one field and moves the hash") {
    ExperimentConfig cfg = default_config();
    const std::uint64_t before = config_hash(cfg);
    apply_key(cfg, "noise.cmrr_db", "55");
    CHECK(cfg.noise.cmrr_db == 55.0);
    CHECK(config_hash(cfg) != before);
    CHECK_THROWS_AS(apply_key(cfg, "noise.nope", "1"), config_error);
    CHECK_THROWS_AS(apply_key(cfg, "cmrr_db", "1"), config_error);  // missing section
}

TEST_CASE("CSV round-trips doubles exactly") {
    Table t;
    t.name = "roundtrip";
    t.columns = {"a", "b", "c"};
    t.meta = {{"command", "test"}, {"config_hash", "0xdeadbeef"}};
    t.rows = {{constants::pi, 1e-300, -0.0},
              {12345.678901234567, -2.5e17, 3.0000000000000004},
              {7.0, 6.62607015e-34, -1.0 / 3.0}};
    const std::string path = temp_path("nmor_roundtrip.csv");
    write_csv(path, t);
    const Table back = read_csv(path);
    CHECK(back.columns == t.columns);
    CHECK(back.meta.at("config_hash") == "0xdeadbeef");
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            CHECK(back.rows[r][c] == t.rows[r][c]);  // bit-exact via %.17g
    std::filesystem::remove(path);
}

TEST_CASE("CSV reader rejects damage") {
    const std::string path = temp_path("nmor_damaged.csv");
    {
        std::ofstream out(path);
        out << "a,b\n1,2\n3\n";
    }
    CHECK_THROWS_AS(read_csv(path), io_error);
    {
        std::ofstream out(path);
        out << "a,b\n1,zebra\n";
    }
    CHECK_THROWS_AS(read_csv(path), io_error);
    CHECK_THROWS_AS(read_csv(temp_path("missing_dir_x/y.csv")), io_error);
    std::filesystem::remove(path);

    Table ragged;
    ragged.name = "ragged";
    ragged.columns = {"a", "b"};
    ragged.rows = {{1.0}};
    CHECK_THROWS_AS(write_csv(temp_path("nmor_ragged.csv"), ragged), domain_error);
}

TEST_CASE("JSON artifact carries provenance and the full tables") {
    Table t;
    t.name = "numbers";
    t.columns = {"x", "y"};
    t.rows = {{1.0, 2.0}, {3.0, 4.5}};
    const std::string path = temp_path("nmor_out.json");
    write_json(path, {t}, {{"config_hash", "0x12"}, {"seed", "99"}, {"command", "test"}});
    std::ifstream in(path);
    const nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc.at("meta").at("config_hash") == "0x12");
    CHECK(doc.at("meta").at("seed") == "99");
    CHECK(doc.at("tables").at("numbers").at("columns").size() == 2);
    CHECK(doc.at("tables").at("numbers").at("rows")[1][1] == 4.5);
    std::filesystem::remove(path);
}

TEST_CASE("SVG plots both traces with axes and legend") {
    PlotSpec plot;
    plot.name = "demo";
    plot.title = "demo";
    plot.x_label = "frequency (Hz)";
    plot.y_label = "level (dB)";
    plot.log_x = true;
    Trace a{"one", {}, {}}, b{"two", {}, {}};
    for (int i = 1; i <= 200; ++i) {
        a.x.push_back(10.0 * i * i);
        a.y.push_back(-1.0 + 0.01 * i);
        b.x.push_back(10.0 * i * i);
        b.y.push_back(1.0 - 0.005 * i);
    }
    plot.traces = {a, b};
    const std::string path = temp_path("nmor_demo.svg");
    write_svg(path, plot);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(contains(text, "<svg"));
    CHECK(contains(text, "frequency (Hz)"));
    CHECK(contains(text, ">one<"));
    CHECK(contains(text, ">two<"));
    CHECK(contains(text, "1e3"));  // decade tick on the log axis
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_svg(temp_path("nmor_empty.svg"), PlotSpec{}), domain_error);
}
