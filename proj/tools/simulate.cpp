// Command-line front end; talks to the simulator through the C API only.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include <nmor.h>

namespace {

// 0 success, 2 config mistakes, 3 runtime/physics/IO failures.
int exit_code(int status) {
    if (status == NMOR_OK) return 0;
    if (status == NMOR_ECONFIG || status == NMOR_EINVAL) return 2;
    return 3;
}

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    double detection_freq = 0.0;
    bool seed_set = false;
    bool format_set = false;
    bool detection_set = false;
};

int run(const std::string& command, const Options& opt) {
    std::unique_ptr<nmor_experiment, decltype(&nmor_destroy)> exp(nmor_create(), &nmor_destroy);
    if (!exp) {
        std::fprintf(stderr, "error: out of memory\n");
        return 3;
    }
    auto complain = [&](int status) {
        std::fprintf(stderr, "error: %s\n", nmor_last_error(exp.get()));
        return exit_code(status);
    };

    if (int rc = nmor_load_config(exp.get(), opt.config.c_str())) return complain(rc);
    if (opt.seed_set)
        if (int rc = nmor_set(exp.get(), "run.seed", std::to_string(opt.seed).c_str()))
            return complain(rc);
    if (opt.format_set)
        if (int rc = nmor_set(exp.get(), "output.formats", opt.format.c_str())) return complain(rc);
    if (opt.detection_set)
        if (int rc = nmor_set(exp.get(), "sweep.detection_freq_hz",
                              std::to_string(opt.detection_freq).c_str()))
            return complain(rc);

    if (command == "validate") {
        char report[8192];
        const int rc = nmor_validate(exp.get(), report, sizeof report);
        std::fputs(report, rc == NMOR_OK ? stdout : stderr);
        return exit_code(rc);
    }

    if (int rc = nmor_run(exp.get(), command.c_str())) return complain(rc);
    if (int rc = nmor_write_outputs(exp.get(), opt.out.empty() ? nullptr : opt.out.c_str()))
        return complain(rc);

    const char* dir = opt.out.empty() ? nmor_out_dir(exp.get()) : opt.out.c_str();
    std::printf("%s: %d table(s) -> %s (config %#018llx)\n", command.c_str(),
                nmor_table_count(exp.get()), dir,
                static_cast<unsigned long long>(nmor_config_hash(exp.get())));
    for (int t = 0; t < nmor_table_count(exp.get()); ++t)
        std::printf("  %s: %d rows\n", nmor_table_name(exp.get(), t), nmor_table_rows(exp.get(), t));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Squeezed-light atomic-magnetometer noise simulator"};
    app.set_version_flag("--version", nmor_version());
    app.require_subcommand(1);

    Options opt;
    app.add_option("-c,--config", opt.config, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", opt.seed, "override [run] seed")->trigger_on_parse()
        ->each([&](const std::string&) { opt.seed_set = true; });
    app.add_option("--out", opt.out, "output directory (default: config, then $NMOR_OUT_DIR)");
    app.add_option("--format", opt.format, "artifact formats, e.g. csv or csv,json,svg")
        ->each([&](const std::string&) { opt.format_set = true; });
    app.add_option("--detection-freq", opt.detection_freq,
                   "override [sweep] detection_freq_hz (Hz)")
        ->each([&](const std::string&) { opt.detection_set = true; });

    const char* commands[] = {"b-sweep", "density-sweep", "spectrum", "sensitivity", "validate"};
    const char* blurbs[] = {"rotation vs magnetic field", "per-density sweep of slope/noise/sensitivity",
                            "paired squeezed/coherent Welch spectra", "delta-B at the detection frequency",
                            "check a config and report problems"};
    for (int i = 0; i < 5; ++i) app.add_subcommand(commands[i], blurbs[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage problems are config-class errors
    }

    return run(app.get_subcommands().front()->get_name(), opt);
}
