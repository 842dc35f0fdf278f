#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ddlab/lab/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ddlab::IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    localtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ddlab: self-similar profile shooting and regularized K(2,2) simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    bool allow_delta_zero = false;

    const char* names[] = {"shoot",    "mu-star",  "profile",         "scaling-table",
                           "sweep",    "converge", "compacton-check", "diagnose"};
    const char* descs[] = {
        "integrate shooting trajectories for given mu values",
        "bisect for mu*, assemble the odd-extended profile, fit the log blow-up",
        "assemble the profile at an explicit mu (or bisect when omitted)",
        "evaluate the vanishing-data scaling table from the computed profile",
        "run the lambda sweep and emit norm series + mass table",
        "grid of H2 endpoint values over (n_modes, dt) with Richardson columns",
        "evolve the compacton and report deviation from the exact translate",
        "energy-sandwich, first-integral, and model-energy checks on shots"};
    for (int i = 0; i < 8; ++i) {
        auto* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--out", out_dir, "output directory (default runs/<cmd>-<timestamp>)");
        sub->add_option("--jobs", jobs, "concurrent runs for sweep/converge");
        sub->add_flag("--allow-delta-zero", allow_delta_zero,
                      "permit delta = 0 (the unregularized, ill-posed limit; expect blow-up)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string cmd_name = app.get_subcommands().front()->get_name();
        const ddlab::lab::Command cmd = ddlab::lab::command_from_string(cmd_name);
        const std::string text = config_path.empty() ? std::string{} : read_file(config_path);
        const ddlab::lab::ExperimentSpec spec = ddlab::lab::parse_config(text, cmd);

        ddlab::lab::InvocationOptions opt;
        opt.out_dir = out_dir.empty()
                          ? std::filesystem::path("runs") / (cmd_name + "-" + timestamp())
                          : std::filesystem::path(out_dir);
        opt.jobs = jobs == 0 ? 1 : jobs;
        opt.allow_delta_zero = allow_delta_zero;

        const auto result = ddlab::lab::run_command(spec, opt, std::cout);
        std::cout << "outputs: " << opt.out_dir.string() << "\n";
        if (result.failures > 0) {
            for (const auto& e : result.errors) std::cerr << "failure: " << e << "\n";
            std::cerr << result.failures << " run(s) failed\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
