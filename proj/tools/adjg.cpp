#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "adjg/bench.hpp"
#include "adjg/check.hpp"
#include "adjg/scenario.hpp"

namespace {

void write_report(const adjg::bench::BenchReport& report, const std::string& out_dir) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream json(std::filesystem::path(out_dir) / "bench.json", std::ios::binary);
    json << report.to_json() << '\n';
    std::ofstream csv(std::filesystem::path(out_dir) / "bench.csv", std::ios::binary);
    csv << report.to_csv();
}

void print_report(const adjg::bench::BenchReport& report) { std::cout << report.to_csv(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adjoint/tangent sensitivity toolkit"};
    app.require_subcommand(1);

    // run
    std::string config_path;
    bool describe = false;
    CLI::App* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config_path, "path to the scenario config (JSON)")->required();
    run->add_flag("--describe-output", describe,
                  "print the output files and CSV columns for this config's kind and exit");

    // bench
    CLI::App* bench = app.add_subcommand("bench", "cost benchmarks");
    bench->require_subcommand(1);
    std::vector<int> sizes{10, 100, 1000};
    std::vector<int> names{2, 10, 20};
    long n_paths = 20000;
    long n_steps = 32;
    std::string out_dir;
    CLI::App* cheap = bench->add_subcommand("cheap-gradient",
                                            "gradient-to-primal wall-time ratios per input count");
    cheap->add_option("--sizes", sizes, "input counts")->delimiter(',');
    cheap->add_option("--out", out_dir, "directory for bench.json/bench.csv");
    CLI::App* copula = bench->add_subcommand("copula",
                                             "adjoint correlation-risk sweep vs tangent entry loop");
    copula->add_option("--names", names, "basket sizes")->delimiter(',');
    copula->add_option("--out", out_dir, "directory for bench.json/bench.csv");
    CLI::App* threads = bench->add_subcommand("threads", "parallel path loop vs serial reference");
    threads->add_option("--paths", n_paths, "number of Monte Carlo paths");
    threads->add_option("--steps", n_steps, "time steps per path");
    threads->add_option("--out", out_dir, "directory for bench.json/bench.csv");
    std::vector<int> params{2, 8, 32};
    CLI::App* sde_params = bench->add_subcommand(
        "sde-params", "backward sweep vs forward parameter recursion per parameter count");
    sde_params->add_option("--params", params, "parameter counts")->delimiter(',');
    sde_params->add_option("--out", out_dir, "directory for bench.json/bench.csv");

    // check
    CLI::App* check = app.add_subcommand("check", "run the verification battery");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (describe) {
                const std::string kind = adjg::scenario::config_kind(config_path);
                std::cout << adjg::scenario::describe_output(kind);
                return 0;
            }
            return adjg::scenario::run_scenario(config_path);
        }
        if (cheap->parsed()) {
            const adjg::bench::BenchReport report = adjg::bench::bench_cheap_gradient(sizes);
            print_report(report);
            write_report(report, out_dir);
            return 0;
        }
        if (copula->parsed()) {
            const adjg::bench::BenchReport report = adjg::bench::bench_copula_speedup(names);
            print_report(report);
            write_report(report, out_dir);
            return 0;
        }
        if (threads->parsed()) {
            const adjg::bench::BenchReport report =
                adjg::bench::bench_mc_threads(n_paths, static_cast<int>(n_steps));
            print_report(report);
            write_report(report, out_dir);
            return 0;
        }
        if (sde_params->parsed()) {
            const adjg::bench::BenchReport report = adjg::bench::bench_sde_param_scaling(params);
            print_report(report);
            write_report(report, out_dir);
            return 0;
        }
        if (check->parsed()) {
            const std::vector<adjg::check::CheckRow> rows = adjg::check::standard_battery();
            adjg::check::print_table(rows, std::cout);
            return adjg::check::all_pass(rows) ? 0 : 1;
        }
    } catch (const adjg::scenario::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return adjg::scenario::kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
