#include "orlicz/acceptance.hpp"
#include "orlicz/config.hpp"
#include "orlicz/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Command {
    orlicz::RunKind kind;
    const char* name;
    const char* help;
    CLI::App* app = nullptr;
    std::string config;
    std::string out;
};

void print_summary(const orlicz::RunOutcome& outcome) {
    if (outcome.error) {
        std::cerr << "error " << (*outcome.error)["code"].get<std::string>() << ": "
                  << (*outcome.error)["message"].get<std::string>() << "\n";
        std::cerr << "wrote " << (outcome.out_dir / "error.json").string() << "\n";
        return;
    }
    const auto& rep = outcome.report;
    if (rep.contains("criteria")) {
        for (const auto& c : rep["criteria"]) {
            std::cout << (c["passed"].get<bool>() ? "PASS" : "FAIL") << " [" << c["id"].get<int>() << "] "
                      << c["name"].get<std::string>() << "\n";
        }
        for (const auto& e : rep["entries"]) {
            std::cout << "entry " << e["config"].get<std::string>() << " -> status " << e["status"].get<int>()
                      << "\n";
        }
    }
    std::cout << "wrote " << (outcome.out_dir / "report.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orlicz-Sobolev regularity laboratory"};
    app.require_subcommand(1);

    std::vector<Command> commands{
        {orlicz::RunKind::check_nfunction, "check-nfunction", "Check structural conditions and indices of an N-function"},
        {orlicz::RunKind::solve, "solve", "Solve a Dirichlet problem"},
        {orlicz::RunKind::truncate_sequence, "truncate-sequence", "Solve the truncated-source chain"},
        {orlicz::RunKind::moser_bound, "moser-bound", "Compute the a-priori L-infinity bound for a solved problem"},
        {orlicz::RunKind::verify, "verify", "Compare a stored field with a stored bound"},
        {orlicz::RunKind::suite, "suite", "Run the acceptance criteria and optional config entries"},
    };
    for (auto& c : commands) {
        c.app = app.add_subcommand(c.name, c.help);
        auto* opt = c.app->add_option("--config", c.config, "INI config file")->check(CLI::ExistingFile);
        if (c.kind != orlicz::RunKind::suite) opt->required();
        c.app->add_option("--out", c.out, "Output directory (default $ORLICZ_LAB_OUT/<config stem>)");
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& c : commands) {
        if (!c.app->parsed()) continue;
        const std::optional<std::filesystem::path> out =
            c.out.empty() ? std::nullopt : std::optional<std::filesystem::path>(c.out);
        orlicz::RunOutcome outcome;
        if (c.config.empty()) {
            orlicz::RunConfig config;
            config.kind = c.kind;
            outcome = orlicz::run(config, orlicz::resolve_output_dir(config, out));
        } else {
            outcome = orlicz::run_config_file(c.config, c.kind, out);
        }
        print_summary(outcome);
        return static_cast<int>(outcome.status);
    }
    return 1;
}
