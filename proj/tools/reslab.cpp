// reslab: command-line front end.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 numerical non-convergence.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "reslab/errors.hpp"
#include "reslab/report.hpp"
#include "reslab/run.hpp"

namespace {

std::string joined_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace reslab;
    CLI::App app{"reslab: bootstrap ladders, Schrödinger spectra and nonlinear solution branches"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RESLAB_VERSION);

    cli::RunRequest req;
    req.command_line = joined_args(argc, argv);
    std::string config_path, compare_path, out_dir, p_text, seed_file;
    bool v1_zero = false, table = false, json_flag = false;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "TOML experiment config")->check(CLI::ExistingFile);
        if (config_required) opt->required();
        sub->add_option("--out", out_dir, "output directory (default: config, $RESLAB_OUTPUT_DIR, ./reslab_out)");
    };

    auto* ladder = app.add_subcommand("ladder", "bootstrap exponent schedule for (N, p)");
    ladder->add_option("--dim", req.dim, "spatial dimension N")->required();
    auto* p_opt = ladder->add_option("--p", p_text, "integrability exponent of V1 (a, a/b or decimal)");
    auto* zero_opt = ladder->add_flag("--v1-zero", v1_zero, "V1 = 0");
    p_opt->excludes(zero_opt);
    auto* table_opt = ladder->add_flag("--table", table, "plain-text table");
    ladder->add_flag("--json", json_flag, "JSON (default)")->excludes(table_opt);
    ladder->add_option("--out", out_dir, "output directory");

    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenpairs of -Δ + V on the grid");
    add_common(spectrum, true);
    spectrum->add_option("--k", req.k, "number of eigenpairs");
    spectrum->add_option("--compare", compare_path, "second config for the comparison theorem")
        ->check(CLI::ExistingFile);

    auto* solve = app.add_subcommand("solve", "Newton solve at one lambda");
    add_common(solve, true);
    solve->add_option("--lambda", req.lambda, "spectral parameter");
    solve->add_option("--seed-mode", req.seed_mode, "eig[:K], zero or file");
    solve->add_option("--seed-file", seed_file, "CSV or one value per line")->check(CLI::ExistingFile);

    auto* cont = app.add_subcommand("continue", "natural-parameter continuation in lambda");
    add_common(cont, true);
    cont->add_option("--from", req.from, "starting lambda");
    cont->add_option("--to", req.to, "final lambda");
    cont->add_option("--steps", req.steps, "number of steps");
    cont->add_option("--seed-mode", req.seed_mode, "eig[:K], zero or file");
    cont->add_option("--seed-file", seed_file, "CSV or one value per line")->check(CLI::ExistingFile);

    auto* probe = app.add_subcommand("probe", "multi-start search for nontrivial solutions");
    add_common(probe, true);
    probe->add_option("--lambda", req.lambda, "spectral parameter");
    probe->add_option("--trials", req.trials, "number of starts");

    auto* verify = app.add_subcommand("verify", "run the property battery (bundled config by default)");
    add_common(verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ladder->parsed()) {
            req.command = cli::Command::Ladder;
            if (!v1_zero && p_text.empty()) throw ConfigError("p", "give --p or --v1-zero");
            if (!p_text.empty()) req.p = p_text;
        } else if (spectrum->parsed()) {
            req.command = cli::Command::Spectrum;
        } else if (solve->parsed()) {
            req.command = cli::Command::Solve;
        } else if (cont->parsed()) {
            req.command = cli::Command::Continue;
        } else if (probe->parsed()) {
            req.command = cli::Command::Probe;
        } else {
            req.command = cli::Command::Verify;
        }
        req.config = config_path.empty() ? cli::default_config() : cli::load_config(config_path);
        if (!compare_path.empty()) req.compare = cli::load_config(compare_path);
        if (!seed_file.empty()) req.seed_file = seed_file;
        if (!out_dir.empty()) req.output_dir = out_dir;

        const auto manifest = cli::run(req);
        if (ladder->parsed() && table) {
            const auto p = req.p ? ladder::LebesgueExponent::finite(ladder::parse_rational(*req.p))
                                 : ladder::LebesgueExponent::infinity();
            std::cout << report::to_table(ladder::plan_ladder(req.dim, p));
        } else {
            std::cout << manifest.summary << (manifest.summary.empty() || manifest.summary.back() == '\n' ? "" : "\n");
        }
        std::cerr << "wrote " << manifest.files.size() << " files to " << manifest.directory.string() << "\n";
        return manifest.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "not converged: " << e.what() << "\n";
        return 3;
    } catch (const NearDegeneracyError& e) {
        std::cerr << "near-degenerate: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const LadderOverflow& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
