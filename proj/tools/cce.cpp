#include "cce/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        v.push_back(cce::parse_double(item));
    }
    return v;
}

} // namespace

int main(int argc, char** argv) {
    cce::configure_logging();
    cce::RunConfig cfg;
    std::string lambda = "1,1,1,1", grid, grid1, grid2, grid3;

    CLI::App app{"Sp(k+1)-invariant conformally compact Einstein fillings: solve, sweep, verify, compare, export"};
    app.set_config("--config", "", "key = value file with [solve]/[sweep]/... sections");
    app.require_subcommand(1);

    auto common = [&](CLI::App* s) {
        s->add_option("--k", cfg.k, "quaternionic dimension parameter (n = 4k+3)");
        s->add_option("--lambda", lambda, "boundary metric coefficients a,b,c,d");
        s->add_option("--class", cfg.cls, "auto|full|sp1|u1");
        s->add_option("--mesh", cfg.solve.mesh_size, "mesh intervals");
        s->add_option("--grading", cfg.solve.grading, "endpoint mesh clustering (1 = uniform)");
        s->add_option("--tol", cfg.solve.tol, "Newton residual tolerance");
        s->add_option("--max-iter", cfg.solve.max_iter, "Newton iteration cap");
        s->add_option("--steps", cfg.steps, "continuation steps from the round case");
        s->add_flag("--secant", cfg.secant, "secant predictor along the continuation");
        s->add_option("--seed", cfg.seed, "seed for perturbation probes");
        s->add_option("--out", cfg.out, "output directory");
        s->add_option("--format", cfg.format, "json|csv|both");
        s->add_flag("--force", cfg.force, "accept artifacts with mismatched manifests");
    };

    CLI::App* solve = app.add_subcommand("solve", "continuation solve to the target data");
    common(solve);
    CLI::App* sweep = app.add_subcommand("sweep", "independent solves over a lambda grid");
    common(sweep);
    sweep->add_option("--grid", grid, "values used on all three axes");
    sweep->add_option("--grid1", grid1, "lambda_1 values");
    sweep->add_option("--grid2", grid2, "lambda_2 values");
    sweep->add_option("--grid3", grid3, "lambda_3 values");
    sweep->add_option("--threads", cfg.threads, "worker count (0 = hardware)");
    CLI::App* verify = app.add_subcommand("verify", "diagnostics battery on a result file or an inline solve");
    common(verify);
    verify->add_option("--input", cfg.input, "result JSON (omit to solve inline)");
    verify->add_option("--probes", cfg.probes, "perturbed-guess uniqueness probes");
    CLI::App* compare = app.add_subcommand("compare", "total variation of the difference of two results");
    common(compare);
    compare->add_option("a", cfg.input, "first result JSON")->required();
    compare->add_option("b", cfg.input_b, "second result JSON")->required();
    CLI::App* exp = app.add_subcommand("export", "rewrite a result file as JSON and/or CSV");
    common(exp);
    exp->add_option("input", cfg.input, "result JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cce::kExitOk : cce::kExitInput;
    }
    try {
        const auto l = parse_list(lambda);
        if (l.size() != 4) throw cce::Error(cce::ErrorKind::InvalidParameter, "--lambda needs four values");
        std::copy(l.begin(), l.end(), cfg.lambda.begin());
        if (!grid.empty()) cfg.grid[0] = cfg.grid[1] = cfg.grid[2] = parse_list(grid);
        if (!grid1.empty()) cfg.grid[0] = parse_list(grid1);
        if (!grid2.empty()) cfg.grid[1] = parse_list(grid2);
        if (!grid3.empty()) cfg.grid[2] = parse_list(grid3);
    } catch (const cce::Error& e) {
        std::cout << "invalid input: " << e.what() << '\n';
        return cce::kExitInput;
    }

    if (solve->parsed()) return cce::cmd_solve(cfg, std::cout);
    if (sweep->parsed()) return cce::cmd_sweep(cfg, std::cout);
    if (verify->parsed()) return cce::cmd_verify(cfg, std::cout);
    if (compare->parsed()) return cce::cmd_compare(cfg, std::cout);
    return cce::cmd_export(cfg, std::cout);
}
