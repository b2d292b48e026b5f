#include <string>

#include <CLI11.hpp>

#include "loewner/cli.hpp"

int main(int argc, char** argv) {
    loewner::cli::RunConfig cfg;
    CLI::App app{"Constant-coefficient multi-slit Loewner construction in the unit disk"};
    app.require_subcommand(1);

    for (const auto& name : loewner::cli::commands()) {
        auto* sub = app.add_subcommand(name, loewner::cli::describe(name));
        sub->add_option("--input", cfg.input, "slit system JSON (default: the built-in fixture)")->envname("LOEWNER_INPUT");
        sub->add_option("--out", cfg.out, "output directory")->envname("LOEWNER_OUT")->capture_default_str();
        sub->add_option("--accuracy", cfg.accuracy, "lmr accuracy target")->envname("LOEWNER_ACCURACY")->capture_default_str();
        sub->add_option("--max-level", cfg.max_level, "largest level exponent (levels 2^j)")
            ->envname("LOEWNER_MAX_LEVEL")
            ->capture_default_str();
        sub->add_option("--lambda-tolerance", cfg.lambda_tolerance, "level-to-level weight tolerance")
            ->envname("LOEWNER_LAMBDA_TOLERANCE")
            ->capture_default_str();
        sub->add_option("--steps", cfg.steps, "trace regeneration steps (0: construct grid)")
            ->envname("LOEWNER_STEPS")
            ->capture_default_str();
        sub->add_option("--fixture", cfg.fixture, "built-in fixture: single, symmetric, asymmetric, curved")
            ->envname("LOEWNER_FIXTURE")
            ->capture_default_str();
        sub->add_option("--grid", cfg.grid, "points per axis for lmr-grid and lemma-check")
            ->envname("LOEWNER_GRID")
            ->capture_default_str();
        sub->add_option("--epsilon", cfg.epsilons, "ratio tolerances for lemma-check")->envname("LOEWNER_EPSILON");
    }

    CLI11_PARSE(app, argc, argv);
    return loewner::cli::run(app.get_subcommands().front()->get_name(), cfg);
}
