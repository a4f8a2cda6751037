#include <cstdio>
#include <exception>
#include <stdexcept>

#include <CLI11.hpp>

#include "patchbench/errors.hpp"
#include "patchbench/pipeline.hpp"

namespace {

// Exit codes: 1 config, 2 generation, 3 I/O, 4 missing corpus, 5 evaluation.
int run(int argc, char** argv)
{
    CLI::App app{"patchbench: synthetic ground-truthed benchmark for local "
                 "patch descriptors (verification, matching, retrieval)"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");

    patchbench::RunConfig cfg;
    app.add_option("--seed", cfg.seed, "master random seed")
        ->envname("PATCHBENCH_SEED")
        ->capture_default_str();
    app.add_option("--out", cfg.out, "output directory (corpus/ and results/ live here)")
        ->capture_default_str();
    app.add_option("--corpus", cfg.corpus_dir,
                   "corpus directory override (default <out>/corpus)")
        ->capture_default_str();
    app.add_option("--scenes", cfg.scenes, "number of synthetic scenes")
        ->capture_default_str();
    app.add_option("--illum-frac", cfg.illum_fraction,
                   "fraction of illumination scenes")
        ->capture_default_str();
    app.add_option("--regions", cfg.max_regions, "region cap per image")
        ->capture_default_str();
    app.add_option("--rho", cfg.rho, "measurement region scale factor")
        ->capture_default_str();
    app.add_option("--width", cfg.width, "scene width in pixels")->capture_default_str();
    app.add_option("--height", cfg.height, "scene height in pixels")
        ->capture_default_str();
    app.add_option("--desc", cfg.descriptors,
                   "descriptors to evaluate (mstd,resz,sift,rsift,brief,+sift,+rsift)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--tasks", cfg.tasks, "tasks to run (verification,matching,retrieval)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--scale", cfg.scale, "desk or paper protocol counts")
        ->capture_default_str();
    app.add_option("--n-pos", cfg.n_pos, "verification positive pairs per set")
        ->capture_default_str();
    app.add_option("--n-neg", cfg.n_neg, "verification negative pairs per set")
        ->capture_default_str();
    app.add_option("--n-queries", cfg.n_queries, "retrieval queries per variant")
        ->capture_default_str();
    app.add_option("--n-distractors", cfg.n_distractors, "distractors per collection")
        ->capture_default_str();
    app.add_option("--rho-list", cfg.rho_list, "rho values for the sweep")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--clip-candidates", cfg.clip_candidates,
                   "eigenvalue clip fractions tried for ZCA")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "power-law exponent of the post-processing")
        ->capture_default_str();
    app.add_option("--threads", cfg.threads,
                   "worker threads (0 = hardware concurrency); outputs do not depend on it")
        ->capture_default_str();
    app.add_flag("--dump-descriptors", cfg.dump_descriptors,
                 "write descriptor CSV/binary blocks next to the results");

    CLI::App* synth = app.add_subcommand("synth", "generate a ground-truthed corpus");
    CLI::App* eval = app.add_subcommand("eval", "run descriptors x tasks over a corpus");
    CLI::App* sweep = app.add_subcommand(
        "rho-sweep", "re-extract at several rho and report the matching trend");
    CLI::App* report = app.add_subcommand("report", "recompute summaries from detail CSVs");
    for (CLI::App* sub : {synth, eval, sweep, report})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed())
            patchbench::cmd_synth(cfg);
        if (eval->parsed())
            patchbench::cmd_eval(cfg);
        if (sweep->parsed())
            patchbench::cmd_rho_sweep(cfg);
        if (report->parsed())
            patchbench::cmd_report(cfg);
    } catch (const patchbench::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const patchbench::GenerationError& e) {
        std::fprintf(stderr, "generation error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "generation error: %s\n", e.what());
        return 2;
    } catch (const patchbench::MissingCorpusError& e) {
        std::fprintf(stderr, "missing corpus: %s\n", e.what());
        return 4;
    } catch (const patchbench::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const patchbench::EvalError& e) {
        std::fprintf(stderr, "evaluation error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 5;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
