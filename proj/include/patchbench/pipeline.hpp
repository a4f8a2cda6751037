#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "patchbench/dataset_io.hpp"
#include "patchbench/patch_extraction.hpp"
#include "patchbench/tasks.hpp"

namespace patchbench {

/// Batch-run configuration. Defaults are the desk-scale values; the paper
/// scale switches the counts documented in apply_scale().
struct RunConfig
{
    std::uint64_t seed = 7;
    int scenes = 16;
    double illum_fraction = 0.5;
    int max_regions = 200;
    double rho = 5.0;
    int width = 768;
    int height = 768;

    std::vector<std::string> descriptors = {"mstd", "resz",  "sift", "rsift",
                                            "brief", "+sift", "+rsift"};
    std::vector<std::string> tasks = {"verification", "matching", "retrieval"};
    std::string scale = "desk"; // desk | paper

    int n_pos = 2000;
    int n_neg = 10000;
    int n_queries = 200;
    int n_distractors = 2000;

    std::vector<double> rho_list = {1.0, 4.0, 12.0, 20.0};
    std::vector<double> clip_candidates = {1.0, 0.5, 0.2, 0.1, 0.05, 0.01};
    double alpha = 0.5;

    int threads = 1;
    bool dump_descriptors = false;
    std::string out;
    std::string corpus_dir; // defaults to <out>/corpus
};

/// Throws ConfigError on invalid settings (unknown descriptor or task names,
/// "+" applied to trivial baselines or binary descriptors, bad counts).
void validate_config(const RunConfig& cfg);

/// Switch counts between scales: paper scale raises the region cap to 1300,
/// verification pairs to 2e5/1e6 and retrieval to 1e4 queries with 2e4
/// distractors.
void apply_scale(RunConfig& cfg);

/// Seed conventions shared by synthesis and the rho sweep, keyed purely by
/// master seed and sequence index.
std::uint64_t sequence_seed(std::uint64_t master, int seq_index);
std::uint64_t detection_seed(std::uint64_t master, int seq_index);
std::uint64_t noise_seed(std::uint64_t master, int seq_index);

/// Generate one fully processed sequence (texture, warps, detections with
/// orientations, patch groups) for scene index i of a run.
SequencePatches synthesize_sequence(const RunConfig& cfg, int seq_index);

/// Kind assignment of scene i under the configured illumination fraction.
SequenceKind scene_kind(const RunConfig& cfg, int seq_index);

/// In-memory synthesis of the whole corpus (fit/eval split included).
PatchCorpus synthesize_corpus(const RunConfig& cfg);

struct DescriptorSpec
{
    std::string name;
    DescriptorFamily family;
    bool post = false;
};
DescriptorSpec parse_descriptor_name(const std::string& name);

struct DescriptorTiming
{
    std::string name;
    int patches = 0;
    double seconds = 0.0;
};

struct EvalOutput
{
    ResultsReport report;
    std::vector<DescriptorTiming> timing;
    std::map<std::string, ZcaModel> zca_models;   // "+sift" -> fitted model
    std::map<std::string, DescriptorStore> stores; // by descriptor name
};

/// Run the configured descriptors x tasks x variants over the evaluation
/// split. ZCA models for "+" descriptors are fitted on the fitting split,
/// with the clip threshold selected by matching mAP on that split.
EvalOutput evaluate_corpus(const PatchCorpus& corpus, const RunConfig& cfg);

/// Matching mAP table of the rho sweep: one row per rho, one column per
/// target image pair 1|2 .. 1|6 (SIFT over viewpoint evaluation sequences).
struct RhoSweepTable
{
    std::vector<double> rhos;
    std::vector<std::array<double, 5>> map;
};

RhoSweepTable rho_sweep_in_memory(const RunConfig& cfg,
                                  const std::vector<StoredSequence>& sequences,
                                  const std::vector<int>& seq_indices,
                                  const std::vector<double>& rho_list);

// ---- batch commands (throw on failure; the CLI maps to exit codes) ----------

void cmd_synth(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_rho_sweep(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);

} // namespace patchbench
