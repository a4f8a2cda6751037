#include "patchbench/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <thread>

#include "patchbench/errors.hpp"
#include "patchbench/parallel.hpp"
#include "patchbench/synthesis.hpp"

namespace patchbench {

namespace fs = std::filesystem;

namespace {

constexpr std::array<double, 5> kSeveritySchedule = {0.2, 0.4, 0.6, 0.8, 1.0};

const std::set<std::string> kKnownTasks = {"verification", "matching", "retrieval"};

bool has_task(const RunConfig& cfg, const std::string& task)
{
    return std::find(cfg.tasks.begin(), cfg.tasks.end(), task) != cfg.tasks.end();
}

int effective_threads(const RunConfig& cfg)
{
    if (cfg.threads > 0)
        return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

fs::path corpus_path(const RunConfig& cfg)
{
    if (!cfg.corpus_dir.empty())
        return cfg.corpus_dir;
    if (cfg.out.empty())
        throw ConfigError("no output directory configured");
    return fs::path(cfg.out) / "corpus";
}

fs::path results_path(const RunConfig& cfg)
{
    if (cfg.out.empty())
        throw ConfigError("no output directory configured");
    return fs::path(cfg.out) / "results";
}

void write_failed_sentinel(const fs::path& dir, const std::string& message)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / "FAILED");
    out << message << "\n";
}

void clear_failed_sentinel(const fs::path& dir)
{
    std::error_code ec;
    fs::remove(dir / "FAILED", ec);
}

/// Echo the effective configuration as flat key=value lines.
void write_config_echo(const RunConfig& cfg, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write config echo: " + path.string());
    auto join_strings = [](const std::vector<std::string>& values) {
        std::string s;
        for (const auto& v : values) {
            if (!s.empty())
                s += ',';
            s += v;
        }
        return s;
    };
    auto join_doubles = [](const std::vector<double>& values) {
        std::string s;
        char buf[40];
        for (double v : values) {
            if (!s.empty())
                s += ',';
            std::snprintf(buf, sizeof(buf), "%g", v);
            s += buf;
        }
        return s;
    };
    char buf[40];
    out << "seed=" << cfg.seed << "\n";
    out << "scenes=" << cfg.scenes << "\n";
    std::snprintf(buf, sizeof(buf), "%g", cfg.illum_fraction);
    out << "illum_fraction=" << buf << "\n";
    out << "max_regions=" << cfg.max_regions << "\n";
    std::snprintf(buf, sizeof(buf), "%g", cfg.rho);
    out << "rho=" << buf << "\n";
    out << "width=" << cfg.width << "\n";
    out << "height=" << cfg.height << "\n";
    out << "descriptors=" << join_strings(cfg.descriptors) << "\n";
    out << "tasks=" << join_strings(cfg.tasks) << "\n";
    out << "scale=" << cfg.scale << "\n";
    out << "n_pos=" << cfg.n_pos << "\n";
    out << "n_neg=" << cfg.n_neg << "\n";
    out << "n_queries=" << cfg.n_queries << "\n";
    out << "n_distractors=" << cfg.n_distractors << "\n";
    out << "rho_list=" << join_doubles(cfg.rho_list) << "\n";
    out << "clip_candidates=" << join_doubles(cfg.clip_candidates) << "\n";
    std::snprintf(buf, sizeof(buf), "%g", cfg.alpha);
    out << "alpha=" << buf << "\n";
}

} // namespace

DescriptorSpec parse_descriptor_name(const std::string& name)
{
    DescriptorSpec spec;
    spec.name = name;
    std::string base = name;
    if (!base.empty() && base[0] == '+') {
        spec.post = true;
        base = base.substr(1);
    }
    if (base == "mstd")
        spec.family = DescriptorFamily::MStd;
    else if (base == "resz")
        spec.family = DescriptorFamily::Resz;
    else if (base == "sift")
        spec.family = DescriptorFamily::Sift;
    else if (base == "rsift")
        spec.family = DescriptorFamily::RootSift;
    else if (base == "brief")
        spec.family = DescriptorFamily::Brief;
    else
        throw ConfigError("unknown descriptor: " + name);

    if (spec.post && (spec.family == DescriptorFamily::MStd ||
                      spec.family == DescriptorFamily::Resz ||
                      spec.family == DescriptorFamily::Brief))
        throw ConfigError("post-processing is not used for trivial baselines or "
                          "binary descriptors: " + name);
    return spec;
}

void validate_config(const RunConfig& cfg)
{
    if (cfg.scenes < 1)
        throw ConfigError("scenes must be >= 1");
    if (cfg.illum_fraction < 0.0 || cfg.illum_fraction > 1.0)
        throw ConfigError("illum_fraction must lie in [0, 1]");
    if (cfg.max_regions < 8)
        throw ConfigError("max_regions must be >= 8");
    if (!(cfg.rho > 0.0))
        throw ConfigError("rho must be positive");
    if (cfg.width < 64 || cfg.height < 64)
        throw ConfigError("image dimensions must be >= 64");
    if (cfg.scale != "desk" && cfg.scale != "paper")
        throw ConfigError("scale must be desk or paper");
    if (cfg.n_pos < 1 || cfg.n_neg < 0 || cfg.n_queries < 1 || cfg.n_distractors < 0)
        throw ConfigError("pair/query counts must be positive");
    if (cfg.clip_candidates.empty())
        throw ConfigError("clip candidate list must not be empty");
    if (cfg.descriptors.empty() || cfg.tasks.empty())
        throw ConfigError("descriptor and task lists must not be empty");
    for (const std::string& task : cfg.tasks)
        if (!kKnownTasks.count(task))
            throw ConfigError("unknown task: " + task);
    for (const std::string& name : cfg.descriptors)
        parse_descriptor_name(name);
    for (double r : cfg.rho_list)
        if (!(r > 0.0))
            throw ConfigError("rho sweep values must be positive");
}

void apply_scale(RunConfig& cfg)
{
    if (cfg.scale == "paper") {
        cfg.max_regions = 1300;
        cfg.n_pos = 200000;
        cfg.n_neg = 1000000;
        cfg.n_queries = 10000;
        cfg.n_distractors = 20000;
    }
}

std::uint64_t sequence_seed(std::uint64_t master, int seq_index)
{
    return derive_seed(master, 3000 + static_cast<std::uint64_t>(seq_index));
}

std::uint64_t detection_seed(std::uint64_t master, int seq_index)
{
    return derive_seed(master, 2000 + static_cast<std::uint64_t>(seq_index));
}

std::uint64_t noise_seed(std::uint64_t master, int seq_index)
{
    return derive_seed(master, 1000 + static_cast<std::uint64_t>(seq_index));
}

SequenceKind scene_kind(const RunConfig& cfg, int seq_index)
{
    // Bresenham split so any illumination fraction interleaves evenly.
    const double f = cfg.illum_fraction;
    const auto count = [&](int i) { return static_cast<int>(std::floor(i * f + 1e-9)); };
    return count(seq_index + 1) > count(seq_index) ? SequenceKind::Illumination
                                                   : SequenceKind::Viewpoint;
}

SequencePatches synthesize_sequence(const RunConfig& cfg, int seq_index)
{
    SequenceSpec spec;
    spec.seed = sequence_seed(cfg.seed, seq_index);
    spec.kind = scene_kind(cfg, seq_index);
    spec.severity = kSeveritySchedule;
    spec.width = cfg.width;
    spec.height = cfg.height;
    char id[32];
    std::snprintf(id, sizeof(id), "%s_synth_%03d",
                  spec.kind == SequenceKind::Illumination ? "i" : "v", seq_index);
    spec.id = id;

    const Sequence seq = spec.kind == SequenceKind::Illumination
                             ? gen_illum_sequence(spec)
                             : gen_viewpoint_sequence(spec);

    Rng det_rng(detection_seed(cfg.seed, seq_index));
    const std::vector<RegionDetection> detections =
        detect_regions(seq.ref, det_rng, cfg.max_regions);

    // Orientation needs the rho=5 support inside the reference; assign it
    // only where that holds and drop the rest up front, independent of the
    // extraction rho.
    std::vector<RegionDetection> oriented;
    oriented.reserve(detections.size());
    for (const RegionDetection& r : detections) {
        const double support = 5.0 * r.m * std::sqrt(2.0);
        if (r.cx - support < 0.0 || r.cy - support < 0.0 ||
            r.cx + support > cfg.width - 1.0 || r.cy + support > cfg.height - 1.0)
            continue;
        RegionDetection o = r;
        o.theta = dominant_orientation(seq.ref, o);
        oriented.push_back(o);
    }
    if (oriented.size() < 2)
        throw GenerationError("synthesize_sequence: too few oriented regions in " +
                              spec.id);

    SequencePatches sp =
        build_sequence_patches(seq, oriented, cfg.rho, noise_seed(cfg.seed, seq_index));
    sp.all_detections = std::move(oriented);
    sp.source = seq;
    return sp;
}

namespace {

std::vector<int> make_fit_split(const PatchCorpus& corpus)
{
    // Every 4th sequence of each kind goes into the fitting split.
    std::vector<int> fit;
    int seen_v = 0, seen_i = 0;
    for (int s = 0; s < static_cast<int>(corpus.sequences.size()); ++s) {
        int& seen = corpus.sequences[s].kind == SequenceKind::Illumination ? seen_i
                                                                           : seen_v;
        if (seen % 4 == 0)
            fit.push_back(s);
        ++seen;
    }
    return fit;
}

} // namespace

PatchCorpus synthesize_corpus(const RunConfig& cfg)
{
    validate_config(cfg);
    PatchCorpus corpus;
    corpus.master_seed = cfg.seed;
    corpus.rho = cfg.rho;
    corpus.sequences.resize(cfg.scenes);

    parallel_for(cfg.scenes, effective_threads(cfg),
                 [&](int i) { corpus.sequences[i] = synthesize_sequence(cfg, i); });

    corpus.fit_split = make_fit_split(corpus);
    return corpus;
}

void cmd_synth(const RunConfig& cfg)
{
    if (cfg.out.empty())
        throw ConfigError("synth requires an output directory");
    RunConfig scaled = cfg;
    apply_scale(scaled);
    validate_config(scaled);
    const fs::path out_dir = cfg.out;

    try {
        const fs::path corpus_dir = corpus_path(scaled);
        std::error_code ec;
        fs::create_directories(corpus_dir, ec);
        if (ec)
            throw IoError("cannot create output directory: " + corpus_dir.string());

        // Build in thread-sized batches, write each sequence, then drop its
        // pixel data; memory stays bounded while the manifest still sees
        // every sequence's metadata.
        const int threads = effective_threads(scaled);
        PatchCorpus meta;
        meta.master_seed = scaled.seed;
        meta.rho = scaled.rho;
        meta.sequences.resize(scaled.scenes);

        for (int base = 0; base < scaled.scenes; base += threads) {
            const int chunk = std::min(threads, scaled.scenes - base);
            std::vector<SequencePatches> built(chunk);
            parallel_for(chunk, threads,
                         [&](int j) { built[j] = synthesize_sequence(scaled, base + j); });
            for (int j = 0; j < chunk; ++j) {
                save_sequence_dir(built[j], corpus_dir);
                built[j].ref.clear();
                for (auto& t : built[j].targets)
                    t.clear();
                for (auto& nv : built[j].noise)
                    nv.clear();
                built[j].source.reset();
                meta.sequences[base + j] = std::move(built[j]);
            }
        }

        meta.fit_split = make_fit_split(meta);
        write_corpus_manifest(meta, corpus_dir);
        write_config_echo(scaled, out_dir / "run_config.txt");
        clear_failed_sentinel(out_dir);
    } catch (const std::exception& e) {
        write_failed_sentinel(out_dir, e.what());
        throw;
    }
}

namespace {

/// Matching mAP over the given sequences with an existing store (all
/// variants, all targets). Used for clip-threshold selection.
double matching_map(const PatchCorpus& corpus, std::span<const int> seqs,
                    const DescriptorStore& store, int threads)
{
    struct Job
    {
        int seq;
        NoiseLevel v;
        int target;
    };
    std::vector<Job> jobs;
    for (int s : seqs)
        for (NoiseLevel v : kVariants)
            for (int k = 0; k < 5; ++k)
                jobs.push_back({s, v, k});

    std::vector<double> aps(jobs.size());
    DescriptorScorer scorer(store);
    parallel_for(static_cast<int>(jobs.size()), threads, [&](int i) {
        aps[i] = run_matching(corpus, jobs[i].seq, jobs[i].v, jobs[i].target, scorer);
    });
    return mean_ap(aps);
}

std::string retrieval_query_id(int index)
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%05d", index);
    return buf;
}

} // namespace

EvalOutput evaluate_corpus(const PatchCorpus& corpus, const RunConfig& cfg)
{
    validate_config(cfg);
    const int threads = effective_threads(cfg);
    const std::vector<int> eval_seqs = corpus.eval_split();
    if (eval_seqs.empty())
        throw EvalError("evaluate_corpus: evaluation split is empty");

    EvalOutput out;

    // Compute base-family stores once; "+" variants derive from them.
    std::vector<DescriptorSpec> specs;
    for (const std::string& name : cfg.descriptors)
        specs.push_back(parse_descriptor_name(name));

    std::map<DescriptorFamily, DescriptorStore> base_stores;
    for (const DescriptorSpec& spec : specs)
        if (!base_stores.count(spec.family)) {
            const auto start = std::chrono::steady_clock::now();
            base_stores[spec.family] =
                compute_descriptor_store(corpus, spec.family, threads);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            const int rows = base_stores[spec.family].seq_base.back() * 18;
            out.timing.push_back(
                {descriptor_family_name(spec.family), rows, seconds});
        }

    for (const DescriptorSpec& spec : specs) {
        if (!spec.post) {
            out.stores[spec.name] = base_stores[spec.family];
            continue;
        }
        if (corpus.fit_split.empty())
            throw EvalError("post-processed descriptors need a fitting split");
        const DescriptorStore& base = base_stores[spec.family];
        const Eigen::MatrixXd sample = gather_rows(base, corpus, corpus.fit_split);

        const double clip = select_clip_threshold(
            cfg.clip_candidates, [&](double candidate) {
                const ZcaModel model = fit_zca(sample, candidate, cfg.alpha);
                const DescriptorStore posted = apply_post_store(base, model);
                return matching_map(corpus, corpus.fit_split, posted, threads);
            });
        const ZcaModel model = fit_zca(sample, clip, cfg.alpha);
        out.zca_models[spec.name] = model;
        out.stores[spec.name] = apply_post_store(base, model);
    }

    // Shared task inputs; each descriptor sees identical pairs/collections.
    std::vector<VerificationSet> verif_sets;
    if (has_task(cfg, "verification"))
        for (NoiseLevel v : kVariants)
            for (NegSource src : {NegSource::DiffSeq, NegSource::SameSeq}) {
                Rng rng(derive_seed(cfg.seed, 101,
                                    static_cast<std::uint64_t>(variant_index(v)),
                                    static_cast<std::uint64_t>(src == NegSource::SameSeq)));
                verif_sets.push_back(build_verification(corpus, eval_seqs, v, src,
                                                        cfg.n_pos, cfg.n_neg, rng));
            }

    for (const DescriptorSpec& spec : specs) {
        const DescriptorStore& store = out.stores[spec.name];
        DescriptorScorer scorer(store);
        std::vector<DetailRow> rows;

        if (has_task(cfg, "verification"))
            for (const VerificationSet& set : verif_sets)
                rows.push_back({"verification", noise_level_name(set.variant),
                                neg_source_name(set.neg_source), "all",
                                run_verification(set, scorer)});

        if (has_task(cfg, "matching")) {
            struct Job
            {
                int seq;
                int vi;
                int target;
            };
            std::vector<Job> jobs;
            for (NoiseLevel v : kVariants)
                for (int s : eval_seqs)
                    for (int k = 0; k < 5; ++k)
                        jobs.push_back({s, variant_index(v), k});
            std::vector<double> aps(jobs.size());
            parallel_for(static_cast<int>(jobs.size()), threads, [&](int i) {
                aps[i] = run_matching(corpus, jobs[i].seq, kVariants[jobs[i].vi],
                                      jobs[i].target, scorer);
            });
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                const SequencePatches& sp = corpus.sequences[jobs[i].seq];
                rows.push_back({"matching", noise_level_name(kVariants[jobs[i].vi]),
                                sequence_kind_name(sp.kind),
                                sp.id + ":1|" + std::to_string(jobs[i].target + 2),
                                aps[i]});
            }
        }

        if (has_task(cfg, "retrieval"))
            for (NoiseLevel v : kVariants) {
                Rng rng(derive_seed(cfg.seed, 102,
                                    static_cast<std::uint64_t>(variant_index(v))));
                const std::vector<RetrievalCollection> colls = build_retrieval(
                    corpus, eval_seqs, v, cfg.n_queries, cfg.n_distractors, rng);
                std::vector<double> aps(colls.size());
                parallel_for(static_cast<int>(colls.size()), threads, [&](int q) {
                    aps[q] = run_retrieval(colls[q], scorer);
                });
                for (std::size_t q = 0; q < colls.size(); ++q)
                    rows.push_back({"retrieval", noise_level_name(v), "",
                                    retrieval_query_id(static_cast<int>(q)), aps[q]});
            }

        out.report.details.emplace_back(spec.name, std::move(rows));
    }

    summarize(out.report);
    return out;
}

void cmd_eval(const RunConfig& cfg)
{
    if (cfg.out.empty())
        throw ConfigError("eval requires an output directory");
    RunConfig scaled = cfg;
    apply_scale(scaled);
    validate_config(scaled);
    const fs::path out_dir = cfg.out;

    try {
        const fs::path corpus_dir = corpus_path(scaled);
        if (!fs::exists(corpus_dir))
            throw MissingCorpusError("no corpus at " + corpus_dir.string());
        const PatchCorpus corpus = ingest_external(corpus_dir);

        EvalOutput result;
        try {
            result = evaluate_corpus(corpus, scaled);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const EvalError&) {
            throw;
        } catch (const std::exception& e) {
            throw EvalError(e.what());
        }

        const fs::path res_dir = results_path(scaled);
        write_results(result.report, res_dir);

        // Extraction throughput (Table-1-style diagnostic; timing is not a
        // deterministic result file).
        {
            std::ofstream out(res_dir / "timing.txt", std::ios::binary);
            out << "# descriptor patches seconds kilo_descriptors_per_second\n";
            char buf[64];
            for (const DescriptorTiming& t : result.timing) {
                const double kps =
                    t.seconds > 0.0 ? (t.patches / t.seconds) / 1000.0 : 0.0;
                std::snprintf(buf, sizeof(buf), "%s %d %.3f %.2f\n", t.name.c_str(),
                              t.patches, t.seconds, kps);
                out << buf;
            }
        }

        for (const auto& [name, model] : result.zca_models)
            write_zca(res_dir / name / "zca.txt", model);

        if (scaled.dump_descriptors)
            for (const auto& [name, store] : result.stores) {
                std::vector<std::string> ids;
                for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
                    const SequencePatches& sp = corpus.sequences[s];
                    for (int g = 0; g < sp.group_count(); ++g)
                        for (int v = 0; v < 3; ++v)
                            for (int i = 0; i < 6; ++i)
                                ids.push_back(sp.id + ":" + std::to_string(sp.region_ids[g]) +
                                              ":" + kVariantTag[v] + std::to_string(i));
                }
                const DescriptorStore& st = store;
                if (descriptor_is_binary(st.family))
                    write_descriptors_bin(res_dir / name / "descriptors.bin", st.family,
                                          Eigen::MatrixXd(), st.bits);
                else {
                    write_descriptors_bin(res_dir / name / "descriptors.bin", st.family,
                                          st.values, {});
                    write_descriptors_csv(res_dir / name / "descriptors.csv", ids,
                                          st.values);
                }
            }

        write_config_echo(scaled, out_dir / "run_config_eval.txt");
        clear_failed_sentinel(out_dir);
    } catch (const std::exception& e) {
        write_failed_sentinel(out_dir, e.what());
        throw;
    }
}

RhoSweepTable rho_sweep_in_memory(const RunConfig& cfg,
                                  const std::vector<StoredSequence>& sequences,
                                  const std::vector<int>& seq_indices,
                                  const std::vector<double>& rho_list)
{
    if (sequences.empty())
        throw EvalError("rho sweep needs viewpoint sequences");
    if (rho_list.empty())
        throw ConfigError("rho sweep needs at least one rho");
    const int threads = effective_threads(cfg);

    // Hold the keypoint set fixed across the sweep: containment is checked
    // at the largest swept rho, so every column compares the same regions.
    // A singleton list therefore reproduces a direct run at that rho.
    BuildOptions options;
    options.containment_rho = *std::max_element(rho_list.begin(), rho_list.end());

    RhoSweepTable table;
    table.rhos = rho_list;
    for (double rho : rho_list) {
        std::array<std::vector<double>, 5> per_target;
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            PatchCorpus mini;
            mini.master_seed = cfg.seed;
            mini.rho = rho;
            mini.sequences.push_back(build_sequence_patches(
                sequences[i].sequence, sequences[i].regions, rho,
                noise_seed(cfg.seed, seq_indices[i]), options));

            const DescriptorStore store =
                compute_descriptor_store(mini, DescriptorFamily::Sift, threads);
            DescriptorScorer scorer(store);
            struct Job
            {
                int vi;
                int target;
            };
            std::vector<Job> jobs;
            for (int vi = 0; vi < 3; ++vi)
                for (int k = 0; k < 5; ++k)
                    jobs.push_back({vi, k});
            std::vector<double> aps(jobs.size());
            parallel_for(static_cast<int>(jobs.size()), threads, [&](int j) {
                aps[j] = run_matching(mini, 0, kVariants[jobs[j].vi], jobs[j].target,
                                      scorer);
            });
            for (std::size_t j = 0; j < jobs.size(); ++j)
                per_target[jobs[j].target].push_back(aps[j]);
        }
        std::array<double, 5> row;
        for (int k = 0; k < 5; ++k)
            row[k] = mean_ap(per_target[k]);
        table.map.push_back(row);
    }
    return table;
}

void cmd_rho_sweep(const RunConfig& cfg)
{
    if (cfg.out.empty())
        throw ConfigError("rho-sweep requires an output directory");
    RunConfig scaled = cfg;
    apply_scale(scaled);
    validate_config(scaled);
    const fs::path out_dir = cfg.out;

    try {
        const fs::path corpus_dir = corpus_path(scaled);
        if (!fs::exists(corpus_dir / "manifest.json"))
            throw MissingCorpusError("no corpus manifest at " + corpus_dir.string());
        const PatchCorpus corpus = load_corpus(corpus_dir);

        // Viewpoint sequences of the evaluation split, re-extracted from
        // their stored source images at each rho.
        std::vector<StoredSequence> sequences;
        std::vector<int> indices;
        for (int s : corpus.eval_split())
            if (corpus.sequences[s].kind == SequenceKind::Viewpoint) {
                sequences.push_back(
                    load_stored_sequence(corpus_dir, corpus.sequences[s].id));
                indices.push_back(s);
            }
        if (sequences.empty())
            throw EvalError("rho sweep needs viewpoint sequences in the evaluation split");

        const RhoSweepTable table =
            rho_sweep_in_memory(scaled, sequences, indices, scaled.rho_list);

        const fs::path res_dir = results_path(scaled);
        std::error_code ec;
        fs::create_directories(res_dir, ec);
        if (ec)
            throw IoError("cannot create results directory: " + res_dir.string());
        std::ofstream out(res_dir / "rho_sweep.csv", std::ios::binary);
        if (!out)
            throw IoError("cannot write rho_sweep.csv");
        out << "rho,1|2,1|3,1|4,1|5,1|6\n";
        for (std::size_t i = 0; i < table.rhos.size(); ++i) {
            out << format_6sig(table.rhos[i]);
            for (int k = 0; k < 5; ++k)
                out << ',' << format_6sig(table.map[i][k]);
            out << "\n";
        }
        clear_failed_sentinel(out_dir);
    } catch (const std::exception& e) {
        write_failed_sentinel(out_dir, e.what());
        throw;
    }
}

void cmd_report(const RunConfig& cfg)
{
    if (cfg.out.empty())
        throw ConfigError("report requires an output directory");
    const fs::path res_dir = results_path(cfg);
    if (!fs::exists(res_dir))
        throw MissingCorpusError("no results directory at " + res_dir.string());

    ResultsReport report;
    report.details = read_detail_results(res_dir);
    if (report.details.empty())
        throw EvalError("no detail CSVs under " + res_dir.string());
    summarize(report);
    write_results(report, res_dir);

    std::printf("%-14s %-10s %s\n", "task", "descriptor", "mean_ap");
    for (const SummaryRow& row : report.summary)
        std::printf("%-14s %-10s %s\n", row.task.c_str(), row.descriptor.c_str(),
                    format_6sig(row.mean_ap).c_str());
}

} // namespace patchbench
