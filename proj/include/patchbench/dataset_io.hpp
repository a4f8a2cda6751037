#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "patchbench/descriptors.hpp"
#include "patchbench/image.hpp"
#include "patchbench/patch_extraction.hpp"
#include "patchbench/postproc.hpp"

namespace patchbench {

// ---- low-level formats ----------------------------------------------------

/// Binary 8-bit PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const Image& img);
Image read_pgm(const std::filesystem::path& path);

/// Plain-text homography list: one homography per line, 9 whitespace-
/// separated decimals, row-major.
void write_homographies(const std::filesystem::path& path,
                        const std::array<Homography, 5>& hs);
std::array<Homography, 5> read_homographies(const std::filesystem::path& path);

/// Patch strip: patches stacked vertically, width 65, height 65 * N.
void write_patch_strip(const std::filesystem::path& path,
                       const std::vector<Patch>& patches);
std::vector<Patch> read_patch_strip(const std::filesystem::path& path);

// ---- corpus ---------------------------------------------------------------

/// Persist a corpus: per sequence a directory with ref.pgm plus e/h/t target
/// strips, homographies.txt, regions.txt and the source images; a JSON
/// manifest at the root records seed, rho, the noise profile table and the
/// fit/eval split. Bit-exact round trip: load(save(x)) == x.
void save_corpus(const PatchCorpus& corpus, const std::filesystem::path& dir);
PatchCorpus load_corpus(const std::filesystem::path& dir);

/// Pieces of save_corpus, exposed so batch synthesis can write sequences as
/// they are produced and emit the manifest once at the end.
void save_sequence_dir(const SequencePatches& sp, const std::filesystem::path& corpus_dir);
void write_corpus_manifest(const PatchCorpus& corpus, const std::filesystem::path& dir);

/// Load a bare strip-layout directory (HPatches-style): sequences are
/// subdirectories holding ref.pgm and e1..e5/h1..h5/t1..t5 strips.
/// Homographies and manifest are optional; sequence kind comes from the
/// "i_"/"v_" name prefix. Throws IoError on inconsistent patch counts.
PatchCorpus ingest_external(const std::filesystem::path& dir);

/// Re-derive the detection list of a stored sequence (used by the rho sweep
/// to re-extract patches at a different measurement scale).
struct StoredSequence
{
    Sequence sequence;
    std::vector<RegionDetection> regions;
};
StoredSequence load_stored_sequence(const std::filesystem::path& corpus_dir,
                                    const std::string& id);

// ---- results --------------------------------------------------------------

struct DetailRow
{
    std::string task;
    std::string variant;    // Easy / Hard / Tough
    std::string subvariant; // SameSeq / DiffSeq / viewpoint / illumination / ""
    std::string id;
    double ap = 0.0;
};

struct MarkerRow
{
    std::string task;
    std::string descriptor;
    std::string variant;
    std::string subvariant;
    double map = 0.0;
};

struct SummaryRow
{
    std::string task;
    std::string descriptor;
    double mean_ap = 0.0;
};

struct ResultsReport
{
    // keyed by descriptor name ("sift", "+sift", ...)
    std::vector<std::pair<std::string, std::vector<DetailRow>>> details;
    std::vector<MarkerRow> markers;
    std::vector<SummaryRow> summary;
};

/// Round to the 6-significant-digit representation written to CSV, so that
/// summaries recomputed from detail files agree with the stored summary.
double round_6sig(double v);
std::string format_6sig(double v);

/// Mean APs per (task, descriptor, variant, subvariant) plus the per-task
/// bar value (mean of its variant means).
void summarize(ResultsReport& report);

/// Emit results/<descriptor>/<task>.csv, summary.csv and plotdata.csv with a
/// fixed column order, 6-significant-digit decimals and LF line endings.
void write_results(const ResultsReport& report, const std::filesystem::path& dir);

/// Parse detail CSVs back (used by the report command).
std::vector<std::pair<std::string, std::vector<DetailRow>>>
read_detail_results(const std::filesystem::path& dir);

// ---- descriptor and model serialization -----------------------------------

void write_descriptors_csv(const std::filesystem::path& path,
                           const std::vector<std::string>& ids,
                           const Eigen::MatrixXd& values);

/// Raw block: one text header line "family D count", then little-endian
/// 32-bit floats (real families) or packed bits (binary families).
void write_descriptors_bin(const std::filesystem::path& path, DescriptorFamily family,
                           const Eigen::MatrixXd& values,
                           const std::vector<BriefDescriptor>& bits);
struct DescriptorBlock
{
    DescriptorFamily family;
    Eigen::MatrixXd values;
    std::vector<BriefDescriptor> bits;
};
DescriptorBlock read_descriptors_bin(const std::filesystem::path& path);

void write_zca(const std::filesystem::path& path, const ZcaModel& model);
ZcaModel read_zca(const std::filesystem::path& path);

} // namespace patchbench
