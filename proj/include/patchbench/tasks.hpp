#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "patchbench/descriptors.hpp"
#include "patchbench/metrics.hpp"
#include "patchbench/patch_extraction.hpp"
#include "patchbench/postproc.hpp"
#include "patchbench/rng.hpp"

namespace patchbench {

/// Identifies a patch in a corpus: sequence index, group index and image
/// index (0 = reference, 1..5 = targets). Together with a noise variant
/// this addresses one concrete patch.
struct PatchRef
{
    int seq = 0;
    int group = 0;
    int image = 0;

    bool operator==(const PatchRef&) const = default;
};

/// All descriptors of one family over a corpus, stored as flat rows:
/// row = (seq_base + group) * 18 + variant * 6 + image. Reference patches
/// are replicated per variant so indexing stays uniform.
struct DescriptorStore
{
    DescriptorFamily family = DescriptorFamily::Sift;
    Eigen::MatrixXd values;            // real families
    std::vector<BriefDescriptor> bits; // binary families
    std::vector<int> seq_base;         // group-count prefix sums

    int row(NoiseLevel v, const PatchRef& p) const
    {
        return (seq_base[p.seq] + p.group) * 18 + variant_index(v) * 6 + p.image;
    }
};

/// Compute a descriptor store over the whole corpus. Work is sharded per
/// sequence; output is independent of the thread count.
DescriptorStore compute_descriptor_store(const PatchCorpus& corpus,
                                         DescriptorFamily family, int threads = 1);

/// Post-process a real-valued store through a ZCA model (whiten, power law,
/// L2). Throws std::invalid_argument for binary stores.
DescriptorStore apply_post_store(const DescriptorStore& store, const ZcaModel& model);

/// Gather all rows of the given sequences into one sample matrix (used to
/// fit ZCA on the fitting split).
Eigen::MatrixXd gather_rows(const DescriptorStore& store, const PatchCorpus& corpus,
                            std::span<const int> seqs);

/// Confidence oracle consumed by the protocols: higher score means the two
/// patches are more likely to correspond. Descriptor-backed scorers negate
/// the descriptor distance; anything producing scores plugs in.
class Scorer
{
public:
    virtual ~Scorer() = default;
    virtual double score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const = 0;

    /// Score matrix rows x cols; the default loops over score().
    virtual Eigen::MatrixXd score_block(NoiseLevel v, std::span<const PatchRef> rows,
                                        std::span<const PatchRef> cols) const;
};

class DescriptorScorer : public Scorer
{
public:
    explicit DescriptorScorer(const DescriptorStore& store) : store_(&store) {}
    double score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const override;
    Eigen::MatrixXd score_block(NoiseLevel v, std::span<const PatchRef> rows,
                                std::span<const PatchRef> cols) const override;

private:
    const DescriptorStore* store_;
};

/// Ground-truth-identity oracle: corresponding patches score 1, everything
/// else 0.
class OracleScorer : public Scorer
{
public:
    double score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const override;
};

/// Deterministic null model: i.i.d.-looking scores hashed from the pair.
class RandomScorer : public Scorer
{
public:
    explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
    double score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const override;

private:
    std::uint64_t seed_;
};

// ---- verification -----------------------------------------------------------

enum class NegSource
{
    SameSeq,
    DiffSeq,
};

const char* neg_source_name(NegSource src);

struct VerificationPair
{
    PatchRef a;
    PatchRef b;
    std::int8_t label = -1;
};

struct VerificationSet
{
    NoiseLevel variant = NoiseLevel::Easy;
    NegSource neg_source = NegSource::DiffSeq;
    std::vector<VerificationPair> pairs;
};

/// Sample positive pairs from corresponding patch groups and negatives from
/// non-corresponding patches (same or different sequence). Sampling is with
/// replacement; throws EvalError when the corpus cannot form the requested
/// kind of pair at all.
VerificationSet build_verification(const PatchCorpus& corpus, std::span<const int> seqs,
                                   NoiseLevel variant, NegSource neg_source, int n_pos,
                                   int n_neg, Rng& rng);

/// AP of the score-ranked pair list.
double run_verification(const VerificationSet& set, const Scorer& scorer);

// ---- matching ---------------------------------------------------------------

/// Match the reference patches of a sequence against target image k under
/// one noise variant: nearest neighbor by score (ties to the lowest index),
/// AP with the positive total pinned to N.
double run_matching(const PatchCorpus& corpus, int seq, NoiseLevel variant,
                    int target, const Scorer& scorer);

// ---- retrieval --------------------------------------------------------------

struct RetrievalCollection
{
    NoiseLevel variant = NoiseLevel::Easy;
    PatchRef query;
    std::vector<PatchRef> pool;
    std::vector<std::int8_t> labels; // +1 corresponding, 0 same-sequence, -1 distractor
};

/// Build retrieval collections: a query reference patch, its 5 corresponding
/// target patches (+1), all other same-sequence target patches (0) and
/// n_distractors cross-sequence target patches (-1).
std::vector<RetrievalCollection> build_retrieval(const PatchCorpus& corpus,
                                                 std::span<const int> seqs,
                                                 NoiseLevel variant, int n_queries,
                                                 int n_distractors, Rng& rng);

/// AP of the score-ranked pool, truncated at the 5 positives.
double run_retrieval(const RetrievalCollection& collection, const Scorer& scorer);

} // namespace patchbench
