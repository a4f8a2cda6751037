#include "patchbench/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "patchbench/errors.hpp"
#include "patchbench/parallel.hpp"

namespace patchbench {

namespace {

std::uint64_t patch_key(const PatchRef& p)
{
    return (static_cast<std::uint64_t>(p.seq) << 40) ^
           (static_cast<std::uint64_t>(p.group) << 8) ^
           static_cast<std::uint64_t>(p.image);
}

} // namespace

DescriptorStore compute_descriptor_store(const PatchCorpus& corpus,
                                         DescriptorFamily family, int threads)
{
    DescriptorStore store;
    store.family = family;
    store.seq_base.resize(corpus.sequences.size() + 1, 0);
    for (std::size_t s = 0; s < corpus.sequences.size(); ++s)
        store.seq_base[s + 1] = store.seq_base[s] + corpus.sequences[s].group_count();

    const int total_rows = store.seq_base.back() * 18;
    const bool binary = descriptor_is_binary(family);
    if (binary)
        store.bits.resize(total_rows);
    else
        store.values.resize(total_rows, descriptor_dimension(family));

    static const BriefPattern pattern = make_brief_pattern();

    parallel_for(static_cast<int>(corpus.sequences.size()), threads, [&](int s) {
        const SequencePatches& sp = corpus.sequences[s];
        for (int g = 0; g < sp.group_count(); ++g)
            for (int v = 0; v < 3; ++v)
                for (int i = 0; i < 6; ++i) {
                    const Patch& patch =
                        i == 0 ? sp.ref[g] : sp.targets[v][g * 5 + (i - 1)];
                    const int row = (store.seq_base[s] + g) * 18 + v * 6 + i;
                    if (binary)
                        store.bits[row] = brief(patch, pattern);
                    else {
                        switch (family) {
                        case DescriptorFamily::MStd:
                            store.values.row(row) = mstd(patch);
                            break;
                        case DescriptorFamily::Resz:
                            store.values.row(row) = resz(patch);
                            break;
                        case DescriptorFamily::Sift:
                            store.values.row(row) = sift(patch);
                            break;
                        case DescriptorFamily::RootSift:
                            store.values.row(row) = rootsift(patch);
                            break;
                        default:
                            break;
                        }
                    }
                }
    });
    return store;
}

DescriptorStore apply_post_store(const DescriptorStore& store, const ZcaModel& model)
{
    if (descriptor_is_binary(store.family))
        throw std::invalid_argument("apply_post_store: binary descriptors are not post-processed");
    DescriptorStore out;
    out.family = store.family;
    out.seq_base = store.seq_base;
    out.values = apply_post_rows(store.values, model);
    return out;
}

Eigen::MatrixXd gather_rows(const DescriptorStore& store, const PatchCorpus& corpus,
                            std::span<const int> seqs)
{
    int rows = 0;
    for (int s : seqs)
        rows += corpus.sequences[s].group_count() * 18;
    Eigen::MatrixXd out(rows, store.values.cols());
    int at = 0;
    for (int s : seqs) {
        const int n = corpus.sequences[s].group_count() * 18;
        out.middleRows(at, n) = store.values.middleRows(store.seq_base[s] * 18, n);
        at += n;
    }
    return out;
}

Eigen::MatrixXd Scorer::score_block(NoiseLevel v, std::span<const PatchRef> rows,
                                    std::span<const PatchRef> cols) const
{
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = score(v, rows[i], cols[j]);
    return out;
}

double DescriptorScorer::score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const
{
    if (descriptor_is_binary(store_->family))
        return -static_cast<double>(
            hamming_distance(store_->bits[store_->row(v, a)], store_->bits[store_->row(v, b)]));
    return -(store_->values.row(store_->row(v, a)) - store_->values.row(store_->row(v, b)))
                .norm();
}

Eigen::MatrixXd DescriptorScorer::score_block(NoiseLevel v, std::span<const PatchRef> rows,
                                              std::span<const PatchRef> cols) const
{
    if (descriptor_is_binary(store_->family)) {
        Eigen::MatrixXd out(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const BriefDescriptor& a = store_->bits[store_->row(v, rows[i])];
            for (std::size_t j = 0; j < cols.size(); ++j)
                out(i, j) = -static_cast<double>(
                    hamming_distance(a, store_->bits[store_->row(v, cols[j])]));
        }
        return out;
    }

    Eigen::MatrixXd a(rows.size(), store_->values.cols());
    Eigen::MatrixXd b(cols.size(), store_->values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        a.row(i) = store_->values.row(store_->row(v, rows[i]));
    for (std::size_t j = 0; j < cols.size(); ++j)
        b.row(j) = store_->values.row(store_->row(v, cols[j]));

    // Negated L2 via the inner-product expansion; clamp tiny negatives from
    // cancellation before the square root.
    const Eigen::VectorXd a2 = a.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = b.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * (a * b.transpose())).colwise() + a2;
    d2.rowwise() += b2.transpose();
    return -d2.cwiseMax(0.0).cwiseSqrt();
}

double OracleScorer::score(NoiseLevel, const PatchRef& a, const PatchRef& b) const
{
    return (a.seq == b.seq && a.group == b.group) ? 1.0 : 0.0;
}

double RandomScorer::score(NoiseLevel v, const PatchRef& a, const PatchRef& b) const
{
    const std::uint64_t ka = patch_key(a);
    const std::uint64_t kb = patch_key(b);
    const std::uint64_t h = derive_seed(seed_, std::min(ka, kb), std::max(ka, kb),
                                        static_cast<std::uint64_t>(variant_index(v)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

const char* neg_source_name(NegSource src)
{
    return src == NegSource::SameSeq ? "SameSeq" : "DiffSeq";
}

VerificationSet build_verification(const PatchCorpus& corpus, std::span<const int> seqs,
                                   NoiseLevel variant, NegSource neg_source, int n_pos,
                                   int n_neg, Rng& rng)
{
    if (n_pos < 1 || n_neg < 0)
        throw std::invalid_argument("build_verification: bad pair counts");

    std::vector<int> pos_seqs; // sequences with at least one group
    std::vector<int> multi_seqs; // sequences with at least two groups
    for (int s : seqs) {
        const int n = corpus.sequences[s].group_count();
        if (n >= 1)
            pos_seqs.push_back(s);
        if (n >= 2)
            multi_seqs.push_back(s);
    }
    if (pos_seqs.empty())
        throw EvalError("build_verification: corpus has no patch groups");
    if (neg_source == NegSource::SameSeq && multi_seqs.empty())
        throw EvalError("build_verification: SameSeq negatives need a sequence with >= 2 groups");
    if (neg_source == NegSource::DiffSeq && pos_seqs.size() < 2)
        throw EvalError("build_verification: DiffSeq negatives need >= 2 sequences");

    VerificationSet set;
    set.variant = variant;
    set.neg_source = neg_source;
    set.pairs.reserve(n_pos + n_neg);

    for (int i = 0; i < n_pos; ++i) {
        const int s = pos_seqs[rng.uniform_int(static_cast<int>(pos_seqs.size()))];
        const int g = rng.uniform_int(corpus.sequences[s].group_count());
        const int k = 1 + rng.uniform_int(5);
        set.pairs.push_back({{s, g, 0}, {s, g, k}, +1});
    }

    for (int i = 0; i < n_neg; ++i) {
        if (neg_source == NegSource::SameSeq) {
            const int s = multi_seqs[rng.uniform_int(static_cast<int>(multi_seqs.size()))];
            const int n = corpus.sequences[s].group_count();
            const int g1 = rng.uniform_int(n);
            int g2 = rng.uniform_int(n - 1);
            if (g2 >= g1)
                ++g2;
            set.pairs.push_back(
                {{s, g1, rng.uniform_int(6)}, {s, g2, rng.uniform_int(6)}, -1});
        } else {
            const int i1 = rng.uniform_int(static_cast<int>(pos_seqs.size()));
            int i2 = rng.uniform_int(static_cast<int>(pos_seqs.size()) - 1);
            if (i2 >= i1)
                ++i2;
            const int s1 = pos_seqs[i1];
            const int s2 = pos_seqs[i2];
            set.pairs.push_back({{s1, rng.uniform_int(corpus.sequences[s1].group_count()),
                                  rng.uniform_int(6)},
                                 {s2, rng.uniform_int(corpus.sequences[s2].group_count()),
                                  rng.uniform_int(6)},
                                 -1});
        }
    }
    return set;
}

double run_verification(const VerificationSet& set, const Scorer& scorer)
{
    std::vector<double> scores(set.pairs.size());
    std::vector<std::int8_t> labels(set.pairs.size());
    for (std::size_t i = 0; i < set.pairs.size(); ++i) {
        scores[i] = scorer.score(set.variant, set.pairs[i].a, set.pairs[i].b);
        labels[i] = set.pairs[i].label;
    }
    return average_precision(sort_by_score(scores, labels));
}

double run_matching(const PatchCorpus& corpus, int seq, NoiseLevel variant, int target,
                    const Scorer& scorer)
{
    const int n = corpus.sequences[seq].group_count();
    if (n < 1)
        throw EvalError("run_matching: empty patch lists");

    std::vector<PatchRef> refs(n), targets(n);
    for (int g = 0; g < n; ++g) {
        refs[g] = {seq, g, 0};
        targets[g] = {seq, g, target + 1};
    }

    const Eigen::MatrixXd scores = scorer.score_block(variant, refs, targets);

    std::vector<double> best_scores(n);
    std::vector<std::int8_t> labels(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (scores(i, j) > scores(i, best))
                best = j;
        best_scores[i] = scores(i, best);
        labels[i] = best == i ? +1 : -1;
    }
    RankedLabels ranked = sort_by_score(best_scores, labels);
    ranked.positive_count = n; // maximum recall is always 100%
    return average_precision(ranked);
}

std::vector<RetrievalCollection> build_retrieval(const PatchCorpus& corpus,
                                                 std::span<const int> seqs,
                                                 NoiseLevel variant, int n_queries,
                                                 int n_distractors, Rng& rng)
{
    if (n_queries < 1 || n_distractors < 0)
        throw std::invalid_argument("build_retrieval: bad counts");

    std::vector<int> pos_seqs;
    for (int s : seqs)
        if (corpus.sequences[s].group_count() >= 1)
            pos_seqs.push_back(s);
    if (pos_seqs.size() < 2)
        throw EvalError("build_retrieval: need >= 2 sequences");

    std::vector<RetrievalCollection> out;
    out.reserve(n_queries);
    for (int q = 0; q < n_queries; ++q) {
        const int si = rng.uniform_int(static_cast<int>(pos_seqs.size()));
        const int s = pos_seqs[si];
        const int n = corpus.sequences[s].group_count();
        const int g = rng.uniform_int(n);

        RetrievalCollection coll;
        coll.variant = variant;
        coll.query = {s, g, 0};
        coll.pool.reserve(static_cast<std::size_t>(n) * 5 + n_distractors);
        coll.labels.reserve(coll.pool.capacity());

        // Every target patch of the query's sequence enters the pool: the 5
        // corresponding ones as positives, the rest ignored.
        for (int gp = 0; gp < n; ++gp)
            for (int k = 1; k <= 5; ++k) {
                coll.pool.push_back({s, gp, k});
                coll.labels.push_back(gp == g ? +1 : 0);
            }

        for (int d = 0; d < n_distractors; ++d) {
            int oi = rng.uniform_int(static_cast<int>(pos_seqs.size()) - 1);
            if (oi >= si)
                ++oi;
            const int so = pos_seqs[oi];
            coll.pool.push_back(
                {so, rng.uniform_int(corpus.sequences[so].group_count()),
                 1 + rng.uniform_int(5)});
            coll.labels.push_back(-1);
        }
        out.push_back(std::move(coll));
    }
    return out;
}

double run_retrieval(const RetrievalCollection& collection, const Scorer& scorer)
{
    const PatchRef query[] = {collection.query};
    const Eigen::MatrixXd scores =
        scorer.score_block(collection.variant, query, collection.pool);
    std::vector<double> s(scores.cols());
    for (Eigen::Index j = 0; j < scores.cols(); ++j)
        s[j] = scores(0, j);
    RankedLabels ranked = sort_by_score(s, collection.labels);
    ranked.positive_count = 5;
    return average_precision(ranked);
}

} // namespace patchbench
