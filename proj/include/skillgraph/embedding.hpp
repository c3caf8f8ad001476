#pragma once

#include "skillgraph/matrix.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace skillgraph {

class SkillBank;
struct Skill;

// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// Text embedding provider. The reference implementation is a feature-hashing
// embedder; a real sentence encoder can be substituted behind the same
// interface (see HttpEmbedder).
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::size_t dim() const = 0;
    // Returns a unit-norm vector of length dim(), or all zeros for token-free text.
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Deterministic dependency-free embedder: split on ASCII whitespace, FNV-1a
// each token, add +-1 (hash sign bit) into component hash % D, L2-normalize.
class HashingEmbedder final : public TextEmbedder {
public:
    explicit HashingEmbedder(std::size_t dim);
    std::size_t dim() const override { return dim_; }
    std::vector<double> embed(const std::string& text) const override;

private:
    std::size_t dim_;
};

// Node feature for a skill: embedding of "<trigger> <strategy>" (Eq. 1 style
// concatenation with a single ASCII space).
std::vector<double> node_feature(const TextEmbedder& embedder, const Skill& skill);

// Cached skill embeddings, one row per skill in ascending-id order.
// Freshness is tracked against the bank's text revision counter: any
// trigger/strategy mutation or skill creation bumps the revision, which
// makes every cache built earlier stale immediately.
class EmbeddingCache {
public:
    EmbeddingCache() = default;

    const Matrix& matrix() const { return matrix_; }
    const std::vector<std::int64_t>& skill_ids() const { return skill_ids_; }

    bool stale(const SkillBank& bank) const;
    void invalidate() { built_revision_ = kInvalid; }

    // Row index for a skill id; throws if absent.
    std::size_t row_of(std::int64_t skill_id) const;
    std::vector<double> row(std::size_t index) const;

    static EmbeddingCache build(const SkillBank& bank, const TextEmbedder& embedder);

private:
    static constexpr std::uint64_t kInvalid = ~0ULL;
    Matrix matrix_;
    std::vector<std::int64_t> skill_ids_;
    std::uint64_t built_revision_ = kInvalid;
};

EmbeddingCache rebuild_cache(const SkillBank& bank, const TextEmbedder& embedder);

// Cosine similarity treating zero vectors as similarity 0.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

} // namespace skillgraph
