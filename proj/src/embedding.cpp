#include "skillgraph/embedding.hpp"

#include "skillgraph/skill_bank.hpp"

#include <cmath>
#include <stdexcept>

namespace skillgraph {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw std::invalid_argument("HashingEmbedder: dim must be >= 1");
}

std::vector<double> HashingEmbedder::embed(const std::string& text) const {
    std::vector<double> v(dim_, 0.0);
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    while (i < n) {
        while (i < n && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < n && !is_space(text[i])) ++i;
        if (i > start) {
            const std::uint64_t h = fnv1a64(std::string_view(text).substr(start, i - start));
            const double sign = (h >> 63) ? -1.0 : 1.0;
            v[h % dim_] += sign;
        }
    }
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

std::vector<double> node_feature(const TextEmbedder& embedder, const Skill& skill) {
    return embedder.embed(skill.trigger + " " + skill.strategy);
}

bool EmbeddingCache::stale(const SkillBank& bank) const {
    return built_revision_ != bank.text_revision();
}

std::size_t EmbeddingCache::row_of(std::int64_t skill_id) const {
    for (std::size_t i = 0; i < skill_ids_.size(); ++i) {
        if (skill_ids_[i] == skill_id) return i;
    }
    throw std::out_of_range("EmbeddingCache: unknown skill id " + std::to_string(skill_id));
}

std::vector<double> EmbeddingCache::row(std::size_t index) const {
    if (index >= matrix_.rows) throw std::out_of_range("EmbeddingCache: row out of range");
    std::vector<double> r(matrix_.cols);
    for (std::size_t j = 0; j < matrix_.cols; ++j) r[j] = matrix_.at(index, j);
    return r;
}

EmbeddingCache EmbeddingCache::build(const SkillBank& bank, const TextEmbedder& embedder) {
    EmbeddingCache cache;
    cache.matrix_ = Matrix(bank.size(), embedder.dim());
    cache.skill_ids_.reserve(bank.size());
    std::size_t r = 0;
    for (const auto& [id, skill] : bank.skills()) {
        const auto feat = node_feature(embedder, skill);
        for (std::size_t j = 0; j < feat.size(); ++j) cache.matrix_.at(r, j) = feat[j];
        cache.skill_ids_.push_back(id);
        ++r;
    }
    cache.built_revision_ = bank.text_revision();
    return cache;
}

EmbeddingCache rebuild_cache(const SkillBank& bank, const TextEmbedder& embedder) {
    return EmbeddingCache::build(bank, embedder);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace skillgraph
