#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skillgraph {

class EmbeddingCache;

// One structured failure: what was asked, what the skill answered, what the
// right answer was, and the diagnosed lesson.
struct FailureRecord {
    std::string question;
    std::string image_ref;
    std::string predicted;
    std::string gold;
    std::string lesson;
};

// A reasoning skill: trigger condition, strategy text, outcome counters,
// bounded failure buffer, version counter.
struct Skill {
    std::int64_t id = 0;
    std::string trigger;
    std::string strategy;
    std::uint64_t n_succ = 0;
    std::uint64_t n_use = 0;
    std::deque<FailureRecord> failures;
    std::uint64_t version = 1;

    // Running accuracy estimate; 0 while unused.
    double accuracy() const { return n_use == 0 ? 0.0 : static_cast<double>(n_succ) / static_cast<double>(n_use); }
};

// Persistent repository of skills. Iteration order is ascending id; ids are
// never reused. Mutations of skill text (add, modify) bump text_revision(),
// which invalidates any embedding cache built against an older revision.
class SkillBank {
public:
    explicit SkillBank(std::size_t failure_capacity = 16);

    std::size_t size() const { return skills_.size(); }
    bool empty() const { return skills_.empty(); }
    std::size_t failure_capacity() const { return failure_capacity_; }
    std::uint64_t text_revision() const { return text_revision_; }

    bool contains(std::int64_t id) const { return skills_.count(id) != 0; }
    const Skill& skill(std::int64_t id) const;
    const std::map<std::int64_t, Skill>& skills() const { return skills_; }

    // Appends a fresh skill (version 1, zero counters); returns its id.
    std::int64_t add_skill(const std::string& trigger, const std::string& strategy);

    // Replaces trigger/strategy in place, bumps the version, empties the
    // failure buffer, and keeps the cumulative counters.
    void modify_skill(std::int64_t id, const std::string& trigger, const std::string& strategy);

    // Attributes one use (and optionally one success); returns updated accuracy.
    double record_outcome(std::int64_t id, bool correct);

    // Appends a failure record, evicting the oldest when the buffer is full.
    void push_failure(std::int64_t id, FailureRecord record);

    // Ids of skills whose buffer has reached the threshold.
    std::vector<std::int64_t> hard_skills(std::size_t tau_f) const;

    // Ranked retrieval: top n skill ids by descending cosine similarity
    // between the query embedding and the cache rows, ties by ascending id.
    std::vector<std::int64_t> retrieve_top_n(const std::vector<double>& query_embedding, std::size_t n,
                                             const EmbeddingCache& cache) const;

    void save(const std::string& path) const;
    std::string to_json_string() const;
    static SkillBank load(const std::string& path, std::size_t failure_capacity = 16);
    static SkillBank from_json_string(const std::string& text, std::size_t failure_capacity = 16);

private:
    Skill& mutable_skill(std::int64_t id);

    std::map<std::int64_t, Skill> skills_;
    std::int64_t next_id_ = 0;
    std::size_t failure_capacity_;
    std::uint64_t text_revision_ = 0;
};

} // namespace skillgraph
