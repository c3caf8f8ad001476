#include "skillgraph/skill_bank.hpp"

#include "skillgraph/embedding.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skillgraph {

using ordered_json = nlohmann::ordered_json;

SkillBank::SkillBank(std::size_t failure_capacity) : failure_capacity_(failure_capacity) {
    if (failure_capacity_ == 0) throw std::invalid_argument("SkillBank: failure capacity must be >= 1");
}

const Skill& SkillBank::skill(std::int64_t id) const {
    auto it = skills_.find(id);
    if (it == skills_.end()) throw std::out_of_range("SkillBank: unknown skill id " + std::to_string(id));
    return it->second;
}

Skill& SkillBank::mutable_skill(std::int64_t id) {
    auto it = skills_.find(id);
    if (it == skills_.end()) throw std::out_of_range("SkillBank: unknown skill id " + std::to_string(id));
    return it->second;
}

std::int64_t SkillBank::add_skill(const std::string& trigger, const std::string& strategy) {
    if (trigger.empty()) throw std::invalid_argument("SkillBank::add_skill: empty trigger");
    if (strategy.empty()) throw std::invalid_argument("SkillBank::add_skill: empty strategy");
    Skill s;
    s.id = next_id_++;
    s.trigger = trigger;
    s.strategy = strategy;
    skills_.emplace(s.id, std::move(s));
    ++text_revision_;
    return next_id_ - 1;
}

void SkillBank::modify_skill(std::int64_t id, const std::string& trigger, const std::string& strategy) {
    if (trigger.empty()) throw std::invalid_argument("SkillBank::modify_skill: empty trigger");
    if (strategy.empty()) throw std::invalid_argument("SkillBank::modify_skill: empty strategy");
    Skill& s = mutable_skill(id);
    s.trigger = trigger;
    s.strategy = strategy;
    s.version += 1;
    s.failures.clear();
    ++text_revision_;
}

double SkillBank::record_outcome(std::int64_t id, bool correct) {
    Skill& s = mutable_skill(id);
    s.n_use += 1;
    if (correct) s.n_succ += 1;
    return s.accuracy();
}

void SkillBank::push_failure(std::int64_t id, FailureRecord record) {
    Skill& s = mutable_skill(id);
    s.failures.push_back(std::move(record));
    while (s.failures.size() > failure_capacity_) s.failures.pop_front();
}

std::vector<std::int64_t> SkillBank::hard_skills(std::size_t tau_f) const {
    if (tau_f == 0) throw std::invalid_argument("SkillBank::hard_skills: tau_f must be >= 1");
    std::vector<std::int64_t> out;
    for (const auto& [id, s] : skills_) {
        if (s.failures.size() >= tau_f) out.push_back(id);
    }
    return out;
}

std::vector<std::int64_t> SkillBank::retrieve_top_n(const std::vector<double>& query_embedding, std::size_t n,
                                                    const EmbeddingCache& cache) const {
    if (cache.stale(*this)) throw std::runtime_error("SkillBank::retrieve_top_n: embedding cache is stale");
    if (n > skills_.size())
        throw std::invalid_argument("SkillBank::retrieve_top_n: requested " + std::to_string(n) +
                                    " skills from a bank of " + std::to_string(skills_.size()));
    struct Scored {
        double sim;
        std::int64_t id;
    };
    std::vector<Scored> scored;
    scored.reserve(cache.skill_ids().size());
    for (std::size_t r = 0; r < cache.skill_ids().size(); ++r) {
        scored.push_back({cosine_similarity(query_embedding, cache.row(r)), cache.skill_ids()[r]});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });
    std::vector<std::int64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(scored[i].id);
    return out;
}

std::string SkillBank::to_json_string() const {
    ordered_json doc;
    doc["skills"] = ordered_json::array();
    for (const auto& [id, s] : skills_) {
        ordered_json js;
        js["id"] = s.id;
        js["trigger"] = s.trigger;
        js["strategy"] = s.strategy;
        js["n_succ"] = s.n_succ;
        js["n_use"] = s.n_use;
        js["version"] = s.version;
        ordered_json failures = ordered_json::array();
        for (const FailureRecord& f : s.failures) {
            ordered_json jf;
            jf["question"] = f.question;
            jf["image_ref"] = f.image_ref;
            jf["predicted"] = f.predicted;
            jf["gold"] = f.gold;
            jf["lesson"] = f.lesson;
            failures.push_back(std::move(jf));
        }
        js["failures"] = std::move(failures);
        doc["skills"].push_back(std::move(js));
    }
    return doc.dump(2) + "\n";
}

void SkillBank::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("SkillBank::save: cannot open " + path);
    out << to_json_string();
    if (!out) throw std::runtime_error("SkillBank::save: write failed for " + path);
}

namespace {

[[noreturn]] void bank_error(const std::string& where, const std::string& what) {
    throw std::runtime_error("skill bank: " + where + ": " + what);
}

std::string field_str(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) bank_error(where, std::string("missing field \"") + key + "\"");
    if (!obj[key].is_string()) bank_error(where + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

std::uint64_t field_u64(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) bank_error(where, std::string("missing field \"") + key + "\"");
    if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer())
        bank_error(where + "." + key, "expected a non-negative integer");
    if (obj[key].is_number_integer() && obj[key].get<std::int64_t>() < 0)
        bank_error(where + "." + key, "expected a non-negative integer");
    return obj[key].get<std::uint64_t>();
}

} // namespace

SkillBank SkillBank::from_json_string(const std::string& text, std::size_t failure_capacity) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("skill bank: malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("skills") || !doc["skills"].is_array())
        bank_error("top level", "expected an object with a \"skills\" array");

    SkillBank bank(failure_capacity);
    std::size_t idx = 0;
    for (const auto& js : doc["skills"]) {
        const std::string where = "skills[" + std::to_string(idx) + "]";
        if (!js.is_object()) bank_error(where, "expected an object");
        Skill s;
        if (!js.contains("id")) bank_error(where, "missing field \"id\"");
        s.id = js["id"].get<std::int64_t>();
        if (s.id < 0) bank_error(where + ".id", "negative id");
        s.trigger = field_str(js, "trigger", where);
        s.strategy = field_str(js, "strategy", where);
        if (s.trigger.empty()) bank_error(where + ".trigger", "empty");
        if (s.strategy.empty()) bank_error(where + ".strategy", "empty");
        s.n_succ = field_u64(js, "n_succ", where);
        s.n_use = field_u64(js, "n_use", where);
        if (s.n_succ > s.n_use) bank_error(where, "n_succ exceeds n_use");
        s.version = field_u64(js, "version", where);
        if (s.version < 1) bank_error(where + ".version", "must be >= 1");
        if (!js.contains("failures") || !js["failures"].is_array()) bank_error(where, "missing \"failures\" array");
        std::size_t fidx = 0;
        for (const auto& jf : js["failures"]) {
            const std::string fwhere = where + ".failures[" + std::to_string(fidx) + "]";
            if (!jf.is_object()) bank_error(fwhere, "expected an object");
            FailureRecord f;
            f.question = field_str(jf, "question", fwhere);
            f.image_ref = field_str(jf, "image_ref", fwhere);
            f.predicted = field_str(jf, "predicted", fwhere);
            f.gold = field_str(jf, "gold", fwhere);
            f.lesson = field_str(jf, "lesson", fwhere);
            s.failures.push_back(std::move(f));
            ++fidx;
        }
        if (s.failures.size() > failure_capacity)
            bank_error(where, "failure buffer longer than capacity " + std::to_string(failure_capacity));
        if (bank.skills_.count(s.id)) bank_error(where, "duplicate id " + std::to_string(s.id));
        bank.next_id_ = std::max(bank.next_id_, s.id + 1);
        bank.skills_.emplace(s.id, std::move(s));
        ++idx;
    }
    return bank;
}

SkillBank SkillBank::load(const std::string& path, std::size_t failure_capacity) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("SkillBank::load: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str(), failure_capacity);
}

} // namespace skillgraph
