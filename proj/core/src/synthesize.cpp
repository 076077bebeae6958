#include "combsynth/synthesize.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

#include "json.hpp"

#include "combsynth/errors.hpp"
#include "combsynth/eval.hpp"
#include "combsynth/logging.hpp"
#include "combsynth/preprocess.hpp"

namespace combsynth {

const char* kToolVersion = "0.1.0";

namespace {

int effective_pool(const SynthConfig& config) {
    if (config.pool_size > 0) return config.pool_size;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Length-prefixed so pairs containing any byte sequence key uniquely.
std::string memo_key(const std::string& y1, const std::string& y2) {
    return std::to_string(y1.size()) + ':' + y1 + y2;
}

// Runs f on y1 ++ y2, remembering failures as well as outputs.
const std::optional<std::string>& rerun_output(const CommandHandle& f, const std::string& y1,
                                               const std::string& y2, EvalMemo* memo) {
    static thread_local std::optional<std::string> scratch;
    auto run = [&]() -> std::optional<std::string> {
        try {
            return run_command(f, y1 + y2);
        } catch (const ExecError& e) {
            log_debug(std::string("rerun check failed: ") + e.what());
            return std::nullopt;
        }
    };
    if (!memo) {
        scratch = run();
        return scratch;
    }
    auto [it, inserted] = memo->rerun_out.try_emplace(memo_key(y1, y2));
    if (inserted) it->second = run();
    return it->second;
}

bool has_universal_domain(const Combiner& c) {
    return c.op == Op::concat || c.op == Op::first || c.op == Op::second;
}

}  // namespace

bool is_plausible(const Combiner& c, const Observation& obs, const CommandHandle* f,
                  EvalMemo* memo) {
    if (c.op == Op::rerun) {
        if (!f) return false;
        const std::optional<std::string>& out = rerun_output(*f, obs.y1, obs.y2, memo);
        return out.has_value() && *out == obs.y12;
    }
    try {
        if (!in_domain(c, obs.y1) || !in_domain(c, obs.y2)) return false;
        return eval(c, obs.y1, obs.y2, f) == obs.y12;
    } catch (const DomainError&) {
        return false;
    } catch (const OverflowError&) {
        return false;
    } catch (const ExecError& e) {
        log_debug(std::string("candidate dropped on execution failure: ") + e.what());
        return false;
    }
}

CandidateSet filter_candidates(const CandidateSet& candidates,
                               const std::vector<Observation>& observations,
                               const CommandHandle* f, EvalMemo* memo) {
    CandidateSet out;
    out.max_size = candidates.max_size;
    out.members.reserve(candidates.members.size());
    for (const Combiner& c : candidates.members) {
        bool keep = true;
        for (const Observation& obs : observations) {
            if (!is_plausible(c, obs, f, memo)) {
                keep = false;
                break;
            }
        }
        if (keep) out.members.push_back(c);
    }
    return out;
}

CandidateSet filter_candidates(const CommandHandle& f, const CandidateSet& candidates,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               int pool_size) {
    std::vector<std::optional<Observation>> raw = observe_many(f, pairs, pool_size);
    std::vector<Observation> observations;
    observations.reserve(raw.size());
    size_t failures = 0;
    for (auto& r : raw) {
        if (r)
            observations.push_back(std::move(*r));
        else
            failures++;
    }
    if (failures > 0)
        log_warn(std::to_string(failures) + " of " + std::to_string(raw.size()) +
                 " input pairs failed to observe and were dropped");
    EvalMemo memo;
    return filter_candidates(candidates, observations, &f, &memo);
}

bool making_progress(const std::vector<size_t>& history, int no_progress_rounds,
                     int min_rounds) {
    int rounds = static_cast<int>(history.size()) - 1;
    int needed = std::max(min_rounds, no_progress_rounds);
    if (rounds < needed) return true;
    for (size_t i = history.size() - static_cast<size_t>(no_progress_rounds);
         i < history.size(); i++) {
        if (history[i] != history[i - 1]) return true;
    }
    return false;
}

int index_best_mutation(const CandidateSet& candidates,
                        const std::vector<std::vector<Observation>>& sets,
                        const CommandHandle* f, EvalMemo* memo) {
    int best = 1;
    size_t best_eliminated = 0;
    for (size_t j = 0; j < sets.size(); j++) {
        size_t eliminated = 0;
        for (const Combiner& c : candidates.members) {
            for (const Observation& obs : sets[j]) {
                if (!is_plausible(c, obs, f, memo)) {
                    eliminated++;
                    break;
                }
            }
        }
        if (eliminated > best_eliminated) {
            best_eliminated = eliminated;
            best = static_cast<int>(j) + 1;
        }
    }
    return best;
}

EffectiveInputs get_effective_inputs(const CommandHandle& f, const CandidateSet& candidates,
                                     InputShape seed, const Dictionary& dict,
                                     const SynthConfig& config, Rng& rng, EvalMemo* memo) {
    EffectiveInputs out;
    InputShape shape = seed;
    int pool = effective_pool(config);
    size_t failures = 0;

    for (int m = 1; m <= config.mutation_rounds; m++) {
        std::vector<std::vector<Observation>> sets(12);
        for (int j = 1; j <= 12; j++) {
            InputShape mutated = mutate_shape(shape, j);
            std::vector<std::pair<std::string, std::string>> pairs;
            try {
                pairs = gen_input_pairs(mutated, config.pairs_per_shape, dict, rng);
            } catch (const GenError& e) {
                log_debug(std::string("skipping unsatisfiable shape: ") + e.what());
                continue;
            }
            std::vector<std::optional<Observation>> raw = observe_many(f, pairs, pool);
            for (auto& r : raw) {
                if (!r) {
                    failures++;
                    continue;
                }
                sets[static_cast<size_t>(j) - 1].push_back(*r);
                out.pairs.push_back(r->source_pair);
                out.observations.push_back(std::move(*r));
            }
        }
        int j_best = index_best_mutation(candidates, sets, &f, memo);
        shape = mutate_shape(shape, j_best);
    }

    if (failures > 0)
        log_warn(std::to_string(failures) + " observation(s) failed during input search");
    out.final_shape = shape;
    return out;
}

CompositeCombiner make_composite(const CandidateSet& plausible) {
    CompositeCombiner g;
    std::vector<Combiner> rec, structural, run;
    for (const Combiner& c : plausible.members) {
        switch (op_class(c)) {
            case OpClass::rec: rec.push_back(c); break;
            case OpClass::structural: structural.push_back(c); break;
            case OpClass::run: run.push_back(c); break;
        }
    }
    if (!rec.empty())
        g.members = std::move(rec);
    else if (!structural.empty())
        g.members = std::move(structural);
    else
        g.members = std::move(run);
    std::sort(g.members.begin(), g.members.end(), canonical_less);

    // A member legal on every string subsumes the rest of the chain.
    for (const Combiner& c : g.members) {
        if (has_universal_domain(c)) {
            g.members = {c};
            break;
        }
    }
    return g;
}

std::string format_composite(const CompositeCombiner& g) {
    std::string out;
    for (size_t i = 0; i < g.members.size(); i++) {
        if (i) out += " | ";
        out += format_combiner(g.members[i]);
    }
    return out;
}

CompositeCombiner parse_composite(const std::string& text) {
    CompositeCombiner g;
    size_t start = 0;
    while (start <= text.size()) {
        size_t bar = text.find('|', start);
        std::string piece = text.substr(start, bar == std::string::npos ? bar : bar - start);
        size_t a = piece.find_first_not_of(" \t\n");
        size_t b = piece.find_last_not_of(" \t\n");
        if (a == std::string::npos)
            throw ParseError("empty combiner in composite", start);
        g.members.push_back(parse_combiner(std::string_view(piece).substr(a, b - a + 1)));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    if (g.members.empty()) throw ParseError("empty composite combiner", 0);
    return g;
}

std::string eval_composite(const CompositeCombiner& g, const std::string& y1,
                           const std::string& y2, const CommandHandle* f) {
    for (const Combiner& c : g.members) {
        if (pair_in_domain(c, y1, y2, f)) return eval(c, y1, y2, f);
    }
    throw DomainError("no member of the composite combiner accepts the pair");
}

namespace {

// Queue of seed shapes for successive rounds: literal-derived shapes first,
// the generic default next, fresh random shapes after that.
class SeedQueue {
public:
    SeedQueue(const Literals& lits, Rng& rng) : rng_(rng) {
        std::set<int64_t> seen;
        for (int64_t v : lits.numerics) {
            if (seen.insert(v).second) pending_.push_back(literal_seed_shape(v));
        }
        pending_.push_back(default_seed_shape());
    }

    InputShape next() {
        if (pos_ < pending_.size()) return pending_[pos_++];
        return random_shape(rng_);
    }

private:
    std::vector<InputShape> pending_;
    size_t pos_ = 0;
    Rng& rng_;
};

// One run of the command on a previously seen input, to distinguish "no
// combiner exists" from "the command is not a function of its input".
void warn_if_nondeterministic(const CommandHandle& f, const std::vector<Observation>& obs) {
    if (obs.empty()) return;
    const Observation& o = obs.front();
    try {
        std::string again = run_command(f, o.source_pair.first + o.source_pair.second);
        if (again != o.y12)
            log_warn("command produced different output on a repeated input; "
                     "no combiner can exist for a nondeterministic command");
    } catch (const ExecError&) {
        // Flaky execution is a weaker signal; the empty result already tells
        // the caller synthesis failed.
    }
}

}  // namespace

SynthesisResult synthesize(const CommandHandle& f, const SynthConfig& config) {
    SynthesisResult result;
    Rng rng(config.seed);

    Literals lits = extract_literals(f.display());
    std::vector<std::string> probe_words;
    for (const std::string& p : lits.patterns) {
        std::vector<std::string> ws = regex_dictionary(p, rng, 4);
        probe_words.insert(probe_words.end(), ws.begin(), ws.end());
    }

    InputClass cls;
    try {
        cls = probe_command(f, probe_words);
    } catch (const ProbeError& e) {
        log_warn(std::string("command rejected every probe input: ") + e.what());
        result.status = SynthStatus::unsupported;
        return result;
    }

    Dictionary dict = build_dictionary(cls, lits, rng);
    std::vector<std::string> flags = sort_comparator_flags(f.display());
    CandidateSet candidates = all_candidates(config.max_size, flags);
    log_info("searching " + std::to_string(candidates.size()) + " candidates for: " +
             f.display());

    EvalMemo memo;
    SeedQueue seeds(lits, rng);
    std::vector<size_t> history{candidates.size()};

    for (int r = 1; r <= config.max_rounds; r++) {
        EffectiveInputs eff =
            get_effective_inputs(f, candidates, seeds.next(), dict, config, rng, &memo);
        result.observations_used += eff.observations.size();
        candidates = filter_candidates(candidates, eff.observations, &f, &memo);
        history.push_back(candidates.size());
        result.rounds = r;
        log_info("round " + std::to_string(r) + ": " + std::to_string(candidates.size()) +
                 " candidates remain");

        if (candidates.empty()) {
            warn_if_nondeterministic(f, eff.observations);
            result.status = SynthStatus::empty;
            result.plausible = std::move(candidates);
            return result;
        }
        if (!making_progress(history, config.no_progress_rounds, config.min_rounds)) {
            result.status = SynthStatus::ok;
            result.plausible = std::move(candidates);
            result.composite = make_composite(result.plausible);
            return result;
        }
    }

    // Still shrinking at the round cap; ship what survived.
    log_warn("synthesis hit the round cap while still eliminating candidates");
    result.status = SynthStatus::ok;
    result.plausible = std::move(candidates);
    result.composite = make_composite(result.plausible);
    return result;
}

// ---- combiner cache ---------------------------------------------------------

CombinerCache::CombinerCache(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) return;  // a missing cache file simply starts empty
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("cache file " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_object())
        throw Error("cache file " + path + " lacks a records object");
    for (const auto& [key, rec] : doc["records"].items()) {
        CacheEntry e;
        e.command = key;
        e.combiner = rec.value("combiner", std::string());
        e.max_size = rec.value("max_size", 0);
        e.observations = rec.value("observations", size_t{0});
        e.version = rec.value("version", std::string());
        entries_[key] = std::move(e);
    }
}

std::optional<CacheEntry> CombinerCache::lookup(const std::string& command) const {
    auto it = entries_.find(command);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void CombinerCache::store(const CacheEntry& entry) {
    entries_[entry.command] = entry;
}

void CombinerCache::save() const {
    if (path_.empty()) return;
    nlohmann::json records = nlohmann::json::object();
    for (const auto& [key, e] : entries_) {
        records[key] = {
            {"combiner", e.combiner},
            {"max_size", e.max_size},
            {"observations", e.observations},
            {"version", e.version},
        };
    }
    nlohmann::json doc{{"records", records}};
    std::ofstream out(path_);
    if (!out) throw Error("cannot write cache file " + path_);
    out << doc.dump(2) << '\n';
}

}  // namespace combsynth
