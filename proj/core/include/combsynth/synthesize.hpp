#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "combsynth/combiner.hpp"
#include "combsynth/command.hpp"
#include "combsynth/enumerate.hpp"
#include "combsynth/shapes.hpp"

namespace combsynth {

struct SynthConfig {
    int max_size = 7;
    uint64_t seed = 0x5eed;
    int pairs_per_shape = 4;    // n in the input search
    int mutation_rounds = 6;    // M in the input search
    int no_progress_rounds = 3; // R: stop after this many zero-elimination rounds
    int min_rounds = 2;
    int max_rounds = 32;        // hard stop; normal exit is the progress test
    int pool_size = 0;          // 0 picks the hardware concurrency
};

enum class SynthStatus { ok, empty, unsupported };

// Guarded chain of plausible combiners from one class. Evaluation applies
// the first member whose legal set admits both inputs.
struct CompositeCombiner {
    std::vector<Combiner> members;
};

std::string format_composite(const CompositeCombiner& g);
CompositeCombiner parse_composite(const std::string& text);
std::string eval_composite(const CompositeCombiner& g, const std::string& y1,
                           const std::string& y2, const CommandHandle* f = nullptr);

struct SynthesisResult {
    SynthStatus status = SynthStatus::empty;
    CandidateSet plausible;
    std::optional<CompositeCombiner> composite;
    int rounds = 0;
    size_t observations_used = 0;
};

// Memo shared across one synthesis run so rerun candidates do not execute
// the command repeatedly on identical output pairs. Not thread safe; the
// filter loop touches it from one thread only.
struct EvalMemo {
    std::unordered_map<std::string, std::optional<std::string>> rerun_out;
};

// True iff both outputs are legal for c and applying c reproduces the
// combined output byte for byte. Execution failures count as implausible.
bool is_plausible(const Combiner& c, const Observation& obs, const CommandHandle* f = nullptr,
                  EvalMemo* memo = nullptr);

// Keeps exactly the candidates plausible for every observation.
CandidateSet filter_candidates(const CandidateSet& candidates,
                               const std::vector<Observation>& observations,
                               const CommandHandle* f = nullptr, EvalMemo* memo = nullptr);

// Convenience overload: observes the pairs first (failures drop the pair).
CandidateSet filter_candidates(const CommandHandle& f, const CandidateSet& candidates,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               int pool_size = 0);

// history holds candidate-set sizes [|C_0|, |C_1|, ...]. Returns false once
// at least R filtered rounds have run and the last R eliminated nothing.
bool making_progress(const std::vector<size_t>& history, int no_progress_rounds = 3,
                     int min_rounds = 2);

// Which of the 12 observation batches eliminates the most candidates;
// 1-based, ties to the lowest index.
int index_best_mutation(const CandidateSet& candidates,
                        const std::vector<std::vector<Observation>>& sets,
                        const CommandHandle* f = nullptr, EvalMemo* memo = nullptr);

struct EffectiveInputs {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<Observation> observations;  // one per surviving pair
    InputShape final_shape;
};

// The shape-mutation search: M rounds of 12 mutations, n pairs per mutated
// shape, walking toward the mutation that eliminated the most candidates.
// Returns every observed pair from every round.
EffectiveInputs get_effective_inputs(const CommandHandle& f, const CandidateSet& candidates,
                                     InputShape seed, const Dictionary& dict,
                                     const SynthConfig& config, Rng& rng,
                                     EvalMemo* memo = nullptr);

// Class preference (recursive, then structural, then run), canonical member
// order, and the universal-domain reduction (a member whose legal set covers
// every string stands alone).
CompositeCombiner make_composite(const CandidateSet& plausible);

// The whole pipeline: preprocessing, candidate enumeration, rounds of input
// search plus filtering, composite construction.
SynthesisResult synthesize(const CommandHandle& f, const SynthConfig& config = {});

// ---- combiner cache ---------------------------------------------------------

struct CacheEntry {
    std::string command;
    std::string combiner;  // serialized composite; empty when synthesis found none
    int max_size = 0;
    size_t observations = 0;
    std::string version;
};

// One JSON record per command, keyed by the exact command text.
class CombinerCache {
public:
    CombinerCache() = default;
    explicit CombinerCache(const std::string& path);  // loads when the file exists

    std::optional<CacheEntry> lookup(const std::string& command) const;
    void store(const CacheEntry& entry);
    void save() const;  // no-op without a backing path
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::unordered_map<std::string, CacheEntry> entries_;
};

extern const char* kToolVersion;

}  // namespace combsynth
