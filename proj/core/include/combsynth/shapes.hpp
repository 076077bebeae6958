#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace combsynth {

// Deterministic RNG handed through generation so a fixed seed reproduces a
// whole synthesis run.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(uint64_t seed) : engine(seed) {}
    uint64_t next() { return engine(); }
    // Inclusive range; callers guarantee lo <= hi.
    int range(int lo, int hi) {
        return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    bool chance(int pct) { return static_cast<int>(next() % 100) < pct; }
};

// Bounds for one dimension of an input shape: how many elements and how
// diverse they are.
struct DimConfig {
    int min_count = 0;
    int max_count = 0;
    int distinct_pct = 50;
    bool valid() const {
        return min_count >= 0 && max_count >= min_count && distinct_pct >= 0 &&
               distinct_pct <= 100;
    }
    bool operator==(const DimConfig&) const = default;
};

struct InputShape {
    DimConfig lines;
    DimConfig words;
    DimConfig chars;
    bool valid() const { return lines.valid() && words.valid() && chars.valid(); }
    bool operator==(const InputShape&) const = default;
};

enum class DictKind { generic, regex_matching, filenames, sorted_words };

struct Dictionary {
    DictKind kind = DictKind::generic;
    std::vector<std::string> elements;
};

// Seed shape used for the first mutation round.
InputShape default_seed_shape();

// Seed shape biased toward a numeric literal found in the command, so the
// line count straddles the interesting threshold (think `sed 100q`).
InputShape literal_seed_shape(int64_t v);

// One of the twelve deterministic perturbations, j in 1..12: dimension
// ceil(j/4) (lines, words, chars), direction j mod 4 (1 = more elements,
// 2 = fewer, 3 = more varied, 0 = less varied). Always yields a valid shape.
InputShape mutate_shape(const InputShape& s, int j);

// Fresh random seed shape for a new synthesis round.
InputShape random_shape(Rng& rng);

// Random stream satisfying the shape: line count within the line bounds,
// word counts per line within the word bounds, generic word lengths within
// the char bounds. Dictionary kinds re-skew word choice (see gen notes).
// Throws GenError when the shape cannot be satisfied with the dictionary.
std::string gen_stream(const InputShape& shape, const Dictionary& dict, Rng& rng);

// n input pairs. Each pair is a whole generated stream split at a uniformly
// chosen newline boundary; a zero-line side is represented as the minimal
// stream "\n".
std::vector<std::pair<std::string, std::string>> gen_input_pairs(const InputShape& shape,
                                                                 int n,
                                                                 const Dictionary& dict,
                                                                 Rng& rng);

}  // namespace combsynth
