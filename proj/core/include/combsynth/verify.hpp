#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "combsynth/combiner.hpp"
#include "combsynth/command.hpp"

namespace combsynth {

// One data point for the checks below: outputs for two input halves and for
// their concatenation. Unlike Observation this carries no source pair; the
// checks treat the strings as given.
struct OutputTuple {
    std::string y1;
    std::string y2;
    std::string y12;

    bool operator==(const OutputTuple& other) const = default;
};

// An arbitrary collection of output tuples. No shape is assumed; the
// predicates themselves decide which tuples count as witnesses.
struct ObservationSet {
    std::vector<OutputTuple> tuples;
};

ObservationSet to_observation_set(const std::vector<Observation>& observations);

// True when the tuples pin down a recursive combiner: some tuple has
// y1 != y2, some y1 contains a character that is neither a delimiter nor
// '0', and some y2 does as well. Sets failing this leave room for first/
// second/add lookalikes to survive filtering.
bool enough_basic(const ObservationSet& y);

// True when one pad prefix (a single space, spaces, or one tab) and one
// delimiter make every line of every tuple component parse as
// pad ++ head ++ delimiter ++ tail. Empty lines are allowed; the empty set
// is a table vacuously.
bool is_table(const ObservationSet& y);

// True when the tuples pin down a structural combiner. Requires a tuple
// whose halves share a boundary line with substantive first/last characters
// and a nonempty second line after it, and, when the set is table-shaped,
// head pairs extracted at the boundary must themselves satisfy
// enough_basic.
bool enough_struct(const ObservationSet& y);

// Per-combiner sufficiency conditions for the twelve shapes the soundness
// argument centres on: add, concat, first, second, back-add, fuse-add,
// back-fuse-add, front-back-fuse-add, front-concat, stitch-first,
// stitch2-add-first, and offset-add. Throws NotRepresentative for any other
// shape.
bool enough_for(const Combiner& g, const ObservationSet& y);

// Draws a random pair of strings shaped for g's legal set. Best effort:
// callers should still validate with pair_in_domain. Pairs are coupled where
// evaluation demands it (fuse segment counts, shared boundary lines).
std::pair<std::string, std::string> sample_legal_pair(const Combiner& g,
                                                      std::mt19937_64& rng);

struct EquivResult {
    bool equivalent = false;
    int samples_used = 0;

    struct Counterexample {
        std::string y1;
        std::string y2;
        std::string v1;  // g1's output
        std::string v2;  // g2's output
    };
    std::optional<Counterexample> counterexample;
};

// Compares two combiners on sample_count random pairs drawn from the
// structurally richer domain and filtered to the intersection of both legal
// sets. Returns the first mismatch as a counterexample. Throws
// EmptyIntersection when 10,000 consecutive draws fail to produce a pair
// both combiners accept. `f` is consulted only by rerun combiners.
EquivResult equiv_by_intersection_sample(const Combiner& g1, const Combiner& g2,
                                         int sample_count, std::mt19937_64& rng,
                                         const CommandHandle* f = nullptr);

struct DncCheck {
    bool holds = true;
    int pairs_checked = 0;
    int pairs_skipped = 0;  // pairs the command itself failed on

    struct Violation {
        std::pair<std::string, std::string> pair;
        std::string expected;  // output of the command on the joined input
        std::string actual;    // combiner applied to the two half outputs
        std::string note;      // set when the combiner rejected the outputs outright
    };
    std::optional<Violation> violation;
};

// Checks f(x1 ++ x2) == g(f(x1), f(x2)) on every pair, reporting the first
// violation. A combiner that throws on the observed outputs counts as a
// violation with the error recorded in `note`.
DncCheck check_dnc(const CommandHandle& f, const Combiner& g,
                   const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace combsynth
