#pragma once

#include <string>
#include <vector>

#include "combsynth/combiner.hpp"

namespace combsynth {

// Every combiner of size <= max_size, in canonical order with no duplicates.
struct CandidateSet {
    std::vector<Combiner> members;
    int max_size = 0;

    size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
    auto begin() const { return members.begin(); }
    auto end() const { return members.end(); }
};

// Builds the full candidate set: all grammar derivations over the four
// delimiters up to max_size, plus rerun, plus a flagless merge, plus a merge
// carrying the comparator flags lifted from the command (when any).
CandidateSet all_candidates(int max_size, const std::vector<std::string>& command_flags = {});

// All chains of the recursive operators with at most max_nodes AST nodes.
// Exposed so tests can cross-check counts against a brute-force walker.
std::vector<Combiner> rec_candidates(int max_nodes);

}  // namespace combsynth
