#include "combsynth/enumerate.hpp"

#include <algorithm>

#include "combsynth/errors.hpp"

namespace combsynth {

namespace {

// Recursive-operator chains grouped by exact node count; index 0 is unused.
std::vector<std::vector<Combiner>> rec_by_nodes(int max_nodes) {
    std::vector<std::vector<Combiner>> by_nodes(static_cast<size_t>(max_nodes) + 1);
    if (max_nodes >= 1)
        by_nodes[1] = {ops::add(), ops::concat(), ops::first(), ops::second()};
    for (int n = 2; n <= max_nodes; n++) {
        for (const Combiner& child : by_nodes[n - 1]) {
            for (Delim d : all_delims()) {
                by_nodes[n].push_back(ops::front(d, child));
                by_nodes[n].push_back(ops::back(d, child));
                by_nodes[n].push_back(ops::fuse(d, child));
            }
        }
    }
    return by_nodes;
}

}  // namespace

std::vector<Combiner> rec_candidates(int max_nodes) {
    std::vector<Combiner> out;
    for (auto& group : rec_by_nodes(max_nodes))
        out.insert(out.end(), group.begin(), group.end());
    return out;
}

CandidateSet all_candidates(int max_size, const std::vector<std::string>& command_flags) {
    if (max_size < 3) throw Error("max_size must be at least 3");
    int budget = max_size - 2;  // size = 2 + node count

    std::vector<std::vector<Combiner>> rec = rec_by_nodes(budget);
    CandidateSet set;
    set.max_size = max_size;
    std::vector<Combiner>& out = set.members;

    for (int n = 1; n <= budget; n++)
        out.insert(out.end(), rec[n].begin(), rec[n].end());

    // Structural operators wrap recursive children only.
    for (int n = 1; n + 1 <= budget; n++) {
        for (const Combiner& b : rec[n]) {
            out.push_back(ops::stitch(b));
            for (Delim d : all_delims()) out.push_back(ops::offset(d, b));
        }
    }
    for (int n1 = 1; n1 + 2 <= budget; n1++) {
        for (int n2 = 1; n1 + n2 + 1 <= budget; n2++) {
            for (const Combiner& b1 : rec[n1])
                for (const Combiner& b2 : rec[n2])
                    for (Delim d : all_delims()) out.push_back(ops::stitch2(d, b1, b2));
        }
    }

    out.push_back(ops::rerun());
    out.push_back(ops::merge({}));
    if (!command_flags.empty()) out.push_back(ops::merge(command_flags));

    std::sort(out.begin(), out.end(), canonical_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return set;
}

}  // namespace combsynth
