#pragma once

#include <string>
#include <vector>

#include "combsynth/combiner.hpp"
#include "combsynth/command.hpp"

namespace combsynth {

// Applies a combiner to two command outputs. Throws DomainError when the
// inputs fall outside the combiner's legal set (or a fuse pair is
// incompatible), OverflowError when an add exceeds 64-bit range, and
// ExecError when a rerun combiner fails to execute the command. `f` is only
// consulted by rerun.
std::string eval(const Combiner& c, const std::string& y1, const std::string& y2,
                 const CommandHandle* f = nullptr);

// Membership in the combiner's legal set. rerun is vacuously true here; use
// pair_in_domain to actually probe the command.
bool in_domain(const Combiner& c, const std::string& y);

// True when both strings are legal and eval succeeds on the pair. For fuse
// this is stronger than two in_domain checks (segment counts must line up);
// for rerun it runs the command on the concatenation.
bool pair_in_domain(const Combiner& c, const std::string& y1, const std::string& y2,
                    const CommandHandle* f = nullptr);

// ---- merge support --------------------------------------------------------

// True when the flag set is handled by the built-in comparator (any mix of
// -n and -r, or no flags). Anything else falls back to the system sort.
bool merge_flags_supported(const std::vector<std::string>& flags);

// Line ordering used by `sort -m <flags>`: compares the keyed value first,
// then falls back to a whole-line byte comparison; -r reverses both.
// Returns <0, 0, >0. Only valid for supported flag sets.
int merge_compare(const std::vector<std::string>& flags, const std::string& a,
                  const std::string& b);

// Stable k-way merge of already-sorted streams. Uses the built-in comparator
// when possible, otherwise shells out to `sort -m`.
std::string unix_merge(const std::vector<std::string>& flags,
                       const std::vector<std::string>& streams);

// True when the stream's lines are already ordered under the merge
// comparator (ties allowed). Unsupported flag sets are checked by probing:
// merging a stream with itself doubles every line exactly when sorted.
bool merge_sorted(const std::vector<std::string>& flags, const std::string& y);

}  // namespace combsynth
