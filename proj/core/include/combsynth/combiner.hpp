#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace combsynth {

// The four delimiter characters combiners may carry. This set is closed.
enum class Delim : char {
    nl = '\n',
    tab = '\t',
    sp = ' ',
    comma = ',',
};

constexpr std::array<Delim, 4> all_delims() {
    return {Delim::nl, Delim::tab, Delim::sp, Delim::comma};
}

constexpr char delim_char(Delim d) {
    return static_cast<char>(d);
}

// Serialization names: nl tab sp comma.
std::string delim_name(Delim d);

enum class Op {
    add,
    concat,
    first,
    second,
    front,
    back,
    fuse,
    stitch,
    stitch2,
    offset,
    rerun,
    merge,
};

// Operator classes. Recursive string operators may nest under front/back/
// fuse and under the structural operators; structural and command-running
// operators only appear at the root.
enum class OpClass {
    rec,
    structural,
    run,
};

OpClass op_class(Op op);

// A combiner AST. front/back/fuse/stitch/offset carry one child,
// stitch2 carries two, the rest are leaves. merge additionally carries the
// comparator flag tokens it passes to the external merge.
struct Combiner {
    Op op = Op::concat;
    Delim d = Delim::nl;                   // meaningful for front/back/fuse/stitch2/offset
    std::vector<Combiner> children;        // RecOp subtrees only
    std::vector<std::string> merge_flags;  // merge only, verbatim tokens like "-rn"

    bool operator==(const Combiner& other) const;
};

OpClass op_class(const Combiner& c);

// Two plus the number of operator nodes in the tree.
int size(const Combiner& c);

// s-expression text, e.g. "(back nl add)", "(stitch2 sp add first)",
// "(merge -rn)". Round-trips bit-exactly through parse_combiner.
std::string format_combiner(const Combiner& c);

// Inverse of format_combiner. Throws ParseError (with offset) on malformed
// text, unknown names, or grammar violations such as a structural operator
// nested under another operator.
Combiner parse_combiner(std::string_view text);

// Canonical candidate order: by size, then by serialized text.
bool canonical_less(const Combiner& a, const Combiner& b);

// Leaf and node constructors, handy for tests and table-driven code.
namespace ops {
Combiner add();
Combiner concat();
Combiner first();
Combiner second();
Combiner front(Delim d, Combiner child);
Combiner back(Delim d, Combiner child);
Combiner fuse(Delim d, Combiner child);
Combiner stitch(Combiner child);
Combiner stitch2(Delim d, Combiner c1, Combiner c2);
Combiner offset(Delim d, Combiner child);
Combiner rerun();
Combiner merge(std::vector<std::string> flags = {});
}  // namespace ops

}  // namespace combsynth
