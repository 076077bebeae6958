#include "combsynth/combiner.hpp"

#include <cctype>

#include "combsynth/errors.hpp"

namespace combsynth {

std::string delim_name(Delim d) {
    switch (d) {
        case Delim::nl: return "nl";
        case Delim::tab: return "tab";
        case Delim::sp: return "sp";
        case Delim::comma: return "comma";
    }
    return "?";
}

OpClass op_class(Op op) {
    switch (op) {
        case Op::add:
        case Op::concat:
        case Op::first:
        case Op::second:
        case Op::front:
        case Op::back:
        case Op::fuse:
            return OpClass::rec;
        case Op::stitch:
        case Op::stitch2:
        case Op::offset:
            return OpClass::structural;
        case Op::rerun:
        case Op::merge:
            return OpClass::run;
    }
    return OpClass::run;
}

OpClass op_class(const Combiner& c) {
    return op_class(c.op);
}

bool Combiner::operator==(const Combiner& other) const {
    if (op != other.op) return false;
    switch (op) {
        case Op::front:
        case Op::back:
        case Op::fuse:
        case Op::stitch2:
        case Op::offset:
            if (d != other.d) return false;
            break;
        default:
            break;
    }
    if (op == Op::merge && merge_flags != other.merge_flags) return false;
    return children == other.children;
}

int size(const Combiner& c) {
    int nodes = 1;
    for (const Combiner& child : c.children) nodes += size(child) - 2;
    return 2 + nodes;
}

static const char* op_name(Op op) {
    switch (op) {
        case Op::add: return "add";
        case Op::concat: return "concat";
        case Op::first: return "first";
        case Op::second: return "second";
        case Op::front: return "front";
        case Op::back: return "back";
        case Op::fuse: return "fuse";
        case Op::stitch: return "stitch";
        case Op::stitch2: return "stitch2";
        case Op::offset: return "offset";
        case Op::rerun: return "rerun";
        case Op::merge: return "merge";
    }
    return "?";
}

std::string format_combiner(const Combiner& c) {
    switch (c.op) {
        case Op::add:
        case Op::concat:
        case Op::first:
        case Op::second:
        case Op::rerun:
            return op_name(c.op);
        case Op::front:
        case Op::back:
        case Op::fuse:
        case Op::offset:
            return std::string("(") + op_name(c.op) + " " + delim_name(c.d) + " " +
                   format_combiner(c.children[0]) + ")";
        case Op::stitch:
            return "(stitch " + format_combiner(c.children[0]) + ")";
        case Op::stitch2:
            return "(stitch2 " + delim_name(c.d) + " " + format_combiner(c.children[0]) + " " +
                   format_combiner(c.children[1]) + ")";
        case Op::merge: {
            std::string out = "(merge";
            for (const std::string& f : c.merge_flags) out += " " + f;
            return out + ")";
        }
    }
    return "?";
}

namespace {

struct Parser {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n'))
            pos++;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            pos++;
            return true;
        }
        return false;
    }

    std::string token() {
        size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != '\n' &&
               text[pos] != '(' && text[pos] != ')')
            pos++;
        if (pos == start) fail("expected a token");
        return std::string(text.substr(start, pos - start));
    }

    Delim delim() {
        size_t at = pos;
        std::string name = token();
        if (name == "nl" || name == "\\n") return Delim::nl;
        if (name == "tab" || name == "\\t") return Delim::tab;
        if (name == "sp") return Delim::sp;
        if (name == "comma" || name == ",") return Delim::comma;
        pos = at;
        fail("unknown delimiter name '" + name + "'");
    }

    Combiner rec_op() {
        size_t at = pos;
        Combiner c = combiner();
        if (op_class(c) != OpClass::rec) {
            pos = at;
            fail("operator '" + std::string(op_name(c.op)) + "' is not allowed as a child here");
        }
        return c;
    }

    Combiner combiner() {
        skip_ws();
        if (eat('(')) {
            skip_ws();
            size_t at = pos;
            std::string name = token();
            Combiner c;
            if (name == "front" || name == "back" || name == "fuse" || name == "offset") {
                c.op = name == "front"  ? Op::front
                       : name == "back" ? Op::back
                       : name == "fuse" ? Op::fuse
                                        : Op::offset;
                skip_ws();
                c.d = delim();
                c.children.push_back(rec_op());
            } else if (name == "stitch") {
                c.op = Op::stitch;
                c.children.push_back(rec_op());
            } else if (name == "stitch2") {
                c.op = Op::stitch2;
                skip_ws();
                c.d = delim();
                c.children.push_back(rec_op());
                c.children.push_back(rec_op());
            } else if (name == "merge") {
                c.op = Op::merge;
                skip_ws();
                while (pos < text.size() && text[pos] != ')') {
                    c.merge_flags.push_back(token());
                    skip_ws();
                }
            } else {
                pos = at;
                fail("unknown operator '" + name + "'");
            }
            skip_ws();
            if (!eat(')')) fail("expected ')'");
            return c;
        }
        size_t at = pos;
        std::string name = token();
        if (name == "add") return ops::add();
        if (name == "concat") return ops::concat();
        if (name == "first") return ops::first();
        if (name == "second") return ops::second();
        if (name == "rerun") return ops::rerun();
        pos = at;
        fail("unknown combiner '" + name + "'");
    }
};

}  // namespace

Combiner parse_combiner(std::string_view text) {
    Parser p{text};
    Combiner c = p.combiner();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters after combiner");
    return c;
}

bool canonical_less(const Combiner& a, const Combiner& b) {
    int sa = size(a), sb = size(b);
    if (sa != sb) return sa < sb;
    return format_combiner(a) < format_combiner(b);
}

namespace ops {
Combiner add() { return Combiner{Op::add, Delim::nl, {}, {}}; }
Combiner concat() { return Combiner{Op::concat, Delim::nl, {}, {}}; }
Combiner first() { return Combiner{Op::first, Delim::nl, {}, {}}; }
Combiner second() { return Combiner{Op::second, Delim::nl, {}, {}}; }
Combiner front(Delim d, Combiner child) { return Combiner{Op::front, d, {std::move(child)}, {}}; }
Combiner back(Delim d, Combiner child) { return Combiner{Op::back, d, {std::move(child)}, {}}; }
Combiner fuse(Delim d, Combiner child) { return Combiner{Op::fuse, d, {std::move(child)}, {}}; }
Combiner stitch(Combiner child) { return Combiner{Op::stitch, Delim::nl, {std::move(child)}, {}}; }
Combiner stitch2(Delim d, Combiner c1, Combiner c2) {
    return Combiner{Op::stitch2, d, {std::move(c1), std::move(c2)}, {}};
}
Combiner offset(Delim d, Combiner child) { return Combiner{Op::offset, d, {std::move(child)}, {}}; }
Combiner rerun() { return Combiner{Op::rerun, Delim::nl, {}, {}}; }
Combiner merge(std::vector<std::string> flags) {
    return Combiner{Op::merge, Delim::nl, {}, std::move(flags)};
}
}  // namespace ops

}  // namespace combsynth
