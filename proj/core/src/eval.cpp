#include "combsynth/eval.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>

#include "combsynth/errors.hpp"
#include "combsynth/strutil.hpp"

namespace combsynth {

namespace {

// ---- add -------------------------------------------------------------------

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// Accepts leading zeros; the result never has them.
int64_t str_to_int(const std::string& s) {
    if (!all_digits(s)) throw DomainError("'" + s + "' is not a decimal number");
    int64_t n = 0;
    for (char c : s) {
        int digit = c - '0';
        if (n > (std::numeric_limits<int64_t>::max() - digit) / 10)
            throw OverflowError("'" + s + "' exceeds 64-bit range");
        n = n * 10 + digit;
    }
    return n;
}

std::string eval_add(const std::string& y1, const std::string& y2) {
    int64_t a = str_to_int(y1), b = str_to_int(y2);
    if (a > std::numeric_limits<int64_t>::max() - b)
        throw OverflowError("sum of " + y1 + " and " + y2 + " exceeds 64-bit range");
    return std::to_string(a + b);
}

// ---- merge comparator ------------------------------------------------------

struct MergeFlags {
    bool numeric = false;
    bool reverse = false;
};

bool parse_merge_flags(const std::vector<std::string>& flags, MergeFlags* out) {
    MergeFlags mf;
    for (const std::string& flag : flags) {
        if (flag.size() < 2 || flag[0] != '-') return false;
        for (size_t i = 1; i < flag.size(); i++) {
            if (flag[i] == 'n')
                mf.numeric = true;
            else if (flag[i] == 'r')
                mf.reverse = true;
            else
                return false;
        }
    }
    if (out) *out = mf;
    return true;
}

// sort's -n key: optional blanks, optional minus, digits, optional fraction.
// Anything that contributes no digits compares as zero.
struct NumKey {
    bool negative = false;
    std::string_view int_part;   // leading zeros still present
    std::string_view frac_part;  // trailing zeros still present
};

NumKey parse_num_key(const std::string& line) {
    NumKey key;
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) i++;
    if (i < line.size() && line[i] == '-') {
        key.negative = true;
        i++;
    }
    size_t int_start = i;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') i++;
    key.int_part = std::string_view(line).substr(int_start, i - int_start);
    if (i < line.size() && line[i] == '.') {
        i++;
        size_t frac_start = i;
        while (i < line.size() && line[i] >= '0' && line[i] <= '9') i++;
        key.frac_part = std::string_view(line).substr(frac_start, i - frac_start);
    }
    return key;
}

int compare_num_keys(const NumKey& a, const NumKey& b) {
    std::string_view ai = a.int_part, bi = b.int_part;
    while (!ai.empty() && ai.front() == '0') ai.remove_prefix(1);
    while (!bi.empty() && bi.front() == '0') bi.remove_prefix(1);
    std::string_view af = a.frac_part, bf = b.frac_part;
    while (!af.empty() && af.back() == '0') af.remove_suffix(1);
    while (!bf.empty() && bf.back() == '0') bf.remove_suffix(1);

    bool a_zero = ai.empty() && af.empty();
    bool b_zero = bi.empty() && bf.empty();
    if (a_zero && b_zero) return 0;  // -0 and 0 compare equal
    if (a_zero) return b.negative ? 1 : -1;
    if (b_zero) return a.negative ? -1 : 1;
    if (a.negative != b.negative) return a.negative ? -1 : 1;

    int mag;
    if (ai.size() != bi.size())
        mag = ai.size() < bi.size() ? -1 : 1;
    else if (int c = ai.compare(bi); c != 0)
        mag = c < 0 ? -1 : 1;
    else {
        size_t n = std::max(af.size(), bf.size());
        mag = 0;
        for (size_t i = 0; i < n && mag == 0; i++) {
            char ca = i < af.size() ? af[i] : '0';
            char cb = i < bf.size() ? bf[i] : '0';
            if (ca != cb) mag = ca < cb ? -1 : 1;
        }
    }
    return a.negative ? -mag : mag;
}

int byte_compare(const std::string& a, const std::string& b) {
    int c = a.compare(b);
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

int compare_lines(const MergeFlags& mf, const std::string& a, const std::string& b) {
    int c = 0;
    if (mf.numeric) c = compare_num_keys(parse_num_key(a), parse_num_key(b));
    if (c == 0) c = byte_compare(a, b);  // sort's last-resort comparison
    return mf.reverse ? -c : c;
}

// ---- external merge fallback ------------------------------------------------

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        char tmpl[] = "/tmp/combsynth.XXXXXX";
        int fd = mkstemp(tmpl);
        if (fd < 0) throw ExecError("mkstemp failed");
        path = tmpl;
        size_t off = 0;
        while (off < contents.size()) {
            ssize_t n = write(fd, contents.data() + off, contents.size() - off);
            if (n <= 0) {
                close(fd);
                throw ExecError("short write to " + path);
            }
            off += static_cast<size_t>(n);
        }
        close(fd);
    }
    ~TempFile() { unlink(path.c_str()); }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
};

std::string external_merge(const std::vector<std::string>& flags,
                           const std::vector<std::string>& streams) {
    std::vector<std::unique_ptr<TempFile>> files;
    std::vector<std::string> argv = {"sort", "-m"};
    for (const std::string& flag : flags) argv.push_back(flag);
    for (const std::string& s : streams) {
        files.push_back(std::make_unique<TempFile>(s));
        argv.push_back(files.back()->path);
    }
    return run_argv(argv, "");
}

std::string internal_merge(const MergeFlags& mf, const std::vector<std::string>& streams) {
    std::vector<std::vector<std::string>> lines;
    lines.reserve(streams.size());
    for (const std::string& s : streams) lines.push_back(split_lines(s));

    std::vector<size_t> pos(streams.size(), 0);
    std::string out;
    while (true) {
        int best = -1;
        for (size_t i = 0; i < lines.size(); i++) {
            if (pos[i] >= lines[i].size()) continue;
            if (best < 0 ||
                compare_lines(mf, lines[i][pos[i]], lines[best][pos[best]]) < 0)
                best = static_cast<int>(i);  // ties stay with the earlier stream
        }
        if (best < 0) break;
        out += lines[best][pos[best]++];
        out += '\n';
    }
    return out;
}

// Doubles each line in place: the expected result of merging a sorted
// stream with itself.
std::string doubled_lines(const std::string& s) {
    std::string out;
    for (const std::string& l : split_lines(s)) {
        out += l;
        out += '\n';
        out += l;
        out += '\n';
    }
    return out;
}

// ---- table padding ----------------------------------------------------------

// Pad for a combined head field: wide enough that pad+head spans the wider
// of the two source fields. Tab padding is preserved as a tab.
std::string calc_pad(const std::string& p1, const std::string& h1, const std::string& p2,
                     const std::string& h2, const std::string& new_head) {
    if (p1 == "\t" && p2 == "\t") return "\t";
    size_t target = std::max(p1.size() + h1.size(), p2.size() + h2.size());
    size_t pad = target > new_head.size() ? target - new_head.size() : 0;
    return std::string(pad, ' ');
}

bool valid_pad(const std::string& p) {
    if (p == "\t") return true;
    return !p.empty() && p.find_first_not_of(' ') == std::string::npos;
}

// ---- recursive evaluation ----------------------------------------------------

std::string eval_rec(const Combiner& c, const std::string& y1, const std::string& y2,
                     const CommandHandle* f);

std::string eval_fuse(const Combiner& c, const std::string& y1, const std::string& y2,
                      const CommandHandle* f) {
    char d = delim_char(c.d);
    const Combiner& b = c.children[0];
    SplitFirst s1 = split_first(d, y1);
    SplitFirst s2 = split_first(d, y2);
    if (!s1.tail || !s2.tail)
        throw DomainError("fuse needs the delimiter in both inputs");
    bool more1 = s1.tail->find(d) != std::string::npos;
    bool more2 = s2.tail->find(d) != std::string::npos;
    if (more1 != more2)
        throw DomainError("fuse inputs have mismatched segment counts");
    std::string head = eval_rec(b, s1.head, s2.head, f);
    if (more1) return head + d + eval_fuse(c, *s1.tail, *s2.tail, f);
    return head + d + eval_rec(b, *s1.tail, *s2.tail, f);
}

std::string eval_stitch(const Combiner& c, const std::string& y1, const std::string& y2,
                        const CommandHandle* f) {
    if (!is_stream(y1) || !is_stream(y2)) throw DomainError("stitch inputs must be streams");
    SplitLastLine s1 = split_last_line(y1);
    SplitFirstLine s2 = split_first_line(y2);
    if (s1.last != s2.first) return y1 + y2;
    return s1.prefix() + eval_rec(c.children[0], s1.last, s2.first, f) + "\n" + s2.rest;
}

std::string eval_stitch2(const Combiner& c, const std::string& y1, const std::string& y2,
                         const CommandHandle* f) {
    if (!is_stream(y1) || !is_stream(y2)) throw DomainError("stitch2 inputs must be streams");
    if (y1 == "\n" || y2 == "\n") return y1 + y2;
    char d = delim_char(c.d);
    SplitLastLine s1 = split_last_line(y1);
    SplitFirstLine s2 = split_first_line(y2);
    DelPad dp1 = del_pad(s1.last);
    DelPad dp2 = del_pad(s2.first);
    SplitFirst f1 = split_first(d, dp1.rest);
    SplitFirst f2 = split_first(d, dp2.rest);
    if (!f1.tail || !f2.tail)
        throw DomainError("stitch2 boundary lines lack the field delimiter");
    if (*f1.tail != *f2.tail) return y1 + y2;
    std::string head = eval_rec(c.children[0], f1.head, f2.head, f);
    std::string tail = eval_rec(c.children[1], *f1.tail, *f2.tail, f);
    std::string pad = calc_pad(dp1.pad, f1.head, dp2.pad, f2.head, head);
    return s1.prefix() + pad + head + d + tail + "\n" + s2.rest;
}

// Rewrites each line of the second stream by combining its head field with
// the head of the first stream's last nonempty line.
std::string offset_lines(const Combiner& b, char d, const std::string& p1,
                         const std::string& h1, const std::string& rest,
                         const CommandHandle* f) {
    std::string out;
    std::string remaining = rest;
    while (!remaining.empty()) {
        SplitFirstLine line = split_first_line(remaining);
        remaining = line.rest;
        if (line.first.empty()) {
            out += '\n';
            continue;
        }
        DelPad dp = del_pad(line.first);
        SplitFirst sf = split_first(d, dp.rest);
        if (!sf.tail) throw DomainError("offset line lacks the field delimiter");
        std::string head = eval(b, h1, sf.head, f);
        out += calc_pad(p1, h1, dp.pad, sf.head, head) + head + d + *sf.tail + "\n";
    }
    return out;
}

std::string eval_offset(const Combiner& c, const std::string& y1, const std::string& y2,
                        const CommandHandle* f) {
    if (!is_stream(y1) || !is_stream(y2)) throw DomainError("offset inputs must be streams");
    std::optional<std::string> last = split_last_nonempty_line(y1);
    if (!last) return y1 + y2;  // nothing to offset against
    char d = delim_char(c.d);
    DelPad dp = del_pad(*last);
    SplitFirst sf = split_first(d, dp.rest);
    if (!sf.tail) throw DomainError("offset line lacks the field delimiter");
    return y1 + offset_lines(c.children[0], d, dp.pad, sf.head, y2, f);
}

std::string eval_rec(const Combiner& c, const std::string& y1, const std::string& y2,
                     const CommandHandle* f) {
    switch (c.op) {
        case Op::add:
            return eval_add(y1, y2);
        case Op::concat:
            return y1 + y2;
        case Op::first:
            return y1;
        case Op::second:
            return y2;
        case Op::front: {
            char d = delim_char(c.d);
            if (y1.empty() || y1.front() != d || y2.empty() || y2.front() != d)
                throw DomainError("front inputs must start with the delimiter");
            return d + eval_rec(c.children[0], y1.substr(1), y2.substr(1), f);
        }
        case Op::back: {
            char d = delim_char(c.d);
            if (y1.empty() || y1.back() != d || y2.empty() || y2.back() != d)
                throw DomainError("back inputs must end with the delimiter");
            return eval_rec(c.children[0], y1.substr(0, y1.size() - 1),
                            y2.substr(0, y2.size() - 1), f) +
                   d;
        }
        case Op::fuse:
            return eval_fuse(c, y1, y2, f);
        case Op::stitch:
            return eval_stitch(c, y1, y2, f);
        case Op::stitch2:
            return eval_stitch2(c, y1, y2, f);
        case Op::offset:
            return eval_offset(c, y1, y2, f);
        case Op::rerun:
            if (!f) throw ExecError("rerun combiner has no command bound");
            return run_command(*f, y1 + y2);
        case Op::merge:
            return unix_merge(c.merge_flags, {y1, y2});
    }
    throw Error("unreachable combiner op");
}

}  // namespace

std::string eval(const Combiner& c, const std::string& y1, const std::string& y2,
                 const CommandHandle* f) {
    try {
        return eval_rec(c, y1, y2, f);
    } catch (const StructureError& e) {
        throw DomainError(e.what());
    }
}

bool in_domain(const Combiner& c, const std::string& y) {
    switch (c.op) {
        case Op::add:
            return all_digits(y);
        case Op::concat:
        case Op::first:
        case Op::second:
            return true;
        case Op::front:
            return !y.empty() && y.front() == delim_char(c.d) &&
                   in_domain(c.children[0], y.substr(1));
        case Op::back:
            return !y.empty() && y.back() == delim_char(c.d) &&
                   in_domain(c.children[0], y.substr(0, y.size() - 1));
        case Op::fuse: {
            char d = delim_char(c.d);
            if (count_delim(d, y) < 1) return false;  // at least two segments
            std::vector<std::string> segs;
            size_t start = 0;
            while (true) {
                size_t pos = y.find(d, start);
                if (pos == std::string::npos) {
                    segs.push_back(y.substr(start));
                    break;
                }
                segs.push_back(y.substr(start, pos - start));
                start = pos + 1;
            }
            if (segs.front().empty() || segs.back().empty()) return false;
            for (const std::string& seg : segs)
                if (!in_domain(c.children[0], seg)) return false;
            return true;
        }
        case Op::stitch: {
            if (!is_stream(y)) return false;
            if (y == "\n") return true;
            for (const std::string& line : split_lines(y))
                if (!in_domain(c.children[0], line)) return false;
            return true;
        }
        case Op::stitch2: {
            if (!is_stream(y)) return false;
            if (y == "\n") return true;
            char d = delim_char(c.d);
            int pad_kind = -1;  // 0 spaces, 1 tab; must be uniform
            for (const std::string& line : split_lines(y)) {
                DelPad dp = del_pad(line);
                if (!valid_pad(dp.pad)) return false;
                int kind = dp.pad == "\t" ? 1 : 0;
                if (pad_kind >= 0 && kind != pad_kind) return false;
                pad_kind = kind;
                SplitFirst sf = split_first(d, dp.rest);
                if (!sf.tail) return false;
                if (!in_domain(c.children[0], sf.head)) return false;
                if (!in_domain(c.children[1], *sf.tail)) return false;
            }
            return true;
        }
        case Op::offset: {
            if (!is_stream(y)) return false;
            char d = delim_char(c.d);
            int pad_kind = -1;
            for (const std::string& line : split_lines(y)) {
                if (line.empty()) continue;
                DelPad dp = del_pad(line);
                if (!valid_pad(dp.pad)) return false;
                int kind = dp.pad == "\t" ? 1 : 0;
                if (pad_kind >= 0 && kind != pad_kind) return false;
                pad_kind = kind;
                SplitFirst sf = split_first(d, dp.rest);
                if (!sf.tail) return false;
                if (!in_domain(c.children[0], sf.head)) return false;
            }
            return true;
        }
        case Op::rerun:
            return true;  // only decidable by running the command
        case Op::merge:
            return merge_sorted(c.merge_flags, y);
    }
    return false;
}

bool pair_in_domain(const Combiner& c, const std::string& y1, const std::string& y2,
                    const CommandHandle* f) {
    if (!in_domain(c, y1) || !in_domain(c, y2)) return false;
    try {
        eval(c, y1, y2, f);
        return true;
    } catch (const DomainError&) {
        return false;
    } catch (const OverflowError&) {
        return false;
    } catch (const ExecError&) {
        return false;
    }
}

bool merge_flags_supported(const std::vector<std::string>& flags) {
    return parse_merge_flags(flags, nullptr);
}

int merge_compare(const std::vector<std::string>& flags, const std::string& a,
                  const std::string& b) {
    MergeFlags mf;
    if (!parse_merge_flags(flags, &mf)) throw Error("merge flags not supported internally");
    return compare_lines(mf, a, b);
}

std::string unix_merge(const std::vector<std::string>& flags,
                       const std::vector<std::string>& streams) {
    for (const std::string& s : streams)
        if (!s.empty() && !is_stream(s)) throw DomainError("merge inputs must be streams");
    MergeFlags mf;
    if (parse_merge_flags(flags, &mf)) return internal_merge(mf, streams);
    return external_merge(flags, streams);
}

bool merge_sorted(const std::vector<std::string>& flags, const std::string& y) {
    if (y.empty()) return true;
    if (!is_stream(y)) return false;
    MergeFlags mf;
    if (parse_merge_flags(flags, &mf)) {
        std::vector<std::string> lines = split_lines(y);
        for (size_t i = 1; i < lines.size(); i++)
            if (compare_lines(mf, lines[i - 1], lines[i]) > 0) return false;
        return true;
    }
    // Unknown flags: a self-merge doubles each line exactly when sorted.
    try {
        return external_merge(flags, {y, y}) == doubled_lines(y);
    } catch (const ExecError&) {
        return false;
    }
}

}  // namespace combsynth
