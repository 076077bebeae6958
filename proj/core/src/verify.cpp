#include "combsynth/verify.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "combsynth/errors.hpp"
#include "combsynth/eval.hpp"
#include "combsynth/strutil.hpp"

namespace combsynth {

namespace {

bool is_delim_char(char c) {
    return c == '\n' || c == '\t' || c == ' ' || c == ',';
}

// Characters that pin content down: anything outside the delimiter set and
// '0'. A string without one could be reproduced by padding or adding zero.
bool substantive(char c) {
    return !is_delim_char(c) && c != '0';
}

bool has_substantive_char(const std::string& s) {
    return std::any_of(s.begin(), s.end(), substantive);
}

// Nonempty and made of '0' only. x + 0 = x, so such outputs cannot separate
// add from first/second.
bool all_zero_run(const std::string& s) {
    return !s.empty() && s.find_first_not_of('0') == std::string::npos;
}

std::vector<std::string> split_on(char d, const std::string& s) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(d, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// Lines of an arbitrary string: split at newlines, dropping the artifact
// empty piece after a trailing newline. Matches split_lines on streams but
// tolerates non-streams, which the predicates must accept.
std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> parts = split_on('\n', s);
    if (!s.empty() && s.back() == '\n') parts.pop_back();
    return parts;
}

// ---- sufficiency conditions per operator -----------------------------------

bool add_conditions(const ObservationSet& y) {
    bool left = false;
    bool right = false;
    for (const OutputTuple& t : y.tuples) {
        if (!all_zero_run(t.y1)) left = true;
        if (!all_zero_run(t.y2)) right = true;
    }
    return left && right;
}

bool concat_conditions(const ObservationSet& y) {
    bool left = false;
    bool right = false;
    for (const OutputTuple& t : y.tuples) {
        if (!t.y1.empty()) left = true;
        if (!t.y2.empty()) right = true;
    }
    return left && right;
}

// For first the dropped side is y2, so substance must show up there (and in
// y1 for second); otherwise dropping it is indistinguishable from merging.
bool keep_side_conditions(const ObservationSet& y, bool substance_in_y2) {
    bool differ = false;
    bool substance = false;
    for (const OutputTuple& t : y.tuples) {
        if (t.y1 != t.y2) differ = true;
        if (has_substantive_char(substance_in_y2 ? t.y2 : t.y1)) substance = true;
    }
    return differ && substance;
}

// ---- derived tuple sets -----------------------------------------------------
// Tuples that do not decompose under the expected shape contribute nothing.

ObservationSet strip_back_delim(const ObservationSet& y, char d) {
    ObservationSet out;
    for (const OutputTuple& t : y.tuples) {
        if (t.y1.empty() || t.y1.back() != d) continue;
        if (t.y2.empty() || t.y2.back() != d) continue;
        if (t.y12.empty() || t.y12.back() != d) continue;
        out.tuples.push_back({t.y1.substr(0, t.y1.size() - 1),
                              t.y2.substr(0, t.y2.size() - 1),
                              t.y12.substr(0, t.y12.size() - 1)});
    }
    return out;
}

ObservationSet strip_front_delim(const ObservationSet& y, char d) {
    ObservationSet out;
    for (const OutputTuple& t : y.tuples) {
        if (t.y1.empty() || t.y1.front() != d) continue;
        if (t.y2.empty() || t.y2.front() != d) continue;
        if (t.y12.empty() || t.y12.front() != d) continue;
        out.tuples.push_back({t.y1.substr(1), t.y2.substr(1), t.y12.substr(1)});
    }
    return out;
}

// Segment-aligned view of tuples joined by d. The halves fix the segment
// count; the whole must supply at least that many segments, with any excess
// folded into the final one (the conditions only inspect the halves).
ObservationSet fuse_segments(const ObservationSet& y, char d) {
    ObservationSet out;
    for (const OutputTuple& t : y.tuples) {
        std::vector<std::string> segs1 = split_on(d, t.y1);
        std::vector<std::string> segs2 = split_on(d, t.y2);
        if (segs1.size() != segs2.size()) continue;
        std::vector<std::string> segs12 = split_on(d, t.y12);
        size_t n = segs1.size();
        if (segs12.size() < n) continue;
        for (size_t i = 0; i < n; ++i) {
            std::string part12 = segs12[i];
            if (i + 1 == n) {
                for (size_t j = n; j < segs12.size(); ++j) part12 += d + segs12[j];
            }
            out.tuples.push_back({segs1[i], segs2[i], part12});
        }
    }
    return out;
}

// ---- boundary machinery -----------------------------------------------------

struct Boundary {
    std::string l1;     // last line of y1
    std::string l2;     // first line of y2
    std::string rest2;  // y2 past its first line
};

std::optional<Boundary> boundary_of(const OutputTuple& t) {
    if (!is_stream(t.y1) || !is_stream(t.y2)) return std::nullopt;
    SplitLastLine s1 = split_last_line(t.y1);
    SplitFirstLine s2 = split_first_line(t.y2);
    return Boundary{s1.last, s2.first, s2.rest};
}

// A tuple whose halves meet on the same line, with a substantive character
// opening its unpadded content and closing the line.
bool boundary_line_witness(const ObservationSet& y) {
    for (const OutputTuple& t : y.tuples) {
        std::optional<Boundary> b = boundary_of(t);
        if (!b || b->l1 != b->l2 || b->l1.empty()) continue;
        const std::string& rest = del_pad(b->l1).rest;
        if (rest.empty() || !substantive(rest.front())) continue;
        if (!substantive(b->l1.back())) continue;
        return true;
    }
    return false;
}

// As above, and y2 must continue with a nonempty second line so the witness
// shows the boundary is interior.
bool struct_boundary_witness(const ObservationSet& y) {
    for (const OutputTuple& t : y.tuples) {
        std::optional<Boundary> b = boundary_of(t);
        if (!b || b->l1 != b->l2 || b->l1.empty()) continue;
        const std::string& rest = del_pad(b->l1).rest;
        if (rest.empty() || !substantive(rest.front())) continue;
        if (!substantive(b->l1.back())) continue;
        if (b->rest2.empty()) continue;
        if (split_first_line(b->rest2).first.empty()) continue;
        return true;
    }
    return false;
}

// Witness for a column-shifting combiner: the boundary lines need not
// match, but y1's last head must be substantive and y2 must open with two
// nonempty lines.
bool offset_witness(const ObservationSet& y) {
    for (const OutputTuple& t : y.tuples) {
        std::optional<Boundary> b = boundary_of(t);
        if (!b) continue;
        const std::string& rest = del_pad(b->l1).rest;
        if (rest.empty() || !substantive(rest.front())) continue;
        if (b->l2.empty()) continue;
        if (b->rest2.empty()) continue;
        if (split_first_line(b->rest2).first.empty()) continue;
        return true;
    }
    return false;
}

// Head fields of the two boundary lines, split at d after removing padding.
// With require_equal_tails set, only tuples whose boundary tails agree
// contribute. The third component is not derivable here and stays empty;
// no condition inspects it.
ObservationSet boundary_heads(const ObservationSet& y, char d, bool require_equal_tails) {
    ObservationSet out;
    for (const OutputTuple& t : y.tuples) {
        std::optional<Boundary> b = boundary_of(t);
        if (!b) continue;
        SplitFirst f1 = split_first(d, del_pad(b->l1).rest);
        SplitFirst f2 = split_first(d, del_pad(b->l2).rest);
        if (!f1.tail || !f2.tail) continue;
        if (require_equal_tails && *f1.tail != *f2.tail) continue;
        out.tuples.push_back({f1.head, f2.head, ""});
    }
    return out;
}

// Delimiters for which a single pad prefix makes every line of every
// component parse as pad ++ head ++ d ++ tail. Checking the one-character
// pads suffices: longer pads only tighten where d may sit.
std::vector<char> table_delims(const ObservationSet& y) {
    std::vector<char> out;
    for (Delim delim : all_delims()) {
        char d = delim_char(delim);
        bool found = false;
        for (char pad : {' ', '\t'}) {
            bool all = true;
            for (const OutputTuple& t : y.tuples) {
                for (const std::string* comp : {&t.y1, &t.y2, &t.y12}) {
                    for (const std::string& line : lines_of(*comp)) {
                        if (line.empty()) continue;
                        if (line.front() != pad || line.find(d, 1) == std::string::npos) {
                            all = false;
                            break;
                        }
                    }
                    if (!all) break;
                }
                if (!all) break;
            }
            if (all) {
                found = true;
                break;
            }
        }
        if (found) out.push_back(d);
    }
    return out;
}

// When every component fits the padded-table shape for d, the set must
// contain a boundary pair with equal tails and different heads; otherwise
// table combiners that merge such lines survive unchallenged.
bool stitch_first_table_condition(const ObservationSet& y) {
    for (Delim delim : all_delims()) {
        Combiner probe = ops::stitch2(delim, ops::concat(), ops::concat());
        bool premise = true;
        for (const OutputTuple& t : y.tuples) {
            if (!in_domain(probe, t.y1) || !in_domain(probe, t.y2) ||
                !in_domain(probe, t.y12)) {
                premise = false;
                break;
            }
        }
        if (!premise) continue;
        ObservationSet heads = boundary_heads(y, delim_char(delim), true);
        bool separated = false;
        for (const OutputTuple& t : heads.tuples) {
            if (t.y1 != t.y2) {
                separated = true;
                break;
            }
        }
        if (!separated) return false;
    }
    return true;
}

}  // namespace

ObservationSet to_observation_set(const std::vector<Observation>& observations) {
    ObservationSet out;
    out.tuples.reserve(observations.size());
    for (const Observation& o : observations) out.tuples.push_back({o.y1, o.y2, o.y12});
    return out;
}

bool enough_basic(const ObservationSet& y) {
    bool differ = false;
    bool left = false;
    bool right = false;
    for (const OutputTuple& t : y.tuples) {
        if (t.y1 != t.y2) differ = true;
        if (has_substantive_char(t.y1)) left = true;
        if (has_substantive_char(t.y2)) right = true;
    }
    return differ && left && right;
}

bool is_table(const ObservationSet& y) {
    return !table_delims(y).empty();
}

bool enough_struct(const ObservationSet& y) {
    if (!struct_boundary_witness(y)) return false;
    for (char d : table_delims(y))
        if (!enough_basic(boundary_heads(y, d, true))) return false;
    return true;
}

bool enough_for(const Combiner& g, const ObservationSet& y) {
    switch (g.op) {
        case Op::add:
            return add_conditions(y);
        case Op::concat:
            return concat_conditions(y);
        case Op::first:
            return keep_side_conditions(y, true);
        case Op::second:
            return keep_side_conditions(y, false);
        case Op::back: {
            const Combiner& b = g.children[0];
            bool representative =
                b.op == Op::add || (b.op == Op::fuse && b.children[0].op == Op::add);
            if (!representative)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return enough_for(b, strip_back_delim(y, delim_char(g.d)));
        }
        case Op::front: {
            const Combiner& b = g.children[0];
            bool representative =
                b.op == Op::concat ||
                (b.op == Op::back && b.children[0].op == Op::fuse &&
                 b.children[0].children[0].op == Op::add);
            if (!representative)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return enough_for(b, strip_front_delim(y, delim_char(g.d)));
        }
        case Op::fuse: {
            if (g.children[0].op != Op::add)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return add_conditions(fuse_segments(y, delim_char(g.d)));
        }
        case Op::stitch: {
            if (g.children[0].op != Op::first)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return boundary_line_witness(y) && stitch_first_table_condition(y);
        }
        case Op::stitch2: {
            if (g.children[0].op != Op::add || g.children[1].op != Op::first)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return boundary_line_witness(y);
        }
        case Op::offset: {
            if (g.children[0].op != Op::add)
                throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
            return offset_witness(y) &&
                   add_conditions(boundary_heads(y, delim_char(g.d), false));
        }
        case Op::rerun:
        case Op::merge:
            throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
    }
    throw NotRepresentative("no sufficiency conditions for " + format_combiner(g));
}

// ---- generators -------------------------------------------------------------

namespace {

constexpr char kDelimChars[] = {'\n', '\t', ' ', ','};
const std::string kWordAlphabet =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789._:;!?#%&@*+-=/";

int rand_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

char random_delim(std::mt19937_64& rng) {
    return kDelimChars[rand_int(rng, 0, 3)];
}

std::string random_word(std::mt19937_64& rng, int min_len = 1, int max_len = 8) {
    int n = rand_int(rng, min_len, max_len);
    std::string s;
    s.reserve(n);
    for (int i = 0; i < n; ++i)
        s += kWordAlphabet[rand_int(rng, 0, static_cast<int>(kWordAlphabet.size()) - 1)];
    return s;
}

std::string random_digits(std::mt19937_64& rng, int max_len = 6) {
    int n = rand_int(rng, 1, max_len);
    std::string s;
    s.reserve(n);
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + rand_int(rng, 0, 9));
    return s;
}

// Free-form strings for the unconstrained operators: words joined by
// delimiters, sometimes empty, and often delimiter-terminated or -led so
// that front/back shapes keep a usable intersection with this domain.
std::string random_text(std::mt19937_64& rng) {
    int tokens = rand_int(rng, 0, 3);
    std::string s;
    for (int i = 0; i < tokens; ++i) {
        if (i > 0) s += random_delim(rng);
        s += random_word(rng, 1, 5);
    }
    if (rand_int(rng, 0, 9) < 1) s.insert(s.begin(), random_delim(rng));
    if (rand_int(rng, 0, 9) < 4) s += random_delim(rng);
    return s;
}

std::string sample_member(const Combiner& g, std::mt19937_64& rng);

// A child value cleansed of the characters the surrounding shape reserves.
std::string clean_member(const Combiner& b, std::mt19937_64& rng, const std::string& banned,
                         bool allow_empty) {
    std::string s = sample_member(b, rng);
    std::string out;
    for (char c : s)
        if (banned.find(c) == std::string::npos) out += c;
    if (out.empty() && !allow_empty) out = b.op == Op::add ? random_digits(rng) : random_word(rng);
    return out;
}

std::string sample_member(const Combiner& g, std::mt19937_64& rng) {
    switch (g.op) {
        case Op::add:
            return random_digits(rng);
        case Op::concat:
        case Op::first:
        case Op::second:
            return random_text(rng);
        case Op::front:
            return delim_char(g.d) + sample_member(g.children[0], rng);
        case Op::back:
            return sample_member(g.children[0], rng) + delim_char(g.d);
        case Op::fuse: {
            char d = delim_char(g.d);
            int n = rand_int(rng, 2, 4);
            std::string s;
            for (int i = 0; i < n; ++i) {
                if (i > 0) s += d;
                s += clean_member(g.children[0], rng, std::string(1, d), false);
            }
            return s;
        }
        case Op::stitch: {
            if (rand_int(rng, 0, 19) == 0) return "\n";
            int k = rand_int(rng, 1, 3);
            std::string s;
            for (int i = 0; i < k; ++i)
                s += clean_member(g.children[0], rng, "\n", true) + "\n";
            return s;
        }
        case Op::stitch2: {
            char d = delim_char(g.d);
            if (d == '\n') return "\n";  // lines cannot contain the field delimiter
            bool tab_pad = rand_int(rng, 0, 9) < 2;
            int k = rand_int(rng, 1, 3);
            std::string banned = std::string(1, d) + "\n";
            std::string s;
            for (int i = 0; i < k; ++i) {
                std::string pad = tab_pad ? "\t" : std::string(rand_int(rng, 1, 6), ' ');
                std::string head = clean_member(g.children[0], rng, banned, false);
                std::string tail = clean_member(g.children[1], rng, "\n", true);
                // Boundary merges should come from deliberately shared lines,
                // not from two independent draws landing on the same short
                // tail, so free-form tails get a minimum length.
                Op tail_op = g.children[1].op;
                if ((tail_op == Op::concat || tail_op == Op::first ||
                     tail_op == Op::second) &&
                    tail.size() < 3) {
                    tail += random_word(rng, 3, 6);
                }
                s += pad + head + d + tail + "\n";
            }
            return s;
        }
        case Op::offset: {
            char d = delim_char(g.d);
            if (d == '\n') return "\n";
            bool tab_pad = rand_int(rng, 0, 9) < 2;
            int k = rand_int(rng, 1, 3);
            std::string banned = std::string(1, d) + "\n";
            std::string s;
            for (int i = 0; i < k; ++i) {
                if (rand_int(rng, 0, 9) < 2) {
                    s += "\n";
                    continue;
                }
                std::string pad = tab_pad ? "\t" : std::string(rand_int(rng, 1, 4), ' ');
                std::string head = clean_member(g.children[0], rng, banned, false);
                s += pad + head + d + random_word(rng, 1, 6) + "\n";
            }
            return s;
        }
        case Op::merge: {
            bool numeric = false;
            for (const std::string& flag : g.merge_flags)
                if (flag.find('n') != std::string::npos) numeric = true;
            int k = rand_int(rng, 0, 4);
            std::vector<std::string> lines;
            lines.reserve(k);
            for (int i = 0; i < k; ++i)
                lines.push_back(numeric ? std::to_string(rand_int(rng, -50, 150))
                                        : random_word(rng, 1, 6));
            if (merge_flags_supported(g.merge_flags)) {
                std::stable_sort(lines.begin(), lines.end(),
                                 [&g](const std::string& a, const std::string& b) {
                                     return merge_compare(g.merge_flags, a, b) < 0;
                                 });
            } else {
                std::sort(lines.begin(), lines.end());
            }
            std::string s;
            for (const std::string& line : lines) s += line + "\n";
            return s.empty() ? "\n" : s;
        }
        case Op::rerun: {
            int k = rand_int(rng, 1, 3);
            std::string s;
            for (int i = 0; i < k; ++i) s += random_word(rng, 1, 6) + "\n";
            return s;
        }
    }
    return random_text(rng);
}

// Rebuilds y2 so its first line equals y1's last line, exercising the merge
// paths of the line-boundary combiners.
void share_boundary_line(std::string* y1, std::string* y2) {
    if (*y1 == "\n" || *y2 == "\n") return;
    SplitLastLine s1 = split_last_line(*y1);
    SplitFirstLine s2 = split_first_line(*y2);
    *y2 = s1.last + "\n" + s2.rest;
}

// Rank of how constrained the legal set is; pair generation starts from the
// more constrained shape and rejection-samples into the other's domain.
int domain_richness(const Combiner& c) {
    switch (c.op) {
        case Op::stitch2:
            return 90;
        case Op::offset:
            return 80;
        case Op::merge:
            return 70;
        case Op::stitch:
            return 60;
        case Op::fuse:
            return 50 + domain_richness(c.children[0]) / 10;
        case Op::front:
        case Op::back:
            return 30 + domain_richness(c.children[0]) / 10;
        case Op::add:
            return 20;
        case Op::rerun:
            return 5;
        case Op::concat:
        case Op::first:
        case Op::second:
            return 0;
    }
    return 0;
}

}  // namespace

std::pair<std::string, std::string> sample_legal_pair(const Combiner& g,
                                                      std::mt19937_64& rng) {
    switch (g.op) {
        case Op::fuse: {
            // evaluation needs matching segment counts on both sides
            char d = delim_char(g.d);
            int n = rand_int(rng, 2, 4);
            std::string y1;
            std::string y2;
            for (int i = 0; i < n; ++i) {
                if (i > 0) {
                    y1 += d;
                    y2 += d;
                }
                y1 += clean_member(g.children[0], rng, std::string(1, d), false);
                y2 += clean_member(g.children[0], rng, std::string(1, d), false);
            }
            return {y1, y2};
        }
        case Op::stitch:
        case Op::stitch2:
        case Op::offset: {
            std::string y1 = sample_member(g, rng);
            std::string y2 = sample_member(g, rng);
            if (rand_int(rng, 0, 9) < 4) share_boundary_line(&y1, &y2);
            return {y1, y2};
        }
        default:
            return {sample_member(g, rng), sample_member(g, rng)};
    }
}

EquivResult equiv_by_intersection_sample(const Combiner& g1, const Combiner& g2,
                                         int sample_count, std::mt19937_64& rng,
                                         const CommandHandle* f) {
    constexpr int kMaxAttemptsPerSample = 10000;
    const Combiner& source = domain_richness(g2) > domain_richness(g1) ? g2 : g1;
    EquivResult result;
    for (int i = 0; i < sample_count; ++i) {
        std::optional<std::pair<std::string, std::string>> pair;
        for (int attempt = 0; attempt < kMaxAttemptsPerSample; ++attempt) {
            std::pair<std::string, std::string> candidate = sample_legal_pair(source, rng);
            if (!pair_in_domain(g1, candidate.first, candidate.second, f)) continue;
            if (!pair_in_domain(g2, candidate.first, candidate.second, f)) continue;
            pair = std::move(candidate);
            break;
        }
        if (!pair)
            throw EmptyIntersection("no pair legal for both " + format_combiner(g1) +
                                    " and " + format_combiner(g2) + " within " +
                                    std::to_string(kMaxAttemptsPerSample) + " draws");
        std::string v1 = eval(g1, pair->first, pair->second, f);
        std::string v2 = eval(g2, pair->first, pair->second, f);
        ++result.samples_used;
        if (v1 != v2) {
            result.counterexample =
                EquivResult::Counterexample{pair->first, pair->second, v1, v2};
            return result;
        }
    }
    result.equivalent = true;
    return result;
}

DncCheck check_dnc(const CommandHandle& f, const Combiner& g,
                   const std::vector<std::pair<std::string, std::string>>& pairs) {
    DncCheck out;
    for (const std::pair<std::string, std::string>& pair : pairs) {
        std::optional<Observation> obs = observe(f, pair);
        if (!obs) {
            ++out.pairs_skipped;
            continue;
        }
        ++out.pairs_checked;
        std::string combined;
        try {
            combined = eval(g, obs->y1, obs->y2, &f);
        } catch (const Error& e) {
            out.holds = false;
            out.violation = DncCheck::Violation{pair, obs->y12, "", e.what()};
            return out;
        }
        if (combined != obs->y12) {
            out.holds = false;
            out.violation = DncCheck::Violation{pair, obs->y12, combined, ""};
            return out;
        }
    }
    return out;
}

}  // namespace combsynth
