#include "combsynth/shapes.hpp"

#include <algorithm>
#include <set>

#include "combsynth/errors.hpp"

namespace combsynth {

namespace {

// Word characters: letters, digits, and enough punctuation (including the
// field delimiters comma and the likes) to exercise delimiter-sensitive
// candidates. No whitespace; words are joined with single spaces.
const std::string kAlphabet =
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789"
    ".,:;!?#%&@*+-=_/";

constexpr int kCountCap = 10000;  // safety valve against runaway mutations

int clamp_count(int v) { return std::clamp(v, 0, kCountCap); }

int pool_target(int pct, int total) {
    if (total <= 0) return 1;
    int target = (pct * total + 99) / 100;
    return std::clamp(target, 1, total);
}

std::string gen_generic_word(const DimConfig& chars, Rng& rng) {
    int len = std::max(1, rng.range(chars.min_count, chars.max_count));
    int distinct = pool_target(chars.distinct_pct, len);
    std::string pool;
    std::set<char> seen;
    for (int attempts = 0; static_cast<int>(pool.size()) < distinct && attempts < 64;
         attempts++) {
        char c = kAlphabet[rng.next() % kAlphabet.size()];
        if (seen.insert(c).second) pool += c;
    }
    if (pool.empty()) pool = "a";
    std::string word;
    for (int i = 0; i < len; i++) word += pool[rng.next() % pool.size()];
    return word;
}

std::vector<std::string> build_word_pool(const InputShape& shape, const Dictionary& dict,
                                         int line_count, Rng& rng) {
    int per_line = std::max(1, (shape.words.min_count + shape.words.max_count + 1) / 2);
    int total = std::max(1, line_count * per_line);
    int target = pool_target(shape.words.distinct_pct, total);

    if (dict.kind != DictKind::generic && dict.elements.empty())
        throw GenError("dictionary has no elements");
    if (dict.kind == DictKind::filenames) {
        // File names are used verbatim; distinctness is capped by the fixture.
        if (shape.words.distinct_pct == 100 && target > static_cast<int>(dict.elements.size()))
            throw GenError("shape demands more distinct file names than the dictionary holds");
        std::vector<std::string> pool = dict.elements;
        std::shuffle(pool.begin(), pool.end(), rng.engine);
        if (static_cast<int>(pool.size()) > target) pool.resize(target);
        return pool;
    }

    std::vector<std::string> pool;
    std::set<std::string> seen;
    // Dictionary-backed kinds draw half the pool from the dictionary so the
    // command sees both matching and arbitrary content.
    bool mixed = dict.kind == DictKind::regex_matching || dict.kind == DictKind::sorted_words;
    for (int attempts = 0; static_cast<int>(pool.size()) < target && attempts < target * 20 + 64;
         attempts++) {
        std::string w;
        if (mixed && rng.chance(50))
            w = dict.elements[rng.next() % dict.elements.size()];
        else
            w = gen_generic_word(shape.chars, rng);
        if (seen.insert(w).second) pool.push_back(w);
    }
    if (pool.empty()) throw GenError("could not build a word pool for the shape");
    return pool;
}

}  // namespace

InputShape default_seed_shape() {
    InputShape s;
    s.lines = {1, 20, 50};
    s.words = {0, 5, 50};
    s.chars = {1, 8, 50};
    return s;
}

InputShape literal_seed_shape(int64_t v) {
    InputShape s = default_seed_shape();
    int64_t lo = std::max<int64_t>(1, v - 2);
    int64_t hi = std::min<int64_t>(kCountCap, v + 2);
    s.lines.min_count = static_cast<int>(std::min<int64_t>(lo, kCountCap));
    s.lines.max_count = static_cast<int>(std::max<int64_t>(hi, s.lines.min_count));
    return s;
}

InputShape mutate_shape(const InputShape& s, int j) {
    InputShape out = s;
    DimConfig* dim = nullptr;
    switch ((j - 1) / 4) {
        case 0: dim = &out.lines; break;
        case 1: dim = &out.words; break;
        default: dim = &out.chars; break;
    }
    switch (j % 4) {
        case 1:  // more elements
            dim->min_count = clamp_count(dim->min_count * 2);
            dim->max_count = clamp_count(std::max(1, dim->max_count * 2));
            break;
        case 2:  // fewer elements
            dim->min_count = dim->min_count / 2;
            dim->max_count = std::max(1, dim->max_count / 2);
            break;
        case 3:  // more varied
            dim->distinct_pct = std::min(100, std::max(1, dim->distinct_pct * 2));
            break;
        default:  // less varied
            dim->distinct_pct = std::max(1, dim->distinct_pct / 2);
            break;
    }
    if (dim->min_count > dim->max_count) dim->min_count = dim->max_count;
    return out;
}

InputShape random_shape(Rng& rng) {
    InputShape s;
    s.lines.min_count = rng.range(0, 4);
    s.lines.max_count = s.lines.min_count + rng.range(1, 30);
    s.lines.distinct_pct = rng.range(10, 100);
    s.words.min_count = rng.range(0, 3);
    s.words.max_count = s.words.min_count + rng.range(1, 6);
    s.words.distinct_pct = rng.range(10, 100);
    s.chars.min_count = rng.range(1, 3);
    s.chars.max_count = s.chars.min_count + rng.range(1, 8);
    s.chars.distinct_pct = rng.range(10, 100);
    return s;
}

std::string gen_stream(const InputShape& shape, const Dictionary& dict, Rng& rng) {
    if (!shape.valid()) throw GenError("invalid input shape");
    int line_count = rng.range(clamp_count(shape.lines.min_count),
                               clamp_count(shape.lines.max_count));
    if (line_count == 0) return "\n";

    std::vector<std::string> word_pool = build_word_pool(shape, dict, line_count, rng);

    auto make_line = [&]() -> std::string {
        int words = rng.range(shape.words.min_count, shape.words.max_count);
        if (dict.kind == DictKind::filenames) words = std::min(words, 1);
        if (words == 0) return "";
        std::string line;
        for (int w = 0; w < words; w++) {
            if (w) line += ' ';
            line += word_pool[rng.next() % word_pool.size()];
        }
        return line;
    };

    int distinct_lines = pool_target(shape.lines.distinct_pct, line_count);
    std::vector<std::string> line_pool;
    std::set<std::string> seen;
    for (int attempts = 0;
         static_cast<int>(line_pool.size()) < distinct_lines && attempts < distinct_lines * 20 + 64;
         attempts++) {
        std::string l = make_line();
        if (seen.insert(l).second) line_pool.push_back(l);
    }
    if (line_pool.empty()) line_pool.push_back(make_line());

    std::vector<std::string> lines;
    lines.reserve(static_cast<size_t>(line_count));
    for (int i = 0; i < line_count; i++)
        lines.push_back(line_pool[rng.next() % line_pool.size()]);
    if (dict.kind == DictKind::sorted_words) std::sort(lines.begin(), lines.end());

    std::string out;
    for (const std::string& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> gen_input_pairs(const InputShape& shape,
                                                                 int n,
                                                                 const Dictionary& dict,
                                                                 Rng& rng) {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; i++) {
        std::string whole = gen_stream(shape, dict, rng);
        int line_count = 0;
        for (char c : whole) line_count += c == '\n';
        int k = rng.range(0, line_count);
        if (k == 0) {
            pairs.emplace_back("\n", whole);
        } else if (k == line_count) {
            pairs.emplace_back(whole, "\n");
        } else {
            size_t cut = 0;
            for (int seen_nl = 0; seen_nl < k; cut++)
                if (whole[cut] == '\n') seen_nl++;
            pairs.emplace_back(whole.substr(0, cut), whole.substr(cut));
        }
    }
    return pairs;
}

}  // namespace combsynth
