#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "combsynth/errors.hpp"
#include "combsynth/shapes.hpp"

using namespace combsynth;

namespace {

// Independent bounds checker for generated streams, written straight from
// the shape definition. Only valid for generic dictionaries, whose words
// never contain spaces. Returns an empty string when the stream conforms,
// else a description of the first violation.
std::string shape_violation(const std::string& stream, const InputShape& s) {
    constexpr int kCap = 10000;  // generation clamps element counts here
    if (stream.empty()) return "empty stream";
    if (stream.back() != '\n') return "missing trailing newline";

    std::vector<std::string> lines;
    size_t start = 0;
    for (size_t i = 0; i < stream.size(); i++) {
        if (stream[i] == '\n') {
            lines.push_back(stream.substr(start, i - start));
            start = i + 1;
        }
    }

    int lmin = std::min(std::max(s.lines.min_count, 0), kCap);
    int lmax = std::min(s.lines.max_count, kCap);
    if (stream == "\n") {
        if (lmin > 0) return "zero-line stream below the line minimum";
        return "";
    }
    int count = static_cast<int>(lines.size());
    if (count < lmin || count > lmax) return "line count out of bounds";

    int cmin = std::max(1, s.chars.min_count);
    int cmax = std::max(1, s.chars.max_count);
    for (const std::string& line : lines) {
        if (line.empty()) {
            if (s.words.min_count > 0) return "empty line below the word minimum";
            continue;
        }
        std::vector<std::string> words;
        size_t wstart = 0;
        for (size_t i = 0; i <= line.size(); i++) {
            if (i == line.size() || line[i] == ' ') {
                words.push_back(line.substr(wstart, i - wstart));
                wstart = i + 1;
            }
        }
        int wcount = static_cast<int>(words.size());
        if (wcount < s.words.min_count || wcount > s.words.max_count)
            return "word count out of bounds";
        for (const std::string& w : words) {
            if (w.empty()) return "empty word (double space)";
            int len = static_cast<int>(w.size());
            if (len < cmin || len > cmax) return "word length out of bounds";
        }
    }
    return "";
}

InputShape shape(int lmin, int lmax, int lpct, int wmin, int wmax, int wpct, int cmin,
                 int cmax, int cpct) {
    InputShape s;
    s.lines = {lmin, lmax, lpct};
    s.words = {wmin, wmax, wpct};
    s.chars = {cmin, cmax, cpct};
    return s;
}

}  // namespace

TEST_CASE("default and literal seed shapes") {
    InputShape d = default_seed_shape();
    CHECK(d.valid());
    CHECK(d.lines == DimConfig{1, 20, 50});
    CHECK(d.words == DimConfig{0, 5, 50});
    CHECK(d.chars == DimConfig{1, 8, 50});

    InputShape l = literal_seed_shape(100);
    CHECK(l.valid());
    CHECK(l.lines.min_count == 98);
    CHECK(l.lines.max_count == 102);

    CHECK(literal_seed_shape(1).lines.min_count == 1);
    CHECK(literal_seed_shape(0).lines.min_count == 1);
    // Huge literals clamp to the generation cap instead of exploding.
    InputShape big = literal_seed_shape(999999999);
    CHECK(big.valid());
    CHECK(big.lines.max_count <= 10000);
}

TEST_CASE("mutations move one dimension in one direction") {
    InputShape d = default_seed_shape();

    InputShape m1 = mutate_shape(d, 1);  // more lines
    CHECK(m1.lines == DimConfig{2, 40, 50});
    CHECK(m1.words == d.words);
    CHECK(m1.chars == d.chars);

    InputShape m2 = mutate_shape(d, 2);  // fewer lines
    CHECK(m2.lines == DimConfig{0, 10, 50});

    InputShape m3 = mutate_shape(d, 3);  // more varied lines
    CHECK(m3.lines == DimConfig{1, 20, 100});

    InputShape m4 = mutate_shape(d, 4);  // less varied lines
    CHECK(m4.lines == DimConfig{1, 20, 25});

    InputShape m5 = mutate_shape(d, 5);  // more words
    CHECK(m5.words == DimConfig{0, 10, 50});
    CHECK(m5.lines == d.lines);

    InputShape m8 = mutate_shape(d, 8);
    CHECK(m8.words == DimConfig{0, 5, 25});

    InputShape m9 = mutate_shape(d, 9);  // more chars
    CHECK(m9.chars == DimConfig{2, 16, 50});

    InputShape m12 = mutate_shape(d, 12);
    CHECK(m12.chars == DimConfig{1, 8, 25});
}

TEST_CASE("mutations always yield valid shapes") {
    Rng rng(7);
    for (int trial = 0; trial < 200; trial++) {
        InputShape s = random_shape(rng);
        REQUIRE(s.valid());
        for (int j = 1; j <= 12; j++) {
            InputShape m = mutate_shape(s, j);
            CAPTURE(j);
            CHECK(m.valid());
        }
    }

    // Repeated doubling saturates at the cap rather than overflowing.
    InputShape s = default_seed_shape();
    for (int i = 0; i < 40; i++) s = mutate_shape(s, 1);
    CHECK(s.valid());
    CHECK(s.lines.max_count == 10000);

    // Repeated halving of the variance floor stays at one percent.
    s = default_seed_shape();
    for (int i = 0; i < 40; i++) s = mutate_shape(s, 4);
    CHECK(s.lines.distinct_pct == 1);
}

TEST_CASE("generated streams satisfy their shape") {
    Rng rng(11);
    Dictionary generic;
    for (int trial = 0; trial < 150; trial++) {
        InputShape s = random_shape(rng);
        std::string stream = gen_stream(s, generic, rng);
        CAPTURE(stream);
        CHECK(shape_violation(stream, s) == "");
    }
}

TEST_CASE("generation is deterministic in the seed") {
    Dictionary generic;
    InputShape s = default_seed_shape();
    Rng a(42), b(42);
    CHECK(gen_stream(s, generic, a) == gen_stream(s, generic, b));
}

TEST_CASE("zero-line shapes produce the minimal stream") {
    Rng rng(3);
    Dictionary generic;
    std::string stream = gen_stream(shape(0, 0, 50, 0, 5, 50, 1, 8, 50), generic, rng);
    CHECK(stream == "\n");
}

TEST_CASE("one percent distinct lines collapses to a single repeated line") {
    Rng rng(5);
    Dictionary generic;
    std::string stream = gen_stream(shape(100, 100, 1, 1, 3, 50, 1, 5, 50), generic, rng);
    std::set<std::string> distinct;
    size_t start = 0;
    for (size_t i = 0; i < stream.size(); i++) {
        if (stream[i] == '\n') {
            distinct.insert(stream.substr(start, i - start));
            start = i + 1;
        }
    }
    CHECK(distinct.size() == 1);
}

TEST_CASE("fully distinct lines stay varied") {
    Rng rng(9);
    Dictionary generic;
    std::string stream = gen_stream(shape(100, 100, 100, 2, 4, 100, 3, 8, 100), generic, rng);
    std::set<std::string> distinct;
    size_t start = 0;
    for (size_t i = 0; i < stream.size(); i++) {
        if (stream[i] == '\n') {
            distinct.insert(stream.substr(start, i - start));
            start = i + 1;
        }
    }
    CHECK(distinct.size() >= 40);
}

TEST_CASE("input pairs concatenate to a stream satisfying the shape") {
    Rng rng(13);
    Dictionary generic;
    bool saw_left_minimal = false;
    bool saw_right_minimal = false;
    for (int trial = 0; trial < 60; trial++) {
        InputShape s = random_shape(rng);
        auto pairs = gen_input_pairs(s, 5, generic, rng);
        REQUIRE(pairs.size() == 5);
        for (const auto& [x1, x2] : pairs) {
            REQUIRE(!x1.empty());
            REQUIRE(!x2.empty());
            CHECK(x1.back() == '\n');
            CHECK(x2.back() == '\n');
            if (x1 == "\n") {
                saw_left_minimal = true;
                CHECK(shape_violation(x2, s) == "");
            } else if (x2 == "\n") {
                saw_right_minimal = true;
                CHECK(shape_violation(x1, s) == "");
            } else {
                CHECK(shape_violation(x1 + x2, s) == "");
            }
        }
    }
    // The split point ranges over 0..L inclusive, so both extremes occur.
    CHECK(saw_left_minimal);
    CHECK(saw_right_minimal);
}

TEST_CASE("sorted-word dictionaries produce sorted streams") {
    Rng rng(17);
    Dictionary dict;
    dict.kind = DictKind::sorted_words;
    dict.elements = {"pear", "apple", "plum", "cherry"};
    for (int trial = 0; trial < 20; trial++) {
        std::string stream = gen_stream(shape(5, 30, 80, 1, 2, 80, 2, 6, 50), dict, rng);
        std::vector<std::string> lines;
        size_t start = 0;
        for (size_t i = 0; i < stream.size(); i++) {
            if (stream[i] == '\n') {
                lines.push_back(stream.substr(start, i - start));
                start = i + 1;
            }
        }
        CHECK(std::is_sorted(lines.begin(), lines.end()));
    }
}

TEST_CASE("filename dictionaries emit one dictionary element per line") {
    Rng rng(19);
    Dictionary dict;
    dict.kind = DictKind::filenames;
    dict.elements = {"/etc/passwd", "/etc/group", "/dev/null"};
    std::set<std::string> allowed(dict.elements.begin(), dict.elements.end());
    std::string stream = gen_stream(shape(3, 12, 60, 1, 4, 60, 1, 8, 50), dict, rng);
    size_t start = 0;
    for (size_t i = 0; i < stream.size(); i++) {
        if (stream[i] == '\n') {
            std::string line = stream.substr(start, i - start);
            if (!line.empty()) CHECK(allowed.count(line) == 1);
            start = i + 1;
        }
    }
}

TEST_CASE("unsatisfiable shapes are reported") {
    Rng rng(23);
    Dictionary empty_dict;
    empty_dict.kind = DictKind::regex_matching;
    CHECK_THROWS_AS(gen_stream(shape(3, 5, 50, 1, 2, 50, 1, 4, 50), empty_dict, rng),
                    GenError);

    Dictionary files;
    files.kind = DictKind::filenames;
    files.elements = {"/dev/null"};
    // 100% distinct over many lines cannot be met with a one-element pool.
    CHECK_THROWS_AS(gen_stream(shape(50, 50, 100, 1, 1, 100, 1, 4, 50), files, rng),
                    GenError);

    CHECK_THROWS_AS(gen_stream(shape(5, 3, 50, 1, 2, 50, 1, 4, 50), empty_dict, rng),
                    GenError);  // min above max is invalid outright
}
