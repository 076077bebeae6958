#include <regex>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"

#include "combsynth/command.hpp"
#include "combsynth/errors.hpp"
#include "combsynth/preprocess.hpp"

using namespace combsynth;

TEST_CASE("literal extraction finds pattern arguments") {
    Literals l = extract_literals("grep 'light.*light'");
    REQUIRE(l.patterns.size() == 1);
    CHECK(l.patterns[0] == "light.*light");
    CHECK(l.numerics.empty());

    l = extract_literals("grep -v '^#' notes.txt");
    REQUIRE(l.patterns.size() == 1);
    CHECK(l.patterns[0] == "^#");

    l = extract_literals("awk '{print $2}'");
    REQUIRE(l.patterns.size() == 1);
    CHECK(l.patterns[0] == "{print $2}");
    REQUIRE(l.numerics.size() == 1);
    CHECK(l.numerics[0] == 2);

    l = extract_literals("/usr/bin/sed -n '2,4p'");
    REQUIRE(l.patterns.size() == 1);
    CHECK(l.patterns[0] == "2,4p");
    REQUIRE(l.numerics.size() == 2);
    CHECK(l.numerics[0] == 2);
    CHECK(l.numerics[1] == 4);
}

TEST_CASE("literal extraction finds numeric thresholds") {
    Literals l = extract_literals("sed 100q");
    REQUIRE(l.numerics.size() == 1);
    CHECK(l.numerics[0] == 100);
    REQUIRE(l.patterns.size() == 1);  // sed's first non-flag argument is its script
    CHECK(l.patterns[0] == "100q");

    l = extract_literals("head -n 20");
    CHECK(l.patterns.empty());  // head takes no pattern
    REQUIRE(l.numerics.size() == 1);
    CHECK(l.numerics[0] == 20);

    // Ten-digit runs are position markers or ids, not plausible thresholds.
    l = extract_literals("grep 1234567890123");
    CHECK(l.numerics.empty());
}

TEST_CASE("literal extraction yields nothing for plain commands") {
    Literals l = extract_literals("wc -l");
    CHECK(l.patterns.empty());
    CHECK(l.numerics.empty());

    l = extract_literals("tr A-Z a-z");
    CHECK(l.patterns.empty());
    CHECK(l.numerics.empty());

    l = extract_literals("");
    CHECK(l.patterns.empty());
}

TEST_CASE("sort flag extraction keeps comparator flags only") {
    CHECK(sort_comparator_flags("sort -rn") == std::vector<std::string>{"-rn"});
    CHECK(sort_comparator_flags("sort") == std::vector<std::string>{});
    CHECK(sort_comparator_flags("sort -m -k2 -o out.txt -n") ==
          std::vector<std::string>{"-k2", "-n"});
    CHECK(sort_comparator_flags("sort --parallel=4 -S 1G -n") ==
          std::vector<std::string>{"-n"});
    CHECK(sort_comparator_flags("/usr/bin/sort -u") == std::vector<std::string>{"-u"});
    CHECK(sort_comparator_flags("wc -l") == std::vector<std::string>{});
    CHECK(sort_comparator_flags("grep -n sort") == std::vector<std::string>{});
}

TEST_CASE("probing classifies accepted input kinds") {
    CHECK(probe_command(make_builtin("identity")) == InputClass::any);
    CHECK(probe_command(make_builtin("sort-lines")) == InputClass::any);

    // sort -c rejects unsorted input but accepts the sorted fixture.
    CHECK(probe_command(make_external("sort -c")) == InputClass::sorted_only);

    // xargs cat fails on made-up words but succeeds on real file names.
    CHECK(probe_command(make_external("xargs cat")) == InputClass::filenames_only);

    // grep exits nonzero when nothing matches any fixture...
    CHECK_THROWS_AS(probe_command(make_external("grep -c nosuchtoken")), ProbeError);
    // ...unless words sampled from its own pattern are spliced in.
    CHECK(probe_command(make_external("grep -c nosuchtoken"), {"nosuchtokenx"}) ==
          InputClass::any);

    CHECK_THROWS_AS(probe_command(make_external("false")), ProbeError);
}

TEST_CASE("regex sampling produces matching words") {
    struct Case {
        std::string pattern;
        std::string checker;  // ECMAScript equivalent for verification
    };
    const std::vector<Case> cases = {
        {"light.*light", "light[a-zA-Z0-9]{0,3}light"},
        {"^[0-9]+$", "[0-9]{1,3}"},
        {"colou?r", "colou?r"},
        {"a[b-d]z", "a[b-d]z"},
        {"[^aeiou]x", "[^aeiou]x"},
        {"foo\\.bar", "foo\\.bar"},
    };
    Rng rng(29);
    for (const Case& c : cases) {
        CAPTURE(c.pattern);
        std::vector<std::string> words = regex_dictionary(c.pattern, rng, 12);
        REQUIRE(!words.empty());
        CHECK(words.size() <= 12);
        std::set<std::string> seen;
        std::regex re(c.checker);
        for (const std::string& w : words) {
            CAPTURE(w);
            CHECK(std::regex_match(w, re));
            CHECK(seen.insert(w).second);  // all distinct
        }
    }
}

TEST_CASE("unsupported regex syntax falls back to literal fragments") {
    Rng rng(31);
    std::vector<std::string> words = regex_dictionary("(foo|bar)baz", rng, 8);
    CHECK(words == std::vector<std::string>{"foo", "bar", "baz"});

    words = regex_dictionary("x{2,3}", rng, 8);
    CHECK(words == std::vector<std::string>{"x", "2,3"});

    // A pattern that is nothing but metacharacters still yields a word.
    words = regex_dictionary("^.*$", rng, 8);
    CHECK(!words.empty());
}

TEST_CASE("dictionaries follow the probe class") {
    Rng rng(37);
    Literals none;

    Dictionary d = build_dictionary(InputClass::any, none, rng);
    CHECK(d.kind == DictKind::generic);
    CHECK(d.elements.empty());

    Literals lit;
    lit.patterns = {"ab[0-9]"};
    d = build_dictionary(InputClass::any, lit, rng);
    CHECK(d.kind == DictKind::regex_matching);
    REQUIRE(!d.elements.empty());
    std::regex re("ab[0-9]");
    for (const std::string& w : d.elements) CHECK(std::regex_match(w, re));

    d = build_dictionary(InputClass::sorted_only, none, rng);
    CHECK(d.kind == DictKind::sorted_words);
    CHECK(d.elements == fixture_unsorted_words());

    d = build_dictionary(InputClass::filenames_only, lit, rng);
    CHECK(d.kind == DictKind::filenames);
    CHECK(d.elements == fixture_file_names());
}

TEST_CASE("probe fixtures are usable") {
    CHECK(fixture_unsorted_words().size() >= 5);
    // The word fixture is genuinely unsorted, or sorted_only would be
    // indistinguishable from any.
    CHECK(!std::is_sorted(fixture_unsorted_words().begin(), fixture_unsorted_words().end()));
    for (const std::string& name : fixture_file_names()) {
        CAPTURE(name);
        CHECK(name.front() == '/');
    }
}
