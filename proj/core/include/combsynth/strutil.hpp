#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace combsynth {

// A stream is a nonempty byte string whose last byte is a newline.
bool is_stream(const std::string& s);

// Number of occurrences of d in s.
size_t count_delim(char d, const std::string& s);

// Splits s at the first occurrence of d. head is everything before it; tail
// is everything after it, or absent when d does not occur in s at all.
// Note the distinction between an absent tail ("a") and an empty one ("a,").
struct SplitFirst {
    std::string head;
    std::optional<std::string> tail;
};
SplitFirst split_first(char d, const std::string& s);

// Splits a newline-terminated string into its last line and everything
// before it. For "x\ny\n" the result is init="x", last="y"; for a
// single-line stream "y\n" init is absent. prefix() reassembles the part of
// the original string that precedes the last line, newline included, so that
// s == prefix() + last + "\n" always holds.
struct SplitLastLine {
    std::optional<std::string> init;
    std::string last;
    std::string prefix() const { return init ? *init + "\n" : std::string(); }
};
SplitLastLine split_last_line(const std::string& s);

// Splits a newline-terminated string into its first line and the remainder
// (which keeps its own newlines): "b\nc\n" -> ("b", "c\n"), "b\n" -> ("b", "").
struct SplitFirstLine {
    std::string first;
    std::string rest;
};
SplitFirstLine split_first_line(const std::string& s);

// Last nonempty line of a newline-terminated string, or absent when every
// line is empty.
std::optional<std::string> split_last_nonempty_line(const std::string& s);

// Remove delimiter d from the front/back of s. The delimiter must be present.
std::string del_front(char d, const std::string& s);
std::string del_back(char d, const std::string& s);

// Splits off leading padding: a run of one or more spaces, or a single tab.
// Returns (pad, rest); pad is empty when s starts with neither.
struct DelPad {
    std::string pad;
    std::string rest;
};
DelPad del_pad(const std::string& s);

// Prepends padding to a string.
std::string add_pad(const std::string& pad, const std::string& s);

// All lines of a newline-terminated string, without their newlines.
// "a\nb\n" -> {"a", "b"}; "\n" -> {""}.
std::vector<std::string> split_lines(const std::string& s);

}  // namespace combsynth
