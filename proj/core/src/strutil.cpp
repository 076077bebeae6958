#include "combsynth/strutil.hpp"

#include <algorithm>

#include "combsynth/errors.hpp"

namespace combsynth {

bool is_stream(const std::string& s) {
    return !s.empty() && s.back() == '\n';
}

size_t count_delim(char d, const std::string& s) {
    return static_cast<size_t>(std::count(s.begin(), s.end(), d));
}

SplitFirst split_first(char d, const std::string& s) {
    size_t pos = s.find(d);
    if (pos == std::string::npos) return {s, std::nullopt};
    return {s.substr(0, pos), s.substr(pos + 1)};
}

SplitLastLine split_last_line(const std::string& s) {
    if (!is_stream(s)) throw StructureError("split_last_line: string does not end with newline");
    // The final newline terminates the last line; search for the one before it.
    size_t body_end = s.size() - 1;
    size_t prev = s.rfind('\n', body_end == 0 ? std::string::npos : body_end - 1);
    if (body_end == 0 || prev == std::string::npos) {
        // Single line.
        return {std::nullopt, s.substr(0, body_end)};
    }
    return {s.substr(0, prev), s.substr(prev + 1, body_end - prev - 1)};
}

SplitFirstLine split_first_line(const std::string& s) {
    if (!is_stream(s)) throw StructureError("split_first_line: string does not end with newline");
    size_t pos = s.find('\n');
    return {s.substr(0, pos), s.substr(pos + 1)};
}

std::optional<std::string> split_last_nonempty_line(const std::string& s) {
    if (!is_stream(s)) throw StructureError("split_last_nonempty_line: string does not end with newline");
    size_t end = s.size() - 1;  // position of the final newline
    while (true) {
        size_t prev = (end == 0) ? std::string::npos : s.rfind('\n', end - 1);
        size_t start = (prev == std::string::npos) ? 0 : prev + 1;
        if (start < end) return s.substr(start, end - start);
        if (prev == std::string::npos) return std::nullopt;
        end = prev;
    }
}

std::string del_front(char d, const std::string& s) {
    if (s.empty() || s.front() != d) throw StructureError("del_front: string does not start with the delimiter");
    return s.substr(1);
}

std::string del_back(char d, const std::string& s) {
    if (s.empty() || s.back() != d) throw StructureError("del_back: string does not end with the delimiter");
    return s.substr(0, s.size() - 1);
}

DelPad del_pad(const std::string& s) {
    if (!s.empty() && s.front() == '\t') return {"\t", s.substr(1)};
    size_t n = 0;
    while (n < s.size() && s[n] == ' ') n++;
    return {s.substr(0, n), s.substr(n)};
}

std::string add_pad(const std::string& pad, const std::string& s) {
    return pad + s;
}

std::vector<std::string> split_lines(const std::string& s) {
    if (s.empty()) return {};
    if (!is_stream(s)) throw StructureError("split_lines: string does not end with newline");
    std::vector<std::string> out;
    size_t start = 0;
    while (start < s.size()) {
        size_t pos = s.find('\n', start);
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace combsynth
