#include "combsynth/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "combsynth/errors.hpp"

namespace combsynth {

namespace {

// Shell-ish word split honoring quotes, tolerant of anything else. Used only
// for scanning, never for execution.
std::vector<std::string> scan_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    bool in_word = false;
    for (size_t i = 0; i < text.size();) {
        char c = text[i];
        if (c == '\'' || c == '"') {
            size_t end = text.find(c, i + 1);
            if (end == std::string::npos) end = text.size();
            cur += text.substr(i + 1, end - i - 1);
            in_word = true;
            i = end + 1;
        } else if (c == ' ' || c == '\t') {
            if (in_word || !cur.empty()) words.push_back(cur);
            cur.clear();
            in_word = false;
            i++;
        } else {
            cur += c;
            in_word = true;
            i++;
        }
    }
    if (in_word || !cur.empty()) words.push_back(cur);
    return words;
}

bool is_pattern_command(const std::string& name) {
    static const std::set<std::string> cmds = {"grep", "egrep", "fgrep", "rg",
                                               "sed",  "awk",   "gawk",  "mawk"};
    size_t slash = name.rfind('/');
    std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
    return cmds.count(base) > 0;
}

// ---- tiny regex sampler -----------------------------------------------------

struct RegexToken {
    std::vector<char> choices;  // candidate characters
    int min_rep = 1;
    int max_rep = 1;
};

const std::string kSampleAlphabet =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

std::vector<RegexToken> parse_regex(const std::string& pattern) {
    std::string p = pattern;
    if (!p.empty() && p.front() == '^') p.erase(p.begin());
    if (!p.empty() && p.back() == '$') p.pop_back();

    std::vector<RegexToken> tokens;
    size_t i = 0;
    while (i < p.size()) {
        RegexToken tok;
        char c = p[i];
        if (c == '\\' && i + 1 < p.size()) {
            tok.choices = {p[i + 1]};
            i += 2;
        } else if (c == '.') {
            tok.choices.assign(kSampleAlphabet.begin(), kSampleAlphabet.end());
            i++;
        } else if (c == '[') {
            size_t end = p.find(']', i + 1);
            if (end == std::string::npos) throw ParseError("unterminated bracket class", i);
            std::string body = p.substr(i + 1, end - i - 1);
            bool negate = !body.empty() && body.front() == '^';
            if (negate) body.erase(body.begin());
            std::set<char> members;
            for (size_t j = 0; j < body.size(); j++) {
                if (j + 2 < body.size() && body[j + 1] == '-') {
                    for (char x = body[j]; x <= body[j + 2]; x++) members.insert(x);
                    j += 2;
                } else {
                    members.insert(body[j]);
                }
            }
            if (negate) {
                for (char x : kSampleAlphabet)
                    if (!members.count(x)) tok.choices.push_back(x);
            } else {
                tok.choices.assign(members.begin(), members.end());
            }
            if (tok.choices.empty()) throw ParseError("empty character class", i);
            i = end + 1;
        } else if (std::string("()|{}*+?").find(c) != std::string::npos) {
            throw ParseError("unsupported regex construct", i);
        } else {
            tok.choices = {c};
            i++;
        }
        if (i < p.size()) {
            if (p[i] == '*') {
                tok.min_rep = 0;
                tok.max_rep = 3;
                i++;
            } else if (p[i] == '+') {
                tok.min_rep = 1;
                tok.max_rep = 3;
                i++;
            } else if (p[i] == '?') {
                tok.min_rep = 0;
                tok.max_rep = 1;
                i++;
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

// Literal fragments of a pattern the sampler could not parse.
std::vector<std::string> literal_fragments(const std::string& pattern) {
    static const std::string meta = "[](){}|*+?.^$\\";
    std::vector<std::string> frags;
    std::string cur;
    for (char c : pattern) {
        if (meta.find(c) != std::string::npos) {
            if (!cur.empty()) frags.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) frags.push_back(cur);
    if (frags.empty()) frags.push_back("x");
    return frags;
}

}  // namespace

Literals extract_literals(const std::string& command_text) {
    Literals out;
    std::vector<std::string> words = scan_words(command_text);
    if (words.empty()) return out;

    bool pattern_cmd = is_pattern_command(words[0]);
    bool pattern_taken = false;
    for (size_t i = 1; i < words.size(); i++) {
        const std::string& w = words[i];
        if (w.empty()) continue;
        if (w[0] == '-') continue;  // flags carry no input content
        if (pattern_cmd && !pattern_taken) {
            out.patterns.push_back(w);
            pattern_taken = true;
        }
        // Bare numbers anywhere hint at thresholds (sed 100q, head 5, ...).
        for (size_t j = 0; j < w.size();) {
            if (std::isdigit(static_cast<unsigned char>(w[j]))) {
                size_t end = j;
                while (end < w.size() && std::isdigit(static_cast<unsigned char>(w[end]))) end++;
                std::string digits = w.substr(j, end - j);
                if (digits.size() <= 9) out.numerics.push_back(std::stoll(digits));
                j = end;
            } else {
                j++;
            }
        }
    }
    return out;
}

std::vector<std::string> sort_comparator_flags(const std::string& command_text) {
    std::vector<std::string> words = scan_words(command_text);
    if (words.empty()) return {};
    size_t slash = words[0].rfind('/');
    std::string base = slash == std::string::npos ? words[0] : words[0].substr(slash + 1);
    if (base != "sort") return {};
    std::vector<std::string> flags;
    for (size_t i = 1; i < words.size(); i++) {
        const std::string& w = words[i];
        if (w.size() < 2 || w[0] != '-') continue;
        if (w == "-o" || w == "--output") {
            i++;  // skip the file argument
            continue;
        }
        if (w == "-m" || w == "-c" || w == "-C" || w.rfind("--parallel", 0) == 0 ||
            w.rfind("-S", 0) == 0 || w.rfind("-T", 0) == 0)
            continue;
        flags.push_back(w);
    }
    return flags;
}

const std::vector<std::string>& fixture_unsorted_words() {
    static const std::vector<std::string> words = {
        "zebra", "apple", "mango", "cherry", "apple", "banana", "kiwi", "fig"};
    return words;
}

const std::vector<std::string>& fixture_file_names() {
    static const std::vector<std::string> names = {"/etc/passwd", "/etc/group", "/dev/null"};
    return names;
}

InputClass probe_command(const CommandHandle& f, const std::vector<std::string>& extra_words) {
    auto stream_of = [](std::vector<std::string> lines, bool sorted) {
        if (sorted) std::sort(lines.begin(), lines.end());
        std::string s;
        for (const std::string& l : lines) s += l + "\n";
        return s;
    };
    std::vector<std::string> words = fixture_unsorted_words();
    for (const std::string& w : extra_words)
        if (w.find('\n') == std::string::npos) words.push_back(w);

    auto succeeds = [&](const std::string& input) {
        try {
            run_command(f, input);
            return true;
        } catch (const ExecError&) {
            return false;
        }
    };
    if (succeeds(stream_of(words, false))) return InputClass::any;
    if (succeeds(stream_of(words, true))) return InputClass::sorted_only;
    if (succeeds(stream_of(fixture_file_names(), false))) return InputClass::filenames_only;
    throw ProbeError("command failed on all three probe inputs");
}

std::vector<std::string> regex_dictionary(const std::string& pattern, Rng& rng, int count) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    try {
        std::vector<RegexToken> tokens = parse_regex(pattern);
        for (int attempts = 0; static_cast<int>(out.size()) < count && attempts < count * 20;
             attempts++) {
            std::string w;
            for (const RegexToken& tok : tokens) {
                int reps = rng.range(tok.min_rep, tok.max_rep);
                for (int r = 0; r < reps; r++) w += tok.choices[rng.next() % tok.choices.size()];
            }
            if (!w.empty() && w.find('\n') == std::string::npos && seen.insert(w).second)
                out.push_back(w);
        }
    } catch (const ParseError&) {
        for (const std::string& frag : literal_fragments(pattern))
            if (seen.insert(frag).second) out.push_back(frag);
    }
    if (out.empty()) out = literal_fragments(pattern);
    return out;
}

Dictionary build_dictionary(InputClass cls, const Literals& lits, Rng& rng) {
    Dictionary dict;
    if (cls == InputClass::filenames_only) {
        dict.kind = DictKind::filenames;
        dict.elements = fixture_file_names();
        return dict;
    }
    std::vector<std::string> sampled;
    std::set<std::string> seen;
    for (const std::string& p : lits.patterns)
        for (const std::string& w : regex_dictionary(p, rng, 24))
            if (seen.insert(w).second) sampled.push_back(w);

    if (cls == InputClass::sorted_only) {
        dict.kind = DictKind::sorted_words;
        dict.elements = fixture_unsorted_words();
        dict.elements.insert(dict.elements.end(), sampled.begin(), sampled.end());
        return dict;
    }
    if (!sampled.empty()) {
        dict.kind = DictKind::regex_matching;
        dict.elements = std::move(sampled);
        return dict;
    }
    return dict;  // generic
}

}  // namespace combsynth
