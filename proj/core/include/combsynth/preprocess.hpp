#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combsynth/command.hpp"
#include "combsynth/shapes.hpp"

namespace combsynth {

// Input classes a command can accept, discovered by probing.
enum class InputClass { any, sorted_only, filenames_only };

struct Literals {
    std::vector<std::string> patterns;  // regex/script arguments worth sampling
    std::vector<int64_t> numerics;      // bare numbers that hint at thresholds
};

// Best-effort scan of the command text for pattern arguments (grep/sed/awk
// family) and numeric literals. Unrecognized commands yield empty lists.
Literals extract_literals(const std::string& command_text);

// Comparator flags to copy onto merge candidates when the command is a sort
// invocation (e.g. "-rn" from "sort -rn"); empty otherwise.
std::vector<std::string> sort_comparator_flags(const std::string& command_text);

// Runs the command on three fixture streams: unsorted words, sorted words,
// and file names. extra_words (typically sampled from extracted patterns)
// are spliced into the word fixtures so match-dependent commands exit zero.
// Throws ProbeError when all three probes fail.
InputClass probe_command(const CommandHandle& f,
                         const std::vector<std::string>& extra_words = {});

// Up to `count` distinct strings matching the pattern. Supports literals,
// '.', '*', '+', '?', bracket classes, and anchors; anything fancier falls
// back to the pattern's literal fragments.
std::vector<std::string> regex_dictionary(const std::string& pattern, Rng& rng, int count);

// Assembles the dictionary for input generation from the probe class and the
// extracted patterns.
Dictionary build_dictionary(InputClass cls, const Literals& lits, Rng& rng);

// Fixture contents, exposed for tests and for shipping as data files.
const std::vector<std::string>& fixture_unsorted_words();
const std::vector<std::string>& fixture_file_names();

}  // namespace combsynth
