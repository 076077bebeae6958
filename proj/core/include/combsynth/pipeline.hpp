#pragma once

#include <optional>
#include <string>
#include <vector>

#include "combsynth/command.hpp"
#include "combsynth/synthesize.hpp"

namespace combsynth {

// A parsed pipeline: input source, stage command texts in order, output
// sink. Empty paths mean stdin/stdout.
struct PipelineSpec {
    std::string input_path;
    std::string output_path;
    std::vector<std::string> stages;
};

// Splits a script in the supported subset: one pipeline of commands joined
// by '|' with single/double-quoted arguments, an optional leading
// `cat FILE` (folded into input_path when further stages follow), and an
// optional trailing `> FILE`. Blank lines, comment lines, and a shebang are
// skipped. Anything else (redirections elsewhere, subshells, command
// substitution, sequencing, multiple statements) throws UnsupportedSyntax
// with the offending offset.
PipelineSpec parse_pipeline(const std::string& script_text);

// A leading $VAR or ${VAR} is resolved from the environment the way the
// original shell script would have resolved it. Throws Error when unset.
std::string resolve_path(const std::string& path);

enum class StageMode { parallel, sequential };

struct StagePlan {
    std::string command;       // original text; also the cache key
    std::string exec_command;  // what actually runs (sort gets --parallel=1)
    StageMode mode = StageMode::sequential;
    std::optional<CompositeCombiner> combiner;
    bool combiner_eliminated = false;
    int group = 0;     // consecutive parallel stages chained without a
                       // combiner share a group with the stage that keeps one
    std::string note;  // reason for a sequential fallback, empty otherwise
};

struct PipelinePlan {
    PipelineSpec spec;
    int width = 2;
    bool builtin_only = false;
    std::vector<StagePlan> stages;
};

struct PlanOptions {
    int width = 4;
    bool parallelize_rerun = false;  // rerun-only stages stay sequential
    bool pin_sort_threads = true;    // append --parallel=1 to sort stages
    bool builtin_only = false;
    SynthConfig synth;
};

// Attaches a combiner to every stage (from the cache when available, fresh
// synthesis otherwise, storing new results back), decides parallel versus
// sequential execution, and unchains intermediate combiners: a parallel
// stage whose combiner is plain concatenation and whose outputs are genuine
// streams feeds its substreams directly into the next parallel stage.
// Stages without a usable combiner become sequential barriers.
PipelinePlan plan(const PipelineSpec& spec, CombinerCache* cache, const PlanOptions& options);

// Combines k output substreams. Single-member composites use the flat
// forms: one k-way merge, one concatenation, or one rerun of f over the
// concatenation. Everything else folds pairwise, left to right. Parts must
// be nonempty; f is required only for rerun members.
std::string combine_k(const CompositeCombiner& g, const std::vector<std::string>& parts,
                      const CommandHandle* f = nullptr);

// combine_k over raw stage outputs: drops empty parts, normalizes the rest
// into streams for the combiner, and removes the trailing newline again
// when the final part was not a stream. Both the in-process runtime and the
// `combine` subcommand go through here so emitted scripts match.
std::string combine_raw_parts(const CompositeCombiner& g,
                              const std::vector<std::string>& raw_parts,
                              const CommandHandle* f = nullptr);

// Runs the plan on the given input bytes and returns output byte-identical
// to the serial pipeline. Stage instances run as concurrent processes;
// failures abort with the stage and instance identified.
std::string execute_parallel(const PipelinePlan& plan, const std::string& input);

// Reference serial execution of the original stage commands.
std::string execute_serial(const PipelineSpec& spec, const std::string& input,
                           bool builtin_only = false);

// Self-contained POSIX shell script reproducing execute_parallel with temp
// files and background jobs, calling `$COMBSYNTH_BIN combine` (default:
// combsynth on PATH) at group exits. A positional argument overrides the
// input source. Builtin-only plans are refused: the shell cannot run
// built-in commands.
std::string emit_script(const PipelinePlan& plan);

// Plan round trip for `combsynth run`.
std::string plan_to_json(const PipelinePlan& plan);
PipelinePlan plan_from_json(const std::string& text);

}  // namespace combsynth
