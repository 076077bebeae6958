#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace combsynth {

// A black-box command under synthesis. External commands run as
// subprocesses; builtins are in-process reference implementations used for
// hermetic testing. Copies of a handle share the output-shape flags so that
// anything learned while running the command sticks to it.
struct CommandHandle {
    enum class Kind { external, builtin };

    Kind kind = Kind::external;
    std::vector<std::string> argv;  // used when nonempty; else shell_text via /bin/sh -c
    std::string shell_text;         // original command text, verbatim
    std::string builtin_name;
    std::chrono::milliseconds timeout{10000};
    bool force_c_locale = true;  // drop LANG/LC_* and pin LC_ALL=C in children

    // Set when any output needed trailing-newline normalization or was empty.
    // Commands flagged here do not qualify for intermediate-combiner
    // elimination, which requires genuine stream outputs.
    std::shared_ptr<std::atomic<bool>> non_stream_output =
        std::make_shared<std::atomic<bool>>(false);

    std::string display() const { return kind == Kind::builtin ? builtin_name : shell_text; }
};

// Builds an external handle from command text. The text is tokenized into
// argv when it uses only plain words and single/double quotes; anything with
// shell metacharacters runs through /bin/sh -c verbatim.
CommandHandle make_external(const std::string& text);

// Builds a handle for a named builtin. Throws Error for unknown names.
CommandHandle make_builtin(const std::string& name);

bool is_builtin_name(const std::string& name);
std::vector<std::string> builtin_names();

// Resolves text to a builtin when it names one, else to an external command.
// With builtin_only set, non-builtin text is an error.
CommandHandle resolve_command(const std::string& text, bool builtin_only);

// Runs f on the input, feeding it on stdin and capturing stdout verbatim.
// A missing trailing newline is normalized by appending one (and recorded on
// the handle); empty output is returned as-is, which no stream-typed
// combiner accepts. Throws TimeoutError / NonZeroExit / SpawnError.
std::string run_command(const CommandHandle& f, const std::string& input);

// run_command without the trailing-newline normalization. The pipeline
// runtime uses this so its bytes match a plain serial run exactly; the
// non-stream flag is still recorded on the handle.
std::string run_command_raw(const CommandHandle& f, const std::string& input);

// One filtering data point: outputs for the two halves and for the whole.
struct Observation {
    std::string y1;
    std::string y2;
    std::string y12;
    std::pair<std::string, std::string> source_pair;
};

// Executes f three times to assemble an Observation. Returns nullopt (with
// the reason in *err when given) if any execution fails.
std::optional<Observation> observe(const CommandHandle& f,
                                   const std::pair<std::string, std::string>& pair,
                                   std::string* err = nullptr);

// observe() over many pairs with at most pool_size commands in flight.
// Results come back in submission order; failed observations are nullopt.
std::vector<std::optional<Observation>> observe_many(
    const CommandHandle& f, const std::vector<std::pair<std::string, std::string>>& pairs,
    int pool_size);

// Splits s after newlines into at most k parts balanced by byte count.
// Parts concatenate back to s exactly. When s has fewer lines than k, the
// result simply has fewer parts (absent parts are skipped downstream).
std::vector<std::string> split_stream(const std::string& s, int k);

// Runs the subprocess with the given argv. Used by merge evaluation and the
// pipeline runtime; identical plumbing to run_command.
std::string run_argv(const std::vector<std::string>& argv, const std::string& input,
                     std::chrono::milliseconds timeout = std::chrono::milliseconds(10000),
                     bool force_c_locale = true);

}  // namespace combsynth
