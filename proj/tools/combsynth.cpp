// Command-line front end: synthesize combiners for single commands, plan and
// run data-parallel pipelines, recombine partial outputs, and spot-check a
// claimed combiner against its command.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "combsynth/errors.hpp"
#include "combsynth/logging.hpp"
#include "combsynth/pipeline.hpp"
#include "combsynth/preprocess.hpp"
#include "combsynth/shapes.hpp"
#include "combsynth/synthesize.hpp"
#include "combsynth/verify.hpp"

using namespace combsynth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoCombiner = 2;
constexpr int kExitUnsupportedSyntax = 3;
constexpr int kExitExecution = 4;

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

// Bytes rendered for terminals and log diffs: printable ASCII stays, the
// rest becomes \xNN.
std::string hex_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    char buf[8];
    for (unsigned char c : s) {
        if (c == '\\') {
            out += "\\\\";
        } else if (c >= 0x20 && c < 0x7f) {
            out += static_cast<char>(c);
        } else {
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    return out;
}

// The same input-generation recipe synthesis uses, so `verify` exercises a
// command with inputs it can plausibly accept (regex dictionaries for grep,
// sorted fixtures for merge-like commands).
std::vector<std::pair<std::string, std::string>> sample_input_pairs(const CommandHandle& f,
                                                                    int count,
                                                                    uint64_t seed) {
    Rng rng(seed);
    Literals lits = extract_literals(f.display());
    std::vector<std::string> probe_words;
    for (const std::string& p : lits.patterns) {
        std::vector<std::string> ws = regex_dictionary(p, rng, 4);
        probe_words.insert(probe_words.end(), ws.begin(), ws.end());
    }
    InputClass cls = probe_command(f, probe_words);
    Dictionary dict = build_dictionary(cls, lits, rng);

    std::vector<std::pair<std::string, std::string>> pairs;
    InputShape shape = default_seed_shape();
    while (static_cast<int>(pairs.size()) < count) {
        int batch = std::min(8, count - static_cast<int>(pairs.size()));
        for (auto& p : gen_input_pairs(shape, batch, dict, rng)) pairs.push_back(std::move(p));
        shape = random_shape(rng);
    }
    pairs.resize(count);
    return pairs;
}

struct CommonOptions {
    std::string log_level = "warn";
    bool builtin_only = false;
    double timeout_seconds = 10.0;
};

CommandHandle resolve_with(const CommonOptions& common, const std::string& text) {
    CommandHandle f = resolve_command(text, common.builtin_only);
    f.timeout = std::chrono::milliseconds(static_cast<int64_t>(common.timeout_seconds * 1000));
    return f;
}

int cmd_synth(const CommonOptions& common, const std::string& cmd_text,
              const std::string& cache_path, SynthConfig config) {
    CommandHandle f = resolve_with(common, cmd_text);
    SynthesisResult result = synthesize(f, config);

    if (result.status != SynthStatus::ok || !result.composite) {
        if (result.status == SynthStatus::unsupported)
            std::fprintf(stderr, "combsynth: command rejected every probe input\n");
        else
            std::fprintf(stderr, "combsynth: no combiner found for '%s'\n", cmd_text.c_str());
        if (!cache_path.empty()) {
            CombinerCache cache(cache_path);
            cache.store({cmd_text, "", config.max_size, result.observations_used,
                         kToolVersion});
            cache.save();
        }
        return kExitNoCombiner;
    }

    std::string serialized = format_composite(*result.composite);
    std::printf("%s\n", serialized.c_str());
    log_info("plausible candidates: " + std::to_string(result.plausible.size()) + ", rounds: " +
             std::to_string(result.rounds) + ", observations: " +
             std::to_string(result.observations_used));
    if (!cache_path.empty()) {
        CombinerCache cache(cache_path);
        cache.store({cmd_text, serialized, config.max_size, result.observations_used,
                     kToolVersion});
        cache.save();
    }
    return kExitOk;
}

int cmd_parallelize(const CommonOptions& common, const std::string& script_path,
                    const std::string& cache_path, PlanOptions options,
                    const std::string& script_out, const std::string& plan_out, bool run_now) {
    PipelineSpec spec;
    try {
        spec = parse_pipeline(read_file(script_path));
    } catch (const UnsupportedSyntax& e) {
        std::fprintf(stderr, "combsynth: %s\n", e.what());
        return kExitUnsupportedSyntax;
    }

    options.builtin_only = common.builtin_only;
    CombinerCache cache(cache_path);  // empty path: in-memory only
    PipelinePlan p = plan(spec, &cache, options);
    if (!cache_path.empty()) cache.save();

    for (size_t i = 0; i < p.stages.size(); ++i) {
        const StagePlan& s = p.stages[i];
        std::string line = "stage " + std::to_string(i) + ": " + s.command + " [" +
                           (s.mode == StageMode::parallel ? "parallel" : "sequential");
        if (s.combiner_eliminated)
            line += ", combiner eliminated";
        else if (s.combiner)
            line += ", " + format_composite(*s.combiner);
        line += "]";
        if (!s.note.empty()) line += " (" + s.note + ")";
        log_info(line);
    }

    if (!plan_out.empty()) write_file(plan_out, plan_to_json(p));
    if (!script_out.empty()) write_file(script_out, emit_script(p));
    if (run_now) {
        std::string in_path = resolve_path(p.spec.input_path);
        std::string input = in_path.empty() ? read_file("-") : read_file(in_path);
        std::string output = execute_parallel(p, input);
        write_file(resolve_path(p.spec.output_path), output);
        return kExitOk;
    }
    if (script_out.empty() && plan_out.empty()) {
        if (p.builtin_only)
            std::cout << plan_to_json(p);
        else
            std::cout << emit_script(p);
    }
    return kExitOk;
}

int cmd_run(const std::string& plan_path) {
    PipelinePlan p = plan_from_json(read_file(plan_path));
    std::string in_path = resolve_path(p.spec.input_path);
    std::string input = in_path.empty() ? read_file("-") : read_file(in_path);
    std::string output = execute_parallel(p, input);
    write_file(resolve_path(p.spec.output_path), output);
    return kExitOk;
}

int cmd_combine(const CommonOptions& common, const std::string& combiner_text,
                const std::string& cmd_text, const std::vector<std::string>& part_paths) {
    CompositeCombiner g = parse_composite(combiner_text);
    std::vector<std::string> parts;
    parts.reserve(part_paths.size());
    for (const std::string& path : part_paths) parts.push_back(read_file(path));

    if (cmd_text.empty()) {
        std::cout << combine_raw_parts(g, parts);
    } else {
        CommandHandle f = resolve_with(common, cmd_text);
        std::cout << combine_raw_parts(g, parts, &f);
    }
    std::cout.flush();
    return kExitOk;
}

int cmd_verify(const CommonOptions& common, const std::string& cmd_text,
               const std::string& combiner_text, int samples, uint64_t seed) {
    CommandHandle f = resolve_with(common, cmd_text);
    CompositeCombiner g = parse_composite(combiner_text);
    std::vector<std::pair<std::string, std::string>> pairs;
    try {
        pairs = sample_input_pairs(f, samples, seed);
    } catch (const ProbeError& e) {
        std::fprintf(stderr, "combsynth: %s\n", e.what());
        return kExitExecution;
    }

    int checked = 0;
    int skipped = 0;
    std::optional<DncCheck::Violation> violation;
    for (const auto& pair : pairs) {
        std::optional<Observation> obs = observe(f, pair);
        if (!obs) {
            skipped++;
            continue;
        }
        checked++;
        try {
            std::string combined = eval_composite(g, obs->y1, obs->y2, &f);
            if (combined != obs->y12) {
                violation = {pair, obs->y12, combined, ""};
                break;
            }
        } catch (const Error& e) {
            violation = {pair, obs->y12, "", e.what()};
            break;
        }
    }

    std::string verdict = violation           ? "VIOLATED"
                          : checked > 0       ? "HOLDS"
                                              : "UNKNOWN";
    std::printf("verdict: %s\n", verdict.c_str());
    std::printf("command: %s\n", cmd_text.c_str());
    std::printf("combiner: %s\n", combiner_text.c_str());
    std::printf("pairs-checked: %d\n", checked);
    std::printf("pairs-skipped: %d\n", skipped);
    if (violation) {
        std::printf("counterexample-x1: %s\n", hex_escape(violation->pair.first).c_str());
        std::printf("counterexample-x2: %s\n", hex_escape(violation->pair.second).c_str());
        std::printf("expected: %s\n", hex_escape(violation->expected).c_str());
        if (violation->note.empty())
            std::printf("actual: %s\n", hex_escape(violation->actual).c_str());
        else
            std::printf("combiner-error: %s\n", hex_escape(violation->note).c_str());
        return kExitNoCombiner;
    }
    if (checked == 0) {
        std::fprintf(stderr, "combsynth: the command failed on every sampled pair\n");
        return kExitExecution;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"combiner synthesis and pipeline parallelization"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    CommonOptions common;
    app.add_option("--log-level", common.log_level, "error, warn, info, or debug")
        ->capture_default_str();
    app.add_flag("--builtin-only", common.builtin_only,
                 "restrict commands to the built-in reference set");
    app.add_option("--timeout", common.timeout_seconds, "per-execution timeout in seconds")
        ->capture_default_str();

    std::string cmd_text;
    std::string combiner_text;
    std::string cache_path;
    SynthConfig synth_config;
    CLI::App* synth = app.add_subcommand("synth", "synthesize a combiner for one command");
    synth->add_option("--cmd", cmd_text, "command text")->required();
    synth->add_option("--max-size", synth_config.max_size, "largest combiner size tried")
        ->capture_default_str();
    synth->add_option("--seed", synth_config.seed, "input-generation seed")
        ->capture_default_str();
    synth->add_option("--pairs", synth_config.pairs_per_shape, "input pairs per shape")
        ->capture_default_str();
    synth->add_option("--cache", cache_path, "combiner cache file (read and updated)");

    std::string script_path;
    std::string script_out;
    std::string plan_out;
    bool run_now = false;
    PlanOptions plan_options;
    CLI::App* par = app.add_subcommand("parallelize", "plan a data-parallel pipeline");
    par->add_option("script", script_path, "pipeline script file, or - for stdin")->required();
    par->add_option("--width,-w", plan_options.width, "number of substreams")
        ->capture_default_str();
    par->add_option("--cache", cache_path, "combiner cache file (read and updated)");
    par->add_option("-o,--output", script_out, "write the parallel script here");
    par->add_option("--plan", plan_out, "write the plan as JSON here");
    par->add_flag("--run", run_now, "execute the plan now instead of emitting a script");
    par->add_flag("--parallelize-rerun", plan_options.parallelize_rerun,
                  "also parallelize stages whose only combiner reruns the command");
    bool no_sort_pin = false;
    par->add_flag("--no-sort-pin", no_sort_pin, "do not force sort stages to one thread");
    par->add_option("--max-size", plan_options.synth.max_size, "largest combiner size tried")
        ->capture_default_str();
    par->add_option("--seed", plan_options.synth.seed, "input-generation seed")
        ->capture_default_str();

    std::string plan_path;
    CLI::App* run = app.add_subcommand("run", "execute a previously saved plan");
    run->add_option("plan", plan_path, "plan JSON file")->required();

    std::vector<std::string> part_paths;
    CLI::App* combine = app.add_subcommand("combine", "recombine partial outputs");
    combine->add_option("--combiner", combiner_text, "combiner expression")->required();
    combine->add_option("--cmd", cmd_text, "original command (needed for rerun combiners)");
    combine->add_option("parts", part_paths, "partial output files, in order")->required();

    int samples = 100;
    uint64_t verify_seed = 0x5eed;
    CLI::App* verify = app.add_subcommand("verify", "check a combiner against its command");
    verify->add_option("--cmd", cmd_text, "command text")->required();
    verify->add_option("--combiner", combiner_text, "combiner expression")->required();
    verify->add_option("--samples", samples, "input pairs to test")->capture_default_str();
    verify->add_option("--seed", verify_seed, "input-generation seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (!set_log_threshold(common.log_level)) {
        std::fprintf(stderr, "combsynth: unknown log level '%s'\n", common.log_level.c_str());
        return kExitExecution;
    }
    plan_options.pin_sort_threads = !no_sort_pin;
    plan_options.synth.pool_size = synth_config.pool_size;

    try {
        if (synth->parsed()) return cmd_synth(common, cmd_text, cache_path, synth_config);
        if (par->parsed())
            return cmd_parallelize(common, script_path, cache_path, plan_options, script_out,
                                   plan_out, run_now);
        if (run->parsed()) return cmd_run(plan_path);
        if (combine->parsed()) return cmd_combine(common, combiner_text, cmd_text, part_paths);
        if (verify->parsed())
            return cmd_verify(common, cmd_text, combiner_text, samples, verify_seed);
    } catch (const UnsupportedSyntax& e) {
        std::fprintf(stderr, "combsynth: %s\n", e.what());
        return kExitUnsupportedSyntax;
    } catch (const UnsupportedCommand& e) {
        std::fprintf(stderr, "combsynth: %s\n", e.what());
        return kExitUnsupportedSyntax;
    } catch (const Error& e) {
        std::fprintf(stderr, "combsynth: %s\n", e.what());
        return kExitExecution;
    }
    return kExitExecution;
}
