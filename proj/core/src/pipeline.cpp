#include "combsynth/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <thread>
#include <utility>

#include "json.hpp"

#include "combsynth/errors.hpp"
#include "combsynth/eval.hpp"
#include "combsynth/logging.hpp"

namespace combsynth {

namespace {

// ---- script parsing ----------------------------------------------------------

struct Token {
    std::string raw;    // original spelling, quotes preserved
    std::string plain;  // unquoted value
    size_t offset = 0;  // position in the original script text
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r';
}

// The one command line of the script, with its offset: blank lines and
// comment lines (including a shebang) are skipped, a second command line is
// out of the subset.
std::pair<std::string, size_t> command_line_of(const std::string& script) {
    std::optional<std::pair<std::string, size_t>> found;
    size_t pos = 0;
    while (pos <= script.size()) {
        size_t end = script.find('\n', pos);
        if (end == std::string::npos) end = script.size();
        size_t first = pos;
        while (first < end && is_space(script[first])) first++;
        if (first < end && script[first] != '#') {
            if (found)
                throw UnsupportedSyntax("expected a single pipeline, found a second statement",
                                        first);
            found = {script.substr(pos, end - pos), pos};
        }
        pos = end + 1;
    }
    if (!found) throw UnsupportedSyntax("script contains no pipeline", 0);
    return *found;
}

struct ScannedPipeline {
    std::vector<std::vector<Token>> stages;
    std::optional<Token> redirect_file;
    size_t redirect_offset = 0;
};

ScannedPipeline scan_stages(const std::string& line, size_t base) {
    ScannedPipeline out;
    std::vector<Token> tokens;
    Token cur;
    bool in_token = false;
    // 0: normal, 1: saw '>', expecting the target, 2: target consumed
    int redirect_state = 0;

    auto begin_token = [&](size_t i) {
        if (!in_token) {
            cur.offset = base + i;
            in_token = true;
        }
    };
    auto flush_token = [&] {
        if (!in_token) return;
        if (redirect_state == 1) {
            out.redirect_file = cur;
            redirect_state = 2;
        } else if (redirect_state == 2) {
            throw UnsupportedSyntax("text after output redirection", cur.offset);
        } else {
            tokens.push_back(cur);
        }
        cur = Token{};
        in_token = false;
    };
    auto end_stage = [&](size_t i) {
        flush_token();
        if (tokens.empty())
            throw UnsupportedSyntax("empty pipeline stage", base + i);
        out.stages.push_back(std::move(tokens));
        tokens.clear();
    };

    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        char c = line[i];
        if (is_space(c)) {
            flush_token();
            i++;
        } else if (c == '\'') {
            size_t close = line.find('\'', i + 1);
            if (close == std::string::npos)
                throw UnsupportedSyntax("unterminated single quote", base + i);
            begin_token(i);
            cur.raw += line.substr(i, close - i + 1);
            cur.plain += line.substr(i + 1, close - i - 1);
            i = close + 1;
        } else if (c == '"') {
            begin_token(i);
            cur.raw += '"';
            i++;
            while (i < n && line[i] != '"') {
                if (line[i] == '\\' && i + 1 < n &&
                    (line[i + 1] == '"' || line[i + 1] == '\\')) {
                    cur.raw += line.substr(i, 2);
                    cur.plain += line[i + 1];
                    i += 2;
                } else if (line[i] == '`') {
                    throw UnsupportedSyntax("command substitution is not supported", base + i);
                } else if (line[i] == '$' && i + 1 < n && line[i + 1] == '(') {
                    throw UnsupportedSyntax("command substitution is not supported", base + i);
                } else {
                    cur.raw += line[i];
                    cur.plain += line[i];
                    i++;
                }
            }
            if (i >= n) throw UnsupportedSyntax("unterminated double quote", base + i);
            cur.raw += '"';
            i++;
        } else if (c == '\\' && i + 1 < n) {
            begin_token(i);
            cur.raw += line.substr(i, 2);
            cur.plain += line[i + 1];
            i += 2;
        } else if (c == '|') {
            if (i + 1 < n && line[i + 1] == '|')
                throw UnsupportedSyntax("'||' is not part of a pipeline", base + i);
            if (redirect_state != 0)
                throw UnsupportedSyntax("output redirection before the end of the pipeline",
                                        out.redirect_offset);
            end_stage(i);
            i++;
        } else if (c == '<') {
            throw UnsupportedSyntax("input redirection is not supported", base + i);
        } else if (c == '>') {
            if (i + 1 < n && line[i + 1] == '>')
                throw UnsupportedSyntax("append redirection is not supported", base + i);
            if (in_token && !cur.plain.empty() &&
                cur.plain.find_first_not_of("0123456789") == std::string::npos)
                throw UnsupportedSyntax("numbered redirection is not supported", cur.offset);
            if (redirect_state != 0)
                throw UnsupportedSyntax("multiple output redirections", base + i);
            flush_token();
            out.redirect_offset = base + i;
            redirect_state = 1;
            i++;
        } else if (c == ';' || c == '&' || c == '(' || c == ')' || c == '`') {
            throw UnsupportedSyntax(std::string("unsupported shell syntax '") + c + "'",
                                    base + i);
        } else if (c == '$' && i + 1 < n && line[i + 1] == '(') {
            throw UnsupportedSyntax("command substitution is not supported", base + i);
        } else if (c == '#' && !in_token) {
            break;  // comment to end of line
        } else {
            begin_token(i);
            cur.raw += c;
            cur.plain += c;
            i++;
        }
    }
    end_stage(n);
    if (redirect_state == 1)
        throw UnsupportedSyntax("missing output redirection target", out.redirect_offset);
    return out;
}

std::string join_raw(const std::vector<Token>& tokens) {
    std::string s;
    for (const Token& t : tokens) {
        if (!s.empty()) s += ' ';
        s += t.raw;
    }
    return s;
}

// ---- plan helpers ------------------------------------------------------------

bool starts_with_word(const std::string& text, const std::string& word) {
    if (text.rfind(word, 0) != 0) return false;
    return text.size() == word.size() || is_space(text[word.size()]);
}

// GNU sort spreads work over threads by default; pinning it keeps any
// speedup attributable to the pipeline's own parallelism. Thread count does
// not change the output bytes.
std::string pin_sort_threads(const std::string& text) {
    if (!starts_with_word(text, "sort")) return text;
    if (text.find("--parallel") != std::string::npos) return text;
    return text + " --parallel=1";
}

bool is_concat_only(const CompositeCombiner& g) {
    return g.members.size() == 1 && g.members[0].op == Op::concat;
}

bool is_rerun_only(const CompositeCombiner& g) {
    if (g.members.empty()) return false;
    for (const Combiner& c : g.members)
        if (c.op != Op::rerun) return false;
    return true;
}

// Whether the command emits newline-terminated output on a couple of small
// probe streams. Cache hits skip synthesis, so the flag on the handle may
// not have been exercised yet; probing is only needed when elimination is
// on the table. Failures count as non-stream.
bool probe_stream_output(const CommandHandle& f) {
    for (const std::string& probe : {"alpha\nbeta\n", "some words here\nmore\n"}) {
        try {
            run_command_raw(f, probe);
        } catch (const ExecError&) {
            return false;
        }
    }
    return !f.non_stream_output->load();
}

std::string mode_name(StageMode mode) {
    return mode == StageMode::parallel ? "parallel" : "sequential";
}

StageMode mode_from_name(const std::string& name) {
    if (name == "parallel") return StageMode::parallel;
    if (name == "sequential") return StageMode::sequential;
    throw ParseError("unknown stage mode '" + name + "'", 0);
}

// ---- runtime helpers ---------------------------------------------------------

// Runs one instance per part concurrently; instances are separate processes
// so a thread per slot is plenty. The first failure wins and is reported
// with its stage and instance.
std::vector<std::string> run_instances(const CommandHandle& f,
                                       const std::vector<std::string>& parts,
                                       const std::string& stage_label) {
    std::vector<std::string> outs(parts.size());
    std::vector<std::string> errors(parts.size());
    std::vector<std::thread> workers;
    workers.reserve(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) {
        workers.emplace_back([&, i] {
            try {
                outs[i] = run_command_raw(f, parts[i]);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        });
    }
    for (std::thread& w : workers) w.join();
    for (size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty())
            throw ExecError(stage_label + ", instance " + std::to_string(i) + ": " + errors[i]);
    }
    return outs;
}

std::string concat_all(const std::vector<std::string>& parts) {
    std::string s;
    for (const std::string& p : parts) s += p;
    return s;
}

// Quotes s for a POSIX shell. Paths that rely on variable expansion (a
// leading $) are left bare so the shell still expands them.
std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

std::string shell_path(const std::string& path) {
    if (!path.empty() && path[0] == '$') return path;
    return shell_quote(path);
}

}  // namespace

PipelineSpec parse_pipeline(const std::string& script_text) {
    auto [line, base] = command_line_of(script_text);
    ScannedPipeline scanned = scan_stages(line, base);

    PipelineSpec spec;
    if (scanned.redirect_file) spec.output_path = scanned.redirect_file->plain;

    size_t first_stage = 0;
    if (scanned.stages.size() >= 2) {
        const std::vector<Token>& head = scanned.stages[0];
        if (head.size() == 2 && head[0].plain == "cat" && !head[1].plain.empty() &&
            head[1].plain[0] != '-') {
            spec.input_path = head[1].plain;
            first_stage = 1;
        }
    }
    for (size_t i = first_stage; i < scanned.stages.size(); ++i)
        spec.stages.push_back(join_raw(scanned.stages[i]));
    return spec;
}

std::string resolve_path(const std::string& path) {
    if (path.empty() || path[0] != '$') return path;
    std::string name;
    std::string rest;
    if (path.size() > 1 && path[1] == '{') {
        size_t close = path.find('}', 2);
        if (close == std::string::npos) throw Error("unterminated '${' in '" + path + "'");
        name = path.substr(2, close - 2);
        rest = path.substr(close + 1);
    } else {
        size_t end = 1;
        while (end < path.size() &&
               (std::isalnum(static_cast<unsigned char>(path[end])) || path[end] == '_'))
            end++;
        name = path.substr(1, end - 1);
        rest = path.substr(end);
    }
    if (name.empty()) throw Error("empty variable name in '" + path + "'");
    const char* value = std::getenv(name.c_str());
    if (!value) throw Error("environment variable '" + name + "' is not set");
    return value + rest;
}

PipelinePlan plan(const PipelineSpec& spec, CombinerCache* cache, const PlanOptions& options) {
    if (options.width < 2) throw Error("parallel width must be at least 2");
    if (spec.stages.empty()) throw Error("pipeline has no stages");

    PipelinePlan out;
    out.spec = spec;
    out.width = options.width;
    out.builtin_only = options.builtin_only;

    struct Attached {
        std::optional<CompositeCombiner> combiner;
        bool stream_output = false;
        std::string note;
    };
    std::vector<Attached> attached;
    attached.reserve(spec.stages.size());

    for (const std::string& text : spec.stages) {
        Attached a;
        CommandHandle f = resolve_command(text, options.builtin_only);
        std::optional<CacheEntry> hit = cache ? cache->lookup(text) : std::nullopt;
        if (hit) {
            if (hit->combiner.empty()) {
                a.note = "no combiner (cached)";
            } else {
                a.combiner = parse_composite(hit->combiner);
                // The cached record says nothing about output shape; probe
                // before relying on it for elimination.
                if (is_concat_only(*a.combiner)) a.stream_output = probe_stream_output(f);
            }
        } else {
            log_info("synthesizing combiner for '" + text + "'");
            SynthesisResult r = synthesize(f, options.synth);
            std::string serialized;
            if (r.status == SynthStatus::ok && r.composite) {
                a.combiner = r.composite;
                serialized = format_composite(*r.composite);
                a.stream_output = !f.non_stream_output->load();
            } else if (r.status == SynthStatus::unsupported) {
                a.note = "output shape unsupported";
            } else {
                a.note = "no plausible combiner";
            }
            if (cache) {
                cache->store({text, serialized, options.synth.max_size,
                              r.observations_used, kToolVersion});
            }
        }
        if (!a.combiner && !a.note.empty())
            log_warn("stage '" + text + "' runs sequentially: " + a.note);
        attached.push_back(std::move(a));
    }

    for (size_t i = 0; i < spec.stages.size(); ++i) {
        StagePlan sp;
        sp.command = spec.stages[i];
        sp.exec_command =
            options.pin_sort_threads ? pin_sort_threads(spec.stages[i]) : spec.stages[i];
        sp.combiner = attached[i].combiner;
        sp.note = attached[i].note;
        if (!sp.combiner) {
            sp.mode = StageMode::sequential;
        } else if (is_rerun_only(*sp.combiner) && !options.parallelize_rerun) {
            sp.mode = StageMode::sequential;
            sp.note = "rerun combiner, kept sequential";
        } else {
            sp.mode = StageMode::parallel;
        }
        out.stages.push_back(std::move(sp));
    }

    // A concatenation combiner over genuine streams adds nothing between two
    // parallel stages: the substreams chain directly and only the last stage
    // of the run combines.
    for (size_t i = 0; i + 1 < out.stages.size(); ++i) {
        StagePlan& sp = out.stages[i];
        if (sp.mode != StageMode::parallel) continue;
        if (out.stages[i + 1].mode != StageMode::parallel) continue;
        if (!sp.combiner || !is_concat_only(*sp.combiner)) continue;
        if (!attached[i].stream_output) continue;
        sp.combiner.reset();
        sp.combiner_eliminated = true;
    }

    int next_group = 0;
    for (size_t i = 0; i < out.stages.size(); ++i) {
        bool chained = i > 0 && out.stages[i].mode == StageMode::parallel &&
                       out.stages[i - 1].mode == StageMode::parallel &&
                       out.stages[i - 1].combiner_eliminated;
        out.stages[i].group = chained ? out.stages[i - 1].group : next_group++;
    }
    return out;
}

std::string combine_k(const CompositeCombiner& g, const std::vector<std::string>& parts,
                      const CommandHandle* f) {
    if (parts.empty()) throw Error("combine_k needs at least one part");
    if (parts.size() == 1) return parts[0];
    if (g.members.size() == 1) {
        const Combiner& c = g.members[0];
        if (c.op == Op::merge) return unix_merge(c.merge_flags, parts);
        if (c.op == Op::concat) return concat_all(parts);
        if (c.op == Op::rerun) {
            if (!f) throw Error("rerun combiner needs the original command");
            return run_command(*f, concat_all(parts));
        }
    }
    std::string acc = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) acc = eval_composite(g, acc, parts[i], f);
    return acc;
}

std::string combine_raw_parts(const CompositeCombiner& g,
                              const std::vector<std::string>& raw_parts,
                              const CommandHandle* f) {
    std::vector<std::string> kept;
    kept.reserve(raw_parts.size());
    for (const std::string& p : raw_parts)
        if (!p.empty()) kept.push_back(p);
    if (kept.empty()) return "";
    if (is_rerun_only(g)) {
        if (!f) throw Error("rerun combiner needs the original command");
        return run_command_raw(*f, concat_all(kept));
    }
    bool last_is_stream = kept.back().back() == '\n';
    if (is_concat_only(g)) return concat_all(kept);
    for (std::string& p : kept)
        if (p.back() != '\n') p += '\n';
    std::string combined = combine_k(g, kept, f);
    if (!last_is_stream && !combined.empty() && combined.back() == '\n') combined.pop_back();
    return combined;
}

std::string execute_parallel(const PipelinePlan& plan, const std::string& input) {
    std::string current = input;
    size_t i = 0;
    while (i < plan.stages.size()) {
        const StagePlan& stage = plan.stages[i];
        CommandHandle f = resolve_command(stage.exec_command, plan.builtin_only);
        if (stage.mode == StageMode::sequential) {
            current = run_command_raw(f, current);
            i++;
            continue;
        }
        std::vector<std::string> parts = split_stream(current, plan.width);
        if (parts.empty()) parts.push_back("");
        size_t j = i;
        while (true) {
            const StagePlan& s = plan.stages[j];
            CommandHandle fj = resolve_command(s.exec_command, plan.builtin_only);
            std::string label = "stage " + std::to_string(j) + " '" + s.command + "'";
            parts = run_instances(fj, parts, label);
            if (!s.combiner_eliminated) break;
            j++;
        }
        const StagePlan& last = plan.stages[j];
        CommandHandle fl = resolve_command(last.exec_command, plan.builtin_only);
        current = combine_raw_parts(*last.combiner, parts, &fl);
        i = j + 1;
    }
    return current;
}

std::string execute_serial(const PipelineSpec& spec, const std::string& input,
                           bool builtin_only) {
    std::string current = input;
    for (const std::string& text : spec.stages) {
        CommandHandle f = resolve_command(text, builtin_only);
        current = run_command_raw(f, current);
    }
    return current;
}

std::string emit_script(const PipelinePlan& plan) {
    if (plan.builtin_only)
        throw Error("built-in commands only exist inside this tool; a shell script cannot "
                    "reproduce a builtin-only plan");
    std::string s;
    s += "#!/bin/sh\n";
    s += "# Data-parallel version of:\n";
    s += "#  ";
    if (!plan.spec.input_path.empty()) s += " cat " + plan.spec.input_path + " |";
    for (size_t i = 0; i < plan.stages.size(); ++i) {
        if (i > 0 || !plan.spec.input_path.empty()) s += " ";
        s += plan.stages[i].command;
        if (i + 1 < plan.stages.size()) s += " |";
    }
    if (!plan.spec.output_path.empty()) s += " > " + plan.spec.output_path;
    s += "\n";
    s += "# Partial outputs are recombined so the bytes match the serial run.\n";
    s += "set -eu\n";
    s += "\n";
    s += ": \"${COMBSYNTH_BIN:=combsynth}\"\n";
    s += "WIDTH=" + std::to_string(plan.width) + "\n";
    s += "WORK=$(mktemp -d \"${TMPDIR:-/tmp}/combsynth.XXXXXX\")\n";
    s += "trap 'rm -rf \"$WORK\"' EXIT\n";
    s += "\n";
    std::string source = plan.spec.input_path.empty() ? "-" : plan.spec.input_path;
    s += "IN=" + shell_path(source) + "\n";
    s += "if [ \"$#\" -ge 1 ]; then IN=$1; fi\n";
    s += "if [ \"$IN\" = - ]; then cat >\"$WORK/cur\"; else cat -- \"$IN\" >\"$WORK/cur\"; fi\n";

    size_t i = 0;
    while (i < plan.stages.size()) {
        const StagePlan& stage = plan.stages[i];
        s += "\n";
        if (stage.mode == StageMode::sequential) {
            s += "# stage " + std::to_string(i) + " (sequential): " + stage.command + "\n";
            s += "sh -c " + shell_quote(stage.exec_command) +
                 " <\"$WORK/cur\" >\"$WORK/next\"\n";
            s += "mv \"$WORK/next\" \"$WORK/cur\"\n";
            i++;
            continue;
        }
        std::string g = "g" + std::to_string(i);
        std::string parts = "\"$WORK\"/" + g + ".[a-z][a-z]";
        s += "# stages " + std::to_string(i) + ".. run on $WIDTH substreams\n";
        s += "split -n l/\"$WIDTH\" -- \"$WORK/cur\" \"$WORK/" + g + ".\"\n";
        s += "[ -e \"$WORK/" + g + ".aa\" ] || : >\"$WORK/" + g + ".aa\"\n";
        size_t j = i;
        std::string suffix;
        while (true) {
            const StagePlan& st = plan.stages[j];
            std::string next_suffix = ".s" + std::to_string(j);
            s += "# stage " + std::to_string(j) + ": " + st.command +
                 (st.combiner_eliminated ? " (combiner eliminated)" : "") + "\n";
            s += "for f in " + parts + suffix + "; do\n";
            s += "  sh -c " + shell_quote(st.exec_command) + " <\"$f\" >\"$f" +
                 next_suffix + "\" &\n";
            s += "done\n";
            s += "wait\n";
            suffix += next_suffix;
            if (!st.combiner_eliminated) break;
            j++;
        }
        const StagePlan& last = plan.stages[j];
        s += "\"$COMBSYNTH_BIN\" combine --combiner " +
             shell_quote(format_composite(*last.combiner)) + " --cmd " +
             shell_quote(last.exec_command) + " -- " + parts + suffix + " >\"$WORK/cur\"\n";
        i = j + 1;
    }

    s += "\n";
    if (plan.spec.output_path.empty())
        s += "cat -- \"$WORK/cur\"\n";
    else
        s += "cat -- \"$WORK/cur\" >" + shell_path(plan.spec.output_path) + "\n";
    return s;
}

std::string plan_to_json(const PipelinePlan& plan) {
    nlohmann::json stages = nlohmann::json::array();
    for (const StagePlan& sp : plan.stages) {
        nlohmann::json stage{{"command", sp.command},
                             {"exec_command", sp.exec_command},
                             {"mode", mode_name(sp.mode)},
                             {"combiner_eliminated", sp.combiner_eliminated},
                             {"group", sp.group},
                             {"note", sp.note}};
        stage["combiner"] =
            sp.combiner ? nlohmann::json(format_composite(*sp.combiner)) : nlohmann::json();
        stages.push_back(std::move(stage));
    }
    nlohmann::json doc{{"version", kToolVersion},
                       {"width", plan.width},
                       {"builtin_only", plan.builtin_only},
                       {"input", plan.spec.input_path},
                       {"output", plan.spec.output_path},
                       {"stages", stages}};
    return doc.dump(2) + "\n";
}

PipelinePlan plan_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        PipelinePlan plan;
        plan.width = doc.at("width").get<int>();
        plan.builtin_only = doc.value("builtin_only", false);
        plan.spec.input_path = doc.value("input", std::string());
        plan.spec.output_path = doc.value("output", std::string());
        for (const nlohmann::json& stage : doc.at("stages")) {
            StagePlan sp;
            sp.command = stage.at("command").get<std::string>();
            sp.exec_command = stage.value("exec_command", sp.command);
            sp.mode = mode_from_name(stage.at("mode").get<std::string>());
            sp.combiner_eliminated = stage.value("combiner_eliminated", false);
            sp.group = stage.value("group", 0);
            sp.note = stage.value("note", std::string());
            if (stage.contains("combiner") && !stage.at("combiner").is_null())
                sp.combiner = parse_composite(stage.at("combiner").get<std::string>());
            plan.spec.stages.push_back(sp.command);
            plan.stages.push_back(std::move(sp));
        }
        if (plan.stages.empty()) throw Error("plan has no stages");
        if (plan.width < 2) throw Error("plan width must be at least 2");
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid plan JSON: ") + e.what(), 0);
    }
}

}  // namespace combsynth
