#include "combsynth/command.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

#include "combsynth/errors.hpp"
#include "combsynth/strutil.hpp"

extern char** environ;

namespace combsynth {

namespace {

// Writes into a broken pipe must come back as EPIPE, not kill the process.
void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { signal(SIGPIPE, SIG_IGN); });
}

bool is_shell_meta(char c) {
    return strchr("|&;<>()`$*?[]~#\\!{}", c) != nullptr || c == '\n';
}

// Splits command text into words honoring single and double quotes. Returns
// nullopt when the text needs a real shell (metacharacters present).
std::optional<std::vector<std::string>> tokenize_simple(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    bool in_word = false;
    size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\'') {
            size_t end = text.find('\'', i + 1);
            if (end == std::string::npos) return std::nullopt;
            cur += text.substr(i + 1, end - i - 1);
            in_word = true;
            i = end + 1;
        } else if (c == '"') {
            i++;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size() &&
                    (text[i + 1] == '"' || text[i + 1] == '\\')) {
                    cur += text[i + 1];
                    i += 2;
                } else if (text[i] == '$' || text[i] == '`') {
                    return std::nullopt;
                } else {
                    cur += text[i++];
                }
            }
            if (i >= text.size()) return std::nullopt;
            in_word = true;
            i++;
        } else if (c == ' ' || c == '\t') {
            if (in_word || !cur.empty()) words.push_back(cur);
            cur.clear();
            in_word = false;
            i++;
        } else if (is_shell_meta(c)) {
            return std::nullopt;
        } else {
            cur += c;
            in_word = true;
            i++;
        }
    }
    if (in_word || !cur.empty()) words.push_back(cur);
    if (words.empty()) return std::nullopt;
    return words;
}

// Environment for child processes: the caller's, minus locale variables,
// plus LC_ALL=C so byte collation is reproducible.
std::vector<std::string> child_env(bool force_c_locale) {
    std::vector<std::string> env;
    for (char** e = environ; *e; e++) {
        std::string entry(*e);
        if (force_c_locale &&
            (entry.rfind("LANG=", 0) == 0 || entry.rfind("LC_", 0) == 0 ||
             entry.rfind("LANGUAGE=", 0) == 0))
            continue;
        env.push_back(entry);
    }
    if (force_c_locale) env.push_back("LC_ALL=C");
    return env;
}

struct RawResult {
    std::string out;
    std::string err;
    int exit_code = -1;
    bool timed_out = false;
};

RawResult run_child(const std::vector<std::string>& argv, bool via_shell,
                    const std::string& shell_text, const std::string& input,
                    std::chrono::milliseconds timeout, bool force_c_locale) {
    ignore_sigpipe_once();

    // Close-on-exec keeps concurrently forked siblings from inheriting each
    // other's pipe ends; a leaked stdin write end would withhold EOF from
    // another child until this one exits. dup2 below clears the flag on the
    // three fds the child actually keeps.
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 ||
        pipe2(err_pipe, O_CLOEXEC) != 0)
        throw SpawnError(std::string("pipe: ") + strerror(errno));

    std::vector<std::string> env_storage = child_env(force_c_locale);
    std::vector<char*> envp;
    envp.reserve(env_storage.size() + 1);
    for (std::string& e : env_storage) envp.push_back(e.data());
    envp.push_back(nullptr);

    std::vector<char*> args;
    if (via_shell) {
        args = {const_cast<char*>("/bin/sh"), const_cast<char*>("-c"),
                const_cast<char*>(shell_text.c_str()), nullptr};
    } else {
        args.reserve(argv.size() + 1);
        for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
    }

    pid_t pid = fork();
    if (pid < 0) throw SpawnError(std::string("fork: ") + strerror(errno));
    if (pid == 0) {
        dup2(in_pipe[0], 0);
        dup2(out_pipe[1], 1);
        dup2(err_pipe[1], 2);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            close(fd);
        signal(SIGPIPE, SIG_DFL);
        if (via_shell)
            execve("/bin/sh", args.data(), envp.data());
        else
            execvpe(args[0], args.data(), envp.data());
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    int in_fd = in_pipe[1], out_fd = out_pipe[0], err_fd = err_pipe[0];
    for (int fd : {in_fd, out_fd, err_fd}) fcntl(fd, F_SETFL, O_NONBLOCK);
    if (input.empty()) {
        close(in_fd);
        in_fd = -1;
    }

    RawResult res;
    size_t written = 0;
    auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[65536];

    while (out_fd >= 0 || err_fd >= 0 || in_fd >= 0) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            res.timed_out = true;
            break;
        }
        int remaining = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());

        struct pollfd fds[3];
        int nfds = 0;
        int in_idx = -1, out_idx = -1, err_idx = -1;
        if (in_fd >= 0) {
            in_idx = nfds;
            fds[nfds++] = {in_fd, POLLOUT, 0};
        }
        if (out_fd >= 0) {
            out_idx = nfds;
            fds[nfds++] = {out_fd, POLLIN, 0};
        }
        if (err_fd >= 0) {
            err_idx = nfds;
            fds[nfds++] = {err_fd, POLLIN, 0};
        }
        int rc = poll(fds, nfds, std::min(remaining, 250));
        if (rc < 0 && errno != EINTR)
            throw SpawnError(std::string("poll: ") + strerror(errno));

        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR))) {
            ssize_t n = write(in_fd, input.data() + written,
                              std::min<size_t>(input.size() - written, sizeof buf));
            if (n > 0) {
                written += static_cast<size_t>(n);
            } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
                // Child stopped reading (e.g. it only needed a prefix).
                written = input.size();
            }
            if (written >= input.size()) {
                close(in_fd);
                in_fd = -1;
            }
        }
        for (auto [idx, fd, sink] : {std::tuple{out_idx, &out_fd, &res.out},
                                     std::tuple{err_idx, &err_fd, &res.err}}) {
            if (idx < 0 || !(fds[idx].revents & (POLLIN | POLLHUP | POLLERR))) continue;
            ssize_t n = read(*fd, buf, sizeof buf);
            if (n > 0) {
                sink->append(buf, static_cast<size_t>(n));
            } else if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
                close(*fd);
                *fd = -1;
            }
        }
    }
    if (in_fd >= 0) close(in_fd);
    if (out_fd >= 0) close(out_fd);
    if (err_fd >= 0) close(err_fd);

    if (res.timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, nullptr, 0);
        return res;
    }

    // Output is closed but the child may still be running; honor the deadline.
    int status = 0;
    while (true) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw SpawnError(std::string("waitpid: ") + strerror(errno));
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            res.timed_out = true;
            return res;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    return res;
}

std::string stderr_excerpt(const std::string& err) {
    std::string e = err.substr(0, 160);
    while (!e.empty() && (e.back() == '\n' || e.back() == '\r')) e.pop_back();
    return e;
}

// ---- builtin reference commands ------------------------------------------

// Lines of a possibly unterminated byte string; a trailing fragment counts
// as a line, matching how coreutils treat missing final newlines.
std::vector<std::string> loose_lines(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (start < s.size()) {
        size_t pos = s.find('\n', start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const std::string& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string builtin_identity(const std::string& in) { return in; }

std::string builtin_line_count(const std::string& in) {
    return std::to_string(count_delim('\n', in)) + "\n";
}

std::string builtin_lowercase(const std::string& in) {
    std::string out = in;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string builtin_sort_lines(const std::string& in) {
    if (in.empty()) return in;
    std::vector<std::string> lines = loose_lines(in);
    std::sort(lines.begin(), lines.end());
    return join_lines(lines);
}

std::string builtin_uniq(const std::string& in) {
    if (in.empty()) return in;
    std::vector<std::string> lines = loose_lines(in);
    std::vector<std::string> kept;
    for (const std::string& l : lines)
        if (kept.empty() || kept.back() != l) kept.push_back(l);
    return join_lines(kept);
}

std::string builtin_uniq_count(const std::string& in) {
    if (in.empty()) return in;
    std::vector<std::string> lines = loose_lines(in);
    std::string out;
    size_t i = 0;
    while (i < lines.size()) {
        size_t j = i;
        while (j < lines.size() && lines[j] == lines[i]) j++;
        char head[32];
        snprintf(head, sizeof head, "%7zu ", j - i);  // uniq -c field format
        out += head;
        out += lines[i];
        out += '\n';
        i = j;
    }
    return out;
}

const std::map<std::string, std::string (*)(const std::string&)>& builtin_table() {
    static const std::map<std::string, std::string (*)(const std::string&)> table = {
        {"identity", builtin_identity},     {"line-count", builtin_line_count},
        {"lowercase", builtin_lowercase},   {"sort-lines", builtin_sort_lines},
        {"uniq", builtin_uniq},             {"uniq-count", builtin_uniq_count},
    };
    return table;
}

}  // namespace

CommandHandle make_external(const std::string& text) {
    CommandHandle h;
    h.kind = CommandHandle::Kind::external;
    h.shell_text = text;
    if (auto words = tokenize_simple(text)) h.argv = *words;
    return h;
}

CommandHandle make_builtin(const std::string& name) {
    if (!is_builtin_name(name)) throw Error("unknown builtin command '" + name + "'");
    CommandHandle h;
    h.kind = CommandHandle::Kind::builtin;
    h.builtin_name = name;
    h.shell_text = name;
    return h;
}

bool is_builtin_name(const std::string& name) {
    return builtin_table().count(name) > 0;
}

std::vector<std::string> builtin_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : builtin_table()) names.push_back(name);
    return names;
}

CommandHandle resolve_command(const std::string& text, bool builtin_only) {
    if (is_builtin_name(text)) return make_builtin(text);
    if (builtin_only) throw Error("'" + text + "' is not a builtin and --builtin-only is set");
    return make_external(text);
}

std::string run_command_raw(const CommandHandle& f, const std::string& input) {
    std::string out;
    if (f.kind == CommandHandle::Kind::builtin) {
        out = builtin_table().at(f.builtin_name)(input);
    } else {
        RawResult res = run_child(f.argv, f.argv.empty(), f.shell_text, input, f.timeout,
                                  f.force_c_locale);
        if (res.timed_out)
            throw TimeoutError("'" + f.display() + "' timed out after " +
                               std::to_string(f.timeout.count()) + " ms");
        if (res.exit_code != 0) throw NonZeroExit(res.exit_code, stderr_excerpt(res.err));
        out = std::move(res.out);
    }
    if (out.empty() || out.back() != '\n') f.non_stream_output->store(true);
    return out;
}

std::string run_command(const CommandHandle& f, const std::string& input) {
    std::string out = run_command_raw(f, input);
    if (!out.empty() && out.back() != '\n') out += '\n';
    return out;
}

std::string run_argv(const std::vector<std::string>& argv, const std::string& input,
                     std::chrono::milliseconds timeout, bool force_c_locale) {
    RawResult res = run_child(argv, false, "", input, timeout, force_c_locale);
    if (res.timed_out)
        throw TimeoutError("'" + argv[0] + "' timed out after " + std::to_string(timeout.count()) +
                           " ms");
    if (res.exit_code != 0) throw NonZeroExit(res.exit_code, stderr_excerpt(res.err));
    return res.out;
}

std::optional<Observation> observe(const CommandHandle& f,
                                   const std::pair<std::string, std::string>& pair,
                                   std::string* err) {
    try {
        Observation obs;
        obs.y1 = run_command(f, pair.first);
        obs.y2 = run_command(f, pair.second);
        obs.y12 = run_command(f, pair.first + pair.second);
        obs.source_pair = pair;
        return obs;
    } catch (const ExecError& e) {
        if (err) *err = e.what();
        return std::nullopt;
    }
}

std::vector<std::optional<Observation>> observe_many(
    const CommandHandle& f, const std::vector<std::pair<std::string, std::string>>& pairs,
    int pool_size) {
    std::vector<std::optional<Observation>> results(pairs.size());
    if (pool_size <= 1 || pairs.size() <= 1 || f.kind == CommandHandle::Kind::builtin) {
        for (size_t i = 0; i < pairs.size(); i++) results[i] = observe(f, pairs[i]);
        return results;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= pairs.size()) return;
            results[i] = observe(f, pairs[i]);
        }
    };
    size_t nthreads = std::min<size_t>(static_cast<size_t>(pool_size), pairs.size());
    std::vector<std::thread> threads;
    for (size_t t = 0; t < nthreads; t++) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    return results;
}

std::vector<std::string> split_stream(const std::string& s, int k) {
    std::vector<std::string> parts;
    if (s.empty()) return parts;
    // Candidate cut positions: just after each newline.
    std::vector<size_t> cuts;
    for (size_t i = 0; i < s.size(); i++)
        if (s[i] == '\n') cuts.push_back(i + 1);
    if (cuts.empty() || cuts.back() != s.size()) cuts.push_back(s.size());

    size_t prev = 0;
    size_t cut_lo = 0;  // first cut index strictly beyond prev
    for (int i = 1; i < k && prev < s.size(); i++) {
        size_t ideal = s.size() * static_cast<size_t>(i) / static_cast<size_t>(k);
        // Nearest cut to the ideal byte offset that still leaves room behind.
        size_t best = std::string::npos;
        for (size_t c = cut_lo; c < cuts.size(); c++) {
            if (cuts[c] <= prev) {
                cut_lo = c + 1;
                continue;
            }
            if (best == std::string::npos ||
                (ideal > cuts[c] ? ideal - cuts[c] : cuts[c] - ideal) <
                    (ideal > best ? ideal - best : best - ideal))
                best = cuts[c];
            if (cuts[c] >= ideal) break;
        }
        if (best == std::string::npos || best >= s.size()) break;
        parts.push_back(s.substr(prev, best - prev));
        prev = best;
    }
    if (prev < s.size()) parts.push_back(s.substr(prev));
    return parts;
}

}  // namespace combsynth
