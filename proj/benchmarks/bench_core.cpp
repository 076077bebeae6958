#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "combsynth/combiner.hpp"
#include "combsynth/command.hpp"
#include "combsynth/enumerate.hpp"
#include "combsynth/errors.hpp"
#include "combsynth/eval.hpp"

using namespace combsynth;

namespace {

std::string counted_table(int rows) {
    std::string out;
    std::mt19937_64 rng(5);
    for (int i = 0; i < rows; i++) {
        char line[64];
        snprintf(line, sizeof line, "%7d word%03d\n", static_cast<int>(rng() % 9000 + 1),
                 static_cast<int>(rng() % 1000));
        out += line;
    }
    return out;
}

std::string sorted_lines(int rows) {
    std::string out;
    for (int i = 0; i < rows; i++) out += "line" + std::to_string(1000000 + i) + "\n";
    return out;
}

void bench_eval_add_chain(benchmark::State& state) {
    Combiner g = ops::back(Delim::nl, ops::add());
    for (auto _ : state) benchmark::DoNotOptimize(eval(g, "123456\n", "654321\n"));
}
BENCHMARK(bench_eval_add_chain);

void bench_eval_stitch2(benchmark::State& state) {
    Combiner g = ops::stitch2(Delim::sp, ops::add(), ops::first());
    std::string y1 = counted_table(static_cast<int>(state.range(0)));
    std::string y2 = counted_table(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        try {
            benchmark::DoNotOptimize(eval(g, y1, y2));
        } catch (const Error&) {
        }
    }
}
BENCHMARK(bench_eval_stitch2)->Arg(64)->Arg(1024);

void bench_merge(benchmark::State& state) {
    std::string y1 = sorted_lines(static_cast<int>(state.range(0)));
    std::string y2 = sorted_lines(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(unix_merge({}, {y1, y2}));
}
BENCHMARK(bench_merge)->Arg(256)->Arg(4096);

void bench_enumerate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(all_candidates(static_cast<int>(state.range(0))));
}
BENCHMARK(bench_enumerate)->Arg(5)->Arg(6)->Arg(7);

void bench_split_stream(benchmark::State& state) {
    std::string s = sorted_lines(20000);
    for (auto _ : state) benchmark::DoNotOptimize(split_stream(s, 16));
}
BENCHMARK(bench_split_stream);

void bench_domain_check(benchmark::State& state) {
    Combiner g = ops::stitch2(Delim::sp, ops::add(), ops::first());
    std::string y = counted_table(512);
    for (auto _ : state) benchmark::DoNotOptimize(in_domain(g, y));
}
BENCHMARK(bench_domain_check);

}  // namespace

BENCHMARK_MAIN();
