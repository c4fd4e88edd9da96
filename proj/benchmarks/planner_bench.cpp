#include <benchmark/benchmark.h>

#include <random>

#include "tapfpc/lns.hpp"
#include "tapfpc/seed.hpp"

using namespace tapfpc;

namespace {

GridMap bench_map() { return load_map_file(std::string(TAPFPC_DATA_DIR) + "/maps/empty-16-16.map"); }

Instance bench_instance(int k, int m, int p, std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.num_agents = k;
    cfg.num_tasks = m;
    cfg.num_precedence = p;
    cfg.seed = seed;
    return generate_instance(cfg, bench_map());
}

}  // namespace

static void BM_DistanceField(benchmark::State& state) {
    GridMap map = bench_map();
    int source = 0;
    for (auto _ : state) {
        DistanceTable dist(map);
        benchmark::DoNotOptimize(dist.field(source));
        source = (source + 17) % map.size();
        if (!map.passable(source)) source = 0;
    }
}
BENCHMARK(BM_DistanceField);

static void BM_MlaStar(benchmark::State& state) {
    GridMap map = bench_map();
    DistanceTable dist(map);
    const int stages = (int)state.range(0);
    std::mt19937_64 rng(7);
    std::vector<int> goals;
    for (int j = 0; j < stages; ++j) goals.push_back((int)(rng() % map.size()));
    ReservationTable res;
    for (auto _ : state) {
        auto r = plan_mla_star(map, 0, goals, StageBounds::unbounded(stages), res, dist);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_MlaStar)->Arg(1)->Arg(2)->Arg(4);

static void BM_SippsWithReservations(benchmark::State& state) {
    GridMap map = bench_map();
    DistanceTable dist(map);
    std::mt19937_64 rng(11);
    ReservationTable res;
    for (int w = 0; w < 4; ++w) {
        TimedPath p;
        p.vertices.push_back((int)(rng() % map.size()));
        while (!map.passable(p.vertices[0])) p.vertices[0] = (int)(rng() % map.size());
        for (int s = 0; s < 24; ++s) {
            auto nbrs = map.neighbors(p.vertices.back());
            nbrs.push_back(p.vertices.back());
            p.vertices.push_back(nbrs[rng() % nbrs.size()]);
        }
        res.add_path(p, w % 2 == 1);
    }
    std::vector<int> goals = {map.index(14, 14), map.index(2, 13)};
    for (auto _ : state) {
        auto r = plan_sipps(map, 0, goals, StageBounds::unbounded(2), res, dist);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_SippsWithReservations);

static void BM_SeedConstruction(benchmark::State& state) {
    Instance inst = bench_instance(8, 40, 32, 99);
    for (auto _ : state) {
        DistanceTable dist(inst.map);
        SeedOptions options;
        auto seed = build_seed(inst, options, dist);
        benchmark::DoNotOptimize(seed);
    }
}
BENCHMARK(BM_SeedConstruction);

static void BM_LnsIteration(benchmark::State& state) {
    Instance inst = bench_instance(8, 40, 32, 99);
    DistanceTable dist(inst.map);
    SeedOptions options;
    SeedResult seed = build_seed(inst, options, dist);
    std::mt19937_64 rng(5);
    DestroyDiagnostics diagnostics;
    PbsOptions solver;
    solver.low_level = LowLevel::Sipps;
    for (auto _ : state) {
        auto seeds = seed_tasks(DestroyOp::Random, inst, seed.solution, diagnostics, 2, dist, rng);
        Neighborhood nbhd = close_and_excise(inst, seed.solution, seeds, dist);
        if (nbhd.failed) continue;
        RepairProposal proposal = build_proposal(inst, nbhd, RepairScope::Global, 2, dist);
        if (proposal.failed) continue;
        auto repair = repair_neighborhood(inst, nbhd, proposal, solver, dist);
        benchmark::DoNotOptimize(repair);
    }
}
BENCHMARK(BM_LnsIteration);

BENCHMARK_MAIN();
