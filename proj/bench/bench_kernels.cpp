#include <benchmark/benchmark.h>

#include <cmath>

#include "geobeam/assembler.hpp"
#include "geobeam/kernels.hpp"

using namespace geobeam;

namespace {

struct FrameSetup {
    CurvatureModel model;
    FloquetFrame frame;
    std::vector<double> s, x, energies;
    FrameNodes fn;
    std::vector<cplx> W, Q;
    int J = 20;

    explicit FrameSetup(int ns) {
        model.R = FourierSeries::from_cos_sin({{2.0, 0.0}, {0.3, 0.0}});
        model.r0 = 1.0;
        frame = solve_hill(model);
        for (int a = 0; a < ns; ++a) s.push_back(kTwoPi * a / ns);
        x = XGrid{256, 10.0}.nodes();
        for (int j = 0; j <= J; ++j) energies.push_back(mode_energy(frame, model, j));
        fn = frame_nodes(frame, s);
        frame_table(fn, energies, x, J, W, Policy::Serial);
        Q.resize(s.size() * x.size());
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t i = 0; i < x.size(); ++i)
                Q[a * x.size() + i] = std::polar(std::exp(-0.3 * x[i] * x[i]), 0.2 * x[i] + s[a]);
    }
};

Policy policy_of(const benchmark::State& state) { return state.range(1) ? Policy::Parallel : Policy::Serial; }

void BM_frame_table(benchmark::State& state) {
    FrameSetup F(static_cast<int>(state.range(0)));
    std::vector<cplx> W;
    for (auto _ : state) {
        frame_table(F.fn, F.energies, F.x, F.J, W, policy_of(state));
        benchmark::DoNotOptimize(W.data());
    }
}

void BM_frame_project(benchmark::State& state) {
    FrameSetup F(static_cast<int>(state.range(0)));
    const int ns = static_cast<int>(F.s.size()), nx = static_cast<int>(F.x.size());
    std::vector<cplx> h;
    for (auto _ : state) {
        frame_project(F.W, F.Q, F.J, ns, nx, F.x[1] - F.x[0], h, policy_of(state));
        benchmark::DoNotOptimize(h.data());
    }
}

void BM_strip_laplacian(benchmark::State& state) {
    CurvatureModel model = CurvatureModel::from_curvature(
        {FourierSeries::from_cos_sin({{2.0, 0.0}, {0.3, 0.0}}), FourierSeries{}, FourierSeries::constant(-8.0)}, 2.0);
    const StripGrid g{static_cast<int>(state.range(0)), 4 * static_cast<int>(state.range(0)), 2.0, kTwoPi, 16};
    const MetricStrip metric = synthesize_metric(model, g);
    const LaplacianCoeffs L = laplacian_coeffs(metric, g.carrier);
    std::vector<cplx> U(g.size()), out;
    for (int a = 0; a < g.ns; ++a)
        for (int i = 0; i < g.nr; ++i) U[a * g.nr + i] = std::polar(std::exp(-4.0 * g.r(i) * g.r(i)), g.s(a));
    for (auto _ : state) {
        strip_laplacian(L, U, out, policy_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_frame_table)->ArgNames({"ns", "parallel"})->ArgsProduct({{32, 128}, {0, 1}});
BENCHMARK(BM_frame_project)->ArgNames({"ns", "parallel"})->ArgsProduct({{32, 128}, {0, 1}});
BENCHMARK(BM_strip_laplacian)->ArgNames({"ns", "parallel"})->ArgsProduct({{32, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
