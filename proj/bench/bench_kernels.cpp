#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "skewbs/reference.hpp"
#include "skewbs/regression.hpp"

using namespace skewbs;

namespace {

struct Problem {
  Dataset data;
  ModelParams theta;
};

const Problem& problem(Eigen::Index n) {
  static std::map<Eigen::Index, Problem> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) X.row(i) << 1.0, z(rng), z(rng);
  const ModelParams theta{Eigen::Vector3d(1.0, -0.5, 0.25), 1.2, 1.5};
  return cache.emplace(n, Problem{simulate(X, theta, 7), theta}).first->second;
}

LikelihoodOptions policy(ExecPolicy p) {
  LikelihoodOptions o;
  o.policy = p;
  return o;
}

void loglik_reference(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(reference::loglik(pr.data, pr.theta, default_rule()));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <ExecPolicy P>
void loglik_kernel(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  const LikelihoodOptions o = policy(P);
  for (auto _ : st) benchmark::DoNotOptimize(loglik(pr.data, pr.theta, o));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void score_reference(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(reference::score(pr.data, pr.theta, default_rule()));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <ExecPolicy P>
void score_kernel(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  const LikelihoodOptions o = policy(P);
  for (auto _ : st) benchmark::DoNotOptimize(score(pr.data, pr.theta, o));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void information_reference(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(reference::observed_information(pr.data, pr.theta, default_rule()));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <ExecPolicy P>
void information_kernel(benchmark::State& st) {
  const Problem& pr = problem(st.range(0));
  const LikelihoodOptions o = policy(P);
  for (auto _ : st) benchmark::DoNotOptimize(observed_information(pr.data, pr.theta, o));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (long n : {40L, 1000L, 10000L, 100000L}) b->Arg(n);
}

}  // namespace

BENCHMARK(loglik_reference)->Apply(sizes);
BENCHMARK(loglik_kernel<ExecPolicy::Serial>)->Name("loglik_kernel/serial")->Apply(sizes);
BENCHMARK(loglik_kernel<ExecPolicy::Parallel>)->Name("loglik_kernel/parallel")->Apply(sizes);
BENCHMARK(score_reference)->Apply(sizes);
BENCHMARK(score_kernel<ExecPolicy::Serial>)->Name("score_kernel/serial")->Apply(sizes);
BENCHMARK(score_kernel<ExecPolicy::Parallel>)->Name("score_kernel/parallel")->Apply(sizes);
BENCHMARK(information_reference)->Apply(sizes);
BENCHMARK(information_kernel<ExecPolicy::Serial>)->Name("information_kernel/serial")->Apply(sizes);
BENCHMARK(information_kernel<ExecPolicy::Parallel>)->Name("information_kernel/parallel")->Apply(sizes);

BENCHMARK_MAIN();
