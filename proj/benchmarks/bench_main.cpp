#include <benchmark/benchmark.h>

#include "ansigen/harness.hpp"
#include "support/generators.hpp"

using namespace ansigen;
using yaml::Node;

namespace {

const ModuleCatalog& catalog() {
  static const ModuleCatalog c = ModuleCatalog::builtin();
  return c;
}

std::string playbook_text(std::size_t plays) {
  testgen::Generator gen(1);
  yaml::Document doc;
  std::vector<Node> items;
  for (std::size_t i = 0; i < plays; ++i) items.push_back(gen.play(catalog(), 3, 6));
  doc.roots.push_back(Node::sequence(std::move(items)));
  return yaml::serialize_canonical(doc);
}

void BM_Parse(benchmark::State& state) {
  const std::string text = playbook_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(yaml::parse_stream(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Parse)->Arg(1)->Arg(16)->Arg(128);

void BM_Canonicalize(benchmark::State& state) {
  const auto doc = yaml::parse_stream(playbook_text(16));
  for (auto _ : state) benchmark::DoNotOptimize(yaml::serialize_canonical(doc));
}
BENCHMARK(BM_Canonicalize);

void BM_AnsibleAware(benchmark::State& state) {
  testgen::Generator gen(2);
  std::vector<std::pair<Node, Node>> pairs;
  for (int i = 0; i < 256; ++i) {
    Node t = gen.task(catalog());
    pairs.emplace_back(t, gen.mutate(t, catalog()));
  }
  const auto& kw = Schema::builtin().task_keywords();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [t, p] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(ansible_aware(t, p, catalog(), kw));
  }
}
BENCHMARK(BM_AnsibleAware);

void BM_ScoreSample(benchmark::State& state) {
  testgen::Generator gen(3);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 256; ++i) {
    Node t = gen.task(catalog(), false);
    pairs.emplace_back(yaml::serialize_block(t, 2), yaml::serialize_block(gen.mutate(t, catalog()), 2));
  }
  const ScoringContext ctx{catalog(), Schema::builtin(), {}};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& [t, p] = pairs[i++ % pairs.size()];
    benchmark::DoNotOptimize(score_sample("- name: bench\n", t, p, GenerationType::nl_to_t, ctx));
  }
}
BENCHMARK(BM_ScoreSample);

void BM_Bleu(benchmark::State& state) {
  const std::string text = playbook_text(4);
  const Tokens ref = tokenize(text);
  Tokens hyp = ref;
  hyp.resize(hyp.size() * 3 / 4);
  for (auto _ : state) benchmark::DoNotOptimize(bleu_stats(ref, hyp));
}
BENCHMARK(BM_Bleu);

}  // namespace
BENCHMARK_MAIN();
