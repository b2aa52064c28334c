#include <gtest/gtest.h>

#include <thread>

#include "ansigen/harness.hpp"
#include <unistd.h>

#include "httplib.h"
#include "json.hpp"
#include "support/fixtures.hpp"

using namespace ansigen;

namespace {

const ScoringContext& ctx() {
  static const ModuleCatalog catalog = ModuleCatalog::builtin();
  static const ScoringContext c{catalog, Schema::builtin(), {}};
  return c;
}

Sample make_sample(std::string id, GenerationType type, std::string input_text, std::string target) {
  Sample s;
  s.id = std::move(id);
  s.type = type;
  s.input_text = std::move(input_text);
  s.prompt = std::string(name_line(s.input_text));
  s.target = std::move(target);
  s.source_file = "f.yml";
  return s;
}

std::vector<Sample> small_dataset() {
  return {make_sample("a", GenerationType::nl_to_t, "- name: Install httpd\n", "  yum:\n    name: httpd\n    state: latest\n"),
          make_sample("b", GenerationType::t_nl_to_t, "- name: x\n  ping:\n- name: Start it\n",
                      "  service:\n    name: httpd\n    state: started\n"),
          make_sample("c", GenerationType::pb_nl_to_t, "- hosts: all\n  tasks:\n    - name: Ping\n", "      ping:\n"),
          make_sample("d", GenerationType::nl_to_pb, "- name: Web\n", "  hosts: web\n  tasks:\n    - name: p\n      ping:\n")};
}

std::vector<Prediction> echo(const std::vector<Sample>& samples) {
  std::vector<Prediction> out;
  for (const auto& s : samples) out.push_back(Prediction{s.id, s.target, std::nullopt});
  return out;
}

BackendConfig command_config(std::vector<std::string> argv, double timeout = 10) {
  BackendConfig cfg;
  cfg.command = std::move(argv);
  cfg.timeout_seconds = timeout;
  return cfg;
}

}  // namespace

TEST(BackendConfig, Parse) {
  const auto c = parse_backend_config("command: [python3, -u, model.py]\ntimeout: 5\ncontext_window: 100\nansible_prefix: yes\n");
  EXPECT_EQ(c.kind, BackendKind::command);
  EXPECT_EQ(c.command, (std::vector<std::string>{"python3", "-u", "model.py"}));
  EXPECT_EQ(c.timeout_seconds, 5.0);
  EXPECT_EQ(c.context_window, 100u);
  EXPECT_TRUE(c.ansible_prefix);
  const auto h = parse_backend_config("kind: http\nendpoint: http://localhost:8080/complete\nheaders: {X-Key: k}\n");
  EXPECT_EQ(h.kind, BackendKind::http);
  EXPECT_EQ(h.headers.at("X-Key"), "k");
  const auto p = parse_backend_config("program: ./gen\nargs: [--greedy]\nmax_new_lines: 20\n");
  EXPECT_EQ(p.command, (std::vector<std::string>{"./gen", "--greedy"}));
  EXPECT_EQ(p.max_new_lines, 20u);
  EXPECT_THROW(parse_backend_config("command: [a]\nbogus: 1\n"), ConfigError);
  EXPECT_THROW(parse_backend_config("kind: http\n"), ConfigError);
  EXPECT_THROW(parse_backend_config("command: [a]\nansible_prefix: maybe\n"), ConfigError);
  EXPECT_THROW(parse_backend_config("- a\n"), ConfigError);
  EXPECT_THROW(parse_backend_config("command: [a]\ntimeout: 0\n"), ConfigError);
}

TEST(InputShaping, LeftTruncate) {
  EXPECT_EQ(left_truncate("a b\nc d\n", 100), "a b\nc d\n");
  // budget = 9 units of a 10-unit window
  const std::string text = "one two three\nfour five six\nseven eight nine ten\n";
  EXPECT_EQ(left_truncate(text, 10), "four five six\nseven eight nine ten\n");
  EXPECT_EQ(left_truncate(text, 5), "seven eight nine ten\n");
  EXPECT_EQ(left_truncate(text, 4), "eight nine ten\n");
  EXPECT_EQ(left_truncate(text, 1), "ten\n");
}

TEST(InputShaping, ModelInputAndCap) {
  BackendConfig cfg = command_config({"cat"});
  const Sample s = make_sample("a", GenerationType::nl_to_t, "- name: x\n", "");
  EXPECT_EQ(model_input(s, cfg), "- name: x\n");
  cfg.ansible_prefix = true;
  EXPECT_EQ(model_input(s, cfg), "Ansible\n- name: x\n");
  EXPECT_EQ(cap_lines("a\nb\nc\n", 2), "a\nb\n");
  EXPECT_EQ(cap_lines("a\nb", 5), "a\nb");
  EXPECT_EQ(cap_lines("a\nb\n", 0), "a\nb\n");
}

TEST(CommandBackend, EchoesStdin) {
  auto b = make_backend(command_config({"cat"}));
  b->check_available();
  EXPECT_EQ(b->complete("  ping:\n"), "  ping:\n");
  const std::string big(300000, 'x');
  EXPECT_EQ(b->complete(big), big);
}

TEST(CommandBackend, Failures) {
  EXPECT_THROW(make_backend(command_config({"/nonexistent/model"}))->check_available(), BackendUnavailable);
  EXPECT_THROW(make_backend(command_config({"false"}))->complete("x"), NonZeroExit);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(make_backend(command_config({"sleep", "5"}, 0.3))->complete("x"), BackendTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
}

TEST(CommandBackend, OutputCaps) {
  BackendConfig cfg = command_config({"yes"});
  cfg.max_new_lines = 3;
  EXPECT_EQ(make_backend(cfg)->complete(""), "y\ny\ny\n");
  cfg.max_new_lines = 0;
  cfg.max_output_bytes = 10;
  EXPECT_EQ(make_backend(cfg)->complete("").size(), 10u);
}

TEST(HttpBackend, RoundTripAndErrors) {
  httplib::Server server;
  server.Post("/complete", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    res.set_content(nlohmann::json{{"completion", "  echo: " + body.at("input").get<std::string>()}}.dump(), "application/json");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  server.Post("/junk", [](const httplib::Request&, httplib::Response& res) { res.set_content("nope", "text/plain"); });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  BackendConfig cfg;
  cfg.kind = BackendKind::http;
  cfg.timeout_seconds = 5;
  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  cfg.endpoint = base + "/complete";
  auto ok = make_backend(cfg);
  ok->check_available();
  EXPECT_EQ(ok->complete("x"), "  echo: x");
  cfg.endpoint = base + "/fail";
  EXPECT_THROW(make_backend(cfg)->complete("x"), BadResponse);
  cfg.endpoint = base + "/junk";
  EXPECT_THROW(make_backend(cfg)->complete("x"), BadResponse);

  server.stop();
  t.join();
  cfg.endpoint = base + "/complete";
  EXPECT_THROW(make_backend(cfg)->check_available(), BackendUnavailable);
}

TEST(Generate, CollectsPerSampleErrors) {
  const auto samples = small_dataset();
  auto cat = make_backend(command_config({"cat"}));
  const auto preds = generate_predictions(samples, *cat, command_config({"cat"}), 3);
  ASSERT_EQ(preds.size(), samples.size());
  EXPECT_EQ(preds[0].id, "a");
  EXPECT_EQ(preds[0].completion, samples[0].input_text);

  auto failing = make_backend(command_config({"false"}));
  const auto errs = generate_predictions(samples, *failing, command_config({"false"}), 2);
  for (const auto& p : errs) {
    EXPECT_TRUE(p.error.has_value());
    EXPECT_EQ(p.completion, "");
  }
}

TEST(Predictions, JsonlRoundTrip) {
  const std::vector<Prediction> preds = {{"a", "  ping:\n", std::nullopt}, {"b", "", std::string("timeout")}};
  const auto path = std::filesystem::temp_directory_path() / ("ansigen-preds-" + std::to_string(::getpid()) + ".jsonl");
  write_predictions(path.string(), preds);
  EXPECT_EQ(read_predictions(path.string()), preds);
  std::filesystem::remove(path);
  EXPECT_EQ(prediction_to_json_line(preds[0]).find("error"), std::string::npos);
}

TEST(Evaluate, EchoIsPerfect) {
  const auto samples = small_dataset();
  const EvalReport r = evaluate(samples, echo(samples), ctx(), 2);
  EXPECT_EQ(r.all.count, 4u);
  EXPECT_EQ(r.all.exact_match, 100.0);
  EXPECT_EQ(r.all.bleu, 100.0);
  EXPECT_EQ(r.all.ansible_aware, 100.0);
  EXPECT_EQ(r.all.schema_correct, 100.0);
  EXPECT_EQ(r.per_type.size(), 4u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Evaluate, EmptyCompletions) {
  const auto samples = small_dataset();
  std::vector<Prediction> empty;
  for (const auto& s : samples) empty.push_back(Prediction{s.id, "", std::nullopt});
  const EvalReport r = evaluate(samples, empty, ctx());
  EXPECT_EQ(r.all.exact_match, 0.0);
  EXPECT_EQ(r.all.bleu, 0.0);
  EXPECT_EQ(r.all.ansible_aware, 0.0);
  EXPECT_EQ(r.all.schema_correct, 0.0);
  EXPECT_THROW(evaluate({}, {}, ctx()), EmptyDataset);
}

TEST(Evaluate, MissingAndExtraPredictions) {
  const auto samples = small_dataset();
  auto preds = echo(samples);
  preds.erase(preds.begin());
  preds.push_back(Prediction{"zzz", "x", std::nullopt});
  const EvalReport r = evaluate(samples, preds, ctx());
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_EQ(r.all.exact_match, 75.0);
}

TEST(Evaluate, AllRowRecomputesFromCards) {
  const auto samples = small_dataset();
  auto preds = echo(samples);
  preds[1].completion = "  service:\n    name: httpd\n    state: stopped\n";
  preds[2].completion = "";
  const auto cards = score_samples(samples, preds, ctx());
  std::vector<const ScoreCard*> ptrs;
  for (const auto& c : cards) ptrs.push_back(&c);
  const EvalReport r = evaluate(samples, preds, ctx(), 3);
  EXPECT_EQ(r.all, aggregate(ptrs));
  BleuStats pooled;
  double aware = 0;
  for (const auto& c : cards) {
    pooled += c.bleu;
    aware += c.ansible_aware;
  }
  EXPECT_EQ(r.all.bleu, bleu_score(pooled));
  EXPECT_DOUBLE_EQ(r.all.ansible_aware, 100.0 * aware / 4);
  EXPECT_EQ(render_report(r, ReportFormat::json), render_report(evaluate(samples, preds, ctx(), 1), ReportFormat::json));
}

TEST(Report, SingleTypeHasTwoRows) {
  const auto samples = std::vector<Sample>{small_dataset()[0]};
  const std::string table = render_report(evaluate(samples, echo(samples), ctx()), ReportFormat::table);
  EXPECT_EQ(table,
            "Generation Type | Count | Schema Correct | EM | BLEU | Ansible Aware\n"
            "ALL | 1 | 100.00 | 100.00 | 100.00 | 100.00\n"
            "NL→T | 1 | 100.00 | 100.00 | 100.00 | 100.00\n");
}

TEST(Report, GoldenTable) {
  EvalReport r;
  r.all = MetricRow{10, 80.0, 50.0, 66.6666667, 70.7912};
  r.per_type[GenerationType::t_nl_to_t] = MetricRow{5, 80.0, 60.0, 68.0, 71.0};
  r.per_type[GenerationType::nl_to_pb] = MetricRow{2, 100.0, 50.0, 55.5556, 60.1249};
  r.per_type[GenerationType::nl_to_t] = MetricRow{3, 200.0 / 3, 100.0 / 3, 71.4, 80.0};
  r.metadata = ReportMetadata{"command:cat", "ab12", "2026-01-01T00:00:00Z", "0.1.0"};
  EXPECT_EQ(render_report(r, ReportFormat::table), fixtures::read(fixtures::root() / "report/golden_table.txt"));
  r.warnings = {"missing prediction for x"};
  EXPECT_EQ(report_from_json(render_report(r, ReportFormat::json)), r);
}

TEST(Report, Timestamp) {
  EXPECT_EQ(report_timestamp("0"), "1970-01-01T00:00:00Z");
  EXPECT_EQ(report_timestamp("1700000000"), "2023-11-14T22:13:20Z");
  EXPECT_EQ(report_timestamp("fixed"), "fixed");
  EXPECT_EQ(report_timestamp().size(), 20u);
}
