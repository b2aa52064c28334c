#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/e2e.hpp"
#include "support/fixtures.hpp"
#include "support/process.hpp"

namespace {

const std::string kCli = process::quote(ANSIGEN_CLI);

process::Result cli(const std::string& args) { return process::run(kCli + " " + args + " 2>/dev/null"); }

std::string fixture(const std::string& rel) { return process::quote((fixtures::root() / rel).string()); }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli("").status, 1);
  EXPECT_EQ(cli("frobnicate").status, 1);
  EXPECT_EQ(cli("evaluate --references /nonexistent --predictions /nonexistent").status, 1);
  EXPECT_EQ(cli("--help").status, 0);
}

TEST(Cli, Validate) {
  const auto ok = cli("validate --file " + fixture("schema/valid/playbooks/ssh_server.yml"));
  EXPECT_EQ(ok.status, 0);
  const auto bad = cli("validate --file " + fixture("schema/invalid/playbooks/missing_hosts.yml"));
  EXPECT_EQ(bad.status, 4);
  EXPECT_NE(bad.out.find("MissingRequiredKey at [0, hosts]"), std::string::npos) << bad.out;
  corpus::TempDir dir("cli-validate");
  corpus::write_file(dir.path() / "broken.yml", "a: [\n");
  EXPECT_EQ(cli("validate --file " + process::quote((dir.path() / "broken.yml").string())).status, 2);
}

TEST(Cli, Score) {
  corpus::TempDir dir("cli-score");
  corpus::write_file(dir.path() / "t.yml", "- name: x\n  ansible.builtin.yum:\n    name: httpd\n    state: latest\n");
  corpus::write_file(dir.path() / "p.yml", "- name: x\n  yum: {name: httpd, state: present}\n");
  const auto r = cli("score --target " + process::quote((dir.path() / "t.yml").string()) + " --prediction " +
                     process::quote((dir.path() / "p.yml").string()));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("ansible_aware: 0.8750"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("exact_match: false"), std::string::npos);
  EXPECT_NE(r.out.find("schema_correct: true"), std::string::npos);
}

TEST(Cli, BackendUnavailable) {
  corpus::TempDir dir("cli-unavail");
  corpus::write_file(dir.path() / "b.yml", "command: [/nonexistent/model]\n");
  corpus::write_file(dir.path() / "d.jsonl", fixtures::read(fixtures::root() / "e2e/extra_samples.jsonl"));
  const auto r = cli("generate --dataset " + process::quote((dir.path() / "d.jsonl").string()) + " --backend " +
                     process::quote((dir.path() / "b.yml").string()) + " --out " +
                     process::quote((dir.path() / "p.jsonl").string()));
  EXPECT_EQ(r.status, 3);
}

TEST(Cli, BadInputs) {
  corpus::TempDir dir("cli-bad");
  corpus::write_file(dir.path() / "bad.jsonl", "{not json\n");
  const std::string bad = process::quote((dir.path() / "bad.jsonl").string());
  EXPECT_EQ(cli("evaluate --references " + bad + " --predictions " + bad).status, 2);
  corpus::write_file(dir.path() / "b.yml", "command: [cat]\nbogus: 1\n");
  EXPECT_EQ(cli("generate --dataset " + bad + " --backend " + process::quote((dir.path() / "b.yml").string()) +
                " --out x").status,
            2);
}

TEST(Cli, EchoEndToEnd) {
  corpus::TempDir dir("cli-e2e");
  const auto o = e2e::run(dir.path());
  EXPECT_EQ(o.report.all.count, o.samples);
  EXPECT_EQ(o.report.all.exact_match, 100.0);
  EXPECT_EQ(o.report.all.bleu, 100.0);
  EXPECT_EQ(o.report.all.ansible_aware, 100.0);
  EXPECT_DOUBLE_EQ(o.report.all.schema_correct, o.expected_schema);
  EXPECT_LT(o.report.all.schema_correct, 100.0);
  EXPECT_EQ(o.report.metadata.timestamp, "1970-01-01T00:00:00Z");
  EXPECT_EQ(o.report.metadata.backend, "echo");
  EXPECT_EQ(o.table.rfind("Generation Type | Count", 0), 0u) << o.table;
}
