#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "ansigen/harness.hpp"
#include "json.hpp"

namespace ansigen {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v + 0.0);
  return buf;
}

std::string table_row(std::string_view label, const MetricRow& r) {
  std::string out(label);
  out += " | " + std::to_string(r.count);
  out += " | " + fixed2(r.schema_correct);
  out += " | " + fixed2(r.exact_match);
  out += " | " + fixed2(r.bleu);
  out += " | " + fixed2(r.ansible_aware);
  out += "\n";
  return out;
}

ordered_json row_json(std::string_view type, const MetricRow& r) {
  ordered_json j;
  j["generation_type"] = std::string(type);
  j["count"] = r.count;
  j["schema_correct"] = r.schema_correct;
  j["exact_match"] = r.exact_match;
  j["bleu"] = r.bleu;
  j["ansible_aware"] = r.ansible_aware;
  return j;
}

MetricRow row_from_json(const nlohmann::json& j) {
  MetricRow r;
  r.count = j.at("count").get<std::size_t>();
  r.schema_correct = j.at("schema_correct").get<double>();
  r.exact_match = j.at("exact_match").get<double>();
  r.bleu = j.at("bleu").get<double>();
  r.ansible_aware = j.at("ansible_aware").get<double>();
  return r;
}

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool all_digits(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::table) {
    std::string out = "Generation Type | Count | Schema Correct | EM | BLEU | Ansible Aware\n";
    out += table_row("ALL", report.all);
    for (auto t : kGenerationTypes) {
      auto it = report.per_type.find(t);
      if (it != report.per_type.end()) out += table_row(generation_type_label(t), it->second);
    }
    return out;
  }
  ordered_json j;
  j["metadata"] = ordered_json{{"backend", report.metadata.backend},
                               {"dataset_sha256", report.metadata.dataset_sha256},
                               {"timestamp", report.metadata.timestamp},
                               {"toolkit_version", report.metadata.toolkit_version}};
  ordered_json rows = ordered_json::array();
  rows.push_back(row_json("ALL", report.all));
  for (auto t : kGenerationTypes) {
    auto it = report.per_type.find(t);
    if (it != report.per_type.end()) rows.push_back(row_json(generation_type_token(t), it->second));
  }
  j["rows"] = rows;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view json_text) {
  EvalReport report;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto& m = j.at("metadata");
    report.metadata.backend = m.at("backend").get<std::string>();
    report.metadata.dataset_sha256 = m.at("dataset_sha256").get<std::string>();
    report.metadata.timestamp = m.at("timestamp").get<std::string>();
    report.metadata.toolkit_version = m.at("toolkit_version").get<std::string>();
    for (const auto& row : j.at("rows")) {
      const auto type = row.at("generation_type").get<std::string>();
      if (type == "ALL") {
        report.all = row_from_json(row);
        continue;
      }
      const auto parsed = parse_generation_type(type);
      if (!parsed) throw std::runtime_error("unknown generation_type '" + type + "'");
      report.per_type[*parsed] = row_from_json(row);
    }
    report.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad report json: ") + e.what());
  }
  return report;
}

std::string report_timestamp(const std::optional<std::string>& override_value) {
  if (override_value) return all_digits(*override_value) ? iso_utc(std::stoll(*override_value)) : *override_value;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && all_digits(epoch)) {
    return iso_utc(static_cast<std::time_t>(std::stoll(epoch)));
  }
  return iso_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

}  // namespace ansigen
