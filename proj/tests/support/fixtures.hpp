#pragma once

// Fixture discovery shared by unit tests and the acceptance binary.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ansigen/schema.hpp"

namespace fixtures {

inline std::filesystem::path root() { return ANSIGEN_FIXTURE_DIR; }

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<std::filesystem::path> yaml_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".yml" || ext == ".yaml")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct SchemaCase {
  std::filesystem::path path;
  bool playbook = false;
  std::string expected_rule;  // invalid cases only
  std::string expected_path;
};

// Invalid files start with `# expect: <Rule> <path>`.
inline std::vector<SchemaCase> schema_cases(bool valid) {
  std::vector<SchemaCase> out;
  const auto dir = root() / "schema" / (valid ? "valid" : "invalid");
  for (const auto& p : yaml_files(dir)) {
    SchemaCase c;
    c.path = p;
    c.playbook = p.parent_path().filename() == "playbooks";
    const std::string text = read(p);
    const std::string marker = "# expect: ";
    if (text.rfind(marker, 0) == 0) {
      const std::string line = text.substr(marker.size(), text.find('\n') - marker.size());
      const auto space = line.find(' ');
      c.expected_rule = line.substr(0, space);
      c.expected_path = line.substr(space + 1);
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<ansigen::SchemaViolation> validate_case(const SchemaCase& c, const ansigen::ModuleCatalog& catalog) {
  const auto doc = ansigen::yaml::parse_stream(read(c.path), c.path.string());
  const auto& schema = ansigen::Schema::builtin();
  return c.playbook ? schema.validate_playbook(doc, catalog) : schema.validate_document(doc, catalog);
}

}  // namespace fixtures
