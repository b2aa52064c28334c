// Oracle backend: reads a model input on stdin and prints the target of the
// dataset sample it was built from. Exits 1 when no sample matches.

#include <iostream>
#include <iterator>
#include <string>
#include <unordered_map>

#include "ansigen/dataset.hpp"

int main(int argc, char** argv) {
  std::string dataset;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--dataset") dataset = argv[i + 1];
  }
  if (dataset.empty()) {
    std::cerr << "usage: ansigen-echo-backend --dataset FILE\n";
    return 1;
  }
  std::string input((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  constexpr std::string_view prefix = "Ansible\n";
  if (input.rfind(prefix, 0) == 0) input.erase(0, prefix.size());

  const auto samples = ansigen::read_samples(dataset);
  const ansigen::Sample* match = nullptr;
  for (const auto& s : samples) {
    if (s.input_text == input) {
      match = &s;
      break;
    }
  }
  // Left-truncated inputs: unique suffix match.
  if (match == nullptr && !input.empty()) {
    for (const auto& s : samples) {
      if (s.input_text.size() > input.size() && s.input_text.ends_with(input)) {
        if (match != nullptr) return 1;
        match = &s;
      }
    }
  }
  if (match == nullptr) return 1;
  std::cout << match->target;
  return 0;
}
