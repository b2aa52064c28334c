#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "ansigen/harness.hpp"
#include "httplib.h"
#include "json.hpp"

extern char** environ;

namespace ansigen {

using yaml::Node;

// ---- config ----------------------------------------------------------------

namespace {

std::string scalar_text(const Node& n, const char* field) {
  if (!n.is_scalar() || n.is_null()) throw ConfigError(std::string("backend config: '") + field + "' must be a scalar");
  return n.text();
}

double number(const Node& n, const char* field) {
  const std::string t = scalar_text(n, field);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("backend config: '") + field + "' must be a number");
  }
}

std::size_t count(const Node& n, const char* field) {
  const double v = number(n, field);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError(std::string("backend config: '") + field + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

bool flag(const Node& n, const char* field) {
  if (!n.is_scalar() || n.scalar_kind() != yaml::ScalarKind::boolean) {
    throw ConfigError(std::string("backend config: '") + field + "' must be a boolean");
  }
  return n.value().boolean;
}

std::vector<std::string> string_list(const Node& n, const char* field) {
  std::vector<std::string> out;
  if (n.is_scalar() && !n.is_null()) {
    out.push_back(n.text());
    return out;
  }
  if (!n.is_sequence()) throw ConfigError(std::string("backend config: '") + field + "' must be a list");
  for (const auto& item : n.items()) out.push_back(scalar_text(item, field));
  return out;
}

}  // namespace

BackendConfig parse_backend_config(std::string_view yaml_text) {
  yaml::Document doc;
  try {
    doc = yaml::parse_stream(yaml_text, "<backend>");
  } catch (const yaml::YamlError& e) {
    throw ConfigError(std::string("backend config: ") + e.what());
  }
  if (doc.roots.size() != 1 || !doc.roots.front().is_mapping()) throw ConfigError("backend config must be a mapping");
  BackendConfig cfg;
  std::vector<std::string> args;
  std::string program;
  for (const auto& e : doc.roots.front().entries()) {
    const std::string key = yaml::key_text(e.key);
    const Node& v = e.value;
    if (key == "kind") {
      const std::string kind = scalar_text(v, "kind");
      if (kind == "command") {
        cfg.kind = BackendKind::command;
      } else if (kind == "http") {
        cfg.kind = BackendKind::http;
      } else {
        throw ConfigError("backend config: kind must be command or http");
      }
    } else if (key == "command") {
      cfg.command = string_list(v, "command");
    } else if (key == "program") {
      program = scalar_text(v, "program");
    } else if (key == "args" || key == "arguments") {
      args = string_list(v, "args");
    } else if (key == "max_output_bytes") {
      cfg.max_output_bytes = count(v, "max_output_bytes");
    } else if (key == "endpoint" || key == "url") {
      cfg.endpoint = scalar_text(v, "endpoint");
    } else if (key == "headers") {
      if (!v.is_mapping()) throw ConfigError("backend config: 'headers' must be a mapping");
      for (const auto& h : v.entries()) cfg.headers[yaml::key_text(h.key)] = scalar_text(h.value, "headers");
    } else if (key == "timeout" || key == "timeout_seconds") {
      cfg.timeout_seconds = number(v, "timeout");
    } else if (key == "context_window") {
      cfg.context_window = count(v, "context_window");
    } else if (key == "ansible_prefix") {
      cfg.ansible_prefix = flag(v, "ansible_prefix");
    } else if (key == "max_new_lines") {
      cfg.max_new_lines = count(v, "max_new_lines");
    } else {
      throw ConfigError("backend config: unknown field '" + key + "'");
    }
  }
  if (!program.empty()) {
    cfg.command.insert(cfg.command.begin(), program);
    cfg.command.insert(cfg.command.end(), args.begin(), args.end());
  }
  if (cfg.timeout_seconds <= 0) throw ConfigError("backend config: timeout must be > 0");
  if (cfg.context_window == 0) throw ConfigError("backend config: context_window must be > 0");
  if (cfg.kind == BackendKind::command && cfg.command.empty()) throw ConfigError("backend config: command is empty");
  if (cfg.kind == BackendKind::http && cfg.endpoint.empty()) throw ConfigError("backend config: endpoint is empty");
  return cfg;
}

BackendConfig load_backend_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read backend config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_backend_config(buf.str());
}

// ---- input shaping ---------------------------------------------------------

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t units(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_ws(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

}  // namespace

std::string left_truncate(std::string_view input_text, std::size_t context_window) {
  const std::size_t budget = std::max<std::size_t>(1, context_window * 9 / 10);
  if (units(input_text) <= budget) return std::string(input_text);
  // Drop whole leading lines first.
  std::size_t start = 0;
  while (start < input_text.size()) {
    const std::size_t nl = input_text.find('\n', start);
    if (nl == std::string_view::npos || nl + 1 >= input_text.size()) break;
    start = nl + 1;
    if (units(input_text.substr(start)) <= budget) return std::string(input_text.substr(start));
  }
  // A single line is still too long: keep its last `budget` units.
  std::string_view tail = input_text.substr(start);
  std::size_t kept = 0;
  std::size_t pos = tail.size();
  std::size_t keep_from = tail.size();
  while (pos > 0 && kept < budget) {
    while (pos > 0 && is_ws(tail[pos - 1])) --pos;
    if (pos == 0) break;
    while (pos > 0 && !is_ws(tail[pos - 1])) --pos;
    keep_from = pos;
    ++kept;
  }
  return std::string(tail.substr(keep_from));
}

std::string model_input(const Sample& sample, const BackendConfig& config) {
  std::string out = config.ansible_prefix ? "Ansible\n" : "";
  out += left_truncate(sample.input_text, config.context_window);
  return out;
}

std::string cap_lines(std::string_view text, std::size_t max_lines) {
  if (max_lines == 0) return std::string(text);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < max_lines; ++i) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return std::string(text);
    pos = nl + 1;
  }
  return std::string(text.substr(0, pos));
}

// ---- command backend -------------------------------------------------------

namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

bool executable_on_path(const std::string& program) {
  if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    const std::string candidate = (dir.empty() ? "." : dir) + "/" + program;
    if (::access(candidate.c_str(), X_OK) == 0) return true;
  }
  return false;
}

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe2(fd, O_CLOEXEC) != 0) throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() { close_all(); }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
  void close_all() {
    close_end(0);
    close_end(1);
  }
};

class CommandBackend : public Backend {
 public:
  explicit CommandBackend(BackendConfig cfg) : cfg_(std::move(cfg)) { ignore_sigpipe(); }

  void check_available() override {
    if (!executable_on_path(cfg_.command.front())) {
      throw BackendUnavailable("backend program not found or not executable: " + cfg_.command.front());
    }
  }

  std::string label() const override {
    std::string out = "command:";
    for (std::size_t i = 0; i < cfg_.command.size(); ++i) out += (i ? " " : "") + cfg_.command[i];
    return out;
  }

  std::string complete(const std::string& input) override {
    Pipe in;
    Pipe out;
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in.fd[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

    std::vector<char*> argv;
    for (const auto& a : cfg_.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    pid_t pid = -1;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw BackendUnavailable("cannot start " + cfg_.command.front() + ": " + std::strerror(rc));
    in.close_end(0);
    out.close_end(1);
    ::fcntl(in.fd[1], F_SETFL, O_NONBLOCK);

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg_.timeout_seconds));
    std::string output;
    std::size_t written = 0;
    std::size_t lines = 0;
    bool capped = false;
    bool timed_out = false;
    if (input.empty()) in.close_end(1);

    while (out.fd[0] >= 0) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) {
        timed_out = true;
        break;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd fds[2];
      nfds_t nfds = 0;
      fds[nfds++] = pollfd{out.fd[0], POLLIN, 0};
      if (in.fd[1] >= 0) fds[nfds++] = pollfd{in.fd[1], POLLOUT, 0};
      const int ready = ::poll(fds, nfds, static_cast<int>(std::max<long long>(1, left)));
      if (ready < 0) {
        if (errno == EINTR) continue;
        break;
      }
      if (nfds == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t n = ::write(in.fd[1], input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) written = input.size();
        if (written >= input.size()) in.close_end(1);
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[8192];
        const ssize_t n = ::read(out.fd[0], buf, sizeof buf);
        if (n <= 0) {
          if (n < 0 && errno == EINTR) continue;
          out.close_end(0);
          break;
        }
        output.append(buf, static_cast<std::size_t>(n));
        if (cfg_.max_new_lines > 0) {
          lines += static_cast<std::size_t>(std::count(buf, buf + n, '\n'));
          if (lines >= cfg_.max_new_lines) capped = true;
        }
        if (output.size() >= cfg_.max_output_bytes) {
          output.resize(cfg_.max_output_bytes);
          capped = true;
        }
        if (capped) break;
      }
    }
    in.close_all();
    out.close_all();
    if (timed_out || capped) ::kill(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (timed_out) throw BackendTimeout("backend timed out after " + std::to_string(cfg_.timeout_seconds) + " s");
    if (!capped && !(WIFEXITED(status) && WEXITSTATUS(status) == 0)) {
      const std::string why = WIFEXITED(status) ? "exit status " + std::to_string(WEXITSTATUS(status))
                                                : "signal " + std::to_string(WTERMSIG(status));
      throw NonZeroExit("backend failed with " + why);
    }
    return cap_lines(output, cfg_.max_new_lines);
  }

 private:
  BackendConfig cfg_;
};

// ---- http backend ----------------------------------------------------------

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw ConfigError("http backend endpoint must start with http://");
  }
  const std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return Endpoint{url, "/"};
  return Endpoint{url.substr(0, slash), url.substr(slash)};
}

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)), endpoint_(split_endpoint(cfg_.endpoint)) {
    ignore_sigpipe();
    for (const auto& [k, v] : cfg_.headers) headers_.emplace(k, v);
  }

  void check_available() override {
    auto client = make_client();
    client.set_connection_timeout(std::chrono::milliseconds(static_cast<long long>(
        std::min(cfg_.timeout_seconds, 10.0) * 1000)));
    auto res = client.Head(endpoint_.path, headers_);
    if (!res) throw BackendUnavailable("cannot reach " + cfg_.endpoint + ": " + httplib::to_string(res.error()));
  }

  std::string label() const override { return "http:" + cfg_.endpoint; }

  std::string complete(const std::string& input) override {
    auto client = make_client();
    nlohmann::json body{{"input", input}};
    auto res = client.Post(endpoint_.path, headers_,
                           body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), "application/json");
    if (!res) {
      if (res.error() == httplib::Error::Read || res.error() == httplib::Error::Write ||
          res.error() == httplib::Error::ConnectionTimeout) {
        throw BackendTimeout("http request failed: " + httplib::to_string(res.error()));
      }
      throw BadResponse("http request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) throw BadResponse("http status " + std::to_string(res->status));
    try {
      const auto j = nlohmann::json::parse(res->body);
      return cap_lines(j.at("completion").get<std::string>(), cfg_.max_new_lines);
    } catch (const nlohmann::json::exception& e) {
      throw BadResponse(std::string("bad response body: ") + e.what());
    }
  }

 private:
  httplib::Client make_client() const {
    httplib::Client client(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(static_cast<long long>(cfg_.timeout_seconds * 1000));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    return client;
  }

  BackendConfig cfg_;
  Endpoint endpoint_;
  httplib::Headers headers_;
};

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.kind == BackendKind::http) return std::make_unique<HttpBackend>(config);
  return std::make_unique<CommandBackend>(config);
}

// ---- predictions -----------------------------------------------------------

std::string prediction_to_json_line(const Prediction& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["completion"] = p.completion;
  if (p.error) j["error"] = *p.error;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_predictions(const std::string& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path);
  for (const auto& p : predictions) out << prediction_to_json_line(p) << '\n';
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      p.completion = j.at("completion").is_null() ? std::string{} : j.at("completion").get<std::string>();
      if (j.contains("error") && !j.at("error").is_null()) p.error = j.at("error").get<std::string>();
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(path + ":" + std::to_string(lineno) + ": bad prediction line: " + e.what());
    }
  }
  return out;
}

std::vector<Prediction> generate_predictions(const std::vector<Sample>& samples, Backend& backend,
                                             const BackendConfig& config, unsigned parallelism) {
  backend.check_available();
  std::vector<Prediction> out(samples.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      Prediction& p = out[i];
      p.id = samples[i].id;
      try {
        p.completion = backend.complete(model_input(samples[i], config));
      } catch (const BackendError& e) {
        p.completion.clear();
        p.error = e.what();
      } catch (const std::exception& e) {
        p.completion.clear();
        p.error = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(std::max<std::size_t>(samples.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) { return a.id < b.id; });
  return out;
}

}  // namespace ansigen
