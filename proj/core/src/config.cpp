#include "grassclust/config.hpp"

#include "grassclust/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace grassclust {

StageConfig default_state_stage() {
  StageConfig s;
  s.karma = {.window_count = 30, .block_rows = 2, .rank = 2, .forward_width = 60, .backward_width = 20,
             .buffer = 20, .stride = 1};
  s.kernel = KernelSpec::gaussian(0.8);
  s.egct.k_nn = 20;
  s.egct.louvain_resolution = 0.3;
  return s;
}

StageConfig default_community_stage() {
  StageConfig s;
  s.karma = {.window_count = 30, .block_rows = 3, .rank = 2, .forward_width = 50, .backward_width = 10,
             .buffer = 20, .stride = 1};
  s.kernel = KernelSpec::linear();
  s.egct.k_nn = 3;
  return s;
}

StageConfig default_subnet_stage() {
  StageConfig s;
  s.karma = {.window_count = 20, .block_rows = 3, .rank = 3, .forward_width = 45, .backward_width = 5,
             .buffer = 50, .stride = 1};
  s.kernel = KernelSpec::linear();
  s.egct.k_nn = 5;
  return s;
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  c.states = default_state_stage();
  c.communities = default_community_stage();
  c.subnets = default_subnet_stage();
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(long line, const std::string& key, const std::string& message) {
  std::string where = "config line " + std::to_string(line);
  if (!key.empty()) where += ", field '" + key + "'";
  throw ConfigError(where + ": " + message);
}

template <typename T>
T parse_number(const std::string& text, long line, const std::string& key) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) fail(line, key, "cannot parse '" + text + "'");
  return value;
}

using Setter = std::function<void(const std::string&, long, const std::string&)>;

std::map<std::string, Setter> stage_setters(StageConfig& s) {
  auto int_field = [](int& field) {
    return [&field](const std::string& v, long line, const std::string& key) {
      field = parse_number<int>(v, line, key);
    };
  };
  auto real_field = [](double& field) {
    return [&field](const std::string& v, long line, const std::string& key) {
      field = parse_number<double>(v, line, key);
    };
  };
  return {
      {"window_count", int_field(s.karma.window_count)},
      {"block_rows", int_field(s.karma.block_rows)},
      {"rank", int_field(s.karma.rank)},
      {"forward_width", int_field(s.karma.forward_width)},
      {"backward_width", int_field(s.karma.backward_width)},
      {"buffer", int_field(s.karma.buffer)},
      {"stride", int_field(s.karma.stride)},
      {"k_nn", int_field(s.egct.k_nn)},
      {"sigma_alpha", real_field(s.egct.sigma_alpha)},
      {"sigma_theta", real_field(s.egct.sigma_theta)},
      {"pca_energy", real_field(s.egct.pca_energy)},
      {"resolution", real_field(s.egct.louvain_resolution)},
      {"kernel",
       [&s](const std::string& v, long line, const std::string& key) {
         try {
           s.kernel = KernelSpec::parse(v);
         } catch (const Error& e) {
           fail(line, key, e.what());
         }
       }},
  };
}

void validate_stage(const StageConfig& s, long line, const std::string& section) {
  try {
    s.karma.validate();
    s.egct.validate();
  } catch (const Error& e) {
    fail(line, "", "section [" + section + "]: " + e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfig::parse(std::istream& in) {
  PipelineConfig c = defaults();
  std::map<std::string, StageConfig*> sections{
      {"states", &c.states}, {"communities", &c.communities}, {"subnets", &c.subnets}};
  std::map<std::string, long> section_line;

  std::map<std::string, Setter> top{
      {"seed", [&c](const std::string& v, long line, const std::string& key) {
         c.seed = parse_number<std::uint64_t>(v, line, key);
       }},
      {"min_dwell", [&c](const std::string& v, long line, const std::string& key) {
         c.min_dwell = parse_number<int>(v, line, key);
         if (c.min_dwell < 1) fail(line, key, "must be at least 1");
       }},
      {"threads", [&c](const std::string& v, long line, const std::string& key) {
         c.threads = parse_number<int>(v, line, key);
         if (c.threads < 0) fail(line, key, "must be nonnegative");
       }},
  };

  std::string section;
  std::map<std::string, Setter> current;
  std::string raw;
  long line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "", "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      const auto it = sections.find(section);
      if (it == sections.end()) fail(line_no, "", "unknown section [" + section + "]");
      current = stage_setters(*it->second);
      section_line[section] = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "", "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = trim(value.substr(1, value.size() - 2));
    if (key.empty()) fail(line_no, "", "missing key");
    auto& table = section.empty() ? top : current;
    const auto it = table.find(key);
    if (it == table.end()) {
      fail(line_no, key, section.empty() ? "unknown top-level key" : "unknown key in [" + section + "]");
    }
    it->second(value, line_no, key);
  }
  for (const auto& [name, stage] : sections) {
    const auto it = section_line.find(name);
    validate_stage(*stage, it == section_line.end() ? 0 : it->second, name);
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse(in);
}

std::string PipelineConfig::to_string() const {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "seed = " << seed << "\nmin_dwell = " << min_dwell << "\nthreads = " << threads << '\n';
  const std::pair<const char*, const StageConfig*> stages[] = {
      {"states", &states}, {"communities", &communities}, {"subnets", &subnets}};
  for (const auto& [name, s] : stages) {
    out << "\n[" << name << "]\n"
        << "window_count = " << s->karma.window_count << '\n'
        << "block_rows = " << s->karma.block_rows << '\n'
        << "rank = " << s->karma.rank << '\n'
        << "forward_width = " << s->karma.forward_width << '\n'
        << "backward_width = " << s->karma.backward_width << '\n'
        << "buffer = " << s->karma.buffer << '\n'
        << "stride = " << s->karma.stride << '\n'
        << "kernel = " << s->kernel.to_string() << '\n'
        << "k_nn = " << s->egct.k_nn << '\n'
        << "sigma_alpha = " << s->egct.sigma_alpha << '\n'
        << "sigma_theta = " << s->egct.sigma_theta << '\n'
        << "pca_energy = " << s->egct.pca_energy << '\n'
        << "resolution = " << s->egct.louvain_resolution << '\n';
  }
  return out.str();
}

}  // namespace grassclust
