#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <variant>

#include "bdl/harness.hpp"

namespace bdl::harness {

namespace {

using Scalar = std::variant<std::string, double, bool, std::int64_t>;

struct Value {
  std::vector<Scalar> items;
  bool is_array = false;
};

[[noreturn]] void fail(int line, const std::string& field, const std::string& msg) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  std::string key = field.empty() ? "" : "'" + field + "': ";
  throw ConfigError("config " + where + key + msg, line, field);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

// Exact integers survive beyond 2^53; seeds need the full int64 range.
bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

// Cursor over one value; strings may contain '#', so comments are stripped here.
class ValueParser {
 public:
  ValueParser(std::string_view text, int line, std::string field) : s_(text), line_(line), field_(std::move(field)) {}

  Value parse() {
    skip_ws();
    Value v;
    if (peek() == '[') {
      ++pos_;
      v.is_array = true;
      skip_ws();
      if (peek() == ']') {
        ++pos_;
      } else {
        for (;;) {
          v.items.push_back(scalar());
          skip_ws();
          if (peek() == ',') {
            ++pos_;
            skip_ws();
            continue;
          }
          if (peek() == ']') {
            ++pos_;
            break;
          }
          fail(line_, field_, "expected ',' or ']' in array");
        }
      }
    } else {
      v.items.push_back(scalar());
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] != '#') fail(line_, field_, "unexpected trailing characters");
    return v;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  Scalar scalar() {
    if (peek() == '"') {
      ++pos_;
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        char c = s_[pos_++];
        if (c == '\\') {
          if (pos_ >= s_.size()) break;
          const char e = s_[pos_++];
          switch (e) {
            case '"': c = '"'; break;
            case '\\': c = '\\'; break;
            case 'n': c = '\n'; break;
            case 't': c = '\t'; break;
            default: fail(line_, field_, std::string("unsupported escape \\") + e);
          }
        }
        out.push_back(c);
      }
      if (peek() != '"') fail(line_, field_, "unterminated string");
      ++pos_;
      return out;
    }
    const auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
           s_[pos_] != '\t' && s_[pos_] != '\r') {
      ++pos_;
    }
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::int64_t i = 0;
    if (parse_int(tok, i)) return i;
    double d = 0.0;
    if (!parse_double(tok, d)) fail(line_, field_, "cannot parse value '" + std::string(tok) + "'");
    return d;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  std::string field_;
};

struct Entry {
  Value value;
  int line = 0;
};

class Reader {
 public:
  Reader(const std::string& key, const Entry& e) : key_(key), e_(e) {}

  const Scalar& single() const {
    if (e_.value.is_array || e_.value.items.size() != 1) fail(e_.line, key_, "expected a single value");
    return e_.value.items[0];
  }
  std::string str() const {
    const auto* s = std::get_if<std::string>(&single());
    if (!s) fail(e_.line, key_, "expected a string");
    return *s;
  }
  double num() const {
    if (const auto* i = std::get_if<std::int64_t>(&single())) return static_cast<double>(*i);
    const auto* d = std::get_if<double>(&single());
    if (!d) fail(e_.line, key_, "expected a number");
    return *d;
  }
  bool boolean() const {
    const auto* b = std::get_if<bool>(&single());
    if (!b) fail(e_.line, key_, "expected true or false");
    return *b;
  }
  std::int64_t integer() const {
    if (const auto* i = std::get_if<std::int64_t>(&single())) return *i;
    const double d = num();
    if (d != std::floor(d) || std::abs(d) > 9.0e15) fail(e_.line, key_, "expected an integer");
    return static_cast<std::int64_t>(d);
  }
  std::vector<double> numbers() const {
    if (!e_.value.is_array) fail(e_.line, key_, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& s : e_.value.items) {
      if (const auto* i = std::get_if<std::int64_t>(&s)) {
        out.push_back(static_cast<double>(*i));
        continue;
      }
      const auto* d = std::get_if<double>(&s);
      if (!d) fail(e_.line, key_, "expected an array of numbers");
      out.push_back(*d);
    }
    return out;
  }
  bool is_string() const {
    return !e_.value.is_array && e_.value.items.size() == 1 && std::holds_alternative<std::string>(e_.value.items[0]);
  }
  int line() const { return e_.line; }

 private:
  const std::string& key_;
  const Entry& e_;
};

std::complex<double> complex_pair(const Reader& r, const std::string& key) {
  const auto v = r.numbers();
  if (v.size() != 2) fail(r.line(), key, "expected [re, im]");
  return {v[0], v[1]};
}

void apply(ExperimentConfig& c, const std::string& key, const Entry& e) {
  const Reader r(key, e);
  try {
    if (key == "experiment") {
      const auto ex = parse_experiment(r.str());
      if (!ex) fail(e.line, key, "unknown experiment '" + r.str() + "'");
      c.experiment = ex;
    } else if (key == "potential") {
      c.potential = r.str();
    } else if (key == "lambda") {
      if (r.is_string()) {
        const bool geometric = c.lambda.geometric;
        c.lambda = parse_lambda_grid(r.str());
        c.lambda.geometric = geometric;
      } else {
        const auto v = r.numbers();
        if (v.size() != 3 || v[2] != std::floor(v[2])) fail(e.line, key, "expected [min, max, count]");
        c.lambda.min = v[0];
        c.lambda.max = v[1];
        c.lambda.count = static_cast<int>(v[2]);
      }
    } else if (key == "lambda_spacing") {
      const std::string s = r.str();
      if (s != "geometric" && s != "linear") fail(e.line, key, "expected \"geometric\" or \"linear\"");
      c.lambda.geometric = s == "geometric";
    } else if (key == "box") {
      if (r.is_string()) {
        c.box = parse_box(r.str());
      } else {
        const auto v = r.numbers();
        if (v.size() != 4) fail(e.line, key, "expected [re_lo, re_hi, im_lo, im_hi]");
        c.box = {v[0], v[1], v[2], v[3]};
      }
    } else if (key == "grid") {
      c.grid = static_cast<int>(r.integer());
    } else if (key == "rel_tolerance") {
      c.rel_tolerance = r.num();
    } else if (key == "z") {
      c.z = complex_pair(r, key);
    } else if (key == "w") {
      c.w = complex_pair(r, key);
    } else if (key == "xi") {
      c.xi = r.numbers();
    } else if (key == "a") {
      c.a = r.num();
    } else if (key == "seeds") {
      c.seeds = static_cast<int>(r.integer());
    } else if (key == "nodes") {
      c.nodes = static_cast<int>(r.integer());
    } else if (key == "input_shape") {
      const std::string s = r.str();
      if (s != "plain" && s != "weighted") fail(e.line, key, "expected \"plain\" or \"weighted\"");
      c.input_shape = s == "plain" ? InputShape::plain : InputShape::weighted;
    } else if (key == "seed") {
      const std::int64_t s = r.integer();
      if (s < 0) fail(e.line, key, "seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") {
      c.out = r.str();
    } else if (key == "svg") {
      c.svg = r.boolean();
    } else if (key == "jobs") {
      c.jobs = static_cast<int>(r.integer());
    } else {
      fail(e.line, key, "unknown key");
    }
  } catch (const ConfigError& err) {
    if (err.line() > 0) throw;
    fail(e.line, key, err.what());
  } catch (const Error& err) {
    fail(e.line, key, err.what());
  }
}

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) fail(0, field, msg);
}

}  // namespace

std::vector<double> LambdaGrid::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    v[i] = geometric ? min * std::pow(max / min, t) : min + (max - min) * t;
  }
  if (count > 1) v.back() = max;
  return v;
}

LambdaGrid parse_lambda_grid(std::string_view text) {
  LambdaGrid g;
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  double count = 0.0;
  if (b == std::string_view::npos || !parse_double(text.substr(0, a), g.min) ||
      !parse_double(text.substr(a + 1, b - a - 1), g.max) || !parse_double(text.substr(b + 1), count) ||
      count != std::floor(count)) {
    throw ConfigError("lambda grid must be min:max:count, got '" + std::string(text) + "'", 0, "lambda");
  }
  g.count = static_cast<int>(count);
  return g;
}

ComplexBox parse_box(std::string_view text) {
  double v[4];
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const auto next = i < 3 ? text.find(',', pos) : text.size();
    if (next == std::string_view::npos || !parse_double(text.substr(pos, next - pos), v[i])) {
      throw ConfigError("box must be re_lo,re_hi,im_lo,im_hi, got '" + std::string(text) + "'", 0, "box");
    }
    pos = next + 1;
  }
  if (pos <= text.size()) throw ConfigError("box has more than four entries", 0, "box");
  return {v[0], v[1], v[2], v[3]};
}

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Entry> entries;
  bool in_table = false, seen_table = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      const auto close = t.find(']');
      if (close == std::string_view::npos) fail(line_no, "", "unterminated table header");
      const std::string_view rest = trim(t.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') fail(line_no, "", "unexpected text after table header");
      const std::string_view name = trim(t.substr(1, close - 1));
      if (name != "experiment") fail(line_no, "", "unknown table [" + std::string(name) + "]");
      if (seen_table) fail(line_no, "", "duplicate [experiment] table");
      in_table = seen_table = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) fail(line_no, "", "expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    if (key.empty()) fail(line_no, "", "missing key");
    if (!in_table) fail(line_no, key, "keys must appear inside the [experiment] table");
    if (entries.count(key)) fail(line_no, key, "duplicate key");
    entries[key] = Entry{ValueParser(t.substr(eq + 1), line_no, key).parse(), line_no};
  }
  if (!seen_table) fail(0, "", "missing [experiment] table");

  ExperimentConfig c;
  // lambda_spacing first so that `lambda` keeps it.
  if (auto it = entries.find("lambda_spacing"); it != entries.end()) apply(c, it->first, it->second);
  for (const auto& [key, e] : entries) {
    if (key != "lambda_spacing") apply(c, key, e);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  const auto& g = c.lambda;
  require(std::isfinite(g.min) && std::isfinite(g.max) && g.min > 0.0, "lambda", "lambda bounds must be positive");
  require(g.count >= 1, "lambda", "count must be at least 1");
  require(g.count == 1 ? g.max >= g.min : g.max > g.min, "lambda", "grid must be strictly increasing");
  const ComplexBox& b = c.box;
  require(std::isfinite(b.re_lo) && std::isfinite(b.re_hi) && std::isfinite(b.im_lo) && std::isfinite(b.im_hi) &&
              b.re_lo <= b.re_hi && b.im_lo <= b.im_hi,
          "box", "box must satisfy re_lo <= re_hi and im_lo <= im_hi");
  require(c.grid >= 1 && c.grid <= 100000, "grid", "grid must be in [1, 100000]");
  require(c.rel_tolerance > 0.0 && c.rel_tolerance < 1.0, "rel_tolerance", "tolerance must be in (0, 1)");
  require(!c.xi.empty(), "xi", "need at least one xi");
  require(c.a > 0.5, "a", "a must exceed d/2 = 0.5");
  require(c.seeds >= 1, "seeds", "seeds must be at least 1");
  require(c.nodes >= kMinGridNodes, "nodes", "nodes must be at least 512");
  require(c.jobs >= 1 && c.jobs <= 256, "jobs", "jobs must be in [1, 256]");
  require(!c.out.empty(), "out", "output directory must not be empty");
  if (c.experiment == Experiment::zeros || c.experiment == Experiment::resonance_trend) {
    require(b.re_lo < b.re_hi && b.im_lo < b.im_hi, "box", "this experiment needs a rectangle of positive area");
    require(c.grid >= 8, "grid", "deficiency scans need grid >= 8");
  }
  if (c.experiment == Experiment::legendre_check || c.experiment == Experiment::limit_convergence) {
    require(b.im_lo == 0.0 && b.im_hi == 0.0, "box", "this experiment samples real xi; use im_lo = im_hi = 0");
  }
  try {
    (void)parse_potential(c.potential);
  } catch (const Error& e) {
    fail(0, "potential", e.what());
  }
}

std::string to_toml(const ExperimentConfig& c) {
  std::ostringstream o;
  const auto q = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out.push_back('\\');
      out.push_back(ch);
    }
    return out + "\"";
  };
  const auto n = [](double v) { return format_number(v); };
  o << "[experiment]\n";
  if (c.experiment) o << "experiment = " << q(std::string(to_string(*c.experiment))) << "\n";
  o << "potential = " << q(c.potential) << "\n";
  o << "lambda = [" << n(c.lambda.min) << ", " << n(c.lambda.max) << ", " << c.lambda.count << "]\n";
  o << "lambda_spacing = " << q(c.lambda.geometric ? "geometric" : "linear") << "\n";
  o << "box = [" << n(c.box.re_lo) << ", " << n(c.box.re_hi) << ", " << n(c.box.im_lo) << ", " << n(c.box.im_hi)
    << "]\n";
  o << "grid = " << c.grid << "\n";
  o << "rel_tolerance = " << n(c.rel_tolerance) << "\n";
  o << "z = [" << n(c.z.real()) << ", " << n(c.z.imag()) << "]\n";
  o << "w = [" << n(c.w.real()) << ", " << n(c.w.imag()) << "]\n";
  o << "xi = [";
  for (std::size_t i = 0; i < c.xi.size(); ++i) o << (i ? ", " : "") << n(c.xi[i]);
  o << "]\n";
  o << "a = " << n(c.a) << "\n";
  o << "seeds = " << c.seeds << "\n";
  o << "nodes = " << c.nodes << "\n";
  o << "input_shape = " << q(std::string(to_string(c.input_shape))) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "out = " << q(c.out) << "\n";
  o << "svg = " << (c.svg ? "true" : "false") << "\n";
  o << "jobs = " << c.jobs << "\n";
  return o.str();
}

}  // namespace bdl::harness
