#include "qtherm/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qtherm {

namespace {

struct Token {
  enum Kind { Ident, Number, String, Bool, LBrace, RBrace, Equal, End } kind;
  std::string text;
  double num = 0;
  bool flag = false;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) {
      t.kind = Token::End;
      return t;
    }
    const char c = s_[pos_];
    if (c == '{') {
      advance();
      t.kind = Token::LBrace;
      return t;
    }
    if (c == '}') {
      advance();
      t.kind = Token::RBrace;
      return t;
    }
    if (c == '=') {
      advance();
      t.kind = Token::Equal;
      return t;
    }
    if (c == '"') {
      advance();
      std::string v;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\n')
          throw ParseError("unterminated string", t.line, t.col);
        v += s_[pos_];
        advance();
      }
      if (pos_ >= s_.size()) throw ParseError("unterminated string", t.line, t.col);
      advance();  // closing quote
      t.kind = Token::String;
      t.text = std::move(v);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      std::string v;
      while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
             s_[pos_] != '{' && s_[pos_] != '}' && s_[pos_] != '=' && s_[pos_] != '#')
        v += s_[pos_], advance();
      try {
        size_t used = 0;
        t.num = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ParseError("malformed number '" + v + "'", t.line, t.col);
      }
      t.kind = Token::Number;
      t.text = std::move(v);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string v;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
              s_[pos_] == '.' || s_[pos_] == '-'))
        v += s_[pos_], advance();
      if (v == "true" || v == "false") {
        t.kind = Token::Bool;
        t.flag = (v == "true");
      } else if (v == "inf") {
        t.kind = Token::Number;
        t.num = kInf;
      } else {
        t.kind = Token::Ident;
      }
      t.text = std::move(v);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

 private:
  void skip_space() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& s_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

struct Entry {
  Token value;
  int line = 0, col = 0;
};

// flattened tree: blocks become dotted keys
std::map<std::string, Entry> flatten(const std::string& text) {
  Lexer lx(text);
  std::map<std::string, Entry> out;
  std::vector<std::string> stack;  // open blocks
  for (;;) {
    Token t = lx.next();
    if (t.kind == Token::End) {
      if (!stack.empty())
        throw ParseError("missing '}' for block '" + stack.back() + "'", t.line, t.col);
      return out;
    }
    if (t.kind == Token::RBrace) {
      if (stack.empty()) throw ParseError("unmatched '}'", t.line, t.col);
      stack.pop_back();
      continue;
    }
    if (t.kind != Token::Ident)
      throw ParseError("expected a key name", t.line, t.col);
    Token nxt = lx.next();
    if (nxt.kind == Token::LBrace) {
      stack.push_back(t.text);
      continue;
    }
    if (nxt.kind != Token::Equal)
      throw ParseError("expected '=' or '{' after '" + t.text + "'", nxt.line, nxt.col);
    Token val = lx.next();
    if (val.kind != Token::Number && val.kind != Token::String &&
        val.kind != Token::Bool && val.kind != Token::Ident)
      throw ParseError("expected a value for '" + t.text + "'", val.line, val.col);
    std::string key;
    for (const auto& b : stack) key += b + ".";
    key += t.text;
    if (out.count(key))
      throw ParseError("duplicate key '" + key + "'", t.line, t.col);
    out[key] = Entry{val, t.line, t.col};
  }
}

[[noreturn]] void bad_type(const std::string& key, const Entry& e, const char* want) {
  throw ParseError("key '" + key + "' expects " + want, e.value.line, e.value.col);
}

double take_number(std::map<std::string, Entry>& m, const std::string& key,
                   bool& present) {
  auto it = m.find(key);
  if (it == m.end()) {
    present = false;
    return 0;
  }
  present = true;
  if (it->second.value.kind != Token::Number) bad_type(key, it->second, "a number");
  const double v = it->second.value.num;
  m.erase(it);
  return v;
}

bool take_bool(std::map<std::string, Entry>& m, const std::string& key, bool dflt) {
  auto it = m.find(key);
  if (it == m.end()) return dflt;
  if (it->second.value.kind != Token::Bool) bad_type(key, it->second, "true or false");
  const bool v = it->second.value.flag;
  m.erase(it);
  return v;
}

std::string take_string(std::map<std::string, Entry>& m, const std::string& key,
                        bool& present) {
  auto it = m.find(key);
  if (it == m.end()) {
    present = false;
    return {};
  }
  present = true;
  if (it->second.value.kind != Token::String && it->second.value.kind != Token::Ident)
    bad_type(key, it->second, "a string");
  std::string v = it->second.value.text;
  m.erase(it);
  return v;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  auto m = flatten(text);
  RunConfig c;
  bool present = false;

  // may stay empty here: the command line can select the experiment
  c.experiment = take_string(m, "experiment", present);

  double v = take_number(m, "n", present);
  if (present) {
    if (!(v >= 1) || v != std::floor(v) || v > 1e9)
      throw ValidationError("n must be an integer in [1, 1e9]");
    c.n = static_cast<long long>(v);
  }
  v = take_number(m, "seed", present);
  if (present) {
    if (v < 0 || v != std::floor(v) || v > 1.8e19)
      throw ValidationError("seed must be a non-negative integer");
    c.seed = static_cast<uint64_t>(v);
  }
  v = take_number(m, "dt", present);
  if (present) {
    if (!(v > 0)) throw ValidationError("dt must be positive");
    c.dt = v;
  }
  v = take_number(m, "threads", present);
  if (present) {
    if (v < 0 || v != std::floor(v) || v > 1024)
      throw ValidationError("threads must be an integer in [0, 1024]");
    c.threads = static_cast<int>(v);
  }
  c.out_dir = take_string(m, "out", present);
  c.export_records = take_bool(m, "export.records", false);
  c.export_series = take_bool(m, "export.series", false);

  // everything under params. is handed to the preset builder as a double
  for (auto it = m.begin(); it != m.end();) {
    if (it->first.rfind("params.", 0) == 0) {
      if (it->second.value.kind != Token::Number)
        bad_type(it->first, it->second, "a number");
      c.params[it->first.substr(7)] = it->second.value.num;
      it = m.erase(it);
    } else {
      ++it;
    }
  }
  if (!m.empty()) {
    const auto& [key, e] = *m.begin();
    throw ParseError("unknown key '" + key + "'", e.line, e.col);
  }
  // deliberately not validate()d yet: the command line may still fill in or
  // override fields; callers validate the merged configuration
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  if (experiment.empty()) throw ValidationError("experiment name is empty");
  if (n < 1) throw ValidationError("n must be >= 1");
  if (dt && !(*dt > 0)) throw ValidationError("dt must be positive");
  if (threads < 0) throw ValidationError("threads must be >= 0");
}

ExperimentSpec RunConfig::build_experiment() const {
  validate();
  ExperimentSpec spec = build_preset(experiment, params);
  if (dt) {
    spec.dt = *dt;
    // keep default sample times on the new grid
    for (double& ts : spec.sample_times) ts = std::llround(ts / *dt) * *dt;
  }
  spec.validate();
  return spec;
}

}  // namespace qtherm
