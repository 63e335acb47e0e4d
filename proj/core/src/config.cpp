#include "cavitylink/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cavitylink {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters in number");
  return v;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer");
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  if (!s.empty() && s[0] == '-') throw std::invalid_argument("seed must be non-negative");
  std::size_t pos = 0;
  std::uint64_t v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer");
  return v;
}

Grid parse_grid(const std::string& s) {
  std::size_t c1 = s.find(':');
  std::size_t c2 = c1 == std::string::npos ? std::string::npos : s.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos || s.find(':', c2 + 1) != std::string::npos)
    throw std::invalid_argument("expected start:stop:step");
  Grid g;
  g.start = parse_double(trim(s.substr(0, c1)));
  g.stop = parse_double(trim(s.substr(c1 + 1, c2 - c1 - 1)));
  g.step = parse_double(trim(s.substr(c2 + 1)));
  if (g.step <= 0) throw std::invalid_argument("step must be positive");
  if (g.stop < g.start - 1e-12) throw std::invalid_argument("stop must not precede start");
  return g;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string fmt_complex(complexd z) {
  double re = z.real(), im = z.imag();
  if (im == 0.0) return fmt_double(re);
  std::string tail = fmt_double(std::abs(im)) + "i";
  if (re == 0.0) return (im < 0 ? "-" : "") + tail;
  return fmt_double(re) + (im < 0 ? "-" : "+") + tail;
}

std::string fmt_grid(const Grid& g) {
  return fmt_double(g.start) + ":" + fmt_double(g.stop) + ":" + fmt_double(g.step);
}

}  // namespace

std::vector<double> Grid::values() const {
  long n = 1;
  if (step > 0 && stop >= start)
    n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) v.push_back(start + static_cast<double>(k) * step);
  return v;
}

complexd parse_complex(const std::string& text) {
  std::string t = trim(text);
  // Interior whitespace is allowed only next to a sign ("1 + 2i").
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isspace(static_cast<unsigned char>(t[k]))) continue;
    std::size_t l = k;
    while (l > 0 && std::isspace(static_cast<unsigned char>(t[l - 1]))) --l;
    std::size_t r = k;
    while (r + 1 < t.size() && std::isspace(static_cast<unsigned char>(t[r + 1]))) ++r;
    bool by_sign = (l > 0 && (t[l - 1] == '+' || t[l - 1] == '-')) ||
                   (r + 1 < t.size() && (t[r + 1] == '+' || t[r + 1] == '-'));
    if (!by_sign) throw std::invalid_argument("unexpected whitespace in complex literal");
  }
  std::string s;
  for (char c : t)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty complex literal");

  if (s.back() != 'i') {
    if (s.find('i') != std::string::npos)
      throw std::invalid_argument("misplaced 'i' in complex literal");
    return complexd(parse_double(s), 0.0);
  }

  std::string body = s.substr(0, s.size() - 1);
  if (body.find('i') != std::string::npos)
    throw std::invalid_argument("misplaced 'i' in complex literal");

  // Split at the last sign that is neither leading nor part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }

  std::string real_part = split == std::string::npos ? "" : body.substr(0, split);
  std::string imag_part = split == std::string::npos ? body : body.substr(split);
  double re = real_part.empty() ? 0.0 : parse_double(real_part);
  double im;
  if (imag_part.empty() || imag_part == "+")
    im = 1.0;
  else if (imag_part == "-")
    im = -1.0;
  else
    im = parse_double(imag_part);
  return complexd(re, im);
}

namespace {

class Parser {
 public:
  RunConfig run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_;
      std::string line = raw;
      std::size_t cut = line.find_first_of("#;");
      if (cut != std::string::npos) line.resize(cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[')
        enter_section(line);
      else
        assign(line);
    }
    return cfg_;
  }

 private:
  void enter_section(const std::string& line) {
    if (line.back() != ']') throw ConfigError("unterminated section header", line_, line);
    std::string name = trim(line.substr(1, line.size() - 2));
    if (name != "system" && name != "simulation" && name != "sweep" && name != "regime")
      throw ConfigError("unknown section", line_, name);
    section_ = name;
  }

  void assign(const std::string& line) {
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_, line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line_, line);
    if (section_.empty())
      throw ConfigError("key appears before any [section]", line_, key);
    if (value.empty()) throw ConfigError("empty value", line_, qualified(key));

    if (section_ == "system")
      assign_system(key, value);
    else if (section_ == "simulation")
      assign_simulation(key, value);
    else if (section_ == "sweep")
      assign_sweep(key, value);
    else
      assign_regime(key, value);
  }

  std::string qualified(const std::string& key) const { return section_ + "." + key; }

  [[noreturn]] void unknown(const std::string& key) const {
    throw ConfigError("unknown key", line_, qualified(key));
  }

  template <class F>
  auto parse(const std::string& key, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const std::exception& e) {
      throw ConfigError(e.what(), line_, qualified(key));
    }
  }

  double number(const std::string& key, const std::string& v) {
    return parse(key, [&] { return parse_double(v); });
  }

  int integer(const std::string& key, const std::string& v, int least) {
    long n = parse(key, [&] { return parse_long(v); });
    if (n < least)
      throw ConfigError("must be at least " + std::to_string(least), line_, qualified(key));
    return static_cast<int>(n);
  }

  void assign_system(const std::string& key, const std::string& v) {
    SystemParams& p = cfg_.params;
    if (key == "kappa1")
      p.kappa1 = number(key, v);
    else if (key == "kappa2")
      p.kappa2 = number(key, v);
    else if (key == "kappa_m")
      p.kappa_m = number(key, v);
    else if (key == "omega1")
      p.omega1 = parse(key, [&] { return parse_complex(v); });
    else if (key == "omega2")
      p.omega2 = parse(key, [&] { return parse_complex(v); });
    else if (key == "xi1")
      p.xi1 = parse(key, [&] { return parse_complex(v); });
    else if (key == "xi2")
      p.xi2 = parse(key, [&] { return parse_complex(v); });
    else
      unknown(key);
  }

  void assign_simulation(const std::string& key, const std::string& v) {
    if (key == "cutoff")
      cfg_.cutoff = integer(key, v, 0);
    else if (key == "t_final") {
      cfg_.t_final = number(key, v);
      if (cfg_.t_final <= 0) throw ConfigError("must be positive", line_, qualified(key));
    } else if (key == "n_samples")
      cfg_.n_samples = integer(key, v, 2);
    else if (key == "dt") {
      cfg_.dt = number(key, v);
      if (cfg_.dt < 0) throw ConfigError("must be non-negative", line_, qualified(key));
    } else if (key == "trajectories")
      cfg_.trajectories = integer(key, v, 1);
    else if (key == "seed")
      cfg_.seed = parse(key, [&] { return parse_seed(v); });
    else if (key == "threads")
      cfg_.threads = integer(key, v, 0);
    else
      unknown(key);
  }

  void assign_sweep(const std::string& key, const std::string& v) {
    Grid g = parse(key, [&] { return parse_grid(v); });
    if (key == "kappa_m")
      cfg_.kappa_m_grid = g;
    else if (key == "phi")
      cfg_.phi_grid = g;
    else if (key == "drive_ratio_phase")
      cfg_.drive_ratio_phase = g;
    else
      unknown(key);
  }

  void assign_regime(const std::string& key, const std::string& v) {
    double x = number(key, v);
    if (x <= 0) throw ConfigError("must be positive", line_, qualified(key));
    if (key == "fiber_length_m")
      cfg_.fiber_length_m = x;
    else if (key == "kappa0_per_s")
      cfg_.kappa0_per_s = x;
    else
      unknown(key);
  }

  RunConfig cfg_;
  std::string section_;
  int line_ = 0;
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string&) {
  return Parser{}.run(text);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file", 0, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  auto kv = [&out](const char* key, const std::string& value) {
    out << "# " << key << " = " << value << "\n";
  };
  out << "# [system]\n";
  kv("kappa1", fmt_double(c.params.kappa1));
  kv("kappa2", fmt_double(c.params.kappa2));
  kv("kappa_m", fmt_double(c.params.kappa_m));
  kv("omega1", fmt_complex(c.params.omega1));
  kv("omega2", fmt_complex(c.params.omega2));
  kv("xi1", fmt_complex(c.params.xi1));
  kv("xi2", fmt_complex(c.params.xi2));
  out << "# [simulation]\n";
  kv("cutoff", std::to_string(c.cutoff));
  kv("t_final", fmt_double(c.t_final));
  kv("n_samples", std::to_string(c.n_samples));
  kv("dt", fmt_double(c.dt));
  kv("trajectories", std::to_string(c.trajectories));
  kv("seed", std::to_string(c.seed));
  // threads intentionally left out: it never changes results, and run
  // artifacts should compare equal across worker counts.
  if (c.kappa_m_grid || c.phi_grid || c.drive_ratio_phase) {
    out << "# [sweep]\n";
    if (c.kappa_m_grid) kv("kappa_m", fmt_grid(*c.kappa_m_grid));
    if (c.phi_grid) kv("phi", fmt_grid(*c.phi_grid));
    if (c.drive_ratio_phase) kv("drive_ratio_phase", fmt_grid(*c.drive_ratio_phase));
  }
  if (c.fiber_length_m || c.kappa0_per_s) {
    out << "# [regime]\n";
    if (c.fiber_length_m) kv("fiber_length_m", fmt_double(*c.fiber_length_m));
    if (c.kappa0_per_s) kv("kappa0_per_s", fmt_double(*c.kappa0_per_s));
  }
  return out.str();
}

}  // namespace cavitylink
