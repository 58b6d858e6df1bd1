#include "mrlr_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace mrlr::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class Reader {
public:
  Reader(const pt::ptree &tree, std::string source) : tree_(tree), source_(std::move(source)) {
    static const std::map<std::string, std::set<std::string>> known = {
        {"data", {"phantom", "geometry", "resolution", "projections", "step_deg", "start_deg",
                  "time_steps", "oversample", "noise", "noise_model", "seed", "batches",
                  "batch_width", "batch_overlap", "redistribute"}},
        {"method", {"name"}},
        {"glr", {"lambda"}},
        {"llr", {"lambda", "patch_size"}},
        {"mrlr", {"lambda", "wavelet", "levels", "patch_sizes"}},
        {"ls", {"lambda_l", "lambda_s", "wavelet", "levels", "split"}},
        {"solver", {"gamma", "allow_unsafe_gamma", "max_iterations", "tolerance", "seed",
                    "divergence_factor"}},
        {"output", {"directory", "window"}}};
    for (const auto &[section, body] : tree_) {
      auto it = known.find(section);
      if (it == known.end())
        fail("unknown section [" + section + "]");
      for (const auto &[key, value] : body)
        if (!it->second.count(key))
          fail("unknown key '" + key + "' in [" + section + "]");
    }
  }

  std::optional<std::string> get(const std::string &section, const std::string &key) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.')))
      return trim(*v);
    return std::nullopt;
  }

  template <class T> void read(const std::string &section, const std::string &key, T &out) const {
    const auto v = get(section, key);
    if (!v)
      return;
    std::istringstream in(*v);
    T value{};
    in >> value;
    if (in.fail() || !(in >> std::ws).eof())
      fail("bad value '" + *v + "' for " + section + "." + key);
    out = value;
  }

  void read_bool(const std::string &section, const std::string &key, bool &out) const {
    const auto v = get(section, key);
    if (!v)
      return;
    const std::string s = lower(*v);
    if (s == "true" || s == "yes" || s == "1" || s == "on")
      out = true;
    else if (s == "false" || s == "no" || s == "0" || s == "off")
      out = false;
    else
      fail("bad boolean '" + *v + "' for " + section + "." + key);
  }

  [[noreturn]] void fail(const std::string &msg) const { throw ConfigError(source_ + ": " + msg); }

private:
  const pt::ptree &tree_;
  std::string source_;
};

} // namespace

std::vector<PatchSize> parse_patch_sizes(std::string_view text) {
  std::vector<PatchSize> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item = lower(trim(item));
    if (item.empty())
      throw ConfigError("empty patch size in '" + std::string(text) + "'");
    const auto x = item.find('x');
    try {
      std::size_t used = 0;
      PatchSize p;
      if (x == std::string::npos) {
        p.rows = p.cols = std::stol(item, &used);
        if (used != item.size())
          throw std::invalid_argument(item);
      } else {
        const std::string a = trim(item.substr(0, x)), b = trim(item.substr(x + 1));
        p.rows = std::stol(a, &used);
        if (used != a.size())
          throw std::invalid_argument(item);
        p.cols = std::stol(b, &used);
        if (used != b.size())
          throw std::invalid_argument(item);
      }
      if (p.rows < 1 || p.cols < 1)
        throw std::invalid_argument(item);
      out.push_back(p);
    } catch (const std::logic_error &) {
      throw ConfigError("bad patch size '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError("no patch sizes given");
  return out;
}

std::string format_patch_sizes(std::span<const PatchSize> sizes) {
  std::string out;
  for (const auto &p : sizes) {
    if (!out.empty())
      out += ", ";
    out += std::to_string(p.rows) + "x" + std::to_string(p.cols);
  }
  return out;
}

std::pair<double, double> parse_window(std::string_view text) {
  const std::string s(text);
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw ConfigError("window must be 'lo,hi', got '" + s + "'");
  try {
    std::size_t u1 = 0, u2 = 0;
    const std::string a = trim(s.substr(0, comma)), b = trim(s.substr(comma + 1));
    const double lo = std::stod(a, &u1), hi = std::stod(b, &u2);
    if (u1 != a.size() || u2 != b.size())
      throw std::invalid_argument(s);
    if (!(hi > lo))
      throw ConfigError("window upper bound must exceed the lower one");
    return {lo, hi};
  } catch (const std::logic_error &) {
    throw ConfigError("bad window '" + s + "'");
  }
}

const solve::SolverConfig &ExperimentConfig::solver(std::optional<solve::Method> m) const {
  const auto it = methods.find(m.value_or(method));
  if (it == methods.end())
    throw ConfigError("no settings for method " + std::string(solve::to_string(m.value_or(method))));
  return it->second;
}

void ExperimentConfig::validate(std::optional<solve::Method> m) const {
  try {
    data.sim.validate();
    if (data.batches < 1 || data.batch_width < 1 || data.batch_overlap < 0 ||
        data.batch_width <= data.batch_overlap)
      throw ConfigError("batching: need batches >= 1 and width > overlap >= 0");
    const Index needed = data.redistribute ? data.batch_width
                                           : (data.batches - 1) * (data.batch_width - data.batch_overlap) +
                                                 data.batch_width;
    if (needed > data.sim.projections)
      throw ConfigError("batching needs " + std::to_string(needed) + " projections but only " +
                        std::to_string(data.sim.projections) + " are simulated");
    const auto &cfg = solver(m);
    cfg.validate();
    const Index n = data.sim.resolution;
    if (cfg.method == solve::Method::LS || cfg.method == solve::Method::MRLR) {
      const Index block = Index{1} << cfg.levels;
      if (n % block != 0)
        throw ConfigError("resolution " + std::to_string(n) + " is not divisible by 2^J = " +
                          std::to_string(block));
      (void)WaveletFilter::from_name(cfg.wavelet);
    }
    if (cfg.method != solve::Method::LS)
      (void)solve::make_regularizer(cfg, n, n);
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(name + ": " + e.what());
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string &source) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const Reader r(tree, source);

  ExperimentConfig cfg;
  cfg.name = source;
  auto &d = cfg.data;
  if (auto v = r.get("data", "phantom"))
    d.phantom = *v;
  if (auto v = r.get("data", "geometry"))
    d.geometry = lower(*v);
  if (d.geometry != "parallel" && d.geometry != "fan")
    r.fail("geometry must be 'parallel' or 'fan'");
  r.read("data", "resolution", d.sim.resolution);
  r.read("data", "projections", d.sim.projections);
  r.read("data", "step_deg", d.sim.step_deg);
  r.read("data", "start_deg", d.sim.start_deg);
  r.read("data", "time_steps", d.sim.time_steps);
  r.read("data", "oversample", d.sim.oversample);
  r.read("data", "noise", d.sim.noise);
  if (auto v = r.get("data", "noise_model")) {
    const std::string s = lower(*v);
    if (s == "std" || s == "relative-std")
      d.sim.noise_model = tomo::NoiseModel::RelativeStd;
    else if (s == "variance" || s == "relative-variance")
      d.sim.noise_model = tomo::NoiseModel::RelativeVariance;
    else
      r.fail("noise_model must be 'std' or 'variance'");
  }
  r.read("data", "seed", d.sim.seed);
  r.read("data", "batches", d.batches);
  r.read("data", "batch_width", d.batch_width);
  r.read("data", "batch_overlap", d.batch_overlap);
  r.read_bool("data", "redistribute", d.redistribute);

  if (auto v = r.get("method", "name")) {
    try {
      cfg.method = solve::method_from_string(lower(*v));
    } catch (const Error &e) {
      r.fail(e.what());
    }
  }

  solve::SolverConfig base;
  double gamma = 0.0;
  if (r.get("solver", "gamma")) {
    r.read("solver", "gamma", gamma);
    base.gamma = gamma;
  }
  r.read_bool("solver", "allow_unsafe_gamma", base.allow_unsafe_gamma);
  r.read("solver", "max_iterations", base.max_iterations);
  r.read("solver", "tolerance", base.tolerance);
  r.read("solver", "seed", base.seed);
  r.read("solver", "divergence_factor", base.divergence_factor);

  auto glr = base;
  glr.method = solve::Method::GLR;
  r.read("glr", "lambda", glr.lambda);

  auto llr = base;
  llr.method = solve::Method::LLR;
  llr.lambda = 0.1;
  llr.levels = 0;
  llr.patch_sizes = {{8, 8}};
  r.read("llr", "lambda", llr.lambda);
  if (auto v = r.get("llr", "patch_size")) {
    llr.patch_sizes = parse_patch_sizes(*v);
    if (llr.patch_sizes.size() != 1)
      r.fail("llr.patch_size takes a single size");
  }

  auto mr = base;
  mr.method = solve::Method::MRLR;
  mr.lambda = 1.0;
  mr.wavelet = "db3";
  mr.levels = 2;
  mr.patch_sizes = {{64, 64}};
  r.read("mrlr", "lambda", mr.lambda);
  if (auto v = r.get("mrlr", "wavelet"))
    mr.wavelet = lower(*v);
  r.read("mrlr", "levels", mr.levels);
  if (auto v = r.get("mrlr", "patch_sizes"))
    mr.patch_sizes = parse_patch_sizes(*v);
  if (mr.patch_sizes.size() != 1 && static_cast<int>(mr.patch_sizes.size()) != mr.levels + 1)
    r.fail("mrlr.patch_sizes needs one size or levels + 1 sizes");

  auto ls = base;
  ls.method = solve::Method::LS;
  ls.wavelet = "db3";
  ls.levels = 3;
  r.read("ls", "lambda_l", ls.lambda_l);
  r.read("ls", "lambda_s", ls.lambda_s);
  if (auto v = r.get("ls", "wavelet"))
    ls.wavelet = lower(*v);
  r.read("ls", "levels", ls.levels);
  if (auto v = r.get("ls", "split")) {
    try {
      ls.split = solve::split_rule_from_string(lower(*v));
    } catch (const Error &e) {
      r.fail(e.what());
    }
  }

  cfg.methods = {{solve::Method::GLR, glr},
                 {solve::Method::LLR, llr},
                 {solve::Method::MRLR, mr},
                 {solve::Method::LS, ls}};

  if (auto v = r.get("output", "directory"))
    cfg.output.directory = *v;
  if (auto v = r.get("output", "window"); v && lower(*v) != "auto")
    cfg.output.window = parse_window(*v);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

} // namespace mrlr::cli
