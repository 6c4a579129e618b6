#include "splr/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "splr/budget.hpp"
#include "splr/io.hpp"
#include "splr/pattern.hpp"

namespace splr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, int line) {
  throw ContractError("config line " + std::to_string(line) + ": invalid value '" + std::string(value) + "' for '" +
                      std::string(key) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, int line) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, line);
  return out;
}

double parse_real(std::string_view text) {
  double out = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end || text.empty()) throw ContractError("invalid number '" + std::string(text) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, value, line);
}

}  // namespace

RankSpec parse_rank(std::string_view text) {
  if (text.starts_with("auto:")) return AutoRank{parse_real(text.substr(5))};
  if (text.starts_with("ratio:")) {
    const auto rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw ContractError("rank ratio must be 'ratio:<kappa>,<rho>'");
    return RatioRank{parse_real(rest.substr(0, comma)), parse_real(rest.substr(comma + 1))};
  }
  Index r = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, r);
  if (ec != std::errc() || ptr != end || text.empty() || r < 0) throw ContractError("invalid rank '" + std::string(text) + "'");
  return FixedRank{r};
}

std::string to_string(const RankSpec& rank) {
  if (const auto* f = std::get_if<FixedRank>(&rank)) return std::to_string(f->r);
  if (const auto* a = std::get_if<AutoRank>(&rank)) return "auto:" + io::format_double(a->rho);
  const auto& q = std::get<RatioRank>(rank);
  return "ratio:" + io::format_double(q.kappa) + "," + io::format_double(q.rho);
}

RunConfig::Resolved RunConfig::resolve(Index n_in, Index n_out) const {
  Resolved out{pattern, 0};
  if (const auto* f = std::get_if<FixedRank>(&rank)) {
    out.rank = f->r;
  } else if (const auto* a = std::get_if<AutoRank>(&rank)) {
    const auto* nm = std::get_if<SemiStructured>(&pattern);
    if (nm == nullptr) throw ContractError("rank = auto:<rho> needs an N:M pattern");
    out.rank = rank_for_fixed_compression(a->rho, nm->n, nm->m, n_in, n_out);
  } else {
    const auto& q = std::get<RatioRank>(rank);
    if (std::holds_alternative<SemiStructured>(pattern))
      throw ContractError("rank = ratio:<kappa>,<rho> sets an unstructured budget and cannot be combined with N:M");
    const RankRatioBudget b = budget_for_rank_ratio(q.kappa, q.rho, n_in, n_out);
    out.rank = b.rank;
    out.pattern = Unstructured{b.nonzeros, Granularity::PerMatrix};
  }
  validate_pattern(out.pattern, n_in, n_out);
  if (out.rank > std::min(n_in, n_out))
    throw ContractError("rank " + std::to_string(out.rank) + " exceeds min(N_in, N_out) = " +
                        std::to_string(std::min(n_in, n_out)));
  return out;
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  int line_no = 0;
  Index blocksize = 128;
  std::string pruner = "obs";
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ContractError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second)
      throw ContractError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");

    AltMinConfig& a = cfg.altmin;
    if (key == "pruner") {
      if (value != "magnitude" && value != "wanda" && value != "obs") bad_value(key, value, line_no);
      pruner = value;
    } else if (key == "obs_blocksize") {
      blocksize = parse_number<Index>(key, value, line_no);
      if (blocksize < 1) bad_value(key, value, line_no);
    } else if (key == "lowrank") {
      if (value == "gd") a.lowrank_mode = LowRankMode::FullHessianGD;
      else if (value == "diag") a.lowrank_mode = LowRankMode::DiagClosedForm;
      else if (value == "svd") a.lowrank_mode = LowRankMode::DataFreeSVD;
      else bad_value(key, value, line_no);
    } else if (key == "scaled") {
      a.is_scaled = parse_bool(key, value, line_no);
    } else if (key == "t_am") {
      a.t_am = parse_number<int>(key, value, line_no);
    } else if (key == "t_lr") {
      a.t_lr = parse_number<int>(key, value, line_no);
    } else if (key == "eta") {
      a.eta = parse_number<double>(key, value, line_no);
    } else if (key == "percdamp") {
      a.percdamp = parse_number<double>(key, value, line_no);
    } else if (key == "seed") {
      a.seed = parse_number<std::uint64_t>(key, value, line_no);
    } else if (key == "damp_convention") {
      if (value == "mean-diag") a.damp_convention = DampConvention::MeanDiagonal;
      else if (value == "trace") a.damp_convention = DampConvention::Trace;
      else bad_value(key, value, line_no);
    } else if (key == "optimizer") {
      if (value == "adam") a.optimizer = OptimizerKind::Adam;
      else if (value == "gd") a.optimizer = OptimizerKind::GradientDescent;
      else bad_value(key, value, line_no);
    } else if (key == "activation") {
      if (value == "identity") a.activation = Activation::Identity;
      else if (value == "relu") a.activation = Activation::Relu;
      else bad_value(key, value, line_no);
    } else if (key == "pattern") {
      cfg.pattern = parse_pattern(value);
    } else if (key == "rank") {
      cfg.rank = parse_rank(value);
    } else {
      throw ContractError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (pruner == "magnitude") cfg.altmin.pruner = MagnitudePruner{};
  else if (pruner == "wanda") cfg.altmin.pruner = WandaPruner{};
  else cfg.altmin.pruner = ObsPruner{blocksize};
  cfg.altmin.validate();
  return cfg;
}

RunConfig parse_run_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_run_config(in);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open config '" + path + "'");
  return parse_run_config(in);
}

}  // namespace splr
