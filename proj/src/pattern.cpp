#include "splr/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <vector>

namespace splr {

namespace {

struct Scored {
  double score;
  Index flat;
};

bool ranks_before(const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.flat < b.flat;
}

// Marks the top `keep` candidates in `mask`.
void keep_top(std::vector<Scored>& candidates, Index keep, Mask& mask) {
  const Index n = static_cast<Index>(candidates.size());
  keep = std::min(keep, n);
  if (keep <= 0) return;
  if (keep < n) {
    std::nth_element(candidates.begin(), candidates.begin() + (keep - 1), candidates.end(), ranks_before);
  }
  const Index rows = mask.rows();
  for (Index i = 0; i < keep; ++i) {
    const Index flat = candidates[static_cast<std::size_t>(i)].flat;
    mask(flat % rows, flat / rows) = true;
  }
}

Index parse_index(std::string_view text, std::string_view what) {
  Index value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ContractError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

void validate_pattern(const SparsityPattern& pattern, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw ContractError("pattern applied to empty matrix");
  if (const auto* u = std::get_if<Unstructured>(&pattern)) {
    const Index limit = u->granularity == Granularity::PerMatrix ? rows * cols : rows;
    if (u->k < 0 || u->k > limit)
      throw ContractError("unstructured budget k=" + std::to_string(u->k) + " outside [0, " + std::to_string(limit) +
                          "] for a " + shape_string(rows, cols) + " matrix");
  } else if (const auto* nm = std::get_if<SemiStructured>(&pattern)) {
    if (nm->n < 1 || nm->n > nm->m)
      throw ContractError("N:M pattern requires 1 <= N <= M, got " + to_string(pattern));
    if (rows % nm->m != 0)
      throw ContractError("N:M pattern " + to_string(pattern) + " needs N_in divisible by M, N_in=" +
                          std::to_string(rows));
  }
}

bool is_feasible(const Mask& mask, const SparsityPattern& pattern) {
  const Index rows = mask.rows();
  const Index cols = mask.cols();
  if (std::holds_alternative<Dense>(pattern)) return true;
  if (const auto* u = std::get_if<Unstructured>(&pattern)) {
    if (u->granularity == Granularity::PerMatrix) return mask.count() <= u->k;
    for (Index j = 0; j < cols; ++j)
      if (mask.col(j).count() > u->k) return false;
    return true;
  }
  const auto& nm = std::get<SemiStructured>(pattern);
  if (nm.n < 1 || nm.n > nm.m || rows % nm.m != 0) return false;
  for (Index j = 0; j < cols; ++j)
    for (Index g = 0; g < rows; g += nm.m)
      if (mask.col(j).segment(g, nm.m).count() > nm.n) return false;
  return true;
}

Mask select_support(const MatrixXd& scores, const SparsityPattern& pattern) {
  const Index rows = scores.rows();
  const Index cols = scores.cols();
  validate_pattern(pattern, rows, cols);
  if (!scores.allFinite()) throw NumericError("select_support: non-finite scores");

  if (std::holds_alternative<Dense>(pattern)) return Mask::Constant(rows, cols, true);

  Mask mask = Mask::Constant(rows, cols, false);
  std::vector<Scored> candidates;
  if (const auto* u = std::get_if<Unstructured>(&pattern)) {
    if (u->granularity == Granularity::PerMatrix) {
      candidates.reserve(static_cast<std::size_t>(rows * cols));
      for (Index flat = 0; flat < rows * cols; ++flat) candidates.push_back({scores(flat % rows, flat / rows), flat});
      keep_top(candidates, u->k, mask);
    } else {
      for (Index j = 0; j < cols; ++j) {
        candidates.clear();
        for (Index i = 0; i < rows; ++i) candidates.push_back({scores(i, j), j * rows + i});
        keep_top(candidates, u->k, mask);
      }
    }
    return mask;
  }

  const auto& nm = std::get<SemiStructured>(pattern);
  for (Index j = 0; j < cols; ++j) {
    for (Index g = 0; g < rows; g += nm.m) {
      candidates.clear();
      for (Index i = g; i < g + nm.m; ++i) candidates.push_back({scores(i, j), j * rows + i});
      keep_top(candidates, nm.n, mask);
    }
  }
  return mask;
}

Index max_nonzeros(const SparsityPattern& pattern, Index rows, Index cols) {
  if (std::holds_alternative<Dense>(pattern)) return rows * cols;
  if (const auto* u = std::get_if<Unstructured>(&pattern))
    return u->granularity == Granularity::PerMatrix ? std::min(u->k, rows * cols) : std::min(u->k, rows) * cols;
  const auto& nm = std::get<SemiStructured>(pattern);
  return rows / nm.m * nm.n * cols;
}

std::string to_string(const SparsityPattern& pattern) {
  if (std::holds_alternative<Dense>(pattern)) return "dense";
  if (const auto* u = std::get_if<Unstructured>(&pattern))
    return (u->granularity == Granularity::PerMatrix ? "k:" : "kcol:") + std::to_string(u->k);
  const auto& nm = std::get<SemiStructured>(pattern);
  return std::to_string(nm.n) + ":" + std::to_string(nm.m);
}

SparsityPattern parse_pattern(std::string_view text) {
  if (text == "dense") return Dense{};
  if (text.starts_with("kcol:"))
    return Unstructured{parse_index(text.substr(5), "pattern budget"), Granularity::PerColumn};
  if (text.starts_with("k:")) return Unstructured{parse_index(text.substr(2), "pattern budget"), Granularity::PerMatrix};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ContractError("invalid pattern '" + std::string(text) + "'");
  SemiStructured nm;
  nm.n = static_cast<int>(parse_index(text.substr(0, colon), "pattern N"));
  nm.m = static_cast<int>(parse_index(text.substr(colon + 1), "pattern M"));
  if (nm.n < 1 || nm.n > nm.m) throw ContractError("N:M pattern requires 1 <= N <= M, got '" + std::string(text) + "'");
  return nm;
}

}  // namespace splr
