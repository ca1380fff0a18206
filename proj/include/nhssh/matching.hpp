#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "nhssh/errors.hpp"

namespace nhssh {

struct MatchStats {
  double max_abs = 0.0;   // bottleneck distance
  double mean_abs = 0.0;  // mean distance of the bottleneck-optimal assignment
  double scale = 0.0;     // max |b|
  double max_rel() const { return scale > 0.0 ? max_abs / scale : max_abs; }
  double mean_rel() const { return scale > 0.0 ? mean_abs / scale : mean_abs; }
  std::vector<int> assignment;  // a[k] matched to b[assignment[k]]
};

namespace detail {
// Kuhn augmenting paths on the bipartite graph {d(i,j) <= thr}.
inline bool perfect_matching(const std::vector<std::vector<double>>& d, double thr,
                             std::vector<int>& match_b) {
  const int n = static_cast<int>(d.size());
  match_b.assign(n, -1);
  std::vector<char> seen;
  std::function<bool(int)> augment = [&](int i) {
    for (int j = 0; j < n; ++j) {
      if (d[i][j] > thr || seen[j]) continue;
      seen[j] = 1;
      if (match_b[j] < 0 || augment(match_b[j])) {
        match_b[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    seen.assign(n, 0);
    if (!augment(i)) return false;
  }
  return true;
}
}  // namespace detail

/// Compare two equal-size multisets of complex numbers under the assignment
/// minimizing the largest pairwise distance.
inline MatchStats match_spectra(const std::vector<std::complex<double>>& a,
                                const std::vector<std::complex<double>>& b) {
  if (a.size() != b.size())
    throw Error(Errc::InvalidRequest, "spectra of different sizes cannot be matched");
  MatchStats st;
  const int n = static_cast<int>(a.size());
  for (const auto& z : b) st.scale = std::max(st.scale, std::abs(z));
  if (n == 0) return st;

  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) all.push_back(d[i][j] = std::abs(a[i] - b[j]));
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::size_t lo = 0, hi = all.size() - 1;
  std::vector<int> mb;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (detail::perfect_matching(d, all[mid], mb))
      hi = mid;
    else
      lo = mid + 1;
  }
  detail::perfect_matching(d, all[lo], mb);
  st.max_abs = all[lo];
  st.assignment.assign(n, -1);
  for (int j = 0; j < n; ++j) st.assignment[mb[j]] = j;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += d[i][st.assignment[i]];
  st.mean_abs = sum / n;
  return st;
}

}  // namespace nhssh
