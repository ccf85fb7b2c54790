#include "awgnfb/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace awgnfb {

double inner(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const std::vector<double>& a) { return inner(a, a); }

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("squared_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool codebook_geometry_ok(const Codebook& cb) {
  const double tol = 1e-9;
  const int m = cb.size();
  for (int i = 0; i < m; ++i) {
    if (std::fabs(squared_norm(cb.codewords[i]) - cb.energy) >
        tol * std::max(1.0, cb.energy))
      return false;
  }
  if (cb.kind == CodeKind::orthogonal) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::fabs(inner(cb.codewords[i], cb.codewords[j])) >
            tol * cb.energy)
          return false;
  } else if (cb.kind == CodeKind::simplex) {
    double want = -cb.energy / (m - 1.0);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::fabs(inner(cb.codewords[i], cb.codewords[j]) - want) >
            tol * cb.energy)
          return false;
    std::vector<double> centroid(cb.dim(), 0.0);
    for (const auto& w : cb.codewords)
      for (int t = 0; t < cb.dim(); ++t) centroid[t] += w[t];
    for (double c : centroid)
      if (std::fabs(c) > tol * std::sqrt(cb.energy)) return false;
  }
  return true;
}

Codebook build_orthogonal(int M, int dim, double energy) {
  if (energy <= 0.0)
    throw std::invalid_argument("build_orthogonal: energy must be > 0");
  if (M < 1) throw std::invalid_argument("build_orthogonal: M must be >= 1");
  if (M > dim)
    throw std::length_error(
        "build_orthogonal: more codewords than dimensions");
  Codebook cb;
  cb.energy = energy;
  cb.kind = CodeKind::orthogonal;
  cb.codewords.assign(M, std::vector<double>(dim, 0.0));
  double amp = std::sqrt(energy);
  for (int i = 0; i < M; ++i) cb.codewords[i][i] = amp;
  return cb;
}

Codebook build_simplex(int k, double energy) {
  if (k < 2 || k > 4)
    throw std::invalid_argument("build_simplex: k must be in {2,3,4}");
  if (energy <= 0.0)
    throw std::invalid_argument("build_simplex: energy must be > 0");
  // Center the k standard basis vectors of R^k and express them in the
  // (k-1)-dimensional Helmert basis of the zero-sum subspace. Codeword i
  // is then (h_1[i], ..., h_{k-1}[i]) scaled to the requested energy.
  Codebook cb;
  cb.energy = energy;
  cb.kind = CodeKind::simplex;
  cb.codewords.assign(k, std::vector<double>(k - 1, 0.0));
  double scale = std::sqrt(energy * k / (k - 1.0));
  // Helmert row j: (1,...,1,-j,0,...,0)/sqrt(j(j+1)), with j leading ones.
  for (int j = 1; j < k; ++j) {
    double norm = std::sqrt(static_cast<double>(j) * (j + 1.0));
    for (int i = 0; i < k; ++i) {
      double h;
      if (i < j)
        h = 1.0 / norm;
      else if (i == j)
        h = -static_cast<double>(j) / norm;
      else
        h = 0.0;
      cb.codewords[i][j - 1] = scale * h;
    }
  }
  return cb;
}

int PhaseTwoCode::message_count() const {
  return static_cast<int>(selected.size()) + rest_code.size();
}

int PhaseTwoCode::selected_position(int j) const {
  for (std::size_t p = 0; p < selected.size(); ++p)
    if (selected[p] == j) return static_cast<int>(p);
  return -1;
}

int PhaseTwoCode::rest_rank(int j) const {
  if (selected_position(j) >= 0) return -1;
  int rank = 0;
  for (int m = 0; m < j; ++m)
    if (selected_position(m) < 0) ++rank;
  return rank;
}

std::vector<double> PhaseTwoCode::codeword(int j) const {
  std::vector<double> w(total_length, 0.0);
  int p = selected_position(j);
  if (p >= 0) {
    const auto& s = group_code.codewords[p];
    for (std::size_t t = 0; t < s.size(); ++t) w[t] = s[t];
  } else {
    const auto& r = rest_code.codewords[rest_rank(j)];
    for (std::size_t t = 0; t < r.size(); ++t) w[3 + t] = r[t];
  }
  return w;
}

double PhaseTwoCode::codeword_inner(int j, std::span<const double> v) const {
  int p = selected_position(j);
  double s = 0.0;
  if (p >= 0) {
    const auto& g = group_code.codewords[p];
    for (std::size_t t = 0; t < g.size(); ++t) s += g[t] * v[t];
  } else {
    const auto& r = rest_code.codewords[rest_rank(j)];
    for (std::size_t t = 0; t < r.size(); ++t) s += r[t] * v[3 + t];
  }
  return s;
}

double PhaseTwoCode::pair_distance(int i, int j) const {
  if (i == j) return 0.0;
  int pi = selected_position(i);
  int pj = selected_position(j);
  if (pi >= 0 && pj >= 0)
    return squared_distance(group_code.codewords[pi],
                            group_code.codewords[pj]);
  // disjoint support in all remaining cases
  return 2.0 * group_code.energy;
}

PhaseTwoCode build_phase2(std::span<const int> selected, int M, int n1,
                          double A2) {
  int k = static_cast<int>(selected.size());
  if (k < 2 || k > 4)
    throw std::invalid_argument("build_phase2: selection size not in {2,3,4}");
  if (k > M) throw std::invalid_argument("build_phase2: selection exceeds M");
  if (M > n1 - 1)
    throw std::length_error("build_phase2: M exceeds n1 - 1 capacity");
  for (int j : selected)
    if (j < 0 || j >= M)
      throw std::invalid_argument("build_phase2: selected index out of range");
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (selected[a] == selected[b])
        throw std::invalid_argument("build_phase2: duplicate selected index");

  PhaseTwoCode code;
  code.selected.assign(selected.begin(), selected.end());
  code.total_length = n1;
  code.group_code = build_simplex(k, A2);
  if (M > k) {
    code.rest_code = build_orthogonal(M - k, n1 - 3, A2);
  } else {
    code.rest_code.energy = A2;
    code.rest_code.kind = CodeKind::orthogonal;
  }
  return code;
}

}  // namespace awgnfb
