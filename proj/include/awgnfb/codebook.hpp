#pragma once

#include <span>
#include <vector>

namespace awgnfb {

enum class CodeKind { orthogonal, simplex, composite };

// A set of equal-energy real codewords.
struct Codebook {
  std::vector<std::vector<double>> codewords;
  double energy = 0.0;  // squared norm of every codeword
  CodeKind kind = CodeKind::orthogonal;

  int size() const { return static_cast<int>(codewords.size()); }
  int dim() const {
    return codewords.empty() ? 0 : static_cast<int>(codewords[0].size());
  }
};

double inner(const std::vector<double>& a, const std::vector<double>& b);
double squared_norm(const std::vector<double>& a);
double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b);

// Checks the kind-specific geometry (equal energies; zero pairwise inner
// products for orthogonal codes; -E/(k-1) inner products and zero centroid
// for simplex codes) within 1e-9 relative tolerance.
bool codebook_geometry_ok(const Codebook& cb);

// M mutually orthogonal codewords of squared norm `energy` in `dim`
// coordinates (scaled standard basis). M > dim is a capacity error,
// energy <= 0 a domain error.
Codebook build_orthogonal(int M, int dim, double energy);

// k equidistant codewords of squared norm `energy` in k-1 coordinates,
// k in {2,3,4}: pairwise squared distance 2*energy*k/(k-1), zero centroid.
// Construction: centered orthonormal frame, rescaled; deterministic.
Codebook build_simplex(int k, double energy);

// Squared distance between two codewords of the k-simplex at energy E.
inline double simplex_distance(int k, double energy) {
  return 2.0 * energy * k / (k - 1.0);
}

// The phase-II code induced by one group selection: the k selected
// messages carry a k-simplex embedded in the three reserved slots at the
// start of the phase-II block (slot 0 only for k=2, slots 0..1 for k=3,
// slots 0..2 for k=4), every other message an orthogonal codeword in the
// remaining slots 3..n1-1. All M codewords have squared norm A2.
struct PhaseTwoCode {
  std::vector<int> selected;  // ordered: ranking positions 1..k
  Codebook group_code;        // simplex on the reserved slots
  Codebook rest_code;         // orthogonal on the trailing slots
  int total_length = 0;       // n1

  int message_count() const;
  // Full length-n1 codeword of message j (0-based).
  std::vector<double> codeword(int j) const;
  // Inner product of a length-n1 vector with codeword j, without
  // materializing the embedding.
  double codeword_inner(int j, std::span<const double> v) const;
  // Squared distance between codewords i and j.
  double pair_distance(int i, int j) const;
  // Position of j in `selected`, or -1.
  int selected_position(int j) const;
  // Rank of j among the unselected messages (ascending index), or -1.
  int rest_rank(int j) const;
};

// Assemble the composite phase-II code for the ordered selection
// `selected` (size k in {2,3,4}) over M messages with n1 slots and
// energy A2. Capacity requires M <= n1 - 1.
PhaseTwoCode build_phase2(std::span<const int> selected, int M, int n1,
                          double A2);

}  // namespace awgnfb
