#include "awgnfb/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace awgnfb {

double tau2_window_lo() { return 0.5 * (std::sqrt(5.0 / 3.0) - 1.0); }
double tau2_window_hi() { return (15.0 - std::sqrt(105.0)) / 30.0; }
double tau3_window_lo() { return 0.5 * (std::sqrt(7.0 / 6.0) - 1.0); }

WindowFlags window_flags(const ExponentParams& p) {
  WindowFlags f;
  f.tau2_ok = p.tau2 >= tau2_window_lo() && p.tau2 <= tau2_window_hi();
  f.tau3_ok = p.tau3 >= tau3_window_lo() && p.tau3 <= 1.0 - p.tau2;
  f.sigma2_ok = p.sigma2 >= 0.0 && p.sigma2 <= 1.0;
  f.beta_ok = p.beta > 0.0 && p.beta <= 0.5;
  return f;
}

double exponent_no_feedback(double A) {
  if (A <= 0.0) throw std::invalid_argument("exponent: A must be > 0");
  return A / 4.0;
}

double exponent_noiseless_feedback(double A) {
  if (A <= 0.0) throw std::invalid_argument("exponent: A must be > 0");
  return A / 2.0;
}

OneSwitchBound one_switch_exponent(double A, double sigma2) {
  if (A <= 0.0) throw std::invalid_argument("exponent: A must be > 0");
  if (sigma2 < 0.0) throw std::invalid_argument("exponent: sigma2 < 0");
  OneSwitchBound b;
  if (sigma2 > 1.0) {
    b.value = 0.0;
    b.vacuous = true;
    return b;
  }
  b.value = A * (1.0 - sigma2) / 3.0;
  return b;
}

double case_k2(double beta) { return (1.0 + 2.0 * beta) / 4.0; }

CaseK0 case_k0(double beta, double tau2, double tau3, double sigma2) {
  CaseK0 c;
  double b2 = (1.0 + 2.0 * tau2) * (1.0 + 2.0 * tau2) / (3.0 + 4.0 * beta);
  double b3 = (1.0 + 2.0 * tau3) * (1.0 + 2.0 * tau3) / (2.0 + 3.0 * beta);
  double m = std::min({b2, b3, 1.0 / 3.0});
  c.combined = (1.0 + beta) / 4.0 * (1.0 + m) * (1.0 - sigma2);
  c.branch_s2 = (1.0 + beta) * (1.0 + beta + tau2 + tau2 * tau2) /
                (3.0 + 4.0 * beta) * (1.0 - sigma2);
  c.branch_s3 = (1.0 + beta) * (2.0 + 3.0 * beta + (1.0 + 2.0 * tau3) *
                                                       (1.0 + 2.0 * tau3)) /
                (4.0 * (2.0 + 3.0 * beta)) * (1.0 - sigma2);
  c.branch_s4 =
      2.0 * (1.0 + beta) * (1.0 + beta) / (5.0 + 8.0 * beta);
  return c;
}

CaseK3 case_k3(double beta, double tau2, double sigma2) {
  CaseK3 c;
  double t = 1.0 - tau2;
  c.full = 0.25 * ((2.0 + 3.0 * beta) / 2.0 + (t + t * t) / (1.0 + sigma2));
  c.floor_val = (1.0 + beta) / 3.0;
  return c;
}

double f4(double beta, double tau2) {
  return (3.0 + 4.0 * beta) *
         (3.0 + 4.0 * beta - 6.0 * tau2 + 6.0 * tau2 * tau2) /
         (6.0 * (3.0 + 8.0 * beta));
}

double case_k4(double beta, double tau2, double sigma2) {
  return f4(beta, tau2) * (1.0 - sigma2);
}

ExponentReport overall(const ExponentParams& p) {
  ExponentReport r;
  r.params = p;
  r.flags = window_flags(p);
  r.e_k2 = case_k2(p.beta);
  r.e_k0 = case_k0(p.beta, p.tau2, p.tau3, p.sigma2);
  r.e_k3 = case_k3(p.beta, p.tau2, p.sigma2);
  r.e_k4 = case_k4(p.beta, p.tau2, p.sigma2);
  r.overall =
      std::min({r.e_k2, r.e_k0.combined, r.e_k3.full, r.e_k4});
  r.assembly = (1.0 - p.sigma2) *
               std::min({(1.0 + p.beta) / 3.0, (1.0 + 2.0 * p.beta) / 4.0,
                         f4(p.beta, p.tau2)});
  r.per_n = r.assembly * p.A / (1.0 + p.beta);
  r.prefactor_k2 = std::sqrt(3.0);
  r.union_slack_log = std::log(4.0);
  return r;
}

double tail_bound(double z) {
  double zp = std::max(z, 0.0);
  return std::exp(-0.5 * zp * zp);
}

double joint_tail_bound(double a, double b, double rho) {
  if (!(std::fabs(rho) < 1.0))
    throw std::invalid_argument("joint_tail_bound: |rho| must be < 1");
  if (a - b * rho >= 0.0 && b - a * rho >= 0.0) {
    double arg =
        std::sqrt((a * a + b * b - 2.0 * a * b * rho) / (1.0 - rho * rho));
    return tail_bound(arg);
  }
  return std::min(tail_bound(a), tail_bound(b));
}

namespace {

// The constraint sets are epigraphs in x: feasibility at y means
// x >= x_req(y), so the best feasible x for a given y is max(x_req, 0)
// and the program collapses to a 1-d minimization of
//   obj(y) = y^2 + max(x_req(y), 0)^2
// solved by a coarse grid over [-10, 10] plus box-halving refinement.
// Every evaluated point is feasible, so the numeric value only ever
// overestimates the infimum and dominance checks stay one-sided.
template <typename XReq>
InfimumResult grid_refine_epigraph(XReq x_req) {
  auto obj = [&](double y) {
    double x = std::max(x_req(y), 0.0);
    return x * x + y * y;
  };
  const double box = 10.0;
  const int coarse = 401;
  double step = 2.0 * box / (coarse - 1);
  InfimumResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < coarse; ++i) {
    double y = -box + i * step;
    double v = obj(y);
    if (v < best.value) {
      best.value = v;
      best.y = y;
    }
  }
  double half = 2.0 * step;
  const int fine = 41;
  while (half > 1.5e-7) {
    double h = 2.0 * half / (fine - 1);
    double lo = best.y - half;
    for (int i = 0; i < fine; ++i) {
      double y = lo + i * h;
      double v = obj(y);
      if (v < best.value) {
        best.value = v;
        best.y = y;
      }
    }
    half *= 0.5;
  }
  best.x = std::max(x_req(best.y), 0.0);
  return best;
}

}  // namespace

ReducedSet reduced_set(OutsideBranch branch, double beta, double tau,
                       double sigma2) {
  if (sigma2 <= 0.0)
    throw std::invalid_argument("reduced_set: sigma2 must be > 0");
  ReducedSet r;
  if (branch == OutsideBranch::group2) {
    r.eps = 1.0 / (sigma2 * std::sqrt(2.0 * (3.0 + 4.0 * beta)));
    r.a = std::sqrt(2.0) * (tau - sigma2) / 2.0;
    r.B = std::sqrt(2.0 / (3.0 + 4.0 * beta)) *
          (1.0 + beta + (2.0 * tau - sigma2) / 4.0);
  } else {
    r.eps = std::sqrt(3.0 / (2.0 * (2.0 + 3.0 * beta))) / sigma2;
    r.a = (2.0 * tau - sigma2) / std::sqrt(6.0);
    r.B = (6.0 * (1.0 + beta) + 4.0 * tau - sigma2) /
          (2.0 * std::sqrt(6.0 * (2.0 + 3.0 * beta)));
  }
  return r;
}

double closed_form_2d_bound(OutsideBranch branch, double beta, double tau,
                            double sigma2) {
  ReducedSet r = reduced_set(branch, beta, tau, sigma2);
  return r.B * r.B + r.a * r.a - r.a * r.a / (2.0 * r.B * r.eps);
}

InfimumResult infimum_2d(OutsideBranch branch, double beta, double tau,
                         double sigma2) {
  if (sigma2 < 0.0)
    throw std::invalid_argument("infimum_2d: sigma2 must be >= 0");
  InfimumResult res;
  if (sigma2 == 0.0) {
    // the squared-penalty barrier becomes the hard constraint
    // y <= -y0 combined with the linear halfplane m x + q y >= rhs
    double m, q, rhs, y0;
    if (branch == OutsideBranch::group2) {
      m = std::sqrt(3.0 + 4.0 * beta);
      q = 1.0;
      rhs = (1.0 + beta) * std::sqrt(2.0);
      y0 = tau / std::sqrt(2.0);
    } else {
      m = std::sqrt(2.0 * (2.0 + 3.0 * beta));
      q = std::sqrt(2.0);
      rhs = std::sqrt(3.0) * (1.0 + beta);
      y0 = std::sqrt(2.0 / 3.0) * tau;
    }
    // halfplane projection violates y <= -y0, so the corner is optimal
    res.y = -y0;
    res.x = (rhs - q * res.y) / m;
    res.value = res.x * res.x + res.y * res.y;
    return res;
  }

  if (branch == OutsideBranch::group2) {
    double m = std::sqrt(3.0 + 4.0 * beta);
    double rhs = (1.0 + beta) * std::sqrt(2.0);
    double y0 = tau / std::sqrt(2.0);
    double pen = 1.0 / (sigma2 * std::sqrt(2.0));
    res = grid_refine_epigraph([&](double y) {
      double plus = std::max(y0 + y, 0.0);
      return (rhs - y + pen * plus * plus) / m;
    });
  } else {
    double m = std::sqrt(2.0 * (2.0 + 3.0 * beta));
    double rhs = std::sqrt(3.0) * (1.0 + beta);
    double y0 = std::sqrt(2.0 / 3.0) * tau;
    double pen = std::sqrt(3.0) / sigma2;
    res = grid_refine_epigraph([&](double y) {
      double plus = std::max(y0 + y, 0.0);
      return (rhs - std::sqrt(2.0) * y + pen * plus * plus) / m;
    });
  }
  res.b_negative = reduced_set(branch, beta, tau, sigma2).B < 0.0;
  return res;
}

InfimumResult infimum_parabolic(double eps, double a, double B) {
  InfimumResult res = grid_refine_epigraph(
      [&](double y) { return B + eps * (y + a) * (y + a); });
  res.b_negative = B < 0.0;
  return res;
}

namespace {

// Exact minimum-norm point over {z in R^5 : G z >= b} by enumerating KKT
// active sets (3 constraints -> 7 candidate sets; z = G_S^T lambda).
// winning_mask reports the active set of the optimum.
double min_norm_active_set(const std::array<std::array<double, 5>, 3>& G,
                           const std::array<double, 3>& b,
                           int& winning_mask) {
  winning_mask = 0;
  double best = std::numeric_limits<double>::infinity();
  auto dot5 = [](const std::array<double, 5>& u,
                 const std::array<double, 5>& v) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += u[i] * v[i];
    return s;
  };
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> act;
    for (int i = 0; i < 3; ++i)
      if (mask & (1 << i)) act.push_back(i);
    int m = static_cast<int>(act.size());
    // solve (G_S G_S^T) lambda = b_S by Gaussian elimination
    double A[3][4] = {};
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) A[r][c] = dot5(G[act[r]], G[act[c]]);
      A[r][m] = b[act[r]];
    }
    bool singular = false;
    for (int col = 0; col < m && !singular; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r)
        if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
      if (std::fabs(A[piv][col]) < 1e-14) {
        singular = true;
        break;
      }
      std::swap(A[piv], A[col]);
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        double f = A[r][col] / A[col][col];
        for (int c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
      }
    }
    if (singular) continue;
    std::array<double, 3> lambda{};
    bool nonneg = true;
    for (int r = 0; r < m; ++r) {
      lambda[r] = A[r][m] / A[r][r];
      if (lambda[r] < 0.0) nonneg = false;
    }
    if (!nonneg) continue;
    std::array<double, 5> z{};
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < 5; ++i) z[i] += lambda[r] * G[act[r]][i];
    bool feasible = true;
    for (int i = 0; i < 3; ++i)
      if (dot5(G[i], z) < b[i] - 1e-9) feasible = false;
    if (!feasible) continue;
    double v = dot5(z, z);
    if (v < best) {
      best = v;
      winning_mask = mask;
    }
  }
  return best;
}

}  // namespace

double k4_limit_sigma0(double beta, double tau2) {
  double t = 1.0 - tau2;
  double num = 3.0 * tau2 + 4.0 * beta;
  return t * t + num * num / (3.0 * (3.0 + 8.0 * beta));
}

double closed_form_k4_bound(double beta, double tau2, double sigma2) {
  return 2.0 * f4(beta, tau2) * (1.0 - sigma2);
}

Infimum5dResult infimum_5d_k4(double beta, double tau2, double tau3,
                              double sigma2) {
  if (sigma2 <= 0.0)
    throw std::invalid_argument("infimum_5d_k4: sigma2 must be > 0");
  Infimum5dResult out;

  // reduced two-variable objective with all three constraints active
  const double c8 = 3.0 + 8.0 * beta;
  auto reduced = [&](double z1, double y3) {
    double t2 = 3.0 * z1 + 3.0 + 4.0 * beta;
    double t3 = y3 - z1 - 1.0 + tau2;
    return z1 * z1 + t2 * t2 / (3.0 * c8) +
           (y3 * y3 + (y3 - tau3) * (y3 - tau3)) / (1.0 + sigma2) +
           t3 * t3 / sigma2;
  };
  {
    const double box = 10.0;
    const int coarse = 401;
    double step = 2.0 * box / (coarse - 1);
    double bestv = std::numeric_limits<double>::infinity();
    double bz = 0.0, by = 0.0;
    for (int i = 0; i < coarse; ++i) {
      double z1 = -box + i * step;
      for (int j = 0; j < coarse; ++j) {
        double y3 = -box + j * step;
        double v = reduced(z1, y3);
        if (v < bestv) {
          bestv = v;
          bz = z1;
          by = y3;
        }
      }
    }
    double half = 2.0 * step;
    const int fine = 41;
    while (half > 1.5e-7) {
      double h = 2.0 * half / (fine - 1);
      double lo_z = bz - half, lo_y = by - half;
      for (int i = 0; i < fine; ++i) {
        double z1 = lo_z + i * h;
        for (int j = 0; j < fine; ++j) {
          double y3 = lo_y + j * h;
          double v = reduced(z1, y3);
          if (v < bestv) {
            bestv = v;
            bz = z1;
            by = y3;
          }
        }
      }
      half *= 0.5;
    }
    out.value = bestv;
    out.z1 = bz;
    out.y3 = by;
  }

  // independent exact solve of the five-variable program
  const double r1 = std::sqrt(1.0 + 8.0 * beta / 3.0);
  const double rs = std::sqrt(1.0 + sigma2);
  const double sg = std::sqrt(sigma2);
  std::array<std::array<double, 5>, 3> G = {{
      {-1.0, r1, 0.0, 0.0, 0.0},
      {-1.0, 0.0, rs, 0.0, -sg},
      {0.0, 0.0, -rs, rs, 0.0},
  }};
  std::array<double, 3> b = {1.0 + 4.0 * beta / 3.0, 1.0 - tau2, -tau3};
  int mask = 0;
  out.direct_5d = min_norm_active_set(G, b, mask);
  out.all_active = (mask == 7);

  // displayed closed form of the reduced minimum
  {
    double t = 1.0 - tau2;
    double num = 3.0 * tau2 + 4.0 * beta;
    double s2 = sigma2;
    double denom = 1.0 + 3.0 / c8 + 1.0 / s2 +
                   (1.0 + s2) / (s2 * (1.0 + 3.0 * s2));
    double cross = t - num / c8 - tau3 / (1.0 + 3.0 * s2);
    out.closed_form = t * t + num * num / (3.0 * c8) +
                      s2 * tau3 * tau3 / ((1.0 + s2) * (1.0 + 3.0 * s2)) -
                      cross * cross / denom;
  }
  return out;
}

}  // namespace awgnfb
