#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mistake_lab/rational.hpp"

namespace mistake_lab::experts {

/// sum_{i=0}^{min(k,d)} C(d, i), exact.
BigInt binomial_sum(int d, int k);

/// D(n,k) = max{d : 2^d <= n * binomial_sum(d,k)}, integer arithmetic only.
int capacity_D(std::int64_t n, int k);

/// Exact optimal expected mistake bound for two experts:
/// k + (k + 1/2) C(2k,k) / 4^k.
Rational mstar2_closed_form(int k);

/// n * binomial_sum(t,k) / 2^t, optionally clamped at 1.
Rational sphere_packing_bound(std::int64_t n, int t, int k, bool clamp = false);

/// H_n - 1 = 1/2 + ... + 1/n.
Rational harmonic_minus_one(int n);

enum class Method { ExactInteger, ClosedFormRational, ClosedForm, RootFind };

struct ApproxValue {
  double value = 0;
  Method method = Method::ClosedForm;
  double residual = 0;  // |equation residual| for root-find results
};

/// Binary entropy h(p) = -p log p - (1-p) log(1-p), logs base 2, p in (0,1).
ApproxValue entropy(double p);
/// f(p) = (1 - h(p)) / p, p in (0,1).
ApproxValue f_of(double p);
/// The root of f(p) = c on (0, 1/2], by bisection. c must be positive; as
/// c -> 0 the root tends to 1/2.
ApproxValue f_inverse(double c);

/// The solution of d = log n + d h(k/d) on d > 2k (n >= 2, k >= 1).
ApproxValue d_star(std::int64_t n, int k);

/// up(n,k,beta) = (log n + k log(1/beta)) / log(2/(1+beta)), beta in (0,1).
ApproxValue vovk_up(std::int64_t n, int k, double beta);

struct UpMinimum {
  double beta = 0;
  double value = 0;
};
/// Minimum of up over beta: the best of `grid` evenly spaced points
/// beta_i = i/(grid+1), refined by golden-section search on the
/// neighbouring cells.
UpMinimum up_minimum(std::int64_t n, int k, int grid = 50);

/// Both binomial estimates at (1+eps)D, floored to an integer:
///   C((1+eps)D, <=k) <= 2^{eps D log(D/(D-k))} C(D, <=k)
/// and, when k <= D/2 and eps <= 1/3,
///   C((1+eps)D, <=k) <= 2^{eps D - eps^2 k / 3} C(D, <=k).
/// Requires D >= k >= 1 and eps > 0.
bool binomial_estimate_check(int D, int k, const Rational& eps);

/// log2 of a positive big integer / rational, accurate to double precision.
double log2_of(const BigInt& v);
double log2_of(const Rational& v);

/// CSV rows for the experts table, header
/// n,k,D,L_k,RL_k_num,RL_k_den,mstar2,d_star,up_min.
std::string dnk_table_csv(const std::vector<std::int64_t>& ns, const std::vector<int>& ks);

}  // namespace mistake_lab::experts
