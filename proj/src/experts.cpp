#include "mistake_lab/experts.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mistake_lab/dimension.hpp"
#include "mistake_lab/errors.hpp"

namespace mistake_lab::experts {

namespace {

BigInt binom(int d, int i) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(i));
  return out;
}

BigInt pow2(int e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, static_cast<unsigned long>(e));
  return out;
}

}  // namespace

BigInt binomial_sum(int d, int k) {
  if (d < 0 || k < 0) throw PreconditionError("binomial_sum: arguments must be non-negative");
  BigInt sum = 0;
  BigInt term = 1;  // C(d, 0)
  for (int i = 0; i <= std::min(k, d); ++i) {
    sum += term;
    term = term * (d - i) / (i + 1);
  }
  return sum;
}

int capacity_D(std::int64_t n, int k) {
  if (n < 1) throw PreconditionError("capacity_D: n must be positive");
  if (k < 0) throw PreconditionError("capacity_D: k must be non-negative");
  // 2^d <= n 2^d for d <= k, and for n >= 2 the inequality is tight at 2k+1.
  int d = n >= 2 ? 2 * k + 1 : k;
  const BigInt big_n(std::to_string(n));
  BigInt sum = binomial_sum(d, k);
  BigInt top = binom(d, k);  // C(d, k)
  BigInt power = pow2(d);
  if (power > big_n * sum) throw PreconditionError("capacity_D: starting point violates the defining inequality");
  while (true) {
    // binomial_sum(d+1,k) = 2 binomial_sum(d,k) - C(d,k)
    BigInt next_sum = 2 * sum - top;
    BigInt next_power = 2 * power;
    if (next_power > big_n * next_sum) return d;
    top = top * (d + 1) / (d + 1 - k);
    sum = std::move(next_sum);
    power = std::move(next_power);
    ++d;
  }
}

Rational mstar2_closed_form(int k) {
  if (k < 0) throw PreconditionError("mstar2_closed_form: k must be non-negative");
  Rational central(binom(2 * k, k));
  Rational out = Rational(k) + (Rational(2 * k + 1, 2) * central) / Rational(pow2(2 * k));
  out.canonicalize();
  return out;
}

Rational sphere_packing_bound(std::int64_t n, int t, int k, bool clamp) {
  if (t < k || k < 0) throw PreconditionError("sphere_packing_bound: requires t >= k >= 0");
  Rational out(BigInt(std::to_string(n)) * binomial_sum(t, k), pow2(t));
  out.canonicalize();
  if (clamp && out > 1) return 1;
  return out;
}

Rational harmonic_minus_one(int n) {
  if (n < 1) throw PreconditionError("harmonic_minus_one: n must be positive");
  Rational sum = 0;
  for (int j = 2; j <= n; ++j) sum += Rational(1, j);
  return sum;
}

ApproxValue entropy(double p) {
  if (!(p > 0 && p < 1)) throw PreconditionError("entropy: p must lie in (0,1)");
  return {-p * std::log2(p) - (1 - p) * std::log2(1 - p), Method::ClosedForm, 0};
}

ApproxValue f_of(double p) {
  return {(1 - entropy(p).value) / p, Method::ClosedForm, 0};
}

ApproxValue f_inverse(double c) {
  if (!(c > 0)) throw PreconditionError("f_inverse: c must be positive (the limit at 0 is 1/2)");
  // f decreases from +inf to 0 on (0, 1/2].
  double lo = std::numeric_limits<double>::min();
  double hi = 0.5;
  for (int i = 0; i < 2000 && lo < hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f_of(mid).value > c ? lo : hi) = mid;
  }
  double best = std::abs(f_of(lo).value - c) < std::abs(f_of(hi).value - c) ? lo : hi;
  return {best, Method::RootFind, std::abs(f_of(best).value - c)};
}

ApproxValue d_star(std::int64_t n, int k) {
  if (n < 2) throw PreconditionError("d_star: n must be at least 2");
  if (k < 1) throw PreconditionError("d_star: k must be at least 1");
  const double log_n = std::log2(static_cast<double>(n));
  auto g = [&](double d) { return d - log_n - d * entropy(k / d).value; };
  double lo = 2.0 * k;  // g(2k) = -log n < 0
  double hi = 4.0 * k + 2 * log_n + 2;
  for (int i = 0; g(hi) <= 0; ++i) {
    if (i > 200) throw PreconditionError("d_star: no bracket found above " + std::to_string(lo));
    lo = hi;
    hi *= 2;
  }
  for (int i = 0; i < 2000; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0 ? lo : hi) = mid;
  }
  double best = std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
  ApproxValue out{best, Method::RootFind, std::abs(g(best))};
  if (out.residual > 1e-8) {
    throw PreconditionError("d_star: did not converge, bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return out;
}

ApproxValue vovk_up(std::int64_t n, int k, double beta) {
  if (!(beta > 0 && beta < 1)) throw PreconditionError("vovk_up: beta must lie in (0,1)");
  if (n < 1 || k < 0) throw PreconditionError("vovk_up: requires n >= 1 and k >= 0");
  double num = std::log2(static_cast<double>(n)) + k * std::log2(1 / beta);
  return {num / std::log2(2 / (1 + beta)), Method::ClosedForm, 0};
}

UpMinimum up_minimum(std::int64_t n, int k, int grid) {
  if (grid < 1) throw PreconditionError("up_minimum: grid must be positive");
  auto up = [&](double b) { return vovk_up(n, k, b).value; };
  const double step = 1.0 / (grid + 1);
  int best = 1;
  for (int i = 2; i <= grid; ++i) {
    if (up(i * step) < up(best * step)) best = i;
  }
  // up is unimodal in beta; the minimum lies in the two cells around the best grid point.
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  if (lo <= 0) lo = step * 1e-6;
  if (hi >= 1) hi = 1 - step * 1e-6;
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = up(a), fb = up(b);
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = up(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = up(b);
    }
  }
  UpMinimum out{best * step, up(best * step)};
  double mid = 0.5 * (lo + hi);
  if (up(mid) < out.value) out = {mid, up(mid)};
  return out;
}

double log2_of(const BigInt& v) {
  if (v <= 0) throw PreconditionError("log2_of: argument must be positive");
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(mant) + static_cast<double>(exp);
}

double log2_of(const Rational& v) { return log2_of(BigInt(v.get_num())) - log2_of(BigInt(v.get_den())); }

bool binomial_estimate_check(int D, int k, const Rational& eps) {
  if (!(D >= k && k >= 1)) throw PreconditionError("binomial_estimate_check: requires D >= k >= 1");
  if (eps <= 0) throw PreconditionError("binomial_estimate_check: eps must be positive");
  Rational scaled = (1 + eps) * D;
  BigInt floored;
  mpz_fdiv_q(floored.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  const int wide = static_cast<int>(floored.get_si());
  const Rational ratio(binomial_sum(wide, k), binomial_sum(D, k));
  const double log_ratio = log2_of(Rational(ratio));
  const double e = to_double(eps);
  bool ok = true;
  if (D > k) {
    ok = log_ratio <= e * D * std::log2(static_cast<double>(D) / (D - k));
  }
  if (ok && 2 * k <= D && eps <= Rational(1, 3)) {
    ok = log_ratio <= e * D - e * e * k / 3;
  }
  return ok;
}

std::string dnk_table_csv(const std::vector<std::int64_t>& ns, const std::vector<int>& ks) {
  std::ostringstream out;
  out << "n,k,D,L_k,RL_k_num,RL_k_den,mstar2,d_star,up_min\n";
  ExpertsEngine engine;
  out.precision(17);
  for (auto n : ns) {
    for (int k : ks) {
      DimValue rl = engine.randomized_littlestone(static_cast<int>(n), k);
      DimValue l = engine.littlestone(static_cast<int>(n), k);
      out << n << ',' << k << ',' << capacity_D(n, k) << ',' << to_string(l.value()) << ','
          << rl.value().get_num().get_str() << ',' << rl.value().get_den().get_str() << ',';
      if (n == 2) out << to_string(mstar2_closed_form(k));
      out << ',';
      if (n >= 2 && k >= 1) out << d_star(n, k).value;
      out << ',' << up_minimum(n, k).value << '\n';
    }
  }
  return out.str();
}

}  // namespace mistake_lab::experts
