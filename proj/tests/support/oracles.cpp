#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace corpsim::oracle {

namespace {

using boost::multiprecision::cpp_rational;

std::vector<cpp_rational> midranks(std::span<const std::int64_t> v) {
  std::vector<cpp_rational> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::int64_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    // Tied block occupies ranks less+1 .. less+equal.
    r[i] = cpp_rational(2 * less + equal + 1, 2);
  }
  return r;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 60);
}

}  // namespace

double spearman_exact(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("bad lengths");
  const auto rx = midranks(x), ry = midranks(y);
  const cpp_rational n(static_cast<std::int64_t>(x.size()));
  cpp_rational mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  cpp_rational sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cpp_rational dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw std::domain_error("constant vector");
  const cpp_rational r2 = sxy * sxy / (sxx * syy);
  const double mag = std::sqrt(static_cast<double>(r2));
  return sxy < 0 ? -mag : mag;
}

double student_t_two_sided_p(double t, double df) {
  const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
  auto density = [&](double x) { return std::exp(log_c - (df + 1) / 2 * std::log1p(x * x / df)); };
  const double a = std::abs(t);
  // Tail over [a, inf) mapped onto [0, 1) by x = a + s / (1 - s).
  auto mapped = [&](double s) {
    if (s >= 1.0) return 0.0;
    const double one_minus = 1.0 - s;
    return density(a + s / one_minus) / (one_minus * one_minus);
  };
  return std::min(1.0, 2.0 * integrate(mapped, 0.0, 1.0, 1e-13));
}

TStat t_statistic(std::span<const double> values, double mu0) {
  long double sum = 0;
  for (double v : values) sum += v;
  const long double n = static_cast<long double>(values.size());
  const long double m = sum / n;
  long double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  const long double sd = std::sqrt(ss / (n - 1));
  return {static_cast<double>((m - mu0) / (sd / std::sqrt(n))), static_cast<double>(n - 1)};
}

std::vector<std::string> neighbors_by_sort(const EmbeddingSet& embs, const std::string& word, std::size_t n) {
  const auto q = embs.vector(word);
  auto norm = [](std::span<const double> v) {
    long double s = 0;
    for (double x : v) s += static_cast<long double>(x) * x;
    return std::sqrt(s);
  };
  const long double qn = norm(q);
  std::vector<std::pair<long double, std::string>> scored;
  for (std::size_t r = 0; r < embs.size(); ++r) {
    if (embs.tokens()[r] == word) continue;
    const auto v = embs.vector(r);
    const long double vn = norm(v);
    if (vn == 0) continue;
    long double dot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += static_cast<long double>(q[i]) * v[i];
    scored.emplace_back(dot / (qn * vn), embs.tokens()[r]);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace corpsim::oracle
