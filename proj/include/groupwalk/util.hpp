#ifndef GROUPWALK_UTIL_HPP
#define GROUPWALK_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupwalk {

struct ModelMismatchError : std::runtime_error {
  explicit ModelMismatchError(const std::string& m) : std::runtime_error(m) {}
};

struct RadiusExceededError : std::runtime_error {
  explicit RadiusExceededError(const std::string& m) : std::runtime_error(m) {}
};

// Thrown when a support-size or memory budget would be exceeded; carries how
// far the computation got before giving up.
struct BudgetError : std::runtime_error {
  int reached_index;
  BudgetError(const std::string& m, int reached) : std::runtime_error(m), reached_index(reached) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

struct IntegrityError : std::runtime_error {
  explicit IntegrityError(const std::string& m) : std::runtime_error(m) {}
};

struct UnattainableCylinderError : std::runtime_error {
  explicit UnattainableCylinderError(const std::string& m) : std::runtime_error(m) {}
};

// Neumaier compensated summation; masses and log-masses are accumulated with
// this so the 1e-12 normalization invariants are actually meetable.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty vector");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  size_t count = 0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  r.count = v.size();
  if (v.empty()) return r;
  KahanSum s;
  for (double x : v) s.add(x);
  r.mean = s.value() / static_cast<double>(v.size());
  if (v.size() > 1) {
    KahanSum q;
    for (double x : v) q.add((x - r.mean) * (x - r.mean));
    r.se = std::sqrt(q.value() / (static_cast<double>(v.size()) * (v.size() - 1.0)));
  }
  return r;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double intercept_se = 0.0;
};

inline LineFit ls_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("ls_fit needs >=3 points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= x.size(); my /= y.size();
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  double s2 = ss / static_cast<double>(x.size() - 2);
  f.intercept_se = std::sqrt(s2 * (1.0 / x.size() + mx * mx / sxx));
  return f;
}

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ls_slope needs >=2 points");
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= x.size(); my /= y.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace groupwalk

#endif
