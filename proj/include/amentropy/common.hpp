#pragma once

// Shared plumbing: error taxonomy, resource bounds, exact rationals,
// deterministic parallel loops, and canonical float formatting.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace amentropy {

// Rejected input or precondition violation. CLI exit code 2.
class validation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Instance exceeds an exact-computation bound. CLI exit code 3.
class bound_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Generic enumeration/combination ceiling. Default 1e6; the environment
// variable AMENTROPY_MAX_ENUM overrides it for a whole process.
long long enum_limit();

// Exact rational with value num/den, den > 0, always normalized.
struct Rat {
  long long num{0};
  long long den{1};

  Rat() = default;
  Rat(long long n, long long d);
  static Rat from_double(double x, long long denominator = 1000000000LL);

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
};

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string fmt_double(double x);

// x*log(x) with the 0*log(0)=0 convention.
double xlogx(double x);

namespace par {

// Worker count for parallel kernels. 0 restores the hardware default;
// 1 selects the serial reference path.
void set_jobs(int n);
int jobs();
bool parallel_enabled();

// Runs body(i) for i in [0,n). Iterations must write disjoint slots so
// results are independent of scheduling; exceptions are rethrown once.
void for_index(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace par

}  // namespace amentropy
