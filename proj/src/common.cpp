#include "amentropy/common.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace amentropy {

long long enum_limit() {
  static const long long v = [] {
    if (const char* s = std::getenv("AMENTROPY_MAX_ENUM")) {
      char* end = nullptr;
      long long parsed = std::strtoll(s, &end, 10);
      if (end && *end == '\0' && parsed > 0) return parsed;
      throw validation_error("AMENTROPY_MAX_ENUM must be a positive integer, got '" +
                             std::string(s) + "'");
    }
    return 1000000LL;
  }();
  return v;
}

Rat::Rat(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw validation_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rat Rat::from_double(double x, long long denominator) {
  if (!std::isfinite(x)) throw validation_error("rational from non-finite double");
  double scaled = x * static_cast<double>(denominator);
  long long n = static_cast<long long>(std::llround(scaled));
  return Rat(n, denominator);
}

Rat Rat::operator+(const Rat& o) const { return Rat(num * o.den + o.num * den, den * o.den); }
Rat Rat::operator-(const Rat& o) const { return Rat(num * o.den - o.num * den, den * o.den); }
Rat Rat::operator*(const Rat& o) const { return Rat(num * o.num, den * o.den); }

bool Rat::operator<(const Rat& o) const { return num * o.den < o.num * den; }
bool Rat::operator<=(const Rat& o) const { return num * o.den <= o.num * den; }

std::string Rat::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::logic_error("to_chars failure");
  return std::string(buf, ptr);
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

namespace par {

namespace {
std::atomic<int> g_jobs{0};
}

void set_jobs(int n) { g_jobs.store(n < 0 ? 0 : n); }

int jobs() { return g_jobs.load(); }

bool parallel_enabled() {
#ifdef _OPENMP
  return jobs() != 1;
#else
  return false;
#endif
}

void for_index(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (parallel_enabled() && n > 1) {
    std::exception_ptr err;
    std::mutex err_mu;
    int requested = jobs();
    int threads = requested > 0 ? requested : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace par

}  // namespace amentropy
