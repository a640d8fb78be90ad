#include "amentropy/measures.hpp"

#include "amentropy/simplex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>

namespace amentropy {

namespace {

double row_entropy(const std::vector<double>& row) {
  double h = 0;
  for (double x : row) h -= xlogx(x);
  return h;
}

// Stationary initial laws for a kernel family: one damped power iteration on
// each orbit product, then exact propagation pi[theta w] = pi[w] * q[w].
std::vector<std::vector<double>> stationary_pi(
    const RandomSFT& sys, const std::vector<std::vector<std::vector<double>>>& q) {
  int m = sys.driver.size, a = sys.alphabet;
  std::vector<std::vector<double>> pi(static_cast<std::size_t>(m),
                                      std::vector<double>(static_cast<std::size_t>(a), 0.0));
  std::vector<char> done(static_cast<std::size_t>(m), 0);
  for (int w0 = 0; w0 < m; ++w0) {
    if (done[static_cast<std::size_t>(w0)]) continue;
    std::vector<int> orb = sys.driver.orbit(w0);
    for (int w : orb) done[static_cast<std::size_t>(w)] = 1;
    std::vector<double> v(static_cast<std::size_t>(a), 0.0);
    int ncore = 0;
    for (int x = 0; x < a; ++x)
      if (sys.core[static_cast<std::size_t>(orb[0])][static_cast<std::size_t>(x)]) ++ncore;
    for (int x = 0; x < a; ++x)
      if (sys.core[static_cast<std::size_t>(orb[0])][static_cast<std::size_t>(x)])
        v[static_cast<std::size_t>(x)] = 1.0 / ncore;
    auto orbit_step = [&](const std::vector<double>& in) {
      std::vector<double> cur = in;
      for (int w : orb) {
        std::vector<double> nxt(static_cast<std::size_t>(a), 0.0);
        for (int x = 0; x < a; ++x) {
          if (cur[static_cast<std::size_t>(x)] == 0) continue;
          for (int y = 0; y < a; ++y)
            nxt[static_cast<std::size_t>(y)] +=
                cur[static_cast<std::size_t>(x)] *
                q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
        }
        cur = std::move(nxt);
      }
      return cur;
    };
    double resid = 1;
    for (int it = 0; it < 200000 && resid > 1e-15; ++it) {
      std::vector<double> nv = orbit_step(v);
      double s = 0;
      for (int x = 0; x < a; ++x) {
        nv[static_cast<std::size_t>(x)] = 0.5 * v[static_cast<std::size_t>(x)] +
                                          0.5 * nv[static_cast<std::size_t>(x)];
        s += nv[static_cast<std::size_t>(x)];
      }
      if (s <= 0) throw validation_error("no stationary law on the orbit of base point " +
                                         std::to_string(orb[0]));
      resid = 0;
      for (int x = 0; x < a; ++x) {
        nv[static_cast<std::size_t>(x)] /= s;
        resid += std::abs(nv[static_cast<std::size_t>(x)] - v[static_cast<std::size_t>(x)]);
      }
      v = std::move(nv);
    }
    if (resid > 1e-11)
      throw validation_error("no stationary law on the orbit of base point " +
                             std::to_string(orb[0]));
    pi[static_cast<std::size_t>(orb[0])] = v;
    for (std::size_t k = 0; k + 1 < orb.size(); ++k) {
      const std::vector<double>& cur = pi[static_cast<std::size_t>(orb[k])];
      std::vector<double>& nxt = pi[static_cast<std::size_t>(orb[k + 1])];
      for (int x = 0; x < a; ++x) {
        if (cur[static_cast<std::size_t>(x)] == 0) continue;
        for (int y = 0; y < a; ++y)
          nxt[static_cast<std::size_t>(y)] +=
              cur[static_cast<std::size_t>(x)] *
              q[static_cast<std::size_t>(orb[k])][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      }
    }
  }
  return pi;
}

using LabelMasks = std::vector<std::vector<std::uint64_t>>;  // per base point

LabelMasks identity_labels(const RandomSFT& sys) {
  LabelMasks lab(static_cast<std::size_t>(sys.driver.size));
  for (auto& row : lab)
    for (int x = 0; x < sys.alphabet; ++x) row.push_back(std::uint64_t{1} << x);
  return lab;
}

// Forward pass over the interval hull of f: the letter-law vector alpha is
// pushed through the kernel, split by label masks at window positions and
// marginalized at gaps. Leaves carry the label-string probabilities.
void label_walk(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                const Window& f, const LabelMasks& labels,
                const std::function<void(double)>& leaf) {
  if (f.is_empty()) return;
  Coord lo = f.min1(), hi = f.max1();
  int len = static_cast<int>(hi - lo + 1);
  int a = sys.alphabet;
  std::vector<int> base(static_cast<std::size_t>(len));
  std::vector<char> in_f(static_cast<std::size_t>(len), 0);
  for (int i = 0; i < len; ++i) base[static_cast<std::size_t>(i)] = sys.driver.power(omega, lo + i);
  {
    std::vector<Pt> pts = f.points();
    for (const Pt& p : pts) in_f[static_cast<std::size_t>(p[0] - lo)] = 1;
  }
  std::function<void(int, std::vector<double>)> go = [&](int i, std::vector<double> alpha) {
    if (i == len) {
      double p = 0;
      for (double x : alpha) p += x;
      if (p > 0) leaf(p);
      return;
    }
    int b = base[static_cast<std::size_t>(i)];
    auto advance = [&](std::vector<double> cur) {
      if (i + 1 == len) return cur;
      std::vector<double> nxt(static_cast<std::size_t>(a), 0.0);
      for (int x = 0; x < a; ++x) {
        if (cur[static_cast<std::size_t>(x)] == 0) continue;
        for (int y = 0; y < a; ++y)
          nxt[static_cast<std::size_t>(y)] +=
              cur[static_cast<std::size_t>(x)] *
              mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      }
      return nxt;
    };
    if (!in_f[static_cast<std::size_t>(i)]) {
      go(i + 1, advance(std::move(alpha)));
      return;
    }
    for (std::uint64_t mask : labels[static_cast<std::size_t>(b)]) {
      if (mask == 0) continue;
      std::vector<double> cut(static_cast<std::size_t>(a), 0.0);
      double tot = 0;
      for (int x = 0; x < a; ++x)
        if (mask >> x & 1) {
          cut[static_cast<std::size_t>(x)] = alpha[static_cast<std::size_t>(x)];
          tot += cut[static_cast<std::size_t>(x)];
        }
      if (tot == 0) continue;
      go(i + 1, advance(std::move(cut)));
    }
  };
  std::vector<double> init(static_cast<std::size_t>(a), 0.0);
  for (int x = 0; x < a; ++x)
    init[static_cast<std::size_t>(x)] = mu.pi[static_cast<std::size_t>(base[0])][static_cast<std::size_t>(x)];
  go(0, std::move(init));
}

double label_entropy(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                     const Window& f, const LabelMasks& labels) {
  double h = 0;
  label_walk(sys, mu, omega, f, labels, [&](double p) { h -= xlogx(p); });
  return h;
}

// H(alpha-strings | beta-strings) over f: the outer walk fixes a beta string,
// the inner walk redoes the pass with masks cut down by it. Deliberately a
// different arithmetic path from the chain-rule difference it is checked
// against.
double conditional_label_entropy(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                 int omega, const Window& f, const LabelMasks& la,
                                 const LabelMasks& lb) {
  if (f.is_empty()) return 0;
  Coord lo = f.min1(), hi = f.max1();
  int len = static_cast<int>(hi - lo + 1);
  int a = sys.alphabet;
  std::vector<int> base(static_cast<std::size_t>(len));
  std::vector<char> in_f(static_cast<std::size_t>(len), 0);
  for (int i = 0; i < len; ++i) base[static_cast<std::size_t>(i)] = sys.driver.power(omega, lo + i);
  {
    std::vector<Pt> pts = f.points();
    for (const Pt& p : pts) in_f[static_cast<std::size_t>(p[0] - lo)] = 1;
  }
  double total = 0;
  std::vector<std::uint64_t> bseq(static_cast<std::size_t>(len), ~std::uint64_t{0});
  std::function<void(int, std::vector<double>)> outer = [&](int i, std::vector<double> alpha) {
    if (i == len) {
      double pb = 0;
      for (double x : alpha) pb += x;
      if (pb <= 0) return;
      double hb = 0;
      LabelMasks cut(static_cast<std::size_t>(sys.driver.size));
      // inner pass: alpha labels restricted to the fixed beta masks
      std::function<void(int, std::vector<double>)> inner = [&](int j, std::vector<double> al) {
        if (j == len) {
          double pab = 0;
          for (double x : al) pab += x;
          if (pab > 0) hb -= xlogx(pab / pb);
          return;
        }
        int b = base[static_cast<std::size_t>(j)];
        auto advance = [&](std::vector<double> cur) {
          if (j + 1 == len) return cur;
          std::vector<double> nxt(static_cast<std::size_t>(a), 0.0);
          for (int x = 0; x < a; ++x) {
            if (cur[static_cast<std::size_t>(x)] == 0) continue;
            for (int y = 0; y < a; ++y)
              nxt[static_cast<std::size_t>(y)] +=
                  cur[static_cast<std::size_t>(x)] *
                  mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
          }
          return nxt;
        };
        if (!in_f[static_cast<std::size_t>(j)]) {
          inner(j + 1, advance(std::move(al)));
          return;
        }
        for (std::uint64_t mask : la[static_cast<std::size_t>(b)]) {
          std::uint64_t mm = mask & bseq[static_cast<std::size_t>(j)];
          if (mm == 0) continue;
          std::vector<double> cutv(static_cast<std::size_t>(a), 0.0);
          double tot = 0;
          for (int x = 0; x < a; ++x)
            if (mm >> x & 1) {
              cutv[static_cast<std::size_t>(x)] = al[static_cast<std::size_t>(x)];
              tot += cutv[static_cast<std::size_t>(x)];
            }
          if (tot == 0) continue;
          inner(j + 1, advance(std::move(cutv)));
        }
      };
      std::vector<double> init(static_cast<std::size_t>(a), 0.0);
      for (int x = 0; x < a; ++x)
        init[static_cast<std::size_t>(x)] =
            mu.pi[static_cast<std::size_t>(base[0])][static_cast<std::size_t>(x)];
      inner(0, std::move(init));
      total += pb * hb;
      return;
    }
    int b = base[static_cast<std::size_t>(i)];
    auto advance = [&](std::vector<double> cur) {
      if (i + 1 == len) return cur;
      std::vector<double> nxt(static_cast<std::size_t>(a), 0.0);
      for (int x = 0; x < a; ++x) {
        if (cur[static_cast<std::size_t>(x)] == 0) continue;
        for (int y = 0; y < a; ++y)
          nxt[static_cast<std::size_t>(y)] +=
              cur[static_cast<std::size_t>(x)] *
              mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      }
      return nxt;
    };
    if (!in_f[static_cast<std::size_t>(i)]) {
      outer(i + 1, advance(std::move(alpha)));
      return;
    }
    for (std::uint64_t mask : lb[static_cast<std::size_t>(b)]) {
      if (mask == 0) continue;
      std::vector<double> cutv(static_cast<std::size_t>(a), 0.0);
      double tot = 0;
      for (int x = 0; x < a; ++x)
        if (mask >> x & 1) {
          cutv[static_cast<std::size_t>(x)] = alpha[static_cast<std::size_t>(x)];
          tot += cutv[static_cast<std::size_t>(x)];
        }
      if (tot == 0) continue;
      bseq[static_cast<std::size_t>(i)] = mask;
      outer(i + 1, advance(std::move(cutv)));
      bseq[static_cast<std::size_t>(i)] = ~std::uint64_t{0};
    }
  };
  std::vector<double> init(static_cast<std::size_t>(a), 0.0);
  for (int x = 0; x < a; ++x)
    init[static_cast<std::size_t>(x)] = mu.pi[static_cast<std::size_t>(base[0])][static_cast<std::size_t>(x)];
  outer(0, std::move(init));
  return total;
}

}  // namespace

void RelativeMarkovMeasure::validate(const RandomSFT& sys) const {
  int m = sys.driver.size, a = sys.alphabet;
  if (static_cast<int>(pi.size()) != m || static_cast<int>(q.size()) != m)
    throw validation_error("measure tables must have one row per base point");
  for (int w = 0; w < m; ++w) {
    const auto& pw = pi[static_cast<std::size_t>(w)];
    const auto& qw = q[static_cast<std::size_t>(w)];
    if (static_cast<int>(pw.size()) != a || static_cast<int>(qw.size()) != a)
      throw validation_error("measure tables must match the alphabet");
    double s = 0;
    for (int x = 0; x < a; ++x) {
      double v = pw[static_cast<std::size_t>(x)];
      if (v < 0) throw validation_error("initial law has a negative entry");
      if (v > 0 && !sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)])
        throw validation_error("initial law charges a letter outside the core at base point " +
                               std::to_string(w));
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-10)
      throw validation_error("initial law does not sum to one at base point " +
                             std::to_string(w));
    int wn = sys.driver.step(w);
    for (int x = 0; x < a; ++x) {
      const auto& row = qw[static_cast<std::size_t>(x)];
      if (static_cast<int>(row.size()) != a)
        throw validation_error("measure tables must match the alphabet");
      if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
      double rs = 0;
      for (int y = 0; y < a; ++y) {
        double v = row[static_cast<std::size_t>(y)];
        if (v < 0) throw validation_error("kernel row has a negative entry");
        if (v > 0 && (!sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                                   [static_cast<std::size_t>(y)] ||
                      !sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)]))
          throw validation_error("kernel charges an inadmissible transition at base point " +
                                 std::to_string(w));
        rs += v;
      }
      if (std::abs(rs - 1.0) > 1e-10)
        throw validation_error("kernel row is not stochastic at base point " +
                               std::to_string(w) + ", letter " + std::to_string(x));
    }
    for (int y = 0; y < a; ++y) {
      double push = 0;
      for (int x = 0; x < a; ++x)
        push += pw[static_cast<std::size_t>(x)] *
                qw[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      if (std::abs(push - pi[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)]) > 1e-10)
        throw validation_error("initial laws are not kernel-consistent along the orbit of " +
                               std::to_string(w));
    }
  }
}

RelativeMarkovMeasure bernoulli_measure(const RandomSFT& sys, std::vector<double> p) {
  if (static_cast<int>(p.size()) != sys.alphabet)
    throw validation_error("letter law must match the alphabet");
  double s = 0;
  for (double v : p) {
    if (v < 0) throw validation_error("letter law has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw validation_error("letter law must sum to one");
  RelativeMarkovMeasure mu;
  mu.pi.assign(static_cast<std::size_t>(sys.driver.size), p);
  mu.q.assign(static_cast<std::size_t>(sys.driver.size),
              std::vector<std::vector<double>>(static_cast<std::size_t>(sys.alphabet), p));
  mu.validate(sys);
  return mu;
}

RelativeMarkovMeasure parry_measure(const RandomSFT& sys) {
  int m = sys.driver.size, a = sys.alphabet;
  // damped power iteration for the right eigenvector cocycle r_w = M(w) r_{theta w}
  std::vector<std::vector<double>> r(static_cast<std::size_t>(m),
                                     std::vector<double>(static_cast<std::size_t>(a), 0.0));
  for (int w = 0; w < m; ++w) {
    int ncore = 0;
    for (int x = 0; x < a; ++x)
      if (sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) ++ncore;
    if (ncore == 0) throw validation_error("fiber is empty at base point " + std::to_string(w));
    for (int x = 0; x < a; ++x)
      if (sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)])
        r[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] = 1.0 / ncore;
  }
  double resid = 1;
  for (int it = 0; it < 20000 && resid > 1e-15; ++it) {
    std::vector<std::vector<double>> nr(static_cast<std::size_t>(m),
                                        std::vector<double>(static_cast<std::size_t>(a), 0.0));
    resid = 0;
    for (int w = 0; w < m; ++w) {
      int wn = sys.driver.step(w);
      double s = 0;
      for (int x = 0; x < a; ++x) {
        if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
        double v = 0;
        for (int y = 0; y < a; ++y)
          if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                          [static_cast<std::size_t>(y)] &&
              sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
            v += r[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)];
        nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] = v;
        s += v;
      }
      if (s <= 0) throw validation_error("fiber is empty at base point " + std::to_string(w));
      for (int x = 0; x < a; ++x) {
        double v = 0.5 * r[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] +
                   0.5 * nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] / s;
        nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] = v;
      }
      double ns = 0;
      for (int x = 0; x < a; ++x) ns += nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)];
      for (int x = 0; x < a; ++x) {
        nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] /= ns;
        resid += std::abs(nr[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] -
                          r[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]);
      }
    }
    r = std::move(nr);
  }
  RelativeMarkovMeasure mu;
  mu.q.assign(static_cast<std::size_t>(m),
              std::vector<std::vector<double>>(
                  static_cast<std::size_t>(a), std::vector<double>(static_cast<std::size_t>(a), 0.0)));
  for (int w = 0; w < m; ++w) {
    int wn = sys.driver.step(w);
    for (int x = 0; x < a; ++x) {
      if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
      double s = 0;
      for (int y = 0; y < a; ++y)
        if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                        [static_cast<std::size_t>(y)] &&
            sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
          s += r[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)];
      for (int y = 0; y < a; ++y)
        if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                        [static_cast<std::size_t>(y)] &&
            sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
          mu.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
              r[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)] / s;
    }
  }
  mu.pi = stationary_pi(sys, mu.q);
  mu.validate(sys);
  return mu;
}

RelativeMarkovMeasure uniform_markov(const RandomSFT& sys) {
  int m = sys.driver.size, a = sys.alphabet;
  RelativeMarkovMeasure mu;
  mu.q.assign(static_cast<std::size_t>(m),
              std::vector<std::vector<double>>(
                  static_cast<std::size_t>(a), std::vector<double>(static_cast<std::size_t>(a), 0.0)));
  for (int w = 0; w < m; ++w) {
    int wn = sys.driver.step(w);
    for (int x = 0; x < a; ++x) {
      if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
      int cnt = 0;
      for (int y = 0; y < a; ++y)
        if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                        [static_cast<std::size_t>(y)] &&
            sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
          ++cnt;
      if (cnt == 0) throw validation_error("core letter without admissible successor");
      for (int y = 0; y < a; ++y)
        if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                        [static_cast<std::size_t>(y)] &&
            sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
          mu.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] =
              1.0 / cnt;
    }
  }
  mu.pi = stationary_pi(sys, mu.q);
  mu.validate(sys);
  return mu;
}

double cylinder_prob(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                     const Word& word, Coord lo) {
  if (word.empty()) return 1.0;
  for (int x : word)
    if (x < 0 || x >= sys.alphabet) throw validation_error("word letter outside the alphabet");
  int b = sys.driver.power(omega, lo);
  double p = mu.pi[static_cast<std::size_t>(b)][static_cast<std::size_t>(word[0])];
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (p == 0) return 0;
    b = sys.driver.power(omega, lo + static_cast<Coord>(i));
    p *= mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(word[i])]
             [static_cast<std::size_t>(word[i + 1])];
  }
  return p;
}

double markov_entropy_rate(const RandomSFT& sys, const RelativeMarkovMeasure& mu) {
  double h = 0;
  for (int w = 0; w < sys.driver.size; ++w) {
    double hw = 0;
    for (int x = 0; x < sys.alphabet; ++x)
      hw += mu.pi[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] *
            row_entropy(mu.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]);
    h += sys.driver.weights[static_cast<std::size_t>(w)] * hw;
  }
  return h;
}

double window_entropy(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                      const Window& f) {
  return label_entropy(sys, mu, omega, f, identity_labels(sys));
}

double fiber_cover_entropy_window(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                  const FiberCover& u, const Window& f) {
  if (f.size() == 0) throw validation_error("cover entropy window must be nonempty");
  LabelMasks letters;
  bool fast = cover_is_letter_partition(sys, u, &letters);
  double total = 0;
  for (int w = 0; w < sys.driver.size; ++w) {
    double pw = sys.driver.weights[static_cast<std::size_t>(w)];
    if (pw == 0) continue;
    double hw;
    if (fast) {
      hw = label_entropy(sys, mu, w, f, letters);
    } else {
      PullbackCover pb = pullback_cover(sys, u, w, f);
      int npts = static_cast<int>(pb.words.size());
      FiniteSpace sp;
      sp.labels.reserve(pb.words.size());
      sp.weights.reserve(pb.words.size());
      for (const Word& wd : pb.words) {
        sp.labels.push_back(word_str(wd));
        sp.weights.push_back(cylinder_prob(sys, mu, w, wd, pb.hull.min1()));
      }
      hw = cover_entropy_global(sp, make_cover(npts, pb.elements),
                                Partition::trivial(npts));
    }
    total += pw * hw;
  }
  return total;
}

CoverEntropyReport fiber_cover_entropy_estimate(const RandomSFT& sys,
                                                const RelativeMarkovMeasure& mu,
                                                const FiberCover& u,
                                                const FolnerSequence& seq, int n_max) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  if (seq.dim() != 1) throw validation_error("bundle windows are one-dimensional");
  mu.validate(sys);
  std::vector<EstimateRow> rows(static_cast<std::size_t>(n_max));
  par::for_index(n_max, [&](std::int64_t i) {
    Window fn = seq.window(static_cast<int>(i) + 1);
    double total = fiber_cover_entropy_window(sys, mu, u, fn);
    rows[static_cast<std::size_t>(i)] =
        EstimateRow{static_cast<int>(i) + 1, static_cast<long long>(fn.size()), total,
                    0, 0, 0, 0, 0};
  });
  CoverEntropyReport rep;
  rep.est = build_estimate_report(std::move(rows), seq, false);
  rep.closed_form_rate = markov_entropy_rate(sys, mu);
  return rep;
}

EstimateReport potential_integral(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                  const PotentialFamily& d, const FolnerSequence& seq,
                                  int n_max) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  if (seq.dim() != 1) throw validation_error("bundle windows are one-dimensional");
  mu.validate(sys);
  if (d.kind == PotentialFamily::Kind::custom && !d.certified)
    throw validation_error("potential flags are not certified; run certify_potential first");
  std::vector<EstimateRow> rows(static_cast<std::size_t>(n_max));
  if (d.kind != PotentialFamily::Kind::custom) {
    double v = 0;
    if (!d.site.empty()) {
      for (int w = 0; w < sys.driver.size; ++w) {
        double s = 0;
        for (int x = 0; x < sys.alphabet; ++x)
          s += mu.pi[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] *
               d.site[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)];
        v += sys.driver.weights[static_cast<std::size_t>(w)] * s;
      }
    }
    bool root = d.kind == PotentialFamily::Kind::additive_plus_sqrt;
    for (int n = 1; n <= n_max; ++n) {
      Window fn = seq.window(n);
      double sz = static_cast<double>(fn.size());
      rows[static_cast<std::size_t>(n - 1)] =
          EstimateRow{n, static_cast<long long>(fn.size()),
                      v * sz + (root ? std::sqrt(sz) : 0.0), 0, 0, 0, 0, 0};
    }
    return build_estimate_report(std::move(rows), seq, false);
  }
  par::for_index(n_max, [&](std::int64_t i) {
    Window fn = seq.window(static_cast<int>(i) + 1);
    double total = 0;
    for (int w = 0; w < sys.driver.size; ++w) {
      double pw = sys.driver.weights[static_cast<std::size_t>(w)];
      if (pw == 0) continue;
      if (fiber_word_count(sys, w, Window::interval(fn.min1(), fn.max1())) >
          static_cast<double>(enum_limit()))
        throw bound_error("potential integral window too large to enumerate");
      std::vector<Word> lang = fiber_language(sys, w, Window::interval(fn.min1(), fn.max1()));
      double s = 0;
      for (const Word& wd : lang) {
        double p = cylinder_prob(sys, mu, w, wd, fn.min1());
        if (p > 0) s += p * d.value(sys.driver, w, wd, fn);
      }
      total += pw * s;
    }
    rows[static_cast<std::size_t>(i)] =
        EstimateRow{static_cast<int>(i) + 1, static_cast<long long>(fn.size()), total,
                    0, 0, 0, 0, 0};
  });
  return build_estimate_report(std::move(rows), seq, false);
}

namespace {

// Which element of the partition cover holds the hull word's pattern at
// shift g; exactly one must, or the family is not a partition.
int atom_label(const RandomSFT& sys, const FiberCover& alpha, int omega, Coord g,
               const Word& hull_word, Coord hull_lo,
               const std::vector<std::vector<Word>>& sorted_words) {
  int found = -1;
  for (std::size_t e = 0; e < alpha.elements.size(); ++e) {
    const FiberCoverElement& el = alpha.elements[e];
    int b = sys.driver.power(omega, g);
    bool applies = std::find(el.omega_set.begin(), el.omega_set.end(), b) != el.omega_set.end();
    bool inside;
    if (!applies) {
      inside = el.complement;  // off the omega set: empty slice or whole fiber
    } else {
      Word pat;
      std::vector<Pt> pts = el.window.points();
      pat.reserve(pts.size());
      for (const Pt& p : pts)
        pat.push_back(hull_word[static_cast<std::size_t>(p[0] + g - hull_lo)]);
      bool in = std::binary_search(sorted_words[e].begin(), sorted_words[e].end(), pat);
      inside = in != el.complement;
    }
    if (inside) {
      if (found >= 0)
        throw validation_error("selection family member is not a partition at base point " +
                               std::to_string(b));
      found = static_cast<int>(e);
    }
  }
  if (found < 0)
    throw validation_error("selection family member is not a partition at base point " +
                           std::to_string(sys.driver.power(omega, g)));
  return found;
}

}  // namespace

GreedySelection greedy_selection(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const std::vector<FiberCover>& alphas,
                                 int omega, const Window& f) {
  (void)u;  // the pressure side of the selection bound is evaluated by callers
  if (f.is_empty()) throw validation_error("selection window must be nonempty");
  if (alphas.empty()) throw validation_error("need at least one partition to select against");
  if (d.kind == PotentialFamily::Kind::custom && !d.certified)
    throw validation_error("potential flags are not certified; run certify_potential first");
  Coord lo = f.min1(), hi = f.max1();
  for (const FiberCover& al : alphas)
    for (const FiberCoverElement& el : al.elements) {
      if (el.window.is_empty()) throw validation_error("cover element with empty window");
      lo = std::min(lo, f.min1() + el.window.min1());
      hi = std::max(hi, f.max1() + el.window.max1());
    }
  Window hull = Window::interval(lo, hi);
  if (fiber_word_count(sys, omega, hull) > static_cast<double>(enum_limit()))
    throw bound_error("selection hull too large to enumerate");
  std::vector<Word> words = fiber_language(sys, omega, hull);
  std::size_t nw = words.size();

  std::vector<Pt> fpts = f.points();
  std::vector<std::vector<std::vector<Word>>> sorted(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k)
    for (const FiberCoverElement& el : alphas[k].elements) {
      std::vector<Word> ws = el.words;
      std::sort(ws.begin(), ws.end());
      sorted[k].push_back(std::move(ws));
    }

  // atom id per (partition, word): the label string over f, interned
  std::vector<std::vector<int>> atom(alphas.size(), std::vector<int>(nw));
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    std::map<std::vector<int>, int> intern;
    for (std::size_t i = 0; i < nw; ++i) {
      std::vector<int> key;
      key.reserve(fpts.size());
      for (const Pt& p : fpts)
        key.push_back(atom_label(sys, alphas[k], omega, p[0], words[i], lo, sorted[k]));
      auto it = intern.emplace(std::move(key), static_cast<int>(intern.size()));
      atom[k][i] = it.first->second;
    }
  }

  std::vector<double> dv(nw);
  for (std::size_t i = 0; i < nw; ++i) {
    Word wf(words[i].begin() + (f.min1() - lo), words[i].begin() + (f.max1() - lo + 1));
    dv[i] = d.value(sys.driver, omega, wf, f);
  }

  GreedySelection sel;
  sel.hull = hull;
  std::vector<char> alive(nw, 1);
  for (;;) {
    int best = -1;
    for (std::size_t i = 0; i < nw; ++i)
      if (alive[i] && (best < 0 || dv[i] > dv[static_cast<std::size_t>(best)]))
        best = static_cast<int>(i);
    if (best < 0) break;
    sel.picks.push_back(words[static_cast<std::size_t>(best)]);
    sel.d_values.push_back(dv[static_cast<std::size_t>(best)]);
    sel.sum_exp += std::exp(dv[static_cast<std::size_t>(best)]);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      int key = atom[k][static_cast<std::size_t>(best)];
      for (std::size_t i = 0; i < nw; ++i)
        if (alive[i] && atom[k][i] == key) alive[i] = 0;
    }
  }
  return sel;
}

EmpiricalResult empirical_measure(const RandomSFT& sys, const PotentialFamily& d,
                                  const FiberCover& u, int n) {
  if (n < 2) throw validation_error("pair frequencies need window length at least 2");
  int m = sys.driver.size, a = sys.alphabet;
  Window f = Window::interval(0, n - 1);
  std::vector<std::vector<std::vector<double>>> pair(
      static_cast<std::size_t>(m),
      std::vector<std::vector<double>>(static_cast<std::size_t>(a),
                                       std::vector<double>(static_cast<std::size_t>(a), 0.0)));
  for (int w = 0; w < m; ++w) {
    double pw = sys.driver.weights[static_cast<std::size_t>(w)];
    if (pw == 0) continue;
    GreedySelection sel = greedy_selection(sys, d, u, {u}, w, f);
    Coord lo = sel.hull.min1();
    for (std::size_t j = 0; j < sel.picks.size(); ++j) {
      double wt = pw * std::exp(sel.d_values[j]) / sel.sum_exp;
      const Word& wd = sel.picks[j];
      for (int i = 0; i + 1 < n; ++i) {
        int b = sys.driver.power(w, i);
        pair[static_cast<std::size_t>(b)][static_cast<std::size_t>(wd[static_cast<std::size_t>(i - lo)])]
            [static_cast<std::size_t>(wd[static_cast<std::size_t>(i + 1 - lo)])] += wt;
      }
    }
  }
  EmpiricalResult out;
  out.measure.q.assign(static_cast<std::size_t>(m),
                       std::vector<std::vector<double>>(
                           static_cast<std::size_t>(a),
                           std::vector<double>(static_cast<std::size_t>(a), 0.0)));
  for (int w = 0; w < m; ++w) {
    int wn = sys.driver.step(w);
    for (int x = 0; x < a; ++x) {
      if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
      double rs = 0;
      for (int y = 0; y < a; ++y)
        rs += pair[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      if (rs > 0) {
        for (int y = 0; y < a; ++y)
          out.measure.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                       [static_cast<std::size_t>(y)] =
              pair[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                  [static_cast<std::size_t>(y)] / rs;
      } else {
        out.uniform_completion = true;
        int cnt = 0;
        for (int y = 0; y < a; ++y)
          if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                          [static_cast<std::size_t>(y)] &&
              sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
            ++cnt;
        for (int y = 0; y < a; ++y)
          if (sys.matrices[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                          [static_cast<std::size_t>(y)] &&
              sys.core[static_cast<std::size_t>(wn)][static_cast<std::size_t>(y)])
            out.measure.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                         [static_cast<std::size_t>(y)] = 1.0 / cnt;
      }
    }
  }
  out.measure.pi = stationary_pi(sys, out.measure.q);
  out.measure.validate(sys);
  return out;
}

PinskerReport pinsker_formula_check(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                    const FiberCover& alpha, const FiberCover& beta,
                                    int n_max) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  mu.validate(sys);
  LabelMasks la, lb;
  if (!cover_is_letter_partition(sys, alpha, &la) ||
      !cover_is_letter_partition(sys, beta, &lb))
    throw validation_error("pinsker check needs single-site partition covers");
  LabelMasks lj(static_cast<std::size_t>(sys.driver.size));
  for (int w = 0; w < sys.driver.size; ++w)
    for (std::uint64_t ma : la[static_cast<std::size_t>(w)])
      for (std::uint64_t mb : lb[static_cast<std::size_t>(w)])
        if (ma & mb) lj[static_cast<std::size_t>(w)].push_back(ma & mb);
  PinskerReport rep;
  rep.rows.resize(static_cast<std::size_t>(n_max));
  par::for_index(n_max, [&](std::int64_t i) {
    int n = static_cast<int>(i) + 1;
    Window fn = Window::interval(0, n - 1);
    double hj = 0, hb = 0, mid = 0;
    for (int w = 0; w < sys.driver.size; ++w) {
      double pw = sys.driver.weights[static_cast<std::size_t>(w)];
      if (pw == 0) continue;
      hj += pw * label_entropy(sys, mu, w, fn, lj);
      hb += pw * label_entropy(sys, mu, w, fn, lb);
      mid += pw * conditional_label_entropy(sys, mu, w, fn, la, lb);
    }
    double sz = static_cast<double>(fn.size());
    PinskerRow row;
    row.n = n;
    row.h_join = hj / sz;
    row.h_second = hb / sz;
    row.middle = mid / sz;
    row.defect = row.h_join - row.h_second - row.middle;
    rep.rows[static_cast<std::size_t>(i)] = row;
  });
  return rep;
}

ARReport abramov_rokhlin_check(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                               int n_max) {
  if (n_max < 1) throw validation_error("n_max must be positive");
  mu.validate(sys);
  double driver_h = 0;
  for (double p : sys.driver.weights) driver_h -= xlogx(p);
  std::vector<double> skew_tot(static_cast<std::size_t>(n_max), 0.0);
  std::vector<double> fiber_tot(static_cast<std::size_t>(n_max), 0.0);
  par::for_index(n_max, [&](std::int64_t i) {
    int n = static_cast<int>(i) + 1;
    double sk = 0, fb = 0;
    for (int w = 0; w < sys.driver.size; ++w) {
      double pw = sys.driver.weights[static_cast<std::size_t>(w)];
      if (pw == 0) continue;
      // closed-form word entropy over [0, n)
      double hw = row_entropy(mu.pi[static_cast<std::size_t>(w)]);
      for (int j = 0; j + 1 < n; ++j) {
        int b = sys.driver.power(w, j);
        for (int x = 0; x < sys.alphabet; ++x)
          hw += mu.pi[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)] *
                row_entropy(mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)]);
      }
      fb += pw * hw;
      // joint (base point, word) law walked leaf by leaf
      std::function<void(int, int, double)> go = [&](int j, int x, double p) {
        if (p == 0) return;
        if (j == n - 1) {
          sk -= xlogx(p);
          return;
        }
        int b = sys.driver.power(w, j);
        for (int y = 0; y < sys.alphabet; ++y)
          go(j + 1, y,
             p * mu.q[static_cast<std::size_t>(b)][static_cast<std::size_t>(x)]
                     [static_cast<std::size_t>(y)]);
      };
      for (int x = 0; x < sys.alphabet; ++x)
        go(0, x, pw * mu.pi[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]);
    }
    skew_tot[static_cast<std::size_t>(i)] = sk;
    fiber_tot[static_cast<std::size_t>(i)] = fb;
  });
  ARReport rep;
  rep.rows.resize(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    ARRow row;
    row.n = n;
    row.skew = skew_tot[static_cast<std::size_t>(n - 1)] / n;
    row.driver = driver_h / n;
    row.fiber = fiber_tot[static_cast<std::size_t>(n - 1)] / n;
    row.defect = row.skew - row.driver - row.fiber;
    double prev_s = n > 1 ? skew_tot[static_cast<std::size_t>(n - 2)] : 0.0;
    double prev_f = n > 1 ? fiber_tot[static_cast<std::size_t>(n - 2)] : 0.0;
    row.skew_increment = skew_tot[static_cast<std::size_t>(n - 1)] - prev_s;
    row.fiber_increment = fiber_tot[static_cast<std::size_t>(n - 1)] - prev_f;
    rep.rows[static_cast<std::size_t>(n - 1)] = row;
  }
  return rep;
}

namespace {

struct Ascent {
  RelativeMarkovMeasure best;
  double value{-1e300};
  double max_candidate{-1e300};
  long long evaluations{0};
};

}  // namespace

VPResult optimize_vp(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                     int n_window, long long budget, int restarts, std::uint64_t seed) {
  if (n_window < 2) throw validation_error("optimization window must have length at least 2");
  if (budget < 1) throw validation_error("evaluation budget must be positive");
  if (restarts < 1) throw validation_error("need at least one restart");
  if (d.kind == PotentialFamily::Kind::custom && !d.certified)
    throw validation_error("potential flags are not certified; run certify_potential first");
  int m = sys.driver.size, a = sys.alphabet;

  LabelMasks letters;
  bool fast = cover_is_letter_partition(sys, u, &letters);
  bool identity = fast;
  if (fast)
    for (int w = 0; w < m && identity; ++w)
      for (std::uint64_t mask : letters[static_cast<std::size_t>(w)])
        if (mask != 0 && (mask & (mask - 1)) != 0) identity = false;

  auto entropy_of = [&](const RelativeMarkovMeasure& mu) {
    if (identity) return markov_entropy_rate(sys, mu);
    Window big = Window::interval(0, n_window - 1);
    Window small = Window::interval(0, n_window - 2);
    double tb = 0, ts = 0;
    for (int w = 0; w < m; ++w) {
      double pw = sys.driver.weights[static_cast<std::size_t>(w)];
      if (pw == 0) continue;
      if (fast) {
        tb += pw * label_entropy(sys, mu, w, big, letters);
        ts += pw * label_entropy(sys, mu, w, small, letters);
      } else {
        for (int which = 0; which < 2; ++which) {
          const Window& fn = which == 0 ? big : small;
          PullbackCover pb = pullback_cover(sys, u, w, fn);
          int npts = static_cast<int>(pb.words.size());
          FiniteSpace sp;
          for (const Word& wd : pb.words) {
            sp.labels.push_back(word_str(wd));
            sp.weights.push_back(cylinder_prob(sys, mu, w, wd, pb.hull.min1()));
          }
          double hw = cover_entropy_global(sp, make_cover(npts, pb.elements),
                                           Partition::trivial(npts));
          (which == 0 ? tb : ts) += pw * hw;
        }
      }
    }
    return tb - ts;
  };
  auto potential_of = [&](const RelativeMarkovMeasure& mu) {
    if (d.kind != PotentialFamily::Kind::custom) {
      if (d.site.empty()) return 0.0;
      double v = 0;
      for (int w = 0; w < m; ++w) {
        double s = 0;
        for (int x = 0; x < a; ++x)
          s += mu.pi[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)] *
               d.site[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)];
        v += sys.driver.weights[static_cast<std::size_t>(w)] * s;
      }
      return v;
    }
    FolnerSequence seq = FolnerSequence::boxes(1);
    EstimateReport rep = potential_integral(sys, mu, d, seq, std::min(n_window, 10));
    return rep.estimate;
  };
  auto objective = [&](const RelativeMarkovMeasure& mu) {
    return entropy_of(mu) + potential_of(mu);
  };

  // per-window upper reference: normalized log pressure, from above
  double pressure_ref;
  bool zero_potential = d.kind == PotentialFamily::Kind::additive && d.site.empty();
  if (zero_potential) {
    EstimateReport tr =
        fiber_topological_entropy(sys, u, FolnerSequence::boxes(1), std::min(n_window, 16));
    pressure_ref = tr.rows.back().normalized;
  } else {
    EstimateReport pr =
        pressure_estimate(sys, d, u, FolnerSequence::boxes(1), std::min(n_window, 12));
    pressure_ref = pr.rows.back().normalized;
  }

  std::vector<RelativeMarkovMeasure> seeds;
  seeds.push_back(parry_measure(sys));
  seeds.push_back(uniform_markov(sys));
  try {
    seeds.push_back(empirical_measure(sys, d, u, std::min(n_window, 10)).measure);
  } catch (const validation_error&) {
  } catch (const bound_error&) {
  }

  const double deltas[] = {0.5, 0.2, 0.08, 0.03, 0.01, 0.003, 0.001, 0.0003, 0.0001};
  long long per_restart = std::max<long long>(1, budget / restarts);

  std::vector<Ascent> slots(static_cast<std::size_t>(restarts));
  par::for_index(restarts, [&](std::int64_t r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r) * 1000003ULL);
    RelativeMarkovMeasure cur = seeds[static_cast<std::size_t>(r) % seeds.size()];
    if (static_cast<std::size_t>(r) >= seeds.size()) {
      std::normal_distribution<double> gauss(0.0, 0.3);
      for (int w = 0; w < m; ++w)
        for (int x = 0; x < a; ++x) {
          double s = 0;
          for (int y = 0; y < a; ++y) {
            double& v = cur.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                             [static_cast<std::size_t>(y)];
            if (v > 0) v *= std::exp(gauss(rng));
            s += v;
          }
          if (s > 0)
            for (int y = 0; y < a; ++y)
              cur.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                   [static_cast<std::size_t>(y)] /= s;
        }
      cur.pi = stationary_pi(sys, cur.q);
    }
    Ascent& out = slots[static_cast<std::size_t>(r)];
    double val = objective(cur);
    ++out.evaluations;
    out.best = cur;
    out.value = val;
    out.max_candidate = val;
    // entries worth perturbing: positive, in a row with an alternative
    std::vector<std::array<int, 3>> params;
    for (int w = 0; w < m; ++w)
      for (int x = 0; x < a; ++x) {
        if (!sys.core[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]) continue;
        int pos = 0;
        for (int y = 0; y < a; ++y)
          if (cur.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                   [static_cast<std::size_t>(y)] > 0)
            ++pos;
        if (pos < 2) continue;
        for (int y = 0; y < a; ++y)
          if (cur.q[static_cast<std::size_t>(w)][static_cast<std::size_t>(x)]
                   [static_cast<std::size_t>(y)] > 0)
            params.push_back({w, x, y});
      }
    for (double delta : deltas) {
      bool improved = true;
      while (improved && out.evaluations < per_restart) {
        improved = false;
        for (const auto& prm : params) {
          if (out.evaluations >= per_restart) break;
          for (double sgn : {1.0, -1.0}) {
            RelativeMarkovMeasure cand = cur;
            double& v = cand.q[static_cast<std::size_t>(prm[0])][static_cast<std::size_t>(prm[1])]
                              [static_cast<std::size_t>(prm[2])];
            v *= std::exp(sgn * delta);
            double s = 0;
            for (int y = 0; y < a; ++y)
              s += cand.q[static_cast<std::size_t>(prm[0])][static_cast<std::size_t>(prm[1])]
                         [static_cast<std::size_t>(y)];
            for (int y = 0; y < a; ++y)
              cand.q[static_cast<std::size_t>(prm[0])][static_cast<std::size_t>(prm[1])]
                    [static_cast<std::size_t>(y)] /= s;
            ++out.evaluations;
            try {
              cand.pi = stationary_pi(sys, cand.q);
              double cv = objective(cand);
              out.max_candidate = std::max(out.max_candidate, cv);
              if (cv > out.value) {
                out.value = cv;
                out.best = cand;
                cur = std::move(cand);
                improved = true;
              }
            } catch (const validation_error&) {
              // slow-mixing or degenerate candidate: skip it
            }
            if (out.evaluations >= per_restart) break;
          }
        }
      }
    }
  });

  VPResult res;
  int pick = 0;
  for (int r = 1; r < restarts; ++r)
    if (slots[static_cast<std::size_t>(r)].value > slots[static_cast<std::size_t>(pick)].value)
      pick = r;
  res.best = slots[static_cast<std::size_t>(pick)].best;
  res.h = entropy_of(res.best);
  res.mu_d = potential_of(res.best);
  res.value = res.h + res.mu_d;
  res.pressure_ref = pressure_ref;
  res.max_candidate = -1e300;
  res.evaluations = 0;
  for (const Ascent& s : slots) {
    res.max_candidate = std::max(res.max_candidate, s.max_candidate);
    res.evaluations += s.evaluations;
  }
  res.best.validate(sys);
  return res;
}

}  // namespace amentropy
