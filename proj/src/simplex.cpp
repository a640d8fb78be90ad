#include "amentropy/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace amentropy {

void FiniteSpace::validate() const {
  if (labels.size() != weights.size())
    throw validation_error("finite space: labels and weights differ in length");
  if (labels.empty()) throw validation_error("finite space: needs at least one point");
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw validation_error("finite space: negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw validation_error("finite space: weights sum to " + fmt_double(sum));
}

FiniteSpace FiniteSpace::uniform(int n) {
  FiniteSpace s;
  for (int i = 0; i < n; ++i) {
    s.labels.push_back(std::to_string(i));
    s.weights.push_back(1.0 / n);
  }
  return s;
}

namespace {

std::vector<std::vector<int>> canonical_blocks(std::vector<std::vector<int>> blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                              [](const std::vector<int>& b) { return b.empty(); }),
               blocks.end());
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

}  // namespace

Partition Partition::points(int n) {
  Partition p;
  for (int i = 0; i < n; ++i) p.blocks.push_back({i});
  return p;
}

Partition Partition::trivial(int n) {
  Partition p;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  p.blocks.push_back(std::move(all));
  return p;
}

std::string Partition::key() const {
  std::string k;
  for (const auto& b : blocks) {
    for (int i : b) k += std::to_string(i) + ",";
    k += "|";
  }
  return k;
}

Partition make_partition(int n, std::vector<std::vector<int>> blocks) {
  Partition p;
  p.blocks = canonical_blocks(std::move(blocks));
  std::vector<int> seen(n, 0);
  for (const auto& b : p.blocks)
    for (int i : b) {
      if (i < 0 || i >= n) throw validation_error("partition: point index out of range");
      if (seen[i]++) throw validation_error("partition: blocks overlap at point " + std::to_string(i));
    }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw validation_error("partition: point " + std::to_string(i) + " uncovered");
  return p;
}

Partition join(const Partition& a, const Partition& b) {
  std::map<std::pair<int, int>, std::vector<int>> cells;
  std::map<int, int> block_of_a, block_of_b;
  for (std::size_t i = 0; i < a.blocks.size(); ++i)
    for (int x : a.blocks[i]) block_of_a[x] = static_cast<int>(i);
  for (std::size_t j = 0; j < b.blocks.size(); ++j)
    for (int x : b.blocks[j]) block_of_b[x] = static_cast<int>(j);
  for (const auto& [x, i] : block_of_a) cells[{i, block_of_b.at(x)}].push_back(x);
  Partition p;
  for (auto& [ij, cell] : cells) p.blocks.push_back(std::move(cell));
  p.blocks = canonical_blocks(std::move(p.blocks));
  return p;
}

bool refines(const Partition& fine, const Partition& coarse) {
  for (const auto& fb : fine.blocks) {
    bool inside = false;
    for (const auto& cb : coarse.blocks) {
      if (std::includes(cb.begin(), cb.end(), fb.begin(), fb.end())) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

Cover make_cover(int n, std::vector<std::vector<int>> elements) {
  Cover u;
  for (auto& e : elements) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    if (e.empty()) throw validation_error("cover: empty element");
    for (int i : e)
      if (i < 0 || i >= n) throw validation_error("cover: point index out of range");
  }
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  std::vector<int> seen(n, 0);
  for (const auto& e : elements)
    for (int i : e) seen[i] = 1;
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw validation_error("cover: point " + std::to_string(i) + " uncovered");
  u.elements = std::move(elements);
  return u;
}

Cover cover_of_partition(const Partition& p) {
  Cover u;
  u.elements = p.blocks;
  return u;
}

bool is_partition_cover(const Cover& u) {
  std::set<int> seen;
  for (const auto& e : u.elements)
    for (int i : e)
      if (!seen.insert(i).second) return false;
  return true;
}

Partition generated_partition(int n, const Cover& u) {
  std::map<std::vector<std::uint8_t>, std::vector<int>> classes;
  for (int x = 0; x < n; ++x) {
    std::vector<std::uint8_t> sig(u.elements.size(), 0);
    for (std::size_t j = 0; j < u.elements.size(); ++j)
      sig[j] = std::binary_search(u.elements[j].begin(), u.elements[j].end(), x) ? 1 : 0;
    classes[sig].push_back(x);
  }
  Partition p;
  for (auto& [sig, atom] : classes) p.blocks.push_back(std::move(atom));
  p.blocks = canonical_blocks(std::move(p.blocks));
  return p;
}

AdmissibleStructure admissible_structure(int n, const Cover& u) {
  AdmissibleStructure s;
  Partition gen = generated_partition(n, u);
  s.atoms = gen.blocks;
  s.hosts.reserve(s.atoms.size());
  for (const auto& atom : s.atoms) {
    std::vector<int> hosts;
    for (std::size_t j = 0; j < u.elements.size(); ++j)
      if (std::includes(u.elements[j].begin(), u.elements[j].end(), atom.begin(), atom.end()))
        hosts.push_back(static_cast<int>(j));
    if (hosts.empty()) throw std::logic_error("generated atom lies in no cover element");
    s.combinations *= static_cast<double>(hosts.size());
    s.hosts.push_back(std::move(hosts));
  }
  return s;
}

std::vector<Partition> admissible_partitions(int n, const Cover& u, long long max_combinations) {
  if (max_combinations <= 0) max_combinations = enum_limit();
  AdmissibleStructure s = admissible_structure(n, u);
  if (s.combinations > static_cast<double>(max_combinations))
    throw bound_error("admissible_partitions: " + fmt_double(s.combinations) +
                      " assignment combinations exceed bound " +
                      std::to_string(max_combinations));

  std::vector<std::size_t> assign(s.atoms.size(), 0);
  std::set<std::string> seen;
  std::vector<Partition> out;
  while (true) {
    std::vector<std::vector<int>> merged(u.elements.size());
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
      int host = s.hosts[i][assign[i]];
      merged[static_cast<std::size_t>(host)].insert(merged[static_cast<std::size_t>(host)].end(),
                                                    s.atoms[i].begin(), s.atoms[i].end());
    }
    Partition p;
    p.blocks = canonical_blocks(std::move(merged));
    if (seen.insert(p.key()).second) out.push_back(std::move(p));

    std::size_t pos = 0;
    while (pos < assign.size()) {
      if (++assign[pos] < s.hosts[pos].size()) break;
      assign[pos] = 0;
      ++pos;
    }
    if (pos == assign.size()) break;
  }
  std::sort(out.begin(), out.end(),
            [](const Partition& a, const Partition& b) { return a.blocks < b.blocks; });
  return out;
}

double entropy(const FiniteSpace& nu, const Partition& alpha) {
  double h = 0;
  for (const auto& b : alpha.blocks) {
    double p = 0;
    for (int i : b) p += nu.weights[static_cast<std::size_t>(i)];
    h -= xlogx(p);
  }
  return h < 0 ? 0 : h;
}

double conditional_entropy(const FiniteSpace& nu, const Partition& alpha, const Partition& c) {
  double h = 0;
  for (const auto& cb : c.blocks) {
    double pc = 0;
    for (int i : cb) pc += nu.weights[static_cast<std::size_t>(i)];
    if (pc <= 0) continue;
    std::set<int> cset(cb.begin(), cb.end());
    for (const auto& ab : alpha.blocks) {
      double pab = 0;
      for (int i : ab)
        if (cset.count(i)) pab += nu.weights[static_cast<std::size_t>(i)];
      if (pab > 0) h -= pab * std::log(pab / pc);
    }
  }
  return h < 0 ? 0 : h;
}

namespace {

// Restriction of a cover to a block, as a cover over re-indexed points.
struct RestrictedSpace {
  FiniteSpace nu;
  Cover u;
};

RestrictedSpace restrict_to_block(const FiniteSpace& nu, const Cover& u,
                                  const std::vector<int>& block, double mass) {
  RestrictedSpace r;
  std::map<int, int> reindex;
  for (int i : block) {
    reindex[i] = static_cast<int>(r.nu.labels.size());
    r.nu.labels.push_back(nu.labels[static_cast<std::size_t>(i)]);
    r.nu.weights.push_back(nu.weights[static_cast<std::size_t>(i)] / mass);
  }
  std::vector<std::vector<int>> elements;
  for (const auto& e : u.elements) {
    std::vector<int> cut;
    for (int i : e)
      if (auto it = reindex.find(i); it != reindex.end()) cut.push_back(it->second);
    if (!cut.empty()) elements.push_back(std::move(cut));
  }
  r.u = make_cover(static_cast<int>(block.size()), std::move(elements));
  return r;
}

}  // namespace

double cover_entropy(const FiniteSpace& nu, const Cover& u, const Partition& c) {
  double total = 0;
  for (const auto& cb : c.blocks) {
    double pc = 0;
    for (int i : cb) pc += nu.weights[static_cast<std::size_t>(i)];
    if (pc <= 0) continue;
    RestrictedSpace r = restrict_to_block(nu, u, cb, pc);
    double best = -1;
    for (const Partition& beta : admissible_partitions(r.nu.size(), r.u)) {
      double h = entropy(r.nu, beta);
      if (best < 0 || h < best) best = h;
    }
    total += pc * best;
  }
  return total;
}

double cover_entropy_global(const FiniteSpace& nu, const Cover& u, const Partition& c) {
  int n = nu.size();
  double best = -1;
  for (const Partition& beta : admissible_partitions(n, u)) {
    double h = conditional_entropy(nu, beta, c);
    if (best < 0 || h < best) best = h;
  }
  return best;
}

GibbsResult gibbs_inequality(const std::vector<double>& a, const std::vector<double>& p) {
  if (a.size() != p.size()) throw validation_error("gibbs_inequality: length mismatch");
  if (a.empty()) throw validation_error("gibbs_inequality: empty input");
  double psum = 0;
  for (double pi : p) {
    if (!(pi >= 0.0)) throw validation_error("gibbs_inequality: p_i must be >= 0");
    psum += pi;
  }
  double lhs = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (p[i] > 0) lhs += p[i] * (a[i] - std::log(p[i]));
  // log-sum-exp with max shift for stability.
  double amax = a[0];
  for (double ai : a) amax = std::max(amax, ai);
  double z = 0;
  for (double ai : a) z += std::exp(ai - amax);
  double lse = amax + std::log(z);
  double rhs = psum > 0 ? psum * lse - psum * std::log(psum) : 0.0;
  if (psum <= 0) lhs = 0;
  return GibbsResult{lhs, rhs, std::fabs(lhs - rhs) <= 1e-10};
}

MixtureBounds mixture_entropy_bounds(const std::vector<FiniteSpace>& nus,
                                     const std::vector<double>& lambdas, const Partition& alpha,
                                     const Partition& c) {
  if (nus.size() != lambdas.size() || nus.empty())
    throw validation_error("mixture_entropy_bounds: need matching nonempty lists");
  double lsum = 0;
  for (double l : lambdas) {
    if (!(l > 0.0 && l < 1.0) && lambdas.size() > 1)
      throw validation_error("mixture_entropy_bounds: lambda_i must lie in (0,1)");
    lsum += l;
  }
  if (std::fabs(lsum - 1.0) > 1e-12)
    throw validation_error("mixture_entropy_bounds: lambdas sum to " + fmt_double(lsum));
  for (const FiniteSpace& nu : nus) {
    nu.validate();
    if (nu.labels != nus.front().labels)
      throw validation_error("mixture_entropy_bounds: weight mismatch, measures must share one point set");
  }

  double lower = 0, lambda_entropy = 0;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    lower += lambdas[i] * conditional_entropy(nus[i], alpha, c);
    lambda_entropy -= xlogx(lambdas[i]);
  }
  FiniteSpace mix = nus.front();
  for (int x = 0; x < mix.size(); ++x) {
    double w = 0;
    for (std::size_t i = 0; i < nus.size(); ++i)
      w += lambdas[i] * nus[i].weights[static_cast<std::size_t>(x)];
    mix.weights[static_cast<std::size_t>(x)] = w;
  }
  double value = conditional_entropy(mix, alpha, c);
  return MixtureBounds{lower, value, lower + lambda_entropy};
}

}  // namespace amentropy
