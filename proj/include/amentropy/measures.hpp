#pragma once

#include <optional>
#include <string>
#include <vector>

#include "amentropy/bundle.hpp"
#include "amentropy/windows.hpp"

namespace amentropy {

// Invariant fiber measure of Markov form: per base point an initial law on
// letters and a transition kernel. Invariance is the marginal consistency
// pi[theta w] = pi[w] * q[w]; support must respect the transition matrices
// and the core letters.
struct RelativeMarkovMeasure {
  std::vector<std::vector<double>> pi;
  std::vector<std::vector<std::vector<double>>> q;

  void validate(const RandomSFT& sys) const;
};

// Product measure with the given letter law at every site.
RelativeMarkovMeasure bernoulli_measure(const RandomSFT& sys, std::vector<double> p);
// Maximal-entropy measure from the leading eigen-data of the transition
// cocycle (power iteration along each driver orbit).
RelativeMarkovMeasure parry_measure(const RandomSFT& sys);
// Kernel rows uniform over admissible targets, initial laws stationary.
RelativeMarkovMeasure uniform_markov(const RandomSFT& sys);

// pi[theta^lo w](word_0) times the kernel steps; zero on inadmissible words.
double cylinder_prob(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                     const Word& word, Coord lo = 0);

// Closed-form entropy rate sum_w P(w) sum_x pi_w(x) H(q_w(x,.)).
double markov_entropy_rate(const RandomSFT& sys, const RelativeMarkovMeasure& mu);

// Shannon entropy of the word law on f (gaps are marginalized out).
double window_entropy(const RandomSFT& sys, const RelativeMarkovMeasure& mu, int omega,
                      const Window& f);

// Driver-averaged cover entropy of the pullback of u at one window,
// unnormalized: sum_w P(w) H_{mu_w}(U_f).
double fiber_cover_entropy_window(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                  const FiberCover& u, const Window& f);

struct CoverEntropyReport {
  EstimateReport est;
  // Letter-partition rate for comparison columns; for generating partitions
  // the increments agree with it exactly.
  double closed_form_rate{0};
};
CoverEntropyReport fiber_cover_entropy_estimate(const RandomSFT& sys,
                                                const RelativeMarkovMeasure& mu,
                                                const FiberCover& u,
                                                const FolnerSequence& seq, int n_max);

// Averaged potential per window; constant for additive families.
EstimateReport potential_integral(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                  const PotentialFamily& d, const FolnerSequence& seq,
                                  int n_max);

struct GreedySelection {
  std::vector<Word> picks;       // on the joint hull, in pick order
  std::vector<double> d_values;  // potential of each pick
  double sum_exp{0};             // sum of e^{d} over the picks
  Window hull{Window::empty(1)};
};
// Largest e^{d} first; each pick deletes every atom (under each partition in
// alphas) that contains it. No atom ends up holding two picks.
GreedySelection greedy_selection(const RandomSFT& sys, const PotentialFamily& d,
                                 const FiberCover& u, const std::vector<FiberCover>& alphas,
                                 int omega, const Window& f);

struct EmpiricalResult {
  RelativeMarkovMeasure measure;
  bool uniform_completion{false};  // some kernel rows were never observed
};
// Exponentially weighted empirical measure on the greedy selection, shift
// averaged and projected to Markov form by pair-frequency likelihood.
EmpiricalResult empirical_measure(const RandomSFT& sys, const PotentialFamily& d,
                                  const FiberCover& u, int n);

struct PinskerRow {
  int n{0};
  double h_join{0};    // (1/|F_n|) averaged entropy of the joined labels
  double h_second{0};  // same for the conditioning partition
  double middle{0};    // (1/|F_n|) averaged conditional entropy given it
  double defect{0};    // h_join - h_second - middle, zero by the chain rule
};
struct PinskerReport {
  std::vector<PinskerRow> rows;
};
// alpha and beta must be single-site partition covers.
PinskerReport pinsker_formula_check(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                                    const FiberCover& alpha, const FiberCover& beta,
                                    int n_max);

struct ARRow {
  int n{0};
  double skew{0};    // (1/n) entropy of the joint (base point, word) law
  double driver{0};  // (1/n) entropy of the base law
  double fiber{0};   // (1/n) averaged word entropy
  double defect{0};  // skew - driver - fiber, zero at every window
  double skew_increment{0};
  double fiber_increment{0};
};
struct ARReport {
  std::vector<ARRow> rows;
};
ARReport abramov_rokhlin_check(const RandomSFT& sys, const RelativeMarkovMeasure& mu,
                               int n_max);

struct VPResult {
  RelativeMarkovMeasure best;
  double value{0};  // h + mu(D) of the best measure
  double h{0};
  double mu_d{0};
  double pressure_ref{0};    // pressure estimate at the same cover
  double max_candidate{0};   // largest h + mu(D) over every evaluated measure
  long long evaluations{0};
};
// Coordinate ascent over kernel entries with multiplicative steps, restarted
// from the maximal-entropy, uniform, and empirical seeds.
VPResult optimize_vp(const RandomSFT& sys, const PotentialFamily& d, const FiberCover& u,
                     int n_window, long long budget, int restarts = 4,
                     std::uint64_t seed = 1);

}  // namespace amentropy
