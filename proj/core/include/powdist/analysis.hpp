#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "powdist/bigreal.hpp"
#include "powdist/interval.hpp"
#include "powdist/rational.hpp"

namespace powdist {

enum class RowStatus { Pass, Fail, Undecided, Info };

const char* to_string(RowStatus s) noexcept;

struct VerifyRow {
  std::size_t n = 0;
  BigReal q;
  BigRational r;
  RInterval power;                     // alpha^q, outward
  FracPart frac;                       // {alpha^q} or WRAPPED
  RInterval distance;                  // ||alpha^q - r||, outward
  std::optional<RInterval> threshold;  // eps enclosure when checked
  RowStatus status = RowStatus::Info;
};

struct VerificationReport {
  std::vector<VerifyRow> rows;
  Precision precision = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t undecided = 0;
  std::optional<std::size_t> first_failure;    // index n
  std::optional<std::size_t> first_undecided;  // index n
  double max_tail_distance = 0;     // upper ends over the last third of rows
  bool distances_nonincreasing = true;

  bool all_pass() const { return failed == 0 && undecided == 0; }
};

// Recomputes ||alpha^{q_n} - r_n|| for n = first..last (1-based) from the
// alpha enclosure alone. thresholds[n-1], when present, is the bound the
// distance must stay strictly below. prec = 0 picks a precision large
// enough that rounding is negligible next to the width of alpha.
VerificationReport verify(const RInterval& alpha, const std::vector<BigReal>& q,
                          const std::vector<BigRational>& r,
                          const std::vector<std::optional<BigRational>>& thresholds,
                          std::size_t first, std::size_t last,
                          Precision prec = 0);

// Throws Error(PrecisionExhausted) naming the first undecided index.
void require_decided(const VerificationReport& report);

// One level of a Cantor construction as seen by the dimension bound:
// `count` intervals at this level, `children` per interval at the next,
// `gap` a lower bound on the distance between any two of them.
struct LevelStats {
  std::size_t n = 0;
  BigInt count;
  BigInt children;
  BigReal gap;
  bool sampled = false;
};

struct DimensionRow {
  std::size_t n = 0;
  BigInt count;
  BigInt children;
  BigReal gap_measured;
  BigReal gap_used;
  double partial_raw = 0;
  double partial = 0;
  bool clamped = false;
  bool gap_substituted = false;
  bool sampled = false;
};

struct DimensionReport {
  std::vector<DimensionRow> rows;
  double liminf_estimate = 0;   // minimum over the last third of rows
  std::size_t tail_from = 0;    // level where that window starts
  bool gap_monotone = true;
  bool any_clamped = false;
};

// Partial bounds log(count_n) / -log(children_n * gap_n). Non-decreasing gaps
// are replaced by the running minimum. Needs at least three levels.
DimensionReport falconer_bound(const std::vector<LevelStats>& levels);

// count_n = m^n, children m, gap base^-(n + offset) for n = 1..levels.
std::vector<LevelStats> synthetic_levels(unsigned long m, unsigned long base,
                                         long offset, std::size_t levels);

// eta log(lambda) / (eta eps log(lambda) + log(lambda + delta)).
RInterval closed_form_bound(const BigRational& lambda, const BigRational& delta,
                            const BigRational& eps, const BigRational& eta,
                            Precision prec = 128);
// log(lambda) / log(lambda + delta).
RInterval limit_bound(const BigRational& lambda, const BigRational& delta,
                      Precision prec = 128);

struct BoxCountResult {
  std::vector<BigReal> scales;
  std::vector<BigInt> counts;
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // RMS of the fit
};

// Number of grid boxes [k s, (k+1) s] meeting the union of the leaves, per
// scale, and the least-squares slope of log N(s) against log(1/s).
BoxCountResult box_count(const std::vector<RInterval>& leaves,
                         const std::vector<BigReal>& scales);

// D*_N of points in [0, 1).
double star_discrepancy(std::vector<double> points);

}  // namespace powdist
