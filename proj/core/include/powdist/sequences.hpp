#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "powdist/bigreal.hpp"
#include "powdist/interval.hpp"
#include "powdist/precision.hpp"
#include "powdist/rational.hpp"

namespace powdist {

inline constexpr Precision kSequencePrecision = 256;

// Exponents q (strictly increasing, positive, exact binary values) and
// targets r (exact rationals reduced into [-1/2, 1/2)). Indices in the
// public API are 1-based; the vectors are 0-based.
struct SequencePair {
  std::vector<BigReal> q;
  std::vector<BigRational> r;
  std::string family;
  std::string target;
  std::vector<std::string> warnings;

  std::size_t size() const { return q.size(); }
};

enum class GapCheck { Warn, Fail };

struct SequenceOptions {
  Precision precision = kSequencePrecision;
  GapCheck gap_check = GapCheck::Fail;
};

// Families: "nsq", "pow:K", "quad:A,B,C" (A n^2 + B n + C), "lin[:C]",
// "geom:B", "file:PATH". Targets: "zero", "const:K", "file:PATH"; an empty
// target with a file family takes the file's second column.
SequencePair gen_exponents(std::string_view family, std::string_view target,
                           std::size_t count,
                           const SequenceOptions& options = {});

// r - round(r) with ties going down, landing in [-1/2, 1/2).
BigRational reduce_target(const BigRational& r);

// Prefix heuristic for divergent gaps: last gap exceeds the first and the
// gaps are nondecreasing on the tail half.
bool gaps_look_divergent(const std::vector<BigReal>& q);

// "q<TAB>r" per line, '#' comments and blank lines ignored.
SequencePair read_sequence_file(const std::string& path,
                                Precision precision = kSequencePrecision);
SequencePair parse_sequence_text(std::istream& in,
                                 Precision precision = kSequencePrecision);
void write_sequence(std::ostream& out, const std::vector<BigReal>& q,
                    const std::vector<BigRational>& r);

enum class FillKind { Zero, Constant, CopyNext };

// Value given to inserted targets: "zero", "const:C" or "copy-next".
struct FillPolicy {
  FillKind kind = FillKind::Zero;
  BigRational constant;

  static FillPolicy parse(std::string_view text);
};

// Terms inserted between original q_N and q_{N+1}.
struct InsertedRun {
  std::size_t original_index;  // 1-based N
  std::size_t first_position;  // 1-based position of the first inserted term
  std::size_t count;           // m
  BigReal step;                // eps * q_N / 2, exact
};

struct DensifiedPair {
  std::vector<BigReal> q;
  std::vector<BigRational> r;
  BigReal eps;
  // origin_map[n-1] is the 1-based densified position of original index n.
  std::vector<std::size_t> origin_map;
  std::vector<bool> inserted;
  std::vector<InsertedRun> runs;
  bool densified = false;

  std::size_t size() const { return q.size(); }
};

// Inserts q_N + j * eps * q_N / 2 (j = 1..m) wherever q_{N+1} > (1+eps) q_N,
// with m the smallest j landing in [q_{N+1} - eps q_N, q_{N+1}]. Exact
// arithmetic throughout. Throws InsertionInfeasible / InvalidArgument.
DensifiedPair densify(const SequencePair& sp, const BigReal& eps,
                      const FillPolicy& fill = {});

// The pair viewed as its own densification (no insertions).
DensifiedPair undensified(const SequencePair& sp);

struct DensifyCheck {
  bool ratio_bound = true;       // q~_{n+1} <= (1+eps) q~_n everywhere
  bool run_gaps_exact = true;    // inserted gaps equal eps q_N / 2
  bool final_gaps_ok = true;     // last gap of each run >= eps q_N / 2
  bool subsequence = true;       // origin_map recovers (q, r) bit-for-bit
  bool gap_growth = true;        // last densified gap > first
  std::size_t first_violation = 0;  // 1-based, 0 when none

  bool ok() const {
    return ratio_bound && run_gaps_exact && final_gaps_ok && subsequence;
  }
};

DensifyCheck check_densified(const SequencePair& sp, const DensifiedPair& dp);

enum class ScheduleKind { Default, Custom };

// eps[n-1] is the exact value of eps_n for n = 1 .. size-1 (the last term
// has no entry).
struct EpsilonSchedule {
  ScheduleKind kind = ScheduleKind::Default;
  std::string descriptor = "default";
  std::vector<BigRational> eps;

  std::size_t size() const { return eps.size(); }
  const BigRational& at(std::size_t n) const { return eps.at(n - 1); }
  RInterval enclosure(std::size_t n, Precision prec) const {
    return enclose(at(n), prec);
  }
};

// eps_n = 1 / (2 (q~_{n+1} - q~_n)).
EpsilonSchedule default_schedule(const DensifiedPair& dp);

// "default", "const:C" (eps_n = C) or "power:C,K" (eps_n = C n^-K, K a
// nonnegative integer).
EpsilonSchedule make_schedule(std::string_view descriptor,
                              const DensifiedPair& dp);

struct ScheduleValidation {
  std::size_t start = 0;       // first N with the condition on N..last
  std::vector<bool> holds;     // holds[n-1] for n = 1..last
};

// Certifies 2 eps_n lambda^g >= ceil(lambda^(eta g)) + 2 with
// g = q~_{n+1} - q~_n for n = 1..last (last = schedule size by default),
// escalating precision on undecidable comparisons. Throws NoValidIndex.
ScheduleValidation validate_schedule(const DensifiedPair& dp,
                                     const EpsilonSchedule& es,
                                     const BigRational& lambda,
                                     const BigRational& eta,
                                     std::size_t last = 0,
                                     PrecisionPolicy policy = {});

// Single-index form at a fixed precision; throws PrecisionError when the
// comparison is undecidable.
bool level_condition(const DensifiedPair& dp, const EpsilonSchedule& es,
                     const BigRational& lambda, const BigRational& eta,
                     std::size_t n, Precision prec);

// ceil(lambda^(eta g)), the per-parent branch count m_n.
BigInt branch_count(const DensifiedPair& dp, const BigRational& lambda,
                    const BigRational& eta, std::size_t n, Precision prec);

// Exact gap q~_{n+1} - q~_n as a rational.
BigRational gap(const DensifiedPair& dp, std::size_t n);

}  // namespace powdist
