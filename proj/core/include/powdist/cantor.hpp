#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "powdist/analysis.hpp"
#include "powdist/bigreal.hpp"
#include "powdist/interval.hpp"
#include "powdist/precision.hpp"
#include "powdist/rational.hpp"
#include "powdist/sequences.hpp"

namespace powdist {

enum class BranchPolicy { Leftmost, Midmost, SeededRandom };

const char* to_string(BranchPolicy p) noexcept;
BranchPolicy parse_branch_policy(std::string_view text);

struct ConstructionConfig {
  BigRational lambda = 3;
  BigRational delta = 1;
  BigRational eta = BigRational(1, 2);
  std::size_t depth = 10;  // last (densified, 1-based) index constructed
  BranchPolicy branch = BranchPolicy::Leftmost;
  std::uint64_t seed = 0;
  std::size_t max_tree_nodes = 20000;
  PrecisionPolicy precision;
  int digits = 50;  // requested certified decimal digits of alpha

  void validate() const;  // throws InvalidArgument
};

struct CantorInterval {
  std::size_t level = 0;
  BigInt label;
  RInterval lo_enclosure;  // encloses (h + a_n)^(1/q_n)
  RInterval hi_enclosure;  // encloses (h + b_n)^(1/q_n)
  std::size_t parent = 0;  // position in the previous level's list

  // Certified subset of the exact interval I_{n,h}.
  RInterval certified() const { return {lo_enclosure.hi(), hi_enclosure.lo()}; }
  // Certified superset of I_{n,h}.
  RInterval outer() const { return {lo_enclosure.lo(), hi_enclosure.hi()}; }
};

struct CantorLevel {
  std::size_t n = 0;
  std::vector<CantorInterval> intervals;  // ordered by label
  BigInt total;       // intervals in the exact level E_n
  BigInt branch;      // m_n, children per interval at level n+1
  bool sampled = false;
  std::optional<BigReal> measured_gap;  // over materialized neighbours
  BigReal gap_bound;  // certified lower bound on every gap of E_n

  // Lower bound on the minimal gap used for the dimension report.
  BigReal gap() const;
};

struct CantorTree {
  std::size_t start = 0;
  Precision precision = 0;
  std::vector<CantorLevel> levels;

  std::vector<LevelStats> level_stats() const;
};

// Sequence data the constructor runs on, with exact eps_n.
struct Problem {
  DensifiedPair dp;
  EpsilonSchedule es;
};

// Fixed-precision building blocks. Each throws PrecisionError when the
// precision cannot decide a comparison.
class CantorBuilder {
 public:
  CantorBuilder(const ConstructionConfig& cfg, const Problem& problem,
                Precision prec);

  Precision precision() const { return prec_; }
  std::size_t find_start_level() const;
  CantorLevel initial_level(std::size_t n, std::size_t max_nodes) const;
  CantorLevel refine_level(const CantorLevel& parent, std::size_t max_nodes) const;

  CantorInterval make_interval(std::size_t n, const BigInt& h,
                               std::size_t parent) const;
  // Labels h_first .. h_first + count - 1 available at level n+1 below a
  // level-n interval with label h.
  struct ChildRange {
    BigInt first;
    BigInt count;
  };
  ChildRange children(std::size_t n, const BigInt& h) const;
  // Labels j+1 .. j+m of the first level.
  ChildRange initial_labels(std::size_t n) const;
  BigInt branch_count(std::size_t n) const;
  BigReal gap_bound(std::size_t n) const;

 private:
  BigRational a(std::size_t n) const;
  BigRational b(std::size_t n) const;
  bool start_conditions(std::size_t n, bool at_start) const;
  void check_inside_window(const CantorInterval& iv) const;

  const ConstructionConfig& cfg_;
  const Problem& problem_;
  Precision prec_;
  RInterval window_;
};

// Precision the construction starts at: q_{depth+1} log2(lambda + delta)
// plus guard bits, unless the policy fixes one.
Precision default_precision(const ConstructionConfig& cfg, const Problem& problem);

struct LevelRecord {
  std::size_t n = 0;
  BigReal q;
  BigRational r;
  BigRational eps;
  BigInt label;
  BigInt branch;  // m_n
  RInterval certified;
  RInterval outer;
};

struct Certificate {
  ConstructionConfig config;
  std::string family;
  std::string target;
  std::string schedule;
  std::optional<BigRational> densify_eps;
  std::size_t start = 0;
  Precision precision = 0;
  RInterval alpha;
  std::vector<LevelRecord> levels;
  VerificationReport densified_check;   // indices start..depth
  VerificationReport original_check;    // original indices mapped <= depth
  std::vector<std::size_t> original_indices;
};

// Walks one branch from the start level to cfg.depth, restarting at doubled
// precision when a comparison is undecidable.
Certificate descend(const ConstructionConfig& cfg, const Problem& problem,
                    const SequencePair& original);

CantorTree enumerate_tree(const ConstructionConfig& cfg, const Problem& problem);

std::size_t find_start_level(const ConstructionConfig& cfg, const Problem& problem);

}  // namespace powdist
