#include "powdist/cantor.hpp"

#include <algorithm>
#include <string>

#include <gmpxx.h>

#include "powdist/error.hpp"

namespace powdist {

const char* to_string(BranchPolicy p) noexcept {
  switch (p) {
    case BranchPolicy::Leftmost: return "leftmost";
    case BranchPolicy::Midmost: return "midmost";
    case BranchPolicy::SeededRandom: return "random";
  }
  return "?";
}

BranchPolicy parse_branch_policy(std::string_view text) {
  if (text == "leftmost") return BranchPolicy::Leftmost;
  if (text == "midmost") return BranchPolicy::Midmost;
  if (text == "random" || text == "seeded-random") return BranchPolicy::SeededRandom;
  throw Error(ErrorCode::Parse, "unknown branch policy '" + std::string(text) + "'");
}

void ConstructionConfig::validate() const {
  if (lambda <= 1) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
  if (delta <= 0) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (eta <= 0 || eta >= 1) {
    throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)");
  }
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be at least 1");
  if (max_tree_nodes < 4) {
    throw Error(ErrorCode::InvalidArgument, "max_tree_nodes must be at least 4");
  }
  if (digits < 1) throw Error(ErrorCode::InvalidArgument, "digits must be positive");
}

BigReal CantorLevel::gap() const {
  if (!measured_gap) return gap_bound;
  if (!sampled) return *measured_gap;
  return min(*measured_gap, gap_bound);
}

std::vector<LevelStats> CantorTree::level_stats() const {
  std::vector<LevelStats> out;
  for (const CantorLevel& lv : levels) {
    out.push_back({lv.n, lv.total, lv.branch, lv.gap(), lv.sampled});
  }
  return out;
}

namespace {

void check_problem(const ConstructionConfig& cfg, const Problem& problem) {
  cfg.validate();
  if (problem.dp.size() < cfg.depth + 1) {
    throw Error(ErrorCode::NoValidStart,
                "depth " + std::to_string(cfg.depth) + " needs " +
                    std::to_string(cfg.depth + 1) + " sequence terms, have " +
                    std::to_string(problem.dp.size()));
  }
  if (problem.es.size() < cfg.depth) {
    throw Error(ErrorCode::NoValidStart, "eps schedule shorter than depth");
  }
}

BigRational q_of(const Problem& p, std::size_t n) {
  return to_rational(p.dp.q.at(n - 1));
}

BigRational shifted(const BigInt& h, const BigRational& x) {
  BigRational out = BigRational(h) + x;
  out.canonicalize();
  return out;
}

BigRational inverse(const BigRational& x) {
  BigRational out = 1 / x;
  out.canonicalize();
  return out;
}

[[noreturn]] void undecided(const std::string& what, std::size_t n, Precision prec) {
  throw PrecisionError(ErrorCode::Ambiguous,
                       what + " undecided at " + std::to_string(prec) + " bits", n);
}

// Gap lower bound between two enclosed intervals placed left to right.
BigReal gap_between(const CantorInterval& left, const CantorInterval& right,
                    Precision prec) {
  return sub(right.lo_enclosure.lo(), left.hi_enclosure.hi(), Round::Down, prec);
}

void measure_gaps(CantorLevel& level, Precision prec) {
  for (std::size_t i = 1; i < level.intervals.size(); ++i) {
    const CantorInterval& a = level.intervals[i - 1];
    const CantorInterval& b = level.intervals[i];
    // In a sampled level only consecutive labels are true neighbours.
    if (level.sampled && b.label != a.label + 1) continue;
    BigReal g = gap_between(a, b, prec);
    if (g.sign() <= 0) {
      throw PrecisionError(ErrorCode::InwardCollapse,
                           "neighbouring intervals not separated", level.n);
    }
    if (!level.measured_gap || g < *level.measured_gap) level.measured_gap = std::move(g);
  }
}

// Offsets into a run of `count` labels kept under a node budget.
std::vector<BigInt> sample_offsets(const BigInt& count, std::size_t budget) {
  std::vector<BigInt> out;
  if (count <= budget) {
    for (BigInt k = 0; k < count; ++k) out.push_back(k);
    return out;
  }
  const std::size_t left = budget / 2;
  const std::size_t right = budget - left;
  for (std::size_t k = 0; k < left; ++k) out.push_back(BigInt(static_cast<unsigned long>(k)));
  for (std::size_t k = right; k > 0; --k) {
    out.push_back(count - static_cast<unsigned long>(k));
  }
  return out;
}

}  // namespace

Precision default_precision(const ConstructionConfig& cfg, const Problem& problem) {
  if (cfg.precision.initial > 0) return cfg.precision.initial;
  const RInterval top = enclose(cfg.lambda + cfg.delta, 64);
  return bits_for_power(problem.dp.q.at(cfg.depth), top);
}

CantorBuilder::CantorBuilder(const ConstructionConfig& cfg, const Problem& problem,
                             Precision prec)
    : cfg_(cfg), problem_(problem), prec_(prec) {
  check_problem(cfg, problem);
  window_ = RInterval(enclose(cfg.lambda, prec).hi(),
                      enclose(cfg.lambda + cfg.delta, prec).lo());
}

BigRational CantorBuilder::a(std::size_t n) const {
  BigRational out = problem_.dp.r.at(n - 1) - problem_.es.at(n);
  out.canonicalize();
  return out;
}

BigRational CantorBuilder::b(std::size_t n) const {
  BigRational out = problem_.dp.r.at(n - 1) + problem_.es.at(n);
  out.canonicalize();
  return out;
}

BigInt CantorBuilder::branch_count(std::size_t n) const {
  return powdist::branch_count(problem_.dp, cfg_.lambda, cfg_.eta, n, prec_);
}

bool CantorBuilder::start_conditions(std::size_t n, bool at_start) const {
  const BigRational& eps = problem_.es.at(n);
  if (!(eps < BigRational(1, 2))) return false;
  if (!(a(n) > -1) || !(b(n) < 1)) return false;
  if (!level_condition(problem_.dp, problem_.es, cfg_.lambda, cfg_.eta, n, prec_)) {
    return false;
  }
  if (at_start) {
    const BigRational q = q_of(problem_, n);
    const RInterval spread = sub(pow_enclosure(cfg_.lambda + cfg_.delta, q, prec_),
                                 pow_enclosure(cfg_.lambda, q, prec_), prec_);
    const auto ok = certified_leq(RInterval::from_integer(4), spread);
    if (!ok) undecided("window length", n, prec_);
    return *ok;
  }
  return true;
}

std::size_t CantorBuilder::find_start_level() const {
  // Conditions (a), (c), (d) must hold on the whole tail N..depth; the
  // window length grows with n, so N is the first tail index where it is >= 4.
  std::size_t tail = cfg_.depth + 1;
  while (tail > 1 && start_conditions(tail - 1, false)) --tail;
  for (std::size_t n = tail; n <= cfg_.depth; ++n) {
    if (start_conditions(n, true)) return n;
  }
  throw Error(ErrorCode::NoValidStart,
              "no start level satisfies the construction conditions up to depth " +
                  std::to_string(cfg_.depth));
}

CantorBuilder::ChildRange CantorBuilder::initial_labels(std::size_t n) const {
  const BigRational q = q_of(problem_, n);
  const BigInt j = ceil_pow(cfg_.lambda, q, prec_);
  const BigInt top = floor_pow(cfg_.lambda + cfg_.delta, q, prec_);
  const BigInt m = top - j - 1;
  if (m < 2) {
    throw Error(ErrorCode::NoValidStart, "fewer than 4 integers in the start window", n);
  }
  return {j + 1, m};
}

CantorInterval CantorBuilder::make_interval(std::size_t n, const BigInt& h,
                                            std::size_t parent) const {
  const BigRational inv_q = inverse(q_of(problem_, n));
  CantorInterval iv;
  iv.level = n;
  iv.label = h;
  iv.parent = parent;
  iv.lo_enclosure = pow_enclosure(shifted(h, a(n)), inv_q, prec_);
  iv.hi_enclosure = pow_enclosure(shifted(h, b(n)), inv_q, prec_);
  if (!(iv.lo_enclosure.hi() < iv.hi_enclosure.lo())) {
    throw PrecisionError(ErrorCode::InwardCollapse,
                         "certified interval empty for label " + h.get_str(), n);
  }
  return iv;
}

void CantorBuilder::check_inside_window(const CantorInterval& iv) const {
  if (!window_.contains(iv.outer())) {
    throw PrecisionError(ErrorCode::Ambiguous,
                         "interval not certified inside [lambda, lambda + delta]",
                         iv.level);
  }
}

CantorBuilder::ChildRange CantorBuilder::children(std::size_t n, const BigInt& h) const {
  if (n + 1 > cfg_.depth) {
    throw Error(ErrorCode::InvalidArgument, "cannot refine past the configured depth", n);
  }
  if (!level_condition(problem_.dp, problem_.es, cfg_.lambda, cfg_.eta, n, prec_)) {
    throw Error(ErrorCode::CountShortfall, "level condition fails", n);
  }
  BigRational rho = q_of(problem_, n + 1) / q_of(problem_, n);
  rho.canonicalize();
  const BigRational lo_base = shifted(h, a(n));
  const BigRational hi_base = shifted(h, b(n));

  // Image length must reach 2 eps_n lambda^g before integers are counted.
  const RInterval img_lo = pow_enclosure(lo_base, rho, prec_);
  const RInterval img_hi = pow_enclosure(hi_base, rho, prec_);
  const BigReal length_lo = sub(img_hi.lo(), img_lo.hi(), Round::Down, prec_);
  const BigReal length_hi = sub(img_hi.hi(), img_lo.lo(), Round::Up, prec_);
  BigRational two_eps = 2 * problem_.es.at(n);
  two_eps.canonicalize();
  const RInterval needed = mul(enclose(two_eps, prec_),
                               pow_enclosure(cfg_.lambda, gap(problem_.dp, n), prec_),
                               prec_);
  if (length_hi < needed.lo()) {
    throw Error(ErrorCode::CountShortfall, "image shorter than 2 eps lambda^g", n);
  }
  if (length_lo < needed.hi()) undecided("image length", n, prec_);

  const BigInt c0 = ceil_pow(lo_base, rho, prec_);
  const BigInt c1 = floor_pow(hi_base, rho, prec_);
  const BigInt m = branch_count(n);
  if (c1 - c0 + 1 < m + 2) {
    throw Error(ErrorCode::CountShortfall,
                "image holds " + BigInt(c1 - c0 + 1).get_str() +
                    " integers, need " + BigInt(m + 2).get_str(),
                n);
  }
  return {c0 + 1, m};
}

BigReal CantorBuilder::gap_bound(std::size_t n) const {
  // Labels of E_n lie in [ceil(lambda^q), floor((lambda+delta)^q) - 1]; the gap
  // between labels h and h+1 is monotone in h, so the ends bound it.
  const BigRational q = q_of(problem_, n);
  const BigRational inv_q = inverse(q);
  const BigInt low = ceil_pow(cfg_.lambda, q, prec_);
  const BigInt high = floor_pow(cfg_.lambda + cfg_.delta, q, prec_) - 2;
  std::optional<BigReal> best;
  for (const BigInt& h : {low, std::max(low, high)}) {
    const RInterval left = pow_enclosure(shifted(h, b(n)), inv_q, prec_);
    const RInterval right = pow_enclosure(shifted(h + 1, a(n)), inv_q, prec_);
    BigReal g = sub(right.lo(), left.hi(), Round::Down, prec_);
    if (!best || g < *best) best = std::move(g);
  }
  if (best->sign() <= 0) {
    throw PrecisionError(ErrorCode::Ambiguous, "gap bound not positive", n);
  }
  return *best;
}

CantorLevel CantorBuilder::initial_level(std::size_t n, std::size_t max_nodes) const {
  const ChildRange labels = initial_labels(n);
  CantorLevel level;
  level.n = n;
  level.total = labels.count;
  level.branch = branch_count(n);
  for (const BigInt& k : sample_offsets(labels.count, max_nodes)) {
    CantorInterval iv = make_interval(n, labels.first + k, 0);
    check_inside_window(iv);
    level.intervals.push_back(std::move(iv));
  }
  level.sampled = level.total != level.intervals.size();
  level.gap_bound = gap_bound(n);
  measure_gaps(level, prec_);
  return level;
}

CantorLevel CantorBuilder::refine_level(const CantorLevel& parent,
                                        std::size_t max_nodes) const {
  const std::size_t n = parent.n;
  const BigInt m = branch_count(n);
  CantorLevel level;
  level.n = n + 1;
  level.total = parent.total * m;
  level.branch = branch_count(n + 1);

  const std::size_t parents = parent.intervals.size();
  std::vector<std::size_t> chosen;
  std::size_t per_parent = max_nodes / std::max<std::size_t>(parents, 1);
  if (per_parent >= 4 || m <= per_parent) {
    for (std::size_t i = 0; i < parents; ++i) chosen.push_back(i);
  } else {
    // Too many parents: keep an evenly spread subset with 4 children each.
    const std::size_t keep = std::max<std::size_t>(1, std::min(parents, max_nodes / 4));
    for (std::size_t k = 0; k < keep; ++k) {
      chosen.push_back(keep == 1 ? 0 : k * (parents - 1) / (keep - 1));
    }
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    per_parent = 4;
  }

  for (const std::size_t pi : chosen) {
    const CantorInterval& p = parent.intervals[pi];
    const ChildRange range = children(n, p.label);
    const RInterval inside = p.certified();
    for (const BigInt& k : sample_offsets(range.count, per_parent)) {
      CantorInterval child = make_interval(n + 1, range.first + k, pi);
      if (!inside.contains(child.outer())) {
        throw PrecisionError(ErrorCode::Ambiguous,
                             "child not certified inside its parent", n + 1);
      }
      level.intervals.push_back(std::move(child));
    }
  }
  level.sampled = parent.sampled || level.total != level.intervals.size();
  level.gap_bound = gap_bound(n + 1);
  measure_gaps(level, prec_);
  return level;
}

std::size_t find_start_level(const ConstructionConfig& cfg, const Problem& problem) {
  check_problem(cfg, problem);
  return with_escalation(default_precision(cfg, problem), cfg.precision.max_doublings,
                         [&](Precision prec) {
                           return CantorBuilder(cfg, problem, prec).find_start_level();
                         });
}

namespace {

class Chooser {
 public:
  Chooser(BranchPolicy policy, std::uint64_t seed)
      : policy_(policy), rng_(gmp_randinit_mt) {
    rng_.seed(static_cast<unsigned long>(seed));
  }

  BigInt pick(const BigInt& count) {
    switch (policy_) {
      case BranchPolicy::Leftmost: return 0;
      case BranchPolicy::Midmost: return (count - 1) / 2;
      case BranchPolicy::SeededRandom: return rng_.get_z_range(count);
    }
    return 0;
  }

 private:
  BranchPolicy policy_;
  gmp_randclass rng_;
};

RInterval central_subinterval(const RInterval& c, int digits, Precision prec) {
  const BigReal width = sub(c.hi(), c.lo(), Round::Down, prec);
  const BigReal quarter = exact_ldexp(width, -2);
  BigReal tol = pow(BigReal::from_long(10), BigReal::from_long(-digits), Round::Down, prec);
  tol = exact_ldexp(tol, -1);
  const BigReal half = min(quarter, tol);
  const BigReal mid = c.midpoint(prec);
  RInterval out(sub(mid, half, Round::Up, prec), add(mid, half, Round::Down, prec));
  if (!c.contains(out) || out.is_point()) {
    throw PrecisionError(ErrorCode::InwardCollapse,
                         "alpha enclosure does not fit inside the deepest interval");
  }
  return out;
}

Certificate descend_at(const ConstructionConfig& cfg, const Problem& problem,
                       const SequencePair& original, Precision prec) {
  const CantorBuilder builder(cfg, problem, prec);
  Certificate cert;
  cert.config = cfg;
  cert.precision = prec;
  cert.start = builder.find_start_level();

  Chooser chooser(cfg.branch, cfg.seed);
  const auto record = [&](const CantorInterval& iv) {
    const std::size_t n = iv.level;
    LevelRecord rec;
    rec.n = n;
    rec.q = problem.dp.q[n - 1];
    rec.r = problem.dp.r[n - 1];
    rec.eps = problem.es.at(n);
    rec.label = iv.label;
    rec.branch = n < cfg.depth ? builder.branch_count(n) : BigInt(0);
    rec.certified = iv.certified();
    rec.outer = iv.outer();
    cert.levels.push_back(std::move(rec));
  };

  const auto first = builder.initial_labels(cert.start);
  CantorInterval current =
      builder.make_interval(cert.start, first.first + chooser.pick(first.count), 0);
  if (!RInterval(enclose(cfg.lambda, prec).hi(),
                 enclose(cfg.lambda + cfg.delta, prec).lo())
           .contains(current.outer())) {
    throw PrecisionError(ErrorCode::Ambiguous,
                         "interval not certified inside [lambda, lambda + delta]",
                         cert.start);
  }
  record(current);
  for (std::size_t n = cert.start; n < cfg.depth; ++n) {
    const auto range = builder.children(n, current.label);
    CantorInterval child =
        builder.make_interval(n + 1, range.first + chooser.pick(range.count), 0);
    if (!current.certified().contains(child.outer())) {
      throw PrecisionError(ErrorCode::Ambiguous,
                           "child not certified inside its parent", n + 1);
    }
    current = std::move(child);
    record(current);
  }
  cert.alpha = central_subinterval(current.certified(), cfg.digits, prec);

  std::vector<std::optional<BigRational>> eps(problem.dp.size());
  for (std::size_t n = cert.start; n <= cfg.depth; ++n) eps[n - 1] = problem.es.at(n);
  cert.densified_check =
      verify(cert.alpha, problem.dp.q, problem.dp.r, eps, cert.start, cfg.depth);

  std::vector<std::optional<BigRational>> orig_eps(original.size());
  std::size_t last_original = 0;
  for (std::size_t k = 1; k <= original.size() && k <= problem.dp.origin_map.size(); ++k) {
    const std::size_t pos = problem.dp.origin_map[k - 1];
    if (pos > cfg.depth) break;
    last_original = k;
    if (pos >= cert.start) {
      orig_eps[k - 1] = problem.es.at(pos);
      cert.original_indices.push_back(k);
    }
  }
  if (last_original > 0) {
    cert.original_check =
        verify(cert.alpha, original.q, original.r, orig_eps, 1, last_original);
  }
  return cert;
}

}  // namespace

Certificate descend(const ConstructionConfig& cfg, const Problem& problem,
                    const SequencePair& original) {
  check_problem(cfg, problem);
  return with_escalation(default_precision(cfg, problem), cfg.precision.max_doublings,
                         [&](Precision prec) {
                           return descend_at(cfg, problem, original, prec);
                         });
}

CantorTree enumerate_tree(const ConstructionConfig& cfg, const Problem& problem) {
  check_problem(cfg, problem);
  return with_escalation(
      default_precision(cfg, problem), cfg.precision.max_doublings,
      [&](Precision prec) {
        const CantorBuilder builder(cfg, problem, prec);
        CantorTree tree;
        tree.precision = prec;
        tree.start = builder.find_start_level();
        const std::size_t levels = cfg.depth - tree.start + 1;
        const std::size_t budget = std::max<std::size_t>(4, cfg.max_tree_nodes / levels);
        tree.levels.push_back(builder.initial_level(tree.start, budget));
        for (std::size_t n = tree.start; n < cfg.depth; ++n) {
          tree.levels.push_back(builder.refine_level(tree.levels.back(), budget));
        }
        return tree;
      });
}

}  // namespace powdist
