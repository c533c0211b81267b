// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "powdist/analysis.hpp"
#include "powdist/cantor.hpp"
#include "powdist/error.hpp"
#include "powdist/io.hpp"
#include "powdist/rational.hpp"
#include "powdist/sequences.hpp"

using namespace powdist;
namespace fs = std::filesystem;

namespace {

constexpr Precision kPrecisionBudget = 4096;     // criterion 1
constexpr double kRuntimeBudgetSeconds = 60;     // criterion 1
constexpr double kFalconerTolerance = 1e-3;      // criterion 5
constexpr std::size_t kFalconerLevel = 40;       // criterion 5
constexpr double kClosedFormTolerance = 1e-4;    // criterion 6
constexpr double kTreeSlack = 0.05;              // criterion 6
constexpr std::size_t kSweepTuples = 100;        // criterion 6
constexpr std::size_t kPisotLast = 50;           // criterion 7
constexpr Precision kPisotPrecision = 256;       // criterion 7

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / ("powdist_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

int cli_run(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

Problem problem_for(const SequencePair& sp) {
  Problem p;
  p.dp = undensified(sp);
  p.es = default_schedule(p.dp);
  return p;
}

ConstructionConfig base_config(BigRational lambda, BigRational delta, BigRational eta,
                               std::size_t depth) {
  ConstructionConfig cfg;
  cfg.lambda = lambda;
  cfg.delta = delta;
  cfg.eta = eta;
  cfg.depth = depth;
  return cfg;
}

// Shared by criteria 1, 8 and 9: the n^2 run to depth 20.
struct SquareRun {
  fs::path certificate;
  std::size_t start = 0;
  Precision precision = 0;
  RInterval alpha;
  double seconds = 0;
  int exit_code = -1;
  std::string log;
};

const SquareRun& square_run() {
  static SquareRun run = [] {
    SquareRun r;
    r.certificate = work_dir() / "squares.cert";
    const auto t0 = std::chrono::steady_clock::now();
    r.exit_code = cli_run({"construct", "--lambda", "3", "--delta", "1", "--eta", "0.5", "--family",
                           "nsq", "--target", "zero", "--depth", "20", "--out",
                           r.certificate.string()},
                          &r.log);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.exit_code == 0) {
      const KvDocument doc = KvDocument::read_file(r.certificate.string());
      r.alpha = certificate_alpha(doc);
      r.start = std::stoul(doc.at("result").at("start_level"));
      r.precision = std::stol(doc.at("result").at("precision_bits"));
    }
    return r;
  }();
  return run;
}

Outcome constructive_soundness() {
  const SquareRun& run = square_run();
  if (run.exit_code != 0) return {false, "construct exited " + std::to_string(run.exit_code) + ": " + run.log};
  // Bound 1/(2(2n+1)) written out here rather than taken from the schedule.
  const SequencePair sp = gen_exponents("nsq", "zero", 20);
  std::vector<std::optional<BigRational>> bound(20);
  for (std::size_t n = run.start; n <= 20; ++n) bound[n - 1] = BigRational(1, 2 * (2 * n + 1));
  const VerificationReport rep = verify(run.alpha, sp.q, sp.r, bound, run.start, 20);
  const int cli_code = cli_run({"verify", "--certificate", run.certificate.string()});
  const bool ok = rep.passed == 20 - run.start + 1 && rep.all_pass() && cli_code == 0 &&
                  run.precision <= kPrecisionBudget && run.seconds < kRuntimeBudgetSeconds;
  return {ok, "N=" + std::to_string(run.start) + ", " + std::to_string(rep.passed) + "/" +
                  std::to_string(rep.rows.size()) + " levels certified, verify exit " +
                  std::to_string(cli_code) + ", " + std::to_string(run.precision) + " bits, " +
                  fmt(run.seconds, 3) + " s"};
}

Outcome constant_target() {
  const SequencePair sp = gen_exponents("nsq", "const:0.3", 21);
  const Problem p = problem_for(sp);
  const Certificate cert = descend(base_config(3, 1, BigRational(1, 2), 20), p, sp);
  const VerificationReport rep = verify(cert.alpha, sp.q, sp.r, {}, cert.start, 20);
  std::size_t ok = 0;
  double worst = 0;
  for (const VerifyRow& row : rep.rows) {
    if (row.frac.wrapped()) continue;
    const Precision prec = rep.precision;
    const RInterval diff = sub(*row.frac.value, enclose(BigRational(3, 10), prec), prec);
    const BigReal upper = max(abs(diff.lo()), abs(diff.hi()));
    worst = std::max(worst, upper.to_double(Round::Up));
    if (upper < enclose(p.es.at(row.n), prec).lo()) ++ok;
  }
  return {ok == rep.rows.size() && !rep.rows.empty(),
          std::to_string(ok) + "/" + std::to_string(rep.rows.size()) +
              " levels with |frac - 0.3| < eps_n certified, largest " + fmt(worst)};
}

Outcome density_evidence() {
  const BigRational delta(1, 10);
  const SequencePair sp = gen_exponents("nsq", "zero", 13);
  const Problem p = problem_for(sp);
  std::string detail;
  bool ok = true;
  for (const char* lam : {"1.5", "2", "3", "10"}) {
    const BigRational lambda = parse_rational(lam);
    ConstructionConfig cfg = base_config(lambda, delta, BigRational(1, 2), 12);
    cfg.branch = BranchPolicy::SeededRandom;
    cfg.seed = 1;
    const Certificate a = descend(cfg, p, sp);
    cfg.seed = 2;
    const Certificate b = descend(cfg, p, sp);
    const Precision wp = std::max(a.alpha.precision(), b.alpha.precision()) + 64;
    const RInterval window(enclose(lambda, wp).hi(), enclose(lambda + delta, wp).lo());
    const bool inside = window.contains(a.alpha) && window.contains(b.alpha);
    const bool distinct = !a.alpha.overlaps(b.alpha);
    const bool certified = a.densified_check.all_pass() && b.densified_check.all_pass();
    ok = ok && inside && distinct && certified;
    detail += std::string(detail.empty() ? "" : "; ") + "lambda=" + lam + " N=" +
              std::to_string(a.start) + (inside ? " inside" : " OUTSIDE") +
              (distinct ? " distinct" : " SAME") + (certified ? "" : " UNCERTIFIED");
  }
  return {ok, detail};
}

Outcome densification_contract() {
  const SequencePair sp = gen_exponents("geom:2", "zero", 12);
  const BigRational eps(1, 2);
  const DensifiedPair dp = densify(sp, to_bigreal(eps, 64));
  bool ratio = true;
  for (std::size_t i = 0; i + 1 < dp.size(); ++i) {
    ratio = ratio && to_rational(dp.q[i + 1]) <= (1 + eps) * to_rational(dp.q[i]);
  }
  bool steps = true;
  for (const InsertedRun& run : dp.runs) {
    const BigRational step = eps * to_rational(sp.q[run.original_index - 1]) / 2;
    for (std::size_t j = 0; j < run.count; ++j) {
      const std::size_t at = run.first_position - 1 + j;
      steps = steps && to_rational(dp.q[at]) - to_rational(dp.q[at - 1]) == step;
    }
  }
  bool extract = dp.origin_map.size() == sp.size();
  for (std::size_t k = 0; extract && k < sp.size(); ++k) {
    const std::size_t at = dp.origin_map[k] - 1;
    extract = dp.q[at] == sp.q[k] && dp.r[at] == sp.r[k] &&
              dp.q[at].to_hex() == sp.q[k].to_hex();
  }
  return {ratio && steps && extract,
          std::to_string(sp.size()) + " -> " + std::to_string(dp.size()) + " terms, ratio bound " +
              (ratio ? "holds" : "VIOLATED") + ", run steps " + (steps ? "exact" : "WRONG") +
              ", extraction " + (extract ? "bit-exact" : "MISMATCH")};
}

// First level at which the partial bound is within tolerance of the target
// and stays there, searched up to `limit`.
std::size_t settles_at(unsigned long m, unsigned long base, long offset, double target,
                       std::size_t limit) {
  const DimensionReport rep = falconer_bound(synthetic_levels(m, base, offset, limit));
  std::size_t at = 0;
  for (const DimensionRow& row : rep.rows) {
    if (std::abs(row.partial - target) <= kFalconerTolerance) {
      if (at == 0) at = row.n;
    } else {
      at = 0;
    }
  }
  return at;
}

Outcome falconer_oracle() {
  const double third = std::log(2.0) / std::log(3.0);
  // Middle third: m_n = 2, gap 3^-(n+1). Second family: m = 2, gap 4^-n.
  const DimensionReport a = falconer_bound(synthetic_levels(2, 3, 1, kFalconerLevel));
  const DimensionReport b = falconer_bound(synthetic_levels(2, 4, 0, kFalconerLevel));
  const double pa = a.rows.back().partial;
  const double pb = b.rows.back().partial;
  const bool ok = std::abs(pa - third) <= kFalconerTolerance && std::abs(pb - 0.5) <= kFalconerTolerance;
  return {ok, "level " + std::to_string(kFalconerLevel) + ": middle-third " + fmt(pa) + " vs " +
                  fmt(third) + " (off " + fmt(std::abs(pa - third), 3) + "), 4^-n family " +
                  fmt(pb) + " vs 0.5 (off " + fmt(std::abs(pb - 0.5), 3) + "); within " +
                  fmt(kFalconerTolerance) + " from level " +
                  std::to_string(settles_at(2, 3, 1, third, 5000)) + " and " +
                  std::to_string(settles_at(2, 4, 0, 0.5, 5000)) + " respectively"};
}

Outcome closed_form_chain() {
  const long double l2 = std::log(2.0L);
  const long double l25 = std::log(2.5L);
  const double cf_ref = static_cast<double>(l2 / (0.1L * l2 + l25));
  const double lb_ref = static_cast<double>(l2 / l25);
  const RInterval cf = closed_form_bound(2, BigRational(1, 2), BigRational(1, 10), 1);
  const RInterval lb = limit_bound(2, BigRational(1, 2));
  const double cfv = cf.lo().to_double();
  const double lbv = lb.lo().to_double();
  const bool values = std::abs(cfv - cf_ref) <= kClosedFormTolerance &&
                      std::abs(lbv - lb_ref) <= kClosedFormTolerance &&
                      std::abs(cfv - 0.7032) <= kClosedFormTolerance &&
                      std::abs(lbv - 0.7565) <= kClosedFormTolerance;

  // Deterministic sweep over lambda, delta, eps, eta.
  std::size_t ordered = 0;
  for (std::size_t i = 0; i < kSweepTuples; ++i) {
    const BigRational lambda(110 + 37 * static_cast<long>(i % 25), 100);
    const BigRational delta(1 + 13 * static_cast<long>(i % 17), 40);
    const BigRational eps(1 + static_cast<long>(i % 9), 20);
    const BigRational eta(1 + static_cast<long>(i % 10), 10);
    const auto le = certified_leq(closed_form_bound(lambda, delta, eps, eta), limit_bound(lambda, delta));
    if (le && *le) ++ordered;
  }

  // Tree partial bound for lambda=2, delta=0.5, eta=0.9, eps=0.1 on densified n^2.
  const SequencePair sp = gen_exponents("nsq", "zero", 45);
  Problem p;
  p.dp = densify(sp, to_bigreal(BigRational(1, 10), kSequencePrecision));
  p.es = default_schedule(p.dp);
  ConstructionConfig cfg = base_config(2, BigRational(1, 2), BigRational(9, 10), 190);
  cfg.max_tree_nodes = 4000;
  const CantorTree tree = enumerate_tree(cfg, p);
  const DimensionReport rep = falconer_bound(tree.level_stats());
  const double deepest = rep.rows.back().partial;
  const double anchor = closed_form_bound(2, BigRational(1, 2), BigRational(1, 10), BigRational(9, 10)).lo().to_double();
  const bool tree_ok = deepest >= anchor - kTreeSlack;

  return {values && ordered == kSweepTuples && tree_ok,
          "closed form " + fmt(cfv, 8) + " (ref " + fmt(cf_ref, 8) + "), limit " + fmt(lbv, 8) +
              " (ref " + fmt(lb_ref, 8) + "), ordering certified " + std::to_string(ordered) + "/" +
              std::to_string(kSweepTuples) + ", tree level " + std::to_string(rep.rows.back().n) +
              " partial " + fmt(deepest) + " vs closed form " + fmt(anchor) + " - " + fmt(kTreeSlack)};
}

Outcome pisot_oracle() {
  const BigReal five = BigReal::from_long(5);
  const BigReal one = BigReal::from_long(1);
  const RInterval phi(
      exact_ldexp(add(sqrt(five, Round::Down, kPisotPrecision), one, Round::Down, kPisotPrecision), -1),
      exact_ldexp(add(sqrt(five, Round::Up, kPisotPrecision), one, Round::Up, kPisotPrecision), -1));
  SequenceOptions warn;
  warn.gap_check = GapCheck::Warn;
  const SequencePair sp = gen_exponents("lin", "zero", kPisotLast, warn);
  const VerificationReport rep = verify(phi, sp.q, sp.r, {}, 2, kPisotLast);

  // Lucas numbers L_n = phi^n + psi^n with psi = -(phi - 1).
  BigInt prev = 2;
  BigInt cur = 1;
  const RInterval conj = add(phi, BigInt(-1), 4 * kPisotPrecision);
  RInterval conj_pow = conj;
  std::size_t ok = 0;
  double widest = 0;
  for (std::size_t n = 2; n <= kPisotLast; ++n) {
    const BigInt next = cur + prev;
    prev = cur;
    cur = next;
    conj_pow = mul(conj_pow, conj, 4 * kPisotPrecision);
    const VerifyRow& row = rep.rows[n - 2];
    const RInterval psi_n = n % 2 == 0 ? conj_pow : neg(conj_pow);
    const RInterval expected_power = sub(RInterval::from_integer(cur), psi_n, 4 * kPisotPrecision);
    // Agreement up to the width of the enclosures involved.
    const bool power_ok = row.power.overlaps(expected_power);
    const bool dist_ok = row.distance.overlaps(conj_pow);
    widest = std::max(widest, row.distance.width(64).to_double(Round::Up));
    if (power_ok && dist_ok) ++ok;
  }
  return {ok == kPisotLast - 1,
          std::to_string(ok) + "/" + std::to_string(kPisotLast - 1) +
              " exponents match the Lucas oracle, widest distance enclosure " + fmt(widest, 3)};
}

Outcome negative_control() {
  const SquareRun& run = square_run();
  if (run.exit_code != 0) return {false, "criterion 1 construction unavailable"};
  KvDocument doc = KvDocument::read_file(run.certificate.string());
  const RInterval alpha = certificate_alpha(doc);
  const Precision p = alpha.precision() + 16;
  const BigReal shift = exact_ldexp(alpha.width(p), 1);
  for (auto& s : doc.sections) {
    if (s.name != "result") continue;
    for (auto& [k, v] : s.entries) {
      if (k == "alpha_lo") v = hex(add(alpha.lo(), shift, Round::Nearest, p));
      if (k == "alpha_hi") v = hex(add(alpha.hi(), shift, Round::Nearest, p));
    }
  }
  const fs::path bad = work_dir() / "perturbed.cert";
  {
    std::ofstream f(bad);
    doc.write(f);
  }
  std::string log;
  const int code = cli_run({"verify", "--certificate", bad.string()}, &log);
  const auto failed = log.find("FAIL") != std::string::npos;
  return {code == 1 && failed, "perturbed certificate: verify exit " + std::to_string(code) +
                                   (failed ? ", failing levels reported" : ", no failing level")};
}

Outcome precision_honesty() {
  const SequencePair sp = gen_exponents("nsq", "zero", 21);
  const Problem p = problem_for(sp);
  ConstructionConfig cfg = base_config(3, 1, BigRational(1, 2), 20);
  const Certificate first = descend(cfg, p, sp);
  cfg.precision.initial = 2 * first.precision;
  const Certificate second = descend(cfg, p, sp);
  std::size_t nested = 0;
  const std::size_t levels = std::min(first.levels.size(), second.levels.size());
  for (std::size_t i = 0; i < levels; ++i) {
    const LevelRecord& a = first.levels[i];
    const LevelRecord& b = second.levels[i];
    if (a.n == b.n && a.label == b.label && a.outer.contains(b.outer)) ++nested;
  }
  const bool ok = levels == first.levels.size() && nested == levels && second.precision == 2 * first.precision;
  return {ok, std::to_string(nested) + "/" + std::to_string(levels) + " level enclosures at " +
                  std::to_string(second.precision) + " bits inside the " +
                  std::to_string(first.precision) + "-bit ones"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "constructive soundness", constructive_soundness},
      {2, "constant-target convergence", constant_target},
      {3, "density evidence", density_evidence},
      {4, "densification contract", densification_contract},
      {5, "Falconer oracle", falconer_oracle},
      {6, "closed-form chain", closed_form_chain},
      {7, "Pisot verifier oracle", pisot_oracle},
      {8, "negative control", negative_control},
      {9, "precision honesty", precision_honesty},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] criterion " << c.id << " " << c.name
              << ": " << o.detail << std::endl;
  }
  std::error_code ec;
  fs::remove_all(work_dir(), ec);
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
