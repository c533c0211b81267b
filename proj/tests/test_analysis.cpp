#include <cmath>
#include <random>

#include <doctest.h>

#include "powdist/analysis.hpp"
#include "powdist/cantor.hpp"
#include "powdist/error.hpp"
#include "powdist/rational.hpp"
#include "powdist/sequences.hpp"

using namespace powdist;

namespace {

RInterval golden(Precision prec) {
  const BigReal five = BigReal::from_long(5);
  const BigReal one = BigReal::from_long(1);
  const BigReal lo = exact_ldexp(add(sqrt(five, Round::Down, prec), one, Round::Down, prec), -1);
  const BigReal hi = exact_ldexp(add(sqrt(five, Round::Up, prec), one, Round::Up, prec), -1);
  return {lo, hi};
}

SequencePair linear(std::size_t count) {
  SequenceOptions warn;
  warn.gap_check = GapCheck::Warn;
  return gen_exponents("lin", "zero", count, warn);
}

double falconer_term(double log_count, double log_children, double log_gap) {
  return log_count / -(log_children + log_gap);
}

}  // namespace

TEST_CASE("verify integer powers of 2") {
  const SequencePair sp = linear(10);
  const VerificationReport rep =
      verify(RInterval::parse("2", 64), sp.q, sp.r, {}, 1, 10);
  REQUIRE(rep.rows.size() == 10);
  for (const VerifyRow& row : rep.rows) {
    CHECK(row.distance.lo().is_zero());
    CHECK(row.distance.hi().is_zero());
    CHECK(row.status == RowStatus::Info);
    REQUIRE_FALSE(row.frac.wrapped());
  }
  CHECK(rep.all_pass());
}

TEST_CASE("verify golden ratio powers against Lucas numbers") {
  const RInterval phi = golden(256);
  const SequencePair sp = linear(50);
  const VerificationReport rep = verify(phi, sp.q, sp.r, {}, 2, 50);

  // L_n = phi^n + psi^n with |psi| = phi - 1, so ||phi^n|| = (phi - 1)^n.
  BigInt lucas_prev = 2;
  BigInt lucas = 1;
  const RInterval conj = add(phi, BigInt(-1), 256);
  RInterval conj_pow = conj;
  for (std::size_t n = 2; n <= 50; ++n) {
    const BigInt next = lucas + lucas_prev;
    lucas_prev = lucas;
    lucas = next;
    conj_pow = mul(conj_pow, conj, 256);
    const VerifyRow& row = rep.rows[n - 2];
    INFO("n = " << n);
    // phi^n = L_n - psi^n and psi^n has sign (-1)^n.
    const RInterval psi_n = n % 2 == 0 ? conj_pow : neg(conj_pow);
    CHECK(row.power.overlaps(sub(RInterval::from_integer(lucas), psi_n, 256)));
    CHECK(row.distance.overlaps(conj_pow));
    CHECK(row.distance.width(64) <= BigReal::from_double(1e-60));
  }
}

TEST_CASE("verify thresholds and precision") {
  const SequencePair sp = linear(6);
  std::vector<std::optional<BigRational>> th(6, BigRational(1, 10));
  th[0] = std::nullopt;
  // alpha = 2.01: 2.01^2 = 4.0401 passes 0.1, 2.01^3 = 8.1206 fails.
  const VerificationReport rep = verify(RInterval::parse("2.01", 256), sp.q, sp.r, th, 1, 6);
  CHECK(rep.rows[0].status == RowStatus::Info);
  CHECK(rep.rows[1].status == RowStatus::Pass);
  CHECK(rep.rows[2].status == RowStatus::Fail);
  CHECK(rep.first_failure == std::optional<std::size_t>(3));

  // A wide enclosure cannot decide.
  const RInterval wide(BigReal::from_double(2.0), BigReal::from_double(2.02));
  const VerificationReport vague = verify(wide, sp.q, sp.r, th, 2, 3);
  CHECK(vague.undecided >= 1);
  CHECK_THROWS_AS(require_decided(vague), Error);

  CHECK_THROWS_AS(verify(RInterval::parse("0.5", 64), sp.q, sp.r, th, 1, 3), Error);
  CHECK_THROWS_AS(verify(RInterval::parse("2", 64), sp.q, sp.r, th, 2, 9), Error);
}

TEST_CASE("falconer bound on synthetic middle-third data") {
  const auto levels = synthetic_levels(2, 3, 1, 40);
  const DimensionReport rep = falconer_bound(levels);
  REQUIRE(rep.rows.size() == 40);
  const double target = std::log(2.0) / std::log(3.0);
  double previous = 1;
  for (const DimensionRow& row : rep.rows) {
    const double n = static_cast<double>(row.n);
    const double expect = falconer_term(n * std::log(2.0), std::log(2.0), -(n + 1) * std::log(3.0));
    CHECK(row.partial_raw == doctest::Approx(expect).epsilon(1e-12));
    if (row.n > 2) {
      CHECK(std::abs(row.partial - target) < std::abs(previous - target));
    }
    previous = row.partial;
  }
  CHECK(rep.gap_monotone);
  CHECK(rep.tail_from == 28);

  // Deep enough, the partial bounds close in on log 2 / log 3.
  const DimensionReport deep = falconer_bound(synthetic_levels(2, 3, 1, 3000));
  CHECK(std::abs(deep.rows.back().partial - target) < 1e-3);
}

TEST_CASE("falconer bound edge cases") {
  CHECK_THROWS_AS(falconer_bound(synthetic_levels(2, 3, 0, 2)), Error);

  const DimensionReport stalled = falconer_bound(synthetic_levels(1, 2, 0, 10));
  for (const DimensionRow& row : stalled.rows) CHECK(row.partial == 0);

  // A gap that grows is replaced by the running minimum and flagged.
  auto levels = synthetic_levels(2, 4, 0, 6);
  levels[3].gap = levels[1].gap;
  const DimensionReport jitter = falconer_bound(levels);
  CHECK_FALSE(jitter.gap_monotone);
  CHECK(jitter.rows[3].gap_substituted);
  CHECK(jitter.rows[3].gap_used == levels[2].gap);

  // The first level of a coarse family sits above 1 and gets clamped.
  const DimensionReport coarse = falconer_bound(synthetic_levels(8, 2, -2, 5));
  CHECK(coarse.any_clamped);
  for (const DimensionRow& row : coarse.rows) {
    CHECK(row.partial >= 0);
    CHECK(row.partial <= 1);
  }
}

TEST_CASE("closed-form bounds") {
  const RInterval cf = closed_form_bound(2, BigRational(1, 2), BigRational(1, 10), 1);
  const long double l2 = std::log(2.0L);
  const long double l25 = std::log(2.5L);
  const long double cf_ref = l2 / (0.1L * l2 + l25);
  CHECK(std::abs(cf.lo().to_double() - static_cast<double>(cf_ref)) < 1e-15);
  CHECK(std::abs(cf.lo().to_double() - 0.7032) < 1e-4);

  const RInterval lb = limit_bound(2, BigRational(1, 2));
  CHECK(std::abs(lb.lo().to_double() - static_cast<double>(l2 / l25)) < 1e-15);
  CHECK(std::abs(lb.lo().to_double() - 0.7565) < 1e-4);
  CHECK(cf.width(64) < BigReal::from_double(1e-30));

  // Shrinking delta drives the limit bound up toward 1.
  double prev = 0;
  for (int k = 1; k <= 12; ++k) {
    const BigRational delta(1, 1L << k);
    const double v = limit_bound(3, delta).lo().to_double();
    CHECK(v > prev);
    CHECK(v < 1);
    prev = v;
  }
  CHECK(prev > 0.999);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const BigRational lambda(101 + static_cast<long>(rng() % 1900), 100);
    const BigRational delta(1 + static_cast<long>(rng() % 500), 100);
    const BigRational eps(1 + static_cast<long>(rng() % 49), 100);
    const BigRational eta(1 + static_cast<long>(rng() % 100), 100);
    const auto lt = certified_leq(closed_form_bound(lambda, delta, eps, eta),
                                  limit_bound(lambda, delta));
    REQUIRE(lt.has_value());
    CHECK(*lt);
  }
  CHECK_THROWS_AS(closed_form_bound(1, 1, 1, 1), Error);
  CHECK_THROWS_AS(limit_bound(2, 0), Error);
}

TEST_CASE("box counting") {
  // Middle-third Cantor set at depth 12, scaled by 3^12 to integer endpoints.
  std::vector<RInterval> leaves;
  for (long k = 0; k < (1L << 12); ++k) {
    long pos = 0;
    long pow3 = 1;
    for (int d = 0; d < 12; ++d) {
      if (k >> d & 1) pos += 2 * pow3;
      pow3 *= 3;
    }
    leaves.emplace_back(BigReal::from_long(pos), BigReal::from_long(pos + 1));
  }
  std::vector<BigReal> scales;
  for (long s = 3; s <= 59049; s *= 3) scales.push_back(BigReal::from_long(s));
  const BoxCountResult bc = box_count(leaves, scales);
  CHECK(bc.counts.front() == 2048);
  CHECK(std::abs(bc.slope - std::log(2.0) / std::log(3.0)) < 0.02);
  CHECK(bc.residual < 0.05);

  // Aligned leaves of one length: one box each at that length.
  std::vector<RInterval> spaced;
  for (long k = 0; k < 50; ++k) spaced.emplace_back(BigReal::from_long(4 * k), BigReal::from_long(4 * k + 1));
  const BoxCountResult one = box_count(spaced, {BigReal::from_long(1), BigReal::from_long(20), BigReal::from_long(400)});
  CHECK(one.counts.front() == 50);

  const std::vector<RInterval> single{RInterval(BigReal::from_double(0.5), BigReal::from_double(0.5 + 1e-9))};
  std::vector<BigReal> fine;
  for (int e = 4; e <= 8; ++e) fine.push_back(BigReal::from_double(std::pow(10.0, -e)));
  CHECK(std::abs(box_count(single, fine).slope) < 0.05);

  CHECK_THROWS_AS(box_count(single, {BigReal::from_long(1), BigReal::from_long(2), BigReal::from_long(3)}), Error);
  CHECK_THROWS_AS(box_count(single, {BigReal::from_long(1), BigReal::from_long(1000)}), Error);
}

TEST_CASE("star discrepancy") {
  CHECK(star_discrepancy({0.0}) == 1.0);
  for (int n : {1, 2, 7, 100}) {
    std::vector<double> mids;
    for (int i = 1; i <= n; ++i) mids.push_back((2.0 * i - 1) / (2.0 * n));
    CHECK(star_discrepancy(mids) == doctest::Approx(1.0 / (2 * n)).epsilon(1e-12));
  }
  // Brute force over anchored boxes [0, t) on a fine grid.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) pts.push_back(std::uniform_real_distribution<double>(0, 1)(rng));
    const double d = star_discrepancy(pts);
    CHECK(d >= 1.0 / (2 * n) - 1e-15);
    CHECK(d <= 1.0);
    double brute = 0;
    for (double t : pts) {
      for (double u : {t, std::nextafter(t, 2.0)}) {
        double below = 0;
        for (double x : pts) below += x < u ? 1 : 0;
        brute = std::max(brute, std::abs(below / n - u));
      }
    }
    CHECK(d == doctest::Approx(brute).epsilon(1e-9));
  }
  CHECK_THROWS_AS(star_discrepancy({}), Error);
  CHECK_THROWS_AS(star_discrepancy({1.0}), Error);
}

TEST_CASE("fractional parts near a constant target are far from uniform") {
  Problem p;
  const SequencePair sp = gen_exponents("nsq", "const:0.3", 13);
  p.dp = undensified(sp);
  p.es = default_schedule(p.dp);
  ConstructionConfig cfg;
  cfg.depth = 12;
  const Certificate cert = descend(cfg, p, sp);
  const VerificationReport rep = verify(cert.alpha, sp.q, sp.r, {}, cert.start, 12);
  std::vector<double> fracs;
  for (const VerifyRow& row : rep.rows) {
    REQUIRE_FALSE(row.frac.wrapped());
    fracs.push_back(row.frac.value->midpoint(64).to_double());
    CHECK(std::abs(fracs.back() - 0.3) < 0.1);
  }
  CHECK(star_discrepancy(fracs) > 0.6);

  // e^n mod 1 for n <= 200 spreads out.
  const RInterval e = exp(RInterval::from_integer(1), 1024);
  const SequencePair lin = linear(200);
  std::vector<double> generic;
  for (const VerifyRow& row : verify(e, lin.q, lin.r, {}, 1, 200).rows) {
    REQUIRE_FALSE(row.frac.wrapped());
    generic.push_back(row.frac.value->midpoint(64).to_double());
  }
  CHECK(star_discrepancy(generic) < 0.2);
}
