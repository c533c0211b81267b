#include "powdist/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "powdist/error.hpp"
#include "powdist/precision.hpp"

namespace powdist {

const char* to_string(RowStatus s) noexcept {
  switch (s) {
    case RowStatus::Pass: return "pass";
    case RowStatus::Fail: return "FAIL";
    case RowStatus::Undecided: return "undecided";
    case RowStatus::Info: return "info";
  }
  return "?";
}

VerificationReport verify(const RInterval& alpha, const std::vector<BigReal>& q,
                          const std::vector<BigRational>& r,
                          const std::vector<std::optional<BigRational>>& thresholds,
                          std::size_t first, std::size_t last, Precision prec) {
  if (first == 0 || last < first || last > q.size() || last > r.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "verification range [" + std::to_string(first) + ", " +
                    std::to_string(last) + "] outside the sequence of length " +
                    std::to_string(q.size()));
  }
  static const BigReal one = BigReal::from_long(1);
  if (alpha.lo() <= one) {
    throw Error(ErrorCode::InvalidArgument, "alpha must exceed 1");
  }
  if (prec == 0) {
    BigReal q_max = q[first - 1];
    for (std::size_t n = first; n <= last; ++n) q_max = max(q_max, q[n - 1]);
    const Precision guard = std::max<Precision>(alpha.precision(), 64) + 32;
    prec = bits_for_power(q_max, alpha, guard);
  }

  VerificationReport rep;
  rep.precision = prec;
  for (std::size_t n = first; n <= last; ++n) {
    VerifyRow row;
    row.n = n;
    row.q = q[n - 1];
    row.r = r[n - 1];
    row.power = iv_pow(alpha, RInterval::point(row.q), Mode::Outward, prec);
    row.frac = frac_part(row.power, prec);
    row.distance = dist_nearest_int(sub(row.power, enclose(row.r, prec), prec), prec);
    if (n - 1 < thresholds.size() && thresholds[n - 1]) {
      row.threshold = enclose(*thresholds[n - 1], prec);
      if (row.distance.hi() < row.threshold->lo()) {
        row.status = RowStatus::Pass;
        ++rep.passed;
      } else if (row.distance.lo() >= row.threshold->hi()) {
        row.status = RowStatus::Fail;
        ++rep.failed;
        if (!rep.first_failure) rep.first_failure = n;
      } else {
        row.status = RowStatus::Undecided;
        ++rep.undecided;
        if (!rep.first_undecided) rep.first_undecided = n;
      }
    }
    rep.rows.push_back(std::move(row));
  }

  const std::size_t k = rep.rows.size();
  const std::size_t tail = k - std::max<std::size_t>(1, k / 3);
  for (std::size_t i = tail; i < k; ++i) {
    rep.max_tail_distance = std::max(
        rep.max_tail_distance, rep.rows[i].distance.hi().to_double(Round::Up));
  }
  for (std::size_t i = 1; i < k; ++i) {
    if (rep.rows[i - 1].distance.hi() < rep.rows[i].distance.hi()) {
      rep.distances_nonincreasing = false;
    }
  }
  return rep;
}

void require_decided(const VerificationReport& report) {
  if (report.first_undecided) {
    throw Error(ErrorCode::PrecisionExhausted,
                "alpha enclosure too wide to decide the distance bound",
                *report.first_undecided);
  }
}

namespace {

constexpr Precision kLogPrecision = 128;

double log_of(const BigInt& z) {
  return log(BigReal::from_integer(z), Round::Nearest, kLogPrecision)
      .to_double(Round::Nearest);
}

}  // namespace

DimensionReport falconer_bound(const std::vector<LevelStats>& levels) {
  if (levels.size() < 3) {
    throw Error(ErrorCode::InsufficientDepth,
                "the dimension bound needs at least 3 levels, got " +
                    std::to_string(levels.size()));
  }
  DimensionReport rep;
  std::optional<BigReal> running;
  for (const LevelStats& lv : levels) {
    if (lv.gap.sign() <= 0) {
      throw Error(ErrorCode::InvalidArgument, "level gaps must be positive", lv.n);
    }
    if (lv.count <= 0 || lv.children <= 0) {
      throw Error(ErrorCode::InvalidArgument, "level counts must be positive", lv.n);
    }
    DimensionRow row;
    row.n = lv.n;
    row.count = lv.count;
    row.children = lv.children;
    row.gap_measured = lv.gap;
    row.sampled = lv.sampled;
    if (running && !(lv.gap < *running)) {
      row.gap_substituted = true;
      rep.gap_monotone = false;
      row.gap_used = *running;
    } else {
      row.gap_used = lv.gap;
      running = lv.gap;
    }
    // -log(m gamma) = -log m - log gamma
    const double denom =
        -log_of(lv.children) -
        log(row.gap_used, Round::Nearest, kLogPrecision).to_double(Round::Nearest);
    const double numer = log_of(lv.count);
    if (denom <= 0) {
      row.partial_raw = std::numeric_limits<double>::infinity();
    } else {
      row.partial_raw = numer / denom;
    }
    row.partial = std::clamp(row.partial_raw, 0.0, 1.0);
    row.clamped = row.partial != row.partial_raw;
    rep.any_clamped = rep.any_clamped || row.clamped;
    rep.rows.push_back(std::move(row));
  }
  const std::size_t k = rep.rows.size();
  const std::size_t tail = k - std::max<std::size_t>(1, k / 3);
  rep.tail_from = rep.rows[tail].n;
  rep.liminf_estimate = rep.rows[tail].partial;
  for (std::size_t i = tail; i < k; ++i) {
    rep.liminf_estimate = std::min(rep.liminf_estimate, rep.rows[i].partial);
  }
  return rep;
}

std::vector<LevelStats> synthetic_levels(unsigned long m, unsigned long base,
                                         long offset, std::size_t levels) {
  if (m < 1 || base < 2) {
    throw Error(ErrorCode::InvalidArgument, "synthetic levels need m >= 1 and base >= 2");
  }
  std::vector<LevelStats> out;
  const BigReal b = BigReal::from_long(static_cast<long>(base));
  for (std::size_t n = 1; n <= levels; ++n) {
    LevelStats lv;
    lv.n = n;
    mpz_ui_pow_ui(lv.count.get_mpz_t(), m, n);
    lv.children = m;
    const long e = -(static_cast<long>(n) + offset);
    lv.gap = pow(b, BigReal::from_long(e), Round::Nearest, kLogPrecision);
    out.push_back(std::move(lv));
  }
  return out;
}

RInterval closed_form_bound(const BigRational& lambda, const BigRational& delta,
                            const BigRational& eps, const BigRational& eta,
                            Precision prec) {
  if (lambda <= 1 || delta <= 0 || eps <= 0 || eta <= 0 || eta > 1) {
    throw Error(ErrorCode::InvalidArgument,
                "closed form needs lambda > 1, delta > 0, eps > 0, eta in (0, 1]");
  }
  const RInterval ll = log(enclose(lambda, prec), prec);
  const RInterval lm = log(enclose(lambda + delta, prec), prec);
  const RInterval eta_ll = mul(enclose(eta, prec), ll, prec);
  return div(eta_ll, add(mul(enclose(eps, prec), eta_ll, prec), lm, prec), prec);
}

RInterval limit_bound(const BigRational& lambda, const BigRational& delta,
                      Precision prec) {
  if (lambda <= 1 || delta <= 0) {
    throw Error(ErrorCode::InvalidArgument, "limit bound needs lambda > 1, delta > 0");
  }
  return div(log(enclose(lambda, prec), prec),
             log(enclose(lambda + delta, prec), prec), prec);
}

BoxCountResult box_count(const std::vector<RInterval>& leaves,
                         const std::vector<BigReal>& scales) {
  if (leaves.empty()) {
    throw Error(ErrorCode::InsufficientDepth, "box counting needs at least one leaf");
  }
  if (scales.size() < 3) {
    throw Error(ErrorCode::InsufficientDepth, "box counting needs at least 3 scales");
  }
  BigReal smin = scales.front();
  BigReal smax = scales.front();
  for (const BigReal& s : scales) {
    if (s.sign() <= 0) throw Error(ErrorCode::InvalidArgument, "scales must be positive");
    smin = min(smin, s);
    smax = max(smax, s);
  }
  if (div(smax, smin, Round::Down, 64) < BigReal::from_long(100)) {
    throw Error(ErrorCode::InsufficientDepth, "scales must span at least two decades");
  }

  std::vector<const RInterval*> sorted;
  for (const RInterval& iv : leaves) sorted.push_back(&iv);
  std::sort(sorted.begin(), sorted.end(),
            [](const RInterval* a, const RInterval* b) { return a->lo() < b->lo(); });

  Precision prec = 64;
  for (const RInterval& iv : leaves) prec = std::max(prec, iv.precision());
  prec += 64;

  BoxCountResult out;
  out.scales = scales;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const BigReal& s : scales) {
    BigInt count = 0;
    std::optional<BigInt> covered_to;  // last box index already counted
    for (const RInterval* iv : sorted) {
      BigInt a = div(iv->lo(), s, Round::Down, prec).floor();
      BigInt b = div(iv->hi(), s, Round::Up, prec).ceil() - 1;
      if (b < a) b = a;
      if (covered_to && a <= *covered_to) a = *covered_to + 1;
      if (b >= a) count += b - a + 1;
      if (!covered_to || b > *covered_to) covered_to = b;
    }
    out.counts.push_back(count);
    xs.push_back(-log(s, Round::Nearest, kLogPrecision).to_double(Round::Nearest));
    ys.push_back(log_of(count));
  }

  const double k = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (out.intercept + out.slope * xs[i]);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / k);
  return out;
}

double star_discrepancy(std::vector<double> points) {
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "discrepancy of an empty point set");
  }
  for (const double x : points) {
    if (!std::isfinite(x) || x < 0 || x >= 1) {
      throw Error(ErrorCode::InvalidArgument, "points must lie in [0, 1)");
    }
  }
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double d = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    d = std::max({d, k / n - points[i], points[i] - (k - 1) / n});
  }
  return d;
}

}  // namespace powdist
