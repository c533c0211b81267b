#include "powdist/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "powdist/error.hpp"

namespace powdist {

namespace {

constexpr std::size_t kMaxInsertedTerms = 5'000'000;

std::pair<std::string, std::string> split_descriptor(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return {std::string(text), {}};
  return {std::string(text.substr(0, colon)),
          std::string(text.substr(colon + 1))};
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

unsigned long parse_count(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v > 0) return static_cast<unsigned long>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Parse,
              std::string("expected a positive integer for ") + what +
                  ", got '" + text + "'");
}

BigReal poly_term(const BigRational& coef, unsigned long n, unsigned long k,
                  Precision prec) {
  BigInt nk;
  mpz_ui_pow_ui(nk.get_mpz_t(), n, k);
  return exact_mul(to_bigreal(coef, prec), BigReal::from_integer(nk));
}

void check_strictly_increasing(const std::vector<BigReal>& q) {
  if (q.empty()) return;
  if (q.front().sign() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "q_1 must be positive", 1);
  }
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] <= q[i - 1]) {
      throw Error(ErrorCode::InvalidArgument,
                  "exponents must be strictly increasing", i + 1);
    }
  }
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

}  // namespace

BigRational reduce_target(const BigRational& r) {
  // k = floor(r + 1/2); r - k lies in [-1/2, 1/2).
  const BigRational shifted = r + BigRational(1, 2);
  BigInt k;
  mpz_fdiv_q(k.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  BigRational out = r - BigRational(k);
  out.canonicalize();
  return out;
}

bool gaps_look_divergent(const std::vector<BigReal>& q) {
  if (q.size() < 3) return true;
  std::vector<BigReal> gaps;
  gaps.reserve(q.size() - 1);
  for (std::size_t i = 1; i < q.size(); ++i) {
    gaps.push_back(exact_sub(q[i], q[i - 1]));
  }
  if (!(gaps.front() < gaps.back())) return false;
  for (std::size_t i = gaps.size() / 2 + 1; i < gaps.size(); ++i) {
    if (gaps[i] < gaps[i - 1]) return false;
  }
  return true;
}

SequencePair parse_sequence_text(std::istream& in, Precision precision) {
  SequencePair sp;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    std::istringstream fields(body);
    std::string qs;
    std::string rs;
    if (!(fields >> qs)) continue;
    if (!(fields >> rs)) rs = "0";
    std::string extra;
    if (fields >> extra) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": too many fields");
    }
    try {
      sp.q.push_back(to_bigreal(parse_rational(qs), precision));
      sp.r.push_back(reduce_target(parse_rational(rs)));
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  check_strictly_increasing(sp.q);
  return sp;
}

SequencePair read_sequence_file(const std::string& path, Precision precision) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open sequence file " + path);
  }
  SequencePair sp = parse_sequence_text(in, precision);
  sp.family = "file:" + path;
  sp.target = "file:" + path;
  return sp;
}

void write_sequence(std::ostream& out, const std::vector<BigReal>& q,
                    const std::vector<BigRational>& r) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    out << exact_decimal(q[i]) << '\t' << format_rational(r.at(i)) << '\n';
  }
}

SequencePair gen_exponents(std::string_view family, std::string_view target,
                           std::size_t count, const SequenceOptions& options) {
  if (count == 0) {
    throw Error(ErrorCode::InvalidArgument, "sequence count must be positive");
  }
  const Precision prec = options.precision;
  SequencePair sp;
  sp.family = std::string(family);
  sp.target = std::string(target);
  const auto [kind, args] = split_descriptor(family);

  std::vector<BigRational> file_targets;
  if (kind == "nsq" || kind == "pow") {
    const unsigned long k = kind == "nsq" ? 2 : parse_count(args, "pow:K");
    for (unsigned long n = 1; n <= count; ++n) {
      BigInt v;
      mpz_ui_pow_ui(v.get_mpz_t(), n, k);
      sp.q.push_back(BigReal::from_integer(v));
    }
  } else if (kind == "quad") {
    const auto parts = split_commas(args);
    if (parts.size() != 3) {
      throw Error(ErrorCode::Parse, "quad family needs quad:A,B,C");
    }
    const BigRational a = parse_rational(parts[0]);
    const BigRational b = parse_rational(parts[1]);
    const BigRational c = parse_rational(parts[2]);
    for (unsigned long n = 1; n <= count; ++n) {
      BigReal v = exact_add(poly_term(a, n, 2, prec), poly_term(b, n, 1, prec));
      sp.q.push_back(exact_add(v, to_bigreal(c, prec)));
    }
  } else if (kind == "lin") {
    const BigRational c = args.empty() ? BigRational(1) : parse_rational(args);
    for (unsigned long n = 1; n <= count; ++n) {
      sp.q.push_back(poly_term(c, n, 1, prec));
    }
  } else if (kind == "geom") {
    const unsigned long base = parse_count(args, "geom:B");
    if (base < 2) throw Error(ErrorCode::InvalidArgument, "geom base must be >= 2");
    for (unsigned long n = 1; n <= count; ++n) {
      BigInt v;
      mpz_ui_pow_ui(v.get_mpz_t(), base, n);
      sp.q.push_back(BigReal::from_integer(v));
    }
  } else if (kind == "file") {
    SequencePair from_file = read_sequence_file(args, prec);
    if (from_file.size() < count) {
      throw Error(ErrorCode::InvalidArgument,
                  "sequence file " + args + " has " +
                      std::to_string(from_file.size()) + " terms, need " +
                      std::to_string(count));
    }
    sp.q.assign(from_file.q.begin(), from_file.q.begin() + static_cast<long>(count));
    file_targets.assign(from_file.r.begin(), from_file.r.begin() + static_cast<long>(count));
  } else {
    throw Error(ErrorCode::Parse, "unknown sequence family '" + std::string(family) + "'");
  }
  check_strictly_increasing(sp.q);

  const auto [tkind, targs] = split_descriptor(target);
  if (tkind.empty() && kind == "file") {
    sp.r = std::move(file_targets);
    sp.target = "file:" + args;
  } else if (tkind == "zero" || (tkind.empty() && kind != "file")) {
    sp.r.assign(count, BigRational(0));
    sp.target = "zero";
  } else if (tkind == "const") {
    sp.r.assign(count, reduce_target(parse_rational(targs)));
  } else if (tkind == "file") {
    SequencePair from_file = read_sequence_file(targs, prec);
    if (from_file.size() < count) {
      throw Error(ErrorCode::InvalidArgument,
                  "target file " + targs + " is shorter than the sequence");
    }
    sp.r.assign(from_file.r.begin(), from_file.r.begin() + static_cast<long>(count));
  } else {
    throw Error(ErrorCode::Parse, "unknown target '" + std::string(target) + "'");
  }

  if (!gaps_look_divergent(sp.q)) {
    const std::string msg =
        "gaps q_{n+1} - q_n do not look divergent on the generated prefix (" +
        sp.family + ")";
    if (options.gap_check == GapCheck::Fail) {
      throw Error(ErrorCode::GapConditionSuspect, msg);
    }
    sp.warnings.push_back("GapConditionSuspect: " + msg);
  }
  return sp;
}

FillPolicy FillPolicy::parse(std::string_view text) {
  const auto [kind, args] = split_descriptor(text);
  if (kind == "zero") return {};
  if (kind == "copy-next") return {FillKind::CopyNext, BigRational(0)};
  if (kind == "const") {
    return {FillKind::Constant, reduce_target(parse_rational(args))};
  }
  throw Error(ErrorCode::Parse, "unknown fill policy '" + std::string(text) + "'");
}

DensifiedPair undensified(const SequencePair& sp) {
  DensifiedPair dp;
  dp.q = sp.q;
  dp.r = sp.r;
  dp.inserted.assign(sp.size(), false);
  dp.origin_map.resize(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) dp.origin_map[i] = i + 1;
  return dp;
}

DensifiedPair densify(const SequencePair& sp, const BigReal& eps,
                      const FillPolicy& fill) {
  if (eps.sign() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "densification eps must be positive");
  }
  check_strictly_increasing(sp.q);
  DensifiedPair dp;
  dp.eps = eps;
  dp.densified = true;
  if (sp.size() == 0) return dp;

  const BigReal one_plus_eps = exact_add(BigReal::from_long(1), eps);
  auto push = [&dp](BigReal q, BigRational r, bool inserted) {
    dp.q.push_back(std::move(q));
    dp.r.push_back(std::move(r));
    dp.inserted.push_back(inserted);
  };

  push(sp.q[0], sp.r[0], false);
  dp.origin_map.push_back(1);
  for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
    const BigReal& qn = sp.q[i];
    const BigReal& qn1 = sp.q[i + 1];
    if (qn1 > exact_mul(one_plus_eps, qn)) {
      const BigReal eps_qn = exact_mul(eps, qn);
      const BigReal step = exact_ldexp(eps_qn, -1);
      const BigReal window_lo = exact_sub(qn1, eps_qn);
      // Linear scan for the smallest m with q_N + m*step in the window.
      std::size_t m = 0;
      for (std::size_t j = 1;; ++j) {
        const BigReal t = exact_add(qn, exact_mul(step, static_cast<long>(j)));
        if (t > qn1) {
          throw Error(ErrorCode::InsertionInfeasible,
                      "no insertion count lands in [q_{N+1} - eps q_N, q_{N+1}]",
                      i + 1);
        }
        if (t >= window_lo) {
          m = j;
          break;
        }
        if (j > kMaxInsertedTerms) {
          throw Error(ErrorCode::InvalidArgument,
                      "densification would insert more than " +
                          std::to_string(kMaxInsertedTerms) + " terms",
                      i + 1);
        }
      }
      dp.runs.push_back({i + 1, dp.q.size() + 1, m, step});
      for (std::size_t j = 1; j <= m; ++j) {
        BigRational r = 0;
        if (fill.kind == FillKind::Constant) r = fill.constant;
        if (fill.kind == FillKind::CopyNext) r = sp.r[i + 1];
        push(exact_add(qn, exact_mul(step, static_cast<long>(j))), r, true);
      }
    }
    push(qn1, sp.r[i + 1], false);
    dp.origin_map.push_back(dp.q.size());
  }

  const DensifyCheck check = check_densified(sp, dp);
  if (!check.ok()) {
    throw Error(ErrorCode::InsertionInfeasible,
                "densified sequence violates its invariants",
                check.first_violation);
  }
  return dp;
}

DensifyCheck check_densified(const SequencePair& sp, const DensifiedPair& dp) {
  DensifyCheck c;
  auto flag = [&c](bool& field, std::size_t where) {
    field = false;
    if (c.first_violation == 0) c.first_violation = where;
  };
  if (dp.densified) {
    const BigReal one_plus_eps = exact_add(BigReal::from_long(1), dp.eps);
    for (std::size_t i = 0; i + 1 < dp.size(); ++i) {
      if (dp.q[i + 1] > exact_mul(one_plus_eps, dp.q[i])) {
        flag(c.ratio_bound, i + 1);
      }
    }
  }
  for (const InsertedRun& run : dp.runs) {
    const std::size_t origin_pos = dp.origin_map.at(run.original_index - 1);
    const BigReal& qn = dp.q.at(origin_pos - 1);
    if (!(run.step == exact_ldexp(exact_mul(dp.eps, qn), -1))) {
      flag(c.run_gaps_exact, run.first_position);
    }
    for (std::size_t k = 0; k < run.count; ++k) {
      const std::size_t pos = run.first_position + k;  // 1-based
      if (!(exact_sub(dp.q.at(pos - 1), dp.q.at(pos - 2)) == run.step)) {
        flag(c.run_gaps_exact, pos);
      }
    }
    const std::size_t last = run.first_position + run.count - 1;
    if (exact_sub(dp.q.at(last), dp.q.at(last - 1)) < run.step) {
      flag(c.final_gaps_ok, last + 1);
    }
  }
  if (dp.origin_map.size() != sp.size()) {
    flag(c.subsequence, 1);
  } else {
    for (std::size_t n = 0; n < sp.size(); ++n) {
      const std::size_t pos = dp.origin_map[n];
      if (pos == 0 || pos > dp.size() || !(dp.q[pos - 1] == sp.q[n]) ||
          dp.r[pos - 1] != sp.r[n] || dp.inserted[pos - 1]) {
        flag(c.subsequence, n + 1);
      }
    }
  }
  if (dp.size() >= 3) {
    const BigReal first = exact_sub(dp.q[1], dp.q[0]);
    const BigReal last = exact_sub(dp.q.back(), dp.q[dp.size() - 2]);
    c.gap_growth = first < last;
  }
  return c;
}

BigRational gap(const DensifiedPair& dp, std::size_t n) {
  return to_rational(exact_sub(dp.q.at(n), dp.q.at(n - 1)));
}

EpsilonSchedule default_schedule(const DensifiedPair& dp) {
  EpsilonSchedule es;
  for (std::size_t n = 1; n < dp.size(); ++n) {
    BigRational e = 1 / (2 * gap(dp, n));
    e.canonicalize();
    es.eps.push_back(e);
  }
  return es;
}

EpsilonSchedule make_schedule(std::string_view descriptor,
                              const DensifiedPair& dp) {
  const auto [kind, args] = split_descriptor(descriptor);
  if (kind == "default") return default_schedule(dp);
  EpsilonSchedule es;
  es.kind = ScheduleKind::Custom;
  es.descriptor = std::string(descriptor);
  if (kind == "const") {
    const BigRational c = parse_rational(args);
    if (c <= 0) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    es.eps.assign(dp.size() > 0 ? dp.size() - 1 : 0, c);
  } else if (kind == "power") {
    const auto parts = split_commas(args);
    if (parts.size() != 2) {
      throw Error(ErrorCode::Parse, "power schedule needs power:C,K");
    }
    const BigRational c = parse_rational(parts[0]);
    const BigRational k = parse_rational(parts[1]);
    if (c <= 0) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (k < 0 || k.get_den() != 1 || k > 64) {
      throw Error(ErrorCode::InvalidArgument,
                  "power schedule exponent K must be an integer in [0, 64]");
    }
    const unsigned long kk = k.get_num().get_ui();
    for (std::size_t n = 1; n < dp.size(); ++n) {
      BigInt nk;
      mpz_ui_pow_ui(nk.get_mpz_t(), n, kk);
      BigRational e = c / BigRational(nk);
      e.canonicalize();
      es.eps.push_back(e);
    }
  } else {
    throw Error(ErrorCode::Parse, "unknown eps schedule '" + std::string(descriptor) + "'");
  }
  return es;
}

BigInt branch_count(const DensifiedPair& dp, const BigRational& lambda,
                    const BigRational& eta, std::size_t n, Precision prec) {
  BigRational e = eta * gap(dp, n);
  e.canonicalize();
  return ceil_pow(lambda, e, prec);
}

bool level_condition(const DensifiedPair& dp, const EpsilonSchedule& es,
                     const BigRational& lambda, const BigRational& eta,
                     std::size_t n, Precision prec) {
  const BigRational g = gap(dp, n);
  BigRational two_eps = 2 * es.at(n);
  two_eps.canonicalize();
  const RInterval lhs =
      mul(enclose(two_eps, prec), pow_enclosure(lambda, g, prec), prec);
  const RInterval rhs = RInterval::from_integer(
      branch_count(dp, lambda, eta, n, prec) + 2);
  const auto ok = certified_leq(rhs, lhs);
  if (!ok) {
    throw PrecisionError(ErrorCode::Ambiguous,
                         "level condition undecided at " + std::to_string(prec) +
                             " bits",
                         n);
  }
  return *ok;
}

ScheduleValidation validate_schedule(const DensifiedPair& dp,
                                     const EpsilonSchedule& es,
                                     const BigRational& lambda,
                                     const BigRational& eta,
                                     std::size_t last,
                                     PrecisionPolicy policy) {
  if (lambda <= 1) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
  if (eta <= 0 || eta >= 1) {
    throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)");
  }
  if (last == 0) last = es.size();
  if (last > es.size() || last + 1 > dp.size()) {
    throw Error(ErrorCode::InvalidArgument, "validation range exceeds the prefix");
  }
  ScheduleValidation out;
  out.holds.resize(last);
  for (std::size_t n = 1; n <= last; ++n) {
    const BigReal g = exact_sub(dp.q[n], dp.q[n - 1]);
    const Precision start = policy.initial > 0
                                ? policy.initial
                                : bits_for_power(g, enclose(lambda, 64), 64);
    out.holds[n - 1] = with_escalation(start, policy.max_doublings,
        [&](Precision prec) {
          return level_condition(dp, es, lambda, eta, n, prec);
        });
  }
  std::size_t start = last + 1;
  while (start > 1 && out.holds[start - 2]) --start;
  if (start > last) {
    throw Error(ErrorCode::NoValidIndex,
                "level condition fails at the end of the prefix", last);
  }
  out.start = start;
  return out;
}

}  // namespace powdist
