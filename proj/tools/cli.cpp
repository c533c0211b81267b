#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "powdist/analysis.hpp"
#include "powdist/cantor.hpp"
#include "powdist/error.hpp"
#include "powdist/io.hpp"
#include "powdist/sequences.hpp"

namespace powdist::cli {

namespace {

struct SequenceArgs {
  std::string family = "nsq";
  std::string target = "zero";
  std::size_t count = 0;  // 0 = as many as the command needs
  std::string densify_eps;
  std::string fill = "zero";
  std::string schedule = "default";
};

struct ConstructArgs {
  SequenceArgs seq;
  std::string lambda = "3";
  std::string delta = "1";
  std::string eta = "1/2";
  std::size_t depth = 10;
  std::string branch = "leftmost";
  std::uint64_t seed = 0;
  int max_doublings = default_max_doublings();
  std::size_t precision = 0;
  int digits = 50;
  std::string out;
  std::string tree;
  std::size_t max_tree_nodes = 20000;
};

struct VerifyArgs {
  SequenceArgs seq;
  std::string alpha;
  std::size_t alpha_precision = 256;
  std::string certificate;
  std::size_t from = 1;
  std::size_t to = 0;
  std::string threshold = "default";
  std::string out;
};

struct DimensionArgs {
  std::string tree;
  std::string synthetic;
  std::size_t levels = 40;
  std::string lambda;
  std::string delta;
  std::string eta;
  std::string eps;
  std::string csv;
  std::string out;
  std::string export_path;
};

struct DensifyArgs {
  SequenceArgs seq;
  std::string eps = "0.5";
  std::string gap_check = "fail";
  std::string out;
};

struct DiscrepancyArgs {
  SequenceArgs seq;
  std::string input;
  std::string alpha;
  std::size_t alpha_precision = 256;
  std::size_t from = 1;
  std::size_t to = 0;
};

void add_sequence_options(CLI::App* app, SequenceArgs& s) {
  app->add_option("--family", s.family, "nsq, pow:K, quad:A,B,C, lin[:C], geom:B, file:PATH")
      ->capture_default_str();
  app->add_option("--target", s.target, "zero, const:K or file:PATH")->capture_default_str();
  app->add_option("--count", s.count, "number of original sequence terms");
  app->add_option("--densify-eps", s.densify_eps, "densify with this eps before use");
  app->add_option("--fill", s.fill, "targets of inserted terms: zero, const:C, copy-next")
      ->capture_default_str();
  app->add_option("--schedule", s.schedule, "eps_n schedule: default, const:C, power:C,K")
      ->capture_default_str();
}

struct Built {
  SequencePair sp;
  Problem problem;
};

Built build_problem(const SequenceArgs& s, std::size_t needed, GapCheck gap_check) {
  SequenceOptions opt;
  opt.gap_check = gap_check;
  const std::size_t count = s.count > 0 ? s.count : needed;
  Built b;
  b.sp = gen_exponents(s.family, s.target, count, opt);
  if (s.densify_eps.empty()) {
    b.problem.dp = undensified(b.sp);
  } else {
    const BigRational eps = parse_rational(s.densify_eps);
    if (eps <= 0) throw Error(ErrorCode::InvalidArgument, "densify eps must be positive");
    b.problem.dp =
        densify(b.sp, to_bigreal(eps, kSequencePrecision), FillPolicy::parse(s.fill));
  }
  b.problem.es = make_schedule(s.schedule, b.problem.dp);
  return b;
}

std::vector<std::pair<std::string, std::string>> sequence_entries(const SequenceArgs& s,
                                                                  std::size_t count) {
  return {
      {"family", s.family},
      {"target", s.target},
      {"count", std::to_string(count)},
      {"densify_eps", s.densify_eps.empty() ? "none" : s.densify_eps},
      {"fill", s.fill},
      {"schedule", s.schedule},
  };
}

// Writes to the named file, or to `fallback` when the name is empty or "-".
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  fn(f);
}

RInterval parse_alpha(const std::string& text, Precision prec) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return RInterval::parse(text, prec);
  return {BigReal::parse(text.substr(0, comma), prec, Round::Down),
          BigReal::parse(text.substr(comma + 1), prec, Round::Up)};
}

int report_exit(const VerificationReport& rep) {
  if (rep.failed > 0) return kCertifiedFailure;
  if (rep.undecided > 0) return kPrecisionOrFeasibility;
  return kOk;
}

void print_verify_summary(std::ostream& err, const std::string& what,
                          const VerificationReport& rep) {
  err << what << ": " << rep.passed << " passed, " << rep.failed << " failed, "
      << rep.undecided << " undecided of " << rep.rows.size() << " rows at "
      << rep.precision << " bits";
  if (rep.first_failure) err << "; first failure at index " << *rep.first_failure;
  if (rep.first_undecided) err << "; first undecided index " << *rep.first_undecided;
  err << '\n';
}

int cmd_densify(const DensifyArgs& a, std::ostream& out, std::ostream& err) {
  SequenceOptions opt;
  opt.gap_check = a.gap_check == "warn" ? GapCheck::Warn : GapCheck::Fail;
  const std::size_t count = a.seq.count > 0 ? a.seq.count : 12;
  const SequencePair sp = gen_exponents(a.seq.family, a.seq.target, count, opt);
  for (const std::string& w : sp.warnings) err << "warning: " << w << '\n';
  const BigRational eps = parse_rational(a.eps);
  if (eps <= 0) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const DensifiedPair dp =
      densify(sp, to_bigreal(eps, kSequencePrecision), FillPolicy::parse(a.seq.fill));
  const DensifyCheck c = check_densified(sp, dp);
  emit(a.out, out, [&](std::ostream& o) {
    o << "# densified " << sp.family << " (" << sp.size() << " terms) with eps "
      << a.eps << ": " << dp.size() << " terms\n";
    write_sequence(o, dp.q, dp.r);
  });
  err << "original terms: " << sp.size() << "\ndensified terms: " << dp.size()
      << "\ninserted runs: " << dp.runs.size() << "\nratio bound: "
      << (c.ratio_bound ? "ok" : "VIOLATED") << "\nrun gaps exact: "
      << (c.run_gaps_exact ? "ok" : "VIOLATED") << "\nfinal gaps: "
      << (c.final_gaps_ok ? "ok" : "VIOLATED") << "\nsubsequence: "
      << (c.subsequence ? "ok" : "VIOLATED") << "\ngap growth on prefix: "
      << (c.gap_growth ? "yes" : "no") << '\n';
  return c.ok() ? kOk : kCertifiedFailure;
}

ConstructionConfig construction_config(const ConstructArgs& a) {
  ConstructionConfig cfg;
  cfg.lambda = parse_rational(a.lambda);
  cfg.delta = parse_rational(a.delta);
  cfg.eta = parse_rational(a.eta);
  cfg.depth = a.depth;
  cfg.branch = parse_branch_policy(a.branch);
  cfg.seed = a.seed;
  cfg.max_tree_nodes = a.max_tree_nodes;
  cfg.precision.initial = static_cast<Precision>(a.precision);
  cfg.precision.max_doublings = a.max_doublings;
  cfg.digits = a.digits;
  cfg.validate();
  return cfg;
}

int cmd_construct(const ConstructArgs& a, std::ostream& out, std::ostream& err) {
  const ConstructionConfig cfg = construction_config(a);
  const Built b = build_problem(a.seq, cfg.depth + 1, GapCheck::Fail);
  const Certificate cert = descend(cfg, b.problem, b.sp);

  auto config = std::vector<std::pair<std::string, std::string>>{
      {"lambda", format_rational(cfg.lambda)},
      {"delta", format_rational(cfg.delta)},
      {"eta", format_rational(cfg.eta)},
      {"depth", std::to_string(cfg.depth)},
      {"branch", to_string(cfg.branch)},
      {"seed", std::to_string(cfg.seed)},
      {"digits", std::to_string(cfg.digits)},
  };
  for (auto& e : sequence_entries(a.seq, b.sp.size())) config.push_back(e);
  KvDocument doc = certificate_document(cert, config);
  emit(a.out, out, [&](std::ostream& o) { doc.write(o); });

  err << "start level N = " << cert.start << ", depth " << cfg.depth << ", "
      << cert.precision << " bits\nalpha = " << certified_decimal(cert.alpha, cfg.digits).text
      << '\n';
  print_verify_summary(err, "densified levels", cert.densified_check);
  print_verify_summary(err, "original indices", cert.original_check);

  if (!a.tree.empty()) {
    const CantorTree tree = enumerate_tree(cfg, b.problem);
    emit(a.tree, out, [&](std::ostream& o) { write_tree(o, tree); });
    err << "tree: " << tree.levels.size() << " levels written to " << a.tree << '\n';
  }
  const int densified = report_exit(cert.densified_check);
  const int original = report_exit(cert.original_check);
  if (densified == kCertifiedFailure || original == kCertifiedFailure) return kCertifiedFailure;
  return std::max(densified, original);
}

std::vector<std::optional<BigRational>> thresholds_for(const std::string& kind,
                                                       const DensifiedPair& dp) {
  std::vector<std::optional<BigRational>> out(dp.size());
  if (kind == "none") return out;
  const EpsilonSchedule es = make_schedule(kind, dp);
  for (std::size_t n = 1; n <= es.size(); ++n) out[n - 1] = es.at(n);
  return out;
}

int verify_certificate(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const KvDocument doc = KvDocument::read_file(a.certificate);
  const auto& cfg = doc.at("config");
  const auto& res = doc.at("result");
  SequenceArgs s;
  s.family = cfg.at("family");
  s.target = cfg.at("target");
  s.count = std::stoul(cfg.at("count"));
  s.densify_eps = cfg.at("densify_eps") == "none" ? "" : cfg.at("densify_eps");
  s.fill = cfg.at("fill");
  s.schedule = cfg.at("schedule");
  const std::size_t depth = std::stoul(cfg.at("depth"));
  const std::size_t start = std::stoul(res.at("start_level"));
  const BigRational lambda = parse_rational(cfg.at("lambda"));
  const BigRational delta = parse_rational(cfg.at("delta"));

  const Built b = build_problem(s, depth + 1, GapCheck::Warn);
  const RInterval alpha = certificate_alpha(doc);
  if (start < 1 || start > depth || b.problem.es.size() < depth) {
    throw Error(ErrorCode::Parse, "certificate level range does not fit its sequence");
  }

  const Precision wp = std::max<Precision>(alpha.precision(), 64) + 64;
  const RInterval window(enclose(lambda, wp).hi(), enclose(lambda + delta, wp).lo());
  const bool in_window = window.contains(alpha);
  err << "alpha inside [lambda, lambda + delta]: " << (in_window ? "yes" : "NO") << '\n';

  std::vector<std::optional<BigRational>> eps(b.problem.dp.size());
  for (std::size_t n = start; n <= depth; ++n) eps[n - 1] = b.problem.es.at(n);
  const VerificationReport dens =
      verify(alpha, b.problem.dp.q, b.problem.dp.r, eps, start, depth);

  std::vector<std::optional<BigRational>> orig_eps(b.sp.size());
  std::size_t last = 0;
  for (std::size_t k = 1; k <= b.sp.size(); ++k) {
    const std::size_t pos = b.problem.dp.origin_map[k - 1];
    if (pos > depth) break;
    last = k;
    if (pos >= start) orig_eps[k - 1] = b.problem.es.at(pos);
  }
  std::optional<VerificationReport> orig;
  if (last > 0) orig = verify(alpha, b.sp.q, b.sp.r, orig_eps, 1, last);

  emit(a.out, out, [&](std::ostream& o) {
    o << "# densified indices " << start << ".." << depth << '\n';
    write_verification_csv(o, dens);
    if (orig) {
      o << "# original indices 1.." << last << '\n';
      write_verification_csv(o, *orig);
    }
  });
  print_verify_summary(err, "densified levels", dens);
  if (orig) print_verify_summary(err, "original indices", *orig);

  if (!in_window) return kCertifiedFailure;
  int code = report_exit(dens);
  if (orig) {
    const int o = report_exit(*orig);
    if (o == kCertifiedFailure || code == kCertifiedFailure) return kCertifiedFailure;
    code = std::max(code, o);
  }
  return code;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.certificate.empty()) return verify_certificate(a, out, err);
  if (a.alpha.empty()) throw Error(ErrorCode::InvalidArgument, "verify needs --alpha or --certificate");
  const RInterval alpha = parse_alpha(a.alpha, static_cast<Precision>(a.alpha_precision));
  const std::size_t to = a.to > 0 ? a.to : (a.seq.count > 0 ? a.seq.count : 10);
  // One extra term so eps_to exists under the default schedule.
  const Built b = build_problem(a.seq, to + 1, GapCheck::Warn);
  if (to > b.problem.dp.size()) {
    throw Error(ErrorCode::InvalidArgument, "--to exceeds the sequence length");
  }
  const auto thresholds = thresholds_for(a.threshold, b.problem.dp);
  const VerificationReport rep =
      verify(alpha, b.problem.dp.q, b.problem.dp.r, thresholds, a.from, to);
  emit(a.out, out, [&](std::ostream& o) { write_verification_csv(o, rep); });
  print_verify_summary(err, "verify", rep);
  return report_exit(rep);
}

std::vector<BigReal> box_scales(const std::vector<RInterval>& leaves) {
  const BigReal span = sub(leaves.back().hi(), leaves.front().lo(), Round::Down, 128);
  BigReal widest = leaves.front().width(128);
  for (const RInterval& iv : leaves) widest = max(widest, iv.width(128));
  const double ratio = div(span, widest, Round::Down, 64).to_double(Round::Down);
  std::vector<BigReal> scales;
  if (!(ratio >= 2000)) return scales;
  // Eight geometric scales between span/2 and 10 * widest.
  const BigReal top = exact_ldexp(span, -1);
  const double step = std::pow(ratio / 20.0, 1.0 / 7.0);
  for (int i = 0; i < 8; ++i) {
    scales.push_back(div(top, BigReal::from_double(std::pow(step, i)), Round::Nearest, 128));
  }
  return scales;
}

int cmd_dimension(const DimensionArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<LevelStats> stats;
  std::optional<TreeExport> tree;
  if (!a.synthetic.empty()) {
    unsigned long m = 0;
    unsigned long base = 0;
    long offset = 0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(a.synthetic);
    if (!(in >> m >> c1 >> base >> c2 >> offset) || c1 != ',' || c2 != ',') {
      throw Error(ErrorCode::Parse, "--synthetic expects m,base,offset");
    }
    stats = synthetic_levels(m, base, offset, a.levels);
    if (!a.export_path.empty()) {
      emit(a.export_path, out, [&](std::ostream& o) { write_tree(o, stats); });
    }
  } else if (!a.tree.empty()) {
    std::ifstream in(a.tree);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + a.tree);
    tree = read_tree(in);
    stats = tree->stats;
  } else {
    throw Error(ErrorCode::InvalidArgument, "dimension needs --tree or --synthetic");
  }

  const DimensionReport rep = falconer_bound(stats);
  if (!a.csv.empty()) emit(a.csv, out, [&](std::ostream& o) { write_dimension_csv(o, rep); });

  KvDocument doc;
  auto& s = doc.add("dimension");
  std::ostringstream v;
  v.precision(10);
  v << rep.liminf_estimate;
  s.entries = {
      {"levels", std::to_string(rep.rows.size())},
      {"liminf_estimate", v.str()},
      {"tail_from_level", std::to_string(rep.tail_from)},
      {"final_partial_bound", std::to_string(rep.rows.back().partial)},
      {"gap_monotone", rep.gap_monotone ? "yes" : "no (running minimum substituted)"},
      {"clamped", rep.any_clamped ? "yes" : "no"},
  };
  if (!a.lambda.empty() && !a.delta.empty()) {
    const BigRational lambda = parse_rational(a.lambda);
    const BigRational delta = parse_rational(a.delta);
    const RInterval lb = limit_bound(lambda, delta);
    s.entries.emplace_back("limit_bound", certified_decimal(lb, 12).text);
    if (!a.eta.empty() && !a.eps.empty()) {
      const RInterval cf = closed_form_bound(lambda, delta, parse_rational(a.eps),
                                             parse_rational(a.eta));
      s.entries.emplace_back("closed_form_bound", certified_decimal(cf, 12).text);
      s.entries.emplace_back("final_minus_closed_form",
                             std::to_string(rep.rows.back().partial -
                                            cf.lo().to_double(Round::Down)));
    }
  }
  if (tree) {
    // Box counting on the deepest level that was fully materialized.
    for (std::size_t i = tree->leaves.size(); i-- > 0;) {
      const auto& leaves = tree->leaves[i];
      const bool sampled = std::any_of(stats.begin(), stats.end(), [&](const LevelStats& st) {
        return st.n == tree->level_ids[i] && st.sampled;
      });
      if (leaves.size() < 2 || sampled) continue;
      const auto scales = box_scales(leaves);
      if (scales.empty()) break;
      const BoxCountResult bc = box_count(leaves, scales);
      s.entries.emplace_back("box_count_level", std::to_string(tree->level_ids[i]));
      s.entries.emplace_back("box_count_slope", std::to_string(bc.slope));
      s.entries.emplace_back("box_count_residual", std::to_string(bc.residual));
      break;
    }
  }
  emit(a.out, out, [&](std::ostream& o) { doc.write(o); });
  err << "liminf estimate " << rep.liminf_estimate << " over levels " << rep.tail_from
      << ".." << rep.rows.back().n << '\n';
  return kOk;
}

int cmd_discrepancy(const DiscrepancyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> points;
  if (!a.input.empty()) {
    std::ifstream in(a.input);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + a.input);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      std::istringstream f(hash == std::string::npos ? line : line.substr(0, hash));
      double x = 0;
      if (f >> x) points.push_back(x);
    }
  } else if (!a.alpha.empty()) {
    const RInterval alpha = parse_alpha(a.alpha, static_cast<Precision>(a.alpha_precision));
    const std::size_t to = a.to > 0 ? a.to : (a.seq.count > 0 ? a.seq.count : 100);
    const Built b = build_problem(a.seq, to, GapCheck::Warn);
    const VerificationReport rep =
        verify(alpha, b.problem.dp.q, b.problem.dp.r, {}, a.from, to);
    std::size_t wrapped = 0;
    for (const VerifyRow& row : rep.rows) {
      if (row.frac.wrapped()) {
        ++wrapped;
        continue;
      }
      const RInterval& f = *row.frac.value;
      if (f.width(64) > BigReal::from_double(1e-6)) {
        throw Error(ErrorCode::PrecisionExhausted,
                    "fractional part not resolved to 1e-6", row.n);
      }
      points.push_back(std::min(f.midpoint(64).to_double(Round::Nearest),
                                std::nextafter(1.0, 0.0)));
    }
    if (wrapped > 0) err << wrapped << " fractional parts straddle an integer; skipped\n";
  } else {
    throw Error(ErrorCode::InvalidArgument, "discrepancy needs --input or --alpha");
  }
  const double d = star_discrepancy(points);
  std::ostringstream v;
  v.precision(12);
  v << d;
  KvDocument doc;
  doc.add("discrepancy").entries = {{"points", std::to_string(points.size())},
                                    {"star_discrepancy", v.str()}};
  doc.write(out);
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse:
    case ErrorCode::InvalidArgument:
      return kUsage;
    default:
      return kPrecisionOrFeasibility;
  }
}

// Flat key = value config: keys are long flag names without dashes. Values
// from the file are appended only for flags absent from the command line.
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const CLI::App* sub) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Parse,
                  path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string value = strip(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (sub->get_option_no_throw(flag) == nullptr) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(line_no) +
                                        ": unknown key '" + key + "' for " + sub->get_name());
    }
    const bool given = std::any_of(out.begin(), out.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      out.push_back(flag);
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constructs reals whose powers approach prescribed targets modulo 1", "powdist"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "powdist 0.1.0");
  app.add_option("--config", "flat key = value file with flag defaults");

  DensifyArgs da;
  auto* densify_cmd = app.add_subcommand("densify", "Densify an exponent sequence");
  add_sequence_options(densify_cmd, da.seq);
  densify_cmd->add_option("--eps", da.eps, "densification parameter")->capture_default_str();
  densify_cmd->add_option("--gap-check", da.gap_check, "warn or fail on non-divergent gaps")
      ->check(CLI::IsMember({"warn", "fail"}))
      ->capture_default_str();
  densify_cmd->add_option("--out", da.out, "output sequence file (default stdout)");

  ConstructArgs ca;
  auto* construct_cmd = app.add_subcommand("construct", "Construct and certify alpha");
  add_sequence_options(construct_cmd, ca.seq);
  construct_cmd->add_option("--lambda", ca.lambda, "window start, > 1")->capture_default_str();
  construct_cmd->add_option("--delta", ca.delta, "window length")->capture_default_str();
  construct_cmd->add_option("--eta", ca.eta, "branch exponent in (0, 1)")->capture_default_str();
  construct_cmd->add_option("--depth", ca.depth, "last sequence index constructed")
      ->capture_default_str();
  construct_cmd->add_option("--branch", ca.branch, "leftmost, midmost or random")
      ->capture_default_str();
  construct_cmd->add_option("--seed", ca.seed, "seed for random branching")->capture_default_str();
  construct_cmd->add_option("--max-doublings", ca.max_doublings, "precision doublings allowed")
      ->capture_default_str();
  construct_cmd->add_option("--precision", ca.precision, "starting precision in bits (0 = auto)");
  construct_cmd->add_option("--digits", ca.digits, "certified decimal digits of alpha")
      ->capture_default_str();
  construct_cmd->add_option("--out", ca.out, "certificate file (default stdout)");
  construct_cmd->add_option("--tree", ca.tree, "also enumerate the tree and export it here");
  construct_cmd->add_option("--max-tree-nodes", ca.max_tree_nodes, "node budget for --tree")
      ->capture_default_str();

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Recompute distances for an alpha enclosure");
  add_sequence_options(verify_cmd, va.seq);
  verify_cmd->add_option("--alpha", va.alpha, "decimal value or lo,hi");
  verify_cmd->add_option("--alpha-precision", va.alpha_precision, "bits for parsing --alpha")
      ->capture_default_str();
  verify_cmd->add_option("--certificate", va.certificate, "certificate file to re-check");
  verify_cmd->add_option("--from", va.from, "first index")->capture_default_str();
  verify_cmd->add_option("--to", va.to, "last index");
  verify_cmd->add_option("--threshold", va.threshold, "none, default, const:C or power:C,K")
      ->capture_default_str();
  verify_cmd->add_option("--out", va.out, "CSV report (default stdout)");

  DimensionArgs ma;
  auto* dim_cmd = app.add_subcommand("dimension", "Hausdorff dimension lower bound");
  dim_cmd->add_option("--tree", ma.tree, "tree export file");
  dim_cmd->add_option("--synthetic", ma.synthetic, "m,base,offset: m^n intervals, gaps base^-(n+offset)");
  dim_cmd->add_option("--levels", ma.levels, "levels of synthetic data")->capture_default_str();
  dim_cmd->add_option("--lambda", ma.lambda, "for closed-form comparison");
  dim_cmd->add_option("--delta", ma.delta, "for closed-form comparison");
  dim_cmd->add_option("--eta", ma.eta, "for closed-form comparison");
  dim_cmd->add_option("--eps", ma.eps, "for closed-form comparison");
  dim_cmd->add_option("--csv", ma.csv, "per-level CSV output");
  dim_cmd->add_option("--out", ma.out, "summary output (default stdout)");
  dim_cmd->add_option("--export", ma.export_path, "write synthetic data as a tree export");

  DiscrepancyArgs ra;
  auto* disc_cmd = app.add_subcommand("discrepancy", "Star discrepancy of fractional parts");
  add_sequence_options(disc_cmd, ra.seq);
  disc_cmd->add_option("--input", ra.input, "file with one value in [0, 1) per line");
  disc_cmd->add_option("--alpha", ra.alpha, "use {alpha^q_n} instead");
  disc_cmd->add_option("--alpha-precision", ra.alpha_precision, "bits for parsing --alpha")
      ->capture_default_str();
  disc_cmd->add_option("--from", ra.from, "first index")->capture_default_str();
  disc_cmd->add_option("--to", ra.to, "last index");

  try {
    std::vector<std::string> merged = args;
    if (!args.empty()) {
      if (const CLI::App* sub = app.get_subcommand_no_throw(args.front())) {
        merged = merge_config(args, sub);
      }
    }
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (densify_cmd->parsed()) return cmd_densify(da, out, err);
    if (construct_cmd->parsed()) return cmd_construct(ca, out, err);
    if (verify_cmd->parsed()) return cmd_verify(va, out, err);
    if (dim_cmd->parsed()) return cmd_dimension(ma, out, err);
    if (disc_cmd->parsed()) return cmd_discrepancy(ra, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace powdist::cli
