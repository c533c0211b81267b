#include "powdist/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "powdist/error.hpp"

namespace powdist {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int digits_for(Precision prec) {
  return static_cast<int>(std::ceil(static_cast<double>(prec) * 0.30103)) + 2;
}

}  // namespace

const std::string* KvDocument::Section::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& KvDocument::Section::at(const std::string& key) const {
  if (const std::string* v = find(key)) return *v;
  throw Error(ErrorCode::Parse, "missing key '" + key + "' in section [" + name + "]");
}

KvDocument::Section& KvDocument::add(std::string name) {
  sections.push_back({std::move(name), {}});
  return sections.back();
}

const KvDocument::Section* KvDocument::find(const std::string& name) const {
  for (const Section& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const KvDocument::Section& KvDocument::at(const std::string& name) const {
  if (const Section* s = find(name)) return *s;
  throw Error(ErrorCode::Parse, "missing section [" + name + "]");
}

KvDocument KvDocument::parse(std::istream& in) {
  KvDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (doc.sections.empty()) doc.header.push_back(trim(t.substr(1)));
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad section header");
      }
      doc.add(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Parse,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    if (doc.sections.empty()) doc.add("");
    doc.sections.back().entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return doc;
}

KvDocument KvDocument::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return parse(in);
}

void KvDocument::write(std::ostream& out) const {
  for (const std::string& h : header) out << "# " << h << '\n';
  bool first = true;
  for (const Section& s : sections) {
    if (!first || !header.empty()) out << '\n';
    first = false;
    if (!s.name.empty()) out << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) out << k << " = " << v << '\n';
  }
}

std::string hex(const BigReal& x) { return x.to_hex(); }

BigReal parse_hex(const std::string& text) {
  // Four bits per hex digit is always enough for an exact read-back.
  const auto prec = static_cast<Precision>(4 * text.size() + 8);
  return BigReal::parse(text, prec, Round::Nearest);
}

std::string decimal_down(const BigReal& x, int digits) {
  return x.to_decimal(digits, Round::Down);
}

std::string decimal_up(const BigReal& x, int digits) {
  return x.to_decimal(digits, Round::Up);
}

KvDocument certificate_document(
    const Certificate& cert,
    const std::vector<std::pair<std::string, std::string>>& config) {
  KvDocument doc;
  doc.header.push_back("powdist certificate");
  auto& cfg = doc.add("config");
  cfg.entries = config;

  auto& res = doc.add("result");
  const CertifiedDecimal dec = certified_decimal(cert.alpha, cert.config.digits);
  res.entries = {
      {"start_level", std::to_string(cert.start)},
      {"depth", std::to_string(cert.config.depth)},
      {"precision_bits", std::to_string(cert.precision)},
      {"alpha_lo", hex(cert.alpha.lo())},
      {"alpha_hi", hex(cert.alpha.hi())},
      {"alpha", dec.text},
      {"alpha_certified_digits", std::to_string(dec.digits)},
      {"alpha_width", decimal_up(cert.alpha.width(cert.precision), 6)},
      {"levels_passed", std::to_string(cert.densified_check.passed) + "/" +
                            std::to_string(cert.densified_check.rows.size())},
      {"original_indices_passed",
       std::to_string(cert.original_check.passed) + "/" +
           std::to_string(cert.original_indices.size())},
  };

  std::map<std::size_t, const VerifyRow*> rows;
  for (const VerifyRow& row : cert.densified_check.rows) rows[row.n] = &row;
  for (const LevelRecord& lv : cert.levels) {
    auto& s = doc.add("level " + std::to_string(lv.n));
    s.entries = {
        {"q", exact_decimal(lv.q)},
        {"r", format_rational(lv.r)},
        {"eps", format_rational(lv.eps)},
        {"label", lv.label.get_str()},
        {"branch", lv.branch.get_str()},
        {"certified_lo", hex(lv.certified.lo())},
        {"certified_hi", hex(lv.certified.hi())},
        {"outer_lo", hex(lv.outer.lo())},
        {"outer_hi", hex(lv.outer.hi())},
    };
    if (const auto it = rows.find(lv.n); it != rows.end()) {
      s.entries.emplace_back("distance_upper", decimal_up(it->second->distance.hi(), 12));
      s.entries.emplace_back("status", to_string(it->second->status));
    }
  }
  return doc;
}

RInterval certificate_alpha(const KvDocument& doc) {
  const auto& res = doc.at("result");
  return {parse_hex(res.at("alpha_lo")), parse_hex(res.at("alpha_hi"))};
}

namespace {

void write_level_meta(std::ostream& out, const LevelStats& s) {
  out << "# level " << s.n << " count=" << s.count.get_str()
      << " children=" << s.children.get_str() << " gap=" << decimal_down(s.gap, 12)
      << " sampled=" << (s.sampled ? 1 : 0) << '\n';
}

}  // namespace

void write_tree(std::ostream& out, const CantorTree& tree) {
  out << "# powdist tree export: level h lo hi\n";
  const int digits = digits_for(tree.precision);
  const auto stats = tree.level_stats();
  for (std::size_t i = 0; i < tree.levels.size(); ++i) {
    write_level_meta(out, stats[i]);
    for (const CantorInterval& iv : tree.levels[i].intervals) {
      const RInterval c = iv.certified();
      out << iv.level << ' ' << iv.label.get_str() << ' ' << decimal_up(c.lo(), digits)
          << ' ' << decimal_down(c.hi(), digits) << '\n';
    }
  }
}

void write_tree(std::ostream& out, const std::vector<LevelStats>& stats) {
  out << "# powdist tree export: level h lo hi\n";
  for (const LevelStats& s : stats) write_level_meta(out, s);
}

TreeExport read_tree(std::istream& in) {
  struct Level {
    std::optional<LevelStats> meta;
    std::vector<RInterval> leaves;
  };
  std::map<std::size_t, Level> levels;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::Parse, "tree line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream fields(t.front() == '#' ? t.substr(1) : t);
    if (t.front() == '#') {
      std::string word;
      fields >> word;
      if (word != "level") continue;
      LevelStats s;
      if (!(fields >> s.n)) fail("metadata without a level number");
      bool have_gap = false;
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) fail("bad metadata field '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        try {
          if (key == "count") s.count = BigInt(value);
          else if (key == "children") s.children = BigInt(value);
          else if (key == "sampled") s.sampled = value == "1";
          else if (key == "gap") {
            s.gap = BigReal::parse(value, 128, Round::Down);
            have_gap = true;
          }
        } catch (const std::invalid_argument&) {
          fail("bad number in '" + kv + "'");
        }
      }
      if (!have_gap || s.count <= 0 || s.children <= 0) fail("incomplete level metadata");
      levels[s.n].meta = std::move(s);
      continue;
    }
    std::size_t level = 0;
    std::string h;
    std::string lo;
    std::string hi;
    if (!(fields >> level >> h >> lo >> hi)) fail("expected 'level h lo hi'");
    const auto prec = static_cast<Precision>(std::max(lo.size(), hi.size()) * 4 + 64);
    levels[level].leaves.emplace_back(BigReal::parse(lo, prec, Round::Down),
                                      BigReal::parse(hi, prec, Round::Up));
  }

  TreeExport out;
  for (auto it = levels.begin(); it != levels.end(); ++it) {
    Level& lv = it->second;
    out.level_ids.push_back(it->first);
    std::sort(lv.leaves.begin(), lv.leaves.end(),
              [](const RInterval& a, const RInterval& b) { return a.lo() < b.lo(); });
    out.leaves.push_back(lv.leaves);
    if (lv.meta) {
      out.stats.push_back(*lv.meta);
      continue;
    }
    // No metadata: derive counts from the lines themselves.
    const auto next = std::next(it);
    if (next == levels.end() || lv.leaves.empty() || lv.leaves.size() < 2) continue;
    LevelStats s;
    s.n = it->first;
    s.count = static_cast<unsigned long>(lv.leaves.size());
    s.children = static_cast<unsigned long>(
        std::max<std::size_t>(1, next->second.leaves.size() / lv.leaves.size()));
    std::optional<BigReal> g;
    for (std::size_t i = 1; i < lv.leaves.size(); ++i) {
      BigReal d = sub(lv.leaves[i].lo(), lv.leaves[i - 1].hi(), Round::Down, 256);
      if (!g || d < *g) g = std::move(d);
    }
    if (!g || g->sign() <= 0) fail("intervals of level " + std::to_string(s.n) + " overlap");
    s.gap = *g;
    out.stats.push_back(std::move(s));
  }
  return out;
}

void write_verification_csv(std::ostream& out, const VerificationReport& rep) {
  out << "n,q,r,frac_lo,frac_hi,distance_lo,distance_hi,distance_digits,eps,status\n";
  for (const VerifyRow& row : rep.rows) {
    out << row.n << ',' << exact_decimal(row.q) << ',' << format_rational(row.r) << ',';
    if (row.frac.wrapped()) {
      out << "WRAPPED,WRAPPED,";
    } else {
      out << decimal_down(row.frac.value->lo(), 12) << ','
          << decimal_up(row.frac.value->hi(), 12) << ',';
    }
    const CertifiedDecimal cd = certified_decimal(row.distance, 20);
    out << decimal_down(row.distance.lo(), 12) << ',' << decimal_up(row.distance.hi(), 12)
        << ',' << cd.digits << ',';
    if (row.threshold) out << decimal_down(row.threshold->lo(), 12);
    out << ',' << to_string(row.status) << '\n';
  }
}

void write_dimension_csv(std::ostream& out, const DimensionReport& rep) {
  out << "n,count_log10,children,gap_measured,gap_used,partial,partial_raw,clamped,"
         "gap_substituted,sampled\n";
  for (const DimensionRow& row : rep.rows) {
    const double count_log10 =
        log(BigReal::from_integer(row.count), Round::Nearest, 64).to_double(Round::Nearest) /
        std::log(10.0);
    out << row.n << ',' << count_log10 << ',' << row.children.get_str() << ','
        << decimal_down(row.gap_measured, 8) << ',' << decimal_down(row.gap_used, 8) << ','
        << row.partial << ',' << row.partial_raw << ',' << row.clamped << ','
        << row.gap_substituted << ',' << row.sampled << '\n';
  }
}

}  // namespace powdist
