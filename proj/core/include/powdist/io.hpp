#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "powdist/analysis.hpp"
#include "powdist/cantor.hpp"
#include "powdist/interval.hpp"

namespace powdist {

// Sectioned key = value text. Lines starting with '#' are comments; the
// first section may be unnamed.
class KvDocument {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const;
    const std::string& at(const std::string& key) const;  // throws Parse
  };

  std::vector<std::string> header;  // comment lines, without the '#'
  std::vector<Section> sections;

  Section& add(std::string name);
  const Section* find(const std::string& name) const;
  const Section& at(const std::string& name) const;  // throws Parse

  static KvDocument parse(std::istream& in);
  static KvDocument read_file(const std::string& path);
  void write(std::ostream& out) const;
};

// Exact hexadecimal form that reads back bit for bit.
std::string hex(const BigReal& x);
BigReal parse_hex(const std::string& text);

// Decimal bounds: lower rounded down, upper rounded up.
std::string decimal_down(const BigReal& x, int digits);
std::string decimal_up(const BigReal& x, int digits);

// The construction-facing parts of a certificate document. `config` holds
// the run parameters verbatim so the sequence can be rebuilt elsewhere.
KvDocument certificate_document(
    const Certificate& cert,
    const std::vector<std::pair<std::string, std::string>>& config);

// alpha as stored in a certificate document.
RInterval certificate_alpha(const KvDocument& doc);

struct TreeExport {
  std::vector<LevelStats> stats;               // from metadata or derived
  std::vector<std::vector<RInterval>> leaves;  // per level, in file order
  std::vector<std::size_t> level_ids;
};

// One "level h lo hi" line per materialized interval (certified interval,
// decimal bounds rounded inward) preceded by a "# level" metadata line.
void write_tree(std::ostream& out, const CantorTree& tree);
void write_tree(std::ostream& out, const std::vector<LevelStats>& stats);
TreeExport read_tree(std::istream& in);

void write_verification_csv(std::ostream& out, const VerificationReport& rep);
void write_dimension_csv(std::ostream& out, const DimensionReport& rep);

}  // namespace powdist
