#include <random>
#include <sstream>

#include <doctest.h>

#include "powdist/cantor.hpp"
#include "powdist/error.hpp"
#include "powdist/io.hpp"
#include "powdist/rational.hpp"

using namespace powdist;

TEST_CASE("key-value documents round-trip") {
  KvDocument doc;
  doc.header.push_back("made by a test");
  doc.add("config").entries = {{"lambda", "3"}, {"family", "nsq"}};
  doc.add("level 2").entries = {{"q", "4"}};
  std::stringstream buf;
  doc.write(buf);
  const KvDocument back = KvDocument::parse(buf);
  CHECK(back.header == doc.header);
  REQUIRE(back.sections.size() == 2);
  CHECK(back.at("config").at("family") == "nsq");
  CHECK(back.at("level 2").at("q") == "4");
  CHECK_THROWS_AS(back.at("result"), Error);
  CHECK_THROWS_AS(back.at("config").at("eta"), Error);

  std::istringstream bad("[config\nx = 1\n");
  CHECK_THROWS_AS(KvDocument::parse(bad), Error);
  std::istringstream bad2("[config]\njust words\n");
  CHECK_THROWS_AS(KvDocument::parse(bad2), Error);
}

TEST_CASE("hex and decimal text") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Precision p = 32 + static_cast<Precision>(rng() % 400);
    const double v = std::ldexp(std::uniform_real_distribution<double>(-1, 1)(rng),
                                static_cast<int>(rng() % 200) - 100);
    const BigReal x = div(BigReal::from_double(v), BigReal::from_long(7), Round::Nearest, p);
    CHECK(parse_hex(hex(x)) == x);
    const int digits = 5 + static_cast<int>(rng() % 40);
    CHECK(BigReal::parse(decimal_down(x, digits), p + 64, Round::Down) <= x);
    CHECK(BigReal::parse(decimal_up(x, digits), p + 64, Round::Up) >= x);
  }
}

TEST_CASE("certificate document round-trip") {
  Problem p;
  const SequencePair sp = gen_exponents("nsq", "zero", 8);
  p.dp = undensified(sp);
  p.es = default_schedule(p.dp);
  ConstructionConfig cfg;
  cfg.depth = 7;
  const Certificate cert = descend(cfg, p, sp);
  const KvDocument doc = certificate_document(cert, {{"lambda", "3"}, {"depth", "7"}});
  std::stringstream buf;
  doc.write(buf);
  const KvDocument back = KvDocument::parse(buf);
  const RInterval alpha = certificate_alpha(back);
  CHECK(alpha.lo() == cert.alpha.lo());
  CHECK(alpha.hi() == cert.alpha.hi());
  CHECK(back.at("result").at("start_level") == "2");
  CHECK(back.at("config").at("lambda") == "3");
  for (std::size_t n = cert.start; n <= cfg.depth; ++n) {
    const auto& s = back.at("level " + std::to_string(n));
    CHECK(s.at("status") == "pass");
    CHECK(parse_rational(s.at("eps")) == p.es.at(n));
    const RInterval certified(parse_hex(s.at("certified_lo")), parse_hex(s.at("certified_hi")));
    CHECK(certified.contains(alpha));
  }
  // The decimal alpha agrees with the enclosure on its certified digits.
  const std::string text = back.at("result").at("alpha");
  CHECK(text.size() > 40);
  CHECK(RInterval::parse(text, 512).lo() <= alpha.lo());
}

TEST_CASE("tree export round-trip") {
  Problem p;
  p.dp = undensified(gen_exponents("nsq", "zero", 6));
  p.es = default_schedule(p.dp);
  ConstructionConfig cfg;
  cfg.depth = 5;
  cfg.max_tree_nodes = 3000;
  const CantorTree tree = enumerate_tree(cfg, p);
  std::stringstream buf;
  write_tree(buf, tree);
  const TreeExport back = read_tree(buf);
  const auto stats = tree.level_stats();
  REQUIRE(back.stats.size() == stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    CHECK(back.stats[i].n == stats[i].n);
    CHECK(back.stats[i].count == stats[i].count);
    CHECK(back.stats[i].children == stats[i].children);
    CHECK(back.stats[i].sampled == stats[i].sampled);
    CHECK(back.stats[i].gap <= stats[i].gap);
    REQUIRE(back.leaves[i].size() == tree.levels[i].intervals.size());
    for (std::size_t k = 0; k < back.leaves[i].size(); ++k) {
      CHECK(tree.levels[i].intervals[k].certified().contains(back.leaves[i][k]));
    }
  }

  // Without metadata the stats come from the leaves themselves.
  std::istringstream bare("3 10 0.1 0.2\n3 11 0.3 0.4\n4 1 0.11 0.12\n4 2 0.13 0.14\n5 1 0.111 0.112\n");
  const TreeExport derived = read_tree(bare);
  REQUIRE(derived.stats.size() == 2);  // the deepest level has no children to count
  CHECK(derived.stats[0].count == 2);
  CHECK(derived.stats[0].gap.to_double() == doctest::Approx(0.1));

  std::istringstream broken("3 10 0.1\n");
  CHECK_THROWS_AS(read_tree(broken), Error);
}
