#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "atlas/error.hpp"
#include "atlas/familytree.hpp"
#include "atlas/report.hpp"
#include "classification_corpus.hpp"
#include "support.hpp"

namespace atlas {
namespace {

using testing::Id;
using testing::Ids;
using testing::Language;

LanguageRecord WithPath(const std::string& id, ClassificationPath path, const std::string& source = "ethnologue") {
  return Language(id, 0, 0, {{source, std::move(path)}});
}

TEST(ParseClassification, Examples) {
  EXPECT_EQ(ParseClassification("Cariban, Guianan, Macro-Tupi"),
            (ClassificationPath{"Cariban", "Guianan", "Macro-Tupi"}));
  EXPECT_EQ(ParseClassification("Otomanguean"), ClassificationPath{"Otomanguean"});
  try {
    ParseClassification("Cariban, ,Guianan");
    FAIL() << "empty middle label accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 9u);
  }
}

TEST(ParseClassification, CorpusParsesAndRoundTrips) {
  for (const auto& c : testing::ClassificationCorpus()) {
    const auto path = ParseClassification(c.raw);
    EXPECT_EQ(path, c.labels) << c.raw;
    const std::string joined = JoinClassification(path);
    EXPECT_EQ(ParseClassification(joined), path) << joined;
    EXPECT_EQ(JoinClassification(ParseClassification(joined)), joined);
  }
}

TEST(ParseClassification, MalformedCasesCarryColumns) {
  for (const auto& [raw, column] : testing::MalformedClassifications()) {
    try {
      ParseClassification(raw);
      ADD_FAILURE() << "accepted '" << raw << "'";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.column(), column) << "'" << raw << "'";
    }
  }
}

TEST(BuildForest, SharedPrefixMerges) {
  const auto forest = BuildForest({WithPath("AAAAAA", {"A", "B"}), WithPath("BBBBBB", {"A", "C"})}, "ethnologue");
  ASSERT_EQ(forest.trees().size(), 1u);
  const TreeNode& root = forest.trees()[0];
  EXPECT_EQ(root.label, "A");
  ASSERT_EQ(root.children.size(), 2u);
  EXPECT_EQ(root.children[0].label, "B");
  EXPECT_EQ(root.children[1].label, "C");
  EXPECT_FALSE(root.children[0].leaf);
  EXPECT_EQ(root.LeafCount(), 2u);
}

TEST(BuildForest, IdenticalPathsShareTheDeepestNode) {
  const auto forest = BuildForest({WithPath("AAAAAA", {"A", "B"}), WithPath("BBBBBB", {"A", "B"})}, "ethnologue");
  ASSERT_EQ(forest.trees().size(), 1u);
  ASSERT_EQ(forest.trees()[0].children.size(), 1u);
  const TreeNode& b = forest.trees()[0].children[0];
  ASSERT_EQ(b.children.size(), 2u);
  EXPECT_TRUE(b.children[0].leaf);
  EXPECT_TRUE(b.children[1].leaf);
  EXPECT_EQ(forest.FamilyMembers("AAAAAA"), std::vector<std::string>{"BBBBBB"});
}

TEST(BuildForest, MissingSourceIsAnError) {
  EXPECT_THROW(BuildForest({WithPath("AAAAAA", {"A"}, "glottolog")}, "ethnologue"), InvalidArgument);
  EXPECT_THROW(BuildForest({WithPath("AAAAAA", {"A"}), WithPath("AAAAAA", {"B"})}, "ethnologue"), InvalidArgument);
}

// Root-to-leaf paths recovered from the tree structure.
void CollectPaths(const TreeNode& node, ClassificationPath& prefix, std::map<std::string, ClassificationPath>& out) {
  if (node.leaf) {
    EXPECT_FALSE(out.count(node.label)) << node.label << " appears twice";
    out[node.label] = prefix;
    return;
  }
  prefix.push_back(node.label);
  for (const auto& c : node.children) CollectPaths(c, prefix, out);
  prefix.pop_back();
}

TEST(BuildForest, RandomForestsMatchRawPaths) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> labels{"A", "B", "C"};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    std::vector<LanguageRecord> langs;
    for (int i = 0; i < n; ++i) {
      LanguageRecord r = Language(Id(i), 0, 0);
      for (const std::string source : {"ethnologue", "glottolog"}) {
        ClassificationPath p;
        const int depth = 1 + static_cast<int>(rng() % 4);
        for (int d = 0; d < depth; ++d) p.push_back(labels[rng() % labels.size()]);
        r.classifications[source] = p;
      }
      langs.push_back(r);
    }
    for (const std::string source : {"ethnologue", "glottolog"}) {
      const auto forest = BuildForest(langs, source);
      std::map<std::string, ClassificationPath> paths;
      ClassificationPath prefix;
      std::size_t leaves = 0;
      for (const auto& t : forest.trees()) {
        EXPECT_GT(t.LeafCount(), 0u);
        leaves += t.LeafCount();
        CollectPaths(t, prefix, paths);
      }
      EXPECT_EQ(leaves, langs.size());
      for (const auto& l : langs) {
        const auto& raw = l.classifications.at(source);
        EXPECT_EQ(paths.at(l.id), raw);
        EXPECT_EQ(forest.FamilyOf(l.id), raw[0]);
        // Family membership by comparing root labels directly.
        std::vector<std::string> expected;
        for (const auto& o : langs) {
          if (o.id != l.id && o.classifications.at(source)[0] == raw[0]) expected.push_back(o.id);
        }
        std::sort(expected.begin(), expected.end());
        EXPECT_EQ(forest.FamilyMembers(l.id), expected);
        EXPECT_EQ(forest.FamilySize(l.id), expected.size() + 1);
      }
    }
  }
}

TEST(ForestStats, HandCount) {
  const auto forest = BuildForest({WithPath(Id(0), {"A", "x"}), WithPath(Id(1), {"A", "y"}), WithPath(Id(2), {"A"}),
                                   WithPath(Id(3), {"B", "z"}), WithPath(Id(4), {"B", "z"}), WithPath(Id(5), {"C"})},
                                  "ethnologue");
  const ForestStats s = ComputeForestStats(forest);
  EXPECT_EQ(s.n_languages, 6u);
  EXPECT_EQ(s.n_non_single, 5u);
  EXPECT_DOUBLE_EQ(s.non_single_percent, 100.0 * 5 / 6);
  EXPECT_EQ(s.n_families, 2u);
  EXPECT_EQ(s.n_isolates, 1u);
}

TEST(ForestStats, SingleLeafForest) {
  const ForestStats isolate = ComputeForestStats(BuildForest({WithPath(Id(0), {"Basque"})}, "ethnologue"));
  EXPECT_EQ(isolate.n_non_single, 0u);
  EXPECT_EQ(isolate.n_families, 0u);
  EXPECT_EQ(isolate.n_isolates, 1u);
  EXPECT_DOUBLE_EQ(isolate.non_single_percent, 0.0);
  // A singleton tree below a named group is single but not an isolate.
  const ForestStats single = ComputeForestStats(BuildForest({WithPath(Id(0), {"Mayan", "Yucatecan"})}, "ethnologue"));
  EXPECT_EQ(single.n_isolates, 0u);
  EXPECT_THROW(ComputeForestStats(BuildForest({}, "ethnologue")), InvalidArgument);
}

TEST(ForestStats, ReportFormat) {
  const auto forest = BuildForest({WithPath(Id(0), {"A"}), WithPath(Id(1), {"A"}), WithPath(Id(2), {"B"})}, "ethnologue");
  std::ostringstream ss;
  EmitReport(ss, "ethnologue", ComputeForestStats(forest));
  EXPECT_EQ(ss.str(), "source\tnon_single\tpercent\tfamilies\tisolates\nethnologue\t2\t66.6667\t1\t1\n");
}

// Hit rate by sorting every other language for each eligible one.
std::vector<double> OracleHitRate(const std::vector<std::string>& ids, const Eigen::MatrixXd& d,
                                  const std::map<std::string, std::string>& family,
                                  const std::vector<std::size_t>& ks) {
  std::vector<std::string> eligible;
  for (const auto& id : ids) {
    for (const auto& other : ids) {
      if (other != id && family.at(other) == family.at(id)) {
        eligible.push_back(id);
        break;
      }
    }
  }
  std::vector<double> out;
  for (std::size_t k : ks) {
    std::size_t hits = 0;
    for (const auto& id : eligible) {
      for (const auto& nb : testing::OracleNeighbors(ids, d, id, k)) {
        if (family.at(nb) == family.at(id)) {
          ++hits;
          break;
        }
      }
    }
    out.push_back(100.0 * hits / eligible.size());
  }
  return out;
}

TEST(TreeMetric, MatchesOracleAndIsMonotone) {
  std::mt19937_64 rng(11);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto ids = Ids(n);
    std::vector<LanguageRecord> langs;
    std::map<std::string, std::string> family;
    for (const auto& id : ids) {
      const std::string f(1, static_cast<char>('A' + rng() % 3));
      family[id] = f;
      langs.push_back(WithPath(id, {f, "g"}));
    }
    const auto forest = BuildForest(langs, "ethnologue");
    if (forest.NonSingleLanguages().empty()) continue;
    ++tested;
    const Eigen::MatrixXd d = trial % 2 ? testing::TiedDistances(rng, n) : testing::RandomDistances(rng, n);
    const DistanceMatrix emb(ids, d, DistanceKind::kEmbedding);
    std::vector<std::size_t> ks;
    for (int k = n - 1; k >= 1; --k) ks.push_back(k);
    const auto report = TreeMetric(forest, emb, ks);
    std::sort(ks.begin(), ks.end());
    EXPECT_EQ(report.k_values, ks);
    EXPECT_EQ(report.n_eligible, forest.NonSingleLanguages().size());
    const auto expected = OracleHitRate(ids, d, family, ks);
    ASSERT_EQ(report.hit_rate.size(), expected.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      EXPECT_DOUBLE_EQ(report.hit_rate[i], expected[i]);
      EXPECT_GE(report.hit_rate[i], 0.0);
      EXPECT_LE(report.hit_rate[i], 100.0);
      if (i) {
        EXPECT_GE(report.hit_rate[i], report.hit_rate[i - 1]);
      }
    }
    EXPECT_EQ(report.hit_rate.back(), 100.0);
  }
  EXPECT_GT(tested, 150);
}

TEST(TreeMetric, PlantedClustersHitAtOne) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> jitter(0.0, 0.01);
  const int families = 4, per = 5, n = families * per;
  const auto ids = Ids(n);
  std::vector<LanguageRecord> langs;
  std::vector<std::pair<double, double>> points;
  for (int i = 0; i < n; ++i) {
    const int f = i % families;
    langs.push_back(WithPath(ids[i], {"F" + std::to_string(f)}));
    points.emplace_back(10.0 * f + jitter(rng), 10.0 * (f % 2) + jitter(rng));
  }
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = std::hypot(points[i].first - points[j].first, points[i].second - points[j].second);
  }
  const auto report = TreeMetric(BuildForest(langs, "ethnologue"), DistanceMatrix(ids, d, DistanceKind::kEmbedding),
                                 {1, 2, 4, 8, 16});
  for (double h : report.hit_rate) EXPECT_EQ(h, 100.0);
}

TEST(TreeMetric, Errors) {
  const auto ids = Ids(3);
  const DistanceMatrix emb(ids, Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3), DistanceKind::kEmbedding);
  const auto forest = BuildForest({WithPath(ids[0], {"A"}), WithPath(ids[1], {"A"}), WithPath(ids[2], {"B"})}, "ethnologue");
  EXPECT_THROW(TreeMetric(forest, emb, {0}), RangeError);
  EXPECT_THROW(TreeMetric(forest, emb, {3}), RangeError);
  EXPECT_THROW(TreeMetric(forest, emb, {}), InvalidArgument);
  const auto stranger = BuildForest({WithPath("ZZZZZZ", {"A"}), WithPath(ids[1], {"A"})}, "ethnologue");
  EXPECT_THROW(TreeMetric(stranger, emb, {1}), InvalidArgument);
  const auto singles = BuildForest({WithPath(ids[0], {"A"}), WithPath(ids[1], {"B"}), WithPath(ids[2], {"C"})}, "ethnologue");
  EXPECT_THROW(TreeMetric(singles, emb, {1}), InvalidArgument);
}

TEST(TreeMetric, ReportFormat) {
  TreeMetricReport r;
  r.k_values = {2, 4};
  r.hit_rate = {58.3815, 100.0};
  r.n_eligible = 173;
  EXPECT_EQ(FormatReport(r), "2\t58.3815\n4\t100\nn_eligible\t173\n");
}

}  // namespace
}  // namespace atlas
