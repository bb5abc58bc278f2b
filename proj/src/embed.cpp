#include "atlas/embed.hpp"

#include <cmath>

#include "atlas/error.hpp"
#include "atlas/text_io.hpp"

namespace atlas {

void EmbeddingTable::Validate() const {
  if (embed_dim < 1) throw InvalidArgument("embedding dimension must be positive");
  for (const auto& [id, v] : entries) {
    if (v.size() != embed_dim) {
      throw InvalidArgument("embedding for " + id + " has " + std::to_string(v.size()) + " components, expected " +
                            std::to_string(embed_dim));
    }
    if (!v.allFinite()) throw InvalidArgument("embedding for " + id + " is not finite");
  }
  for (const auto& [id, n] : n_test_utterances) {
    if (n < 1) throw InvalidArgument("embedding for " + id + " is built from no test utterances");
  }
}

EmbeddingTable ExtractEmbeddings(const ClassifierState& state, std::span<const TestUtterance> test,
                                 EmbeddingLayer layer) {
  EmbeddingTable table;
  table.embed_dim = state.config.embed_dim;
  std::map<std::string, Eigen::VectorXd> sums;
  std::map<std::string, int> counts;
  for (const auto& id : state.class_ids) {
    sums[id] = Eigen::VectorXd::Zero(table.embed_dim);
    counts[id] = 0;
  }
  for (const auto& u : test) {
    const auto it = sums.find(u.language_id);
    if (it == sums.end()) throw InvalidArgument("test utterance of " + u.language_id + " which the classifier does not know");
    const ForwardTrace trace = Forward(state, *u.spec);
    if (layer == EmbeddingLayer::kPreActivation) {
      it->second += trace.pre_embedding;
    } else {
      it->second += trace.pre_embedding.cwiseMax(0.0);
    }
    ++counts[u.language_id];
  }
  for (const auto& [id, sum] : sums) {
    const int n = counts[id];
    if (n == 0) throw InvalidArgument("language " + id + " has no test utterances");
    table.entries[id] = sum / static_cast<double>(n);
    table.n_test_utterances[id] = n;
  }
  table.Validate();
  return table;
}

DistanceMatrix EuclideanDistanceMatrix(const std::map<std::string, Eigen::VectorXd>& vectors, DistanceKind kind) {
  if (vectors.size() < 2) throw InvalidArgument("distance matrix needs at least 2 entries");
  std::vector<std::string> ids;
  std::vector<const Eigen::VectorXd*> vs;
  for (const auto& [id, v] : vectors) {
    ids.push_back(id);
    vs.push_back(&v);
  }
  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = *vs[static_cast<std::size_t>(i)];
      const auto& b = *vs[static_cast<std::size_t>(j)];
      if (a.size() != b.size()) throw InvalidArgument("vectors " + ids[static_cast<std::size_t>(i)] + " and " +
                                                      ids[static_cast<std::size_t>(j)] + " differ in dimension");
      d(i, j) = d(j, i) = (a - b).norm();
    }
  }
  return DistanceMatrix(std::move(ids), std::move(d), kind);
}

DistanceMatrix EmbeddingDistances(const EmbeddingTable& table) {
  return EuclideanDistanceMatrix(table.entries, DistanceKind::kEmbedding);
}

std::string FormatEmbeddings(const EmbeddingTable& table) {
  std::string out(kEmbeddingHeader);
  out += "\n" + std::to_string(table.embed_dim) + "\n";
  if (!table.source_checkpoint.empty()) out += "#source\t" + table.source_checkpoint + "\n";
  for (const auto& [id, n] : table.n_test_utterances) out += "#n_test\t" + id + "\t" + std::to_string(n) + "\n";
  for (const auto& [id, v] : table.entries) {
    out += id + "\t";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out += ' ';
      out += text::FormatRoundTrip(v(i));
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable ParseEmbeddings(std::string_view text) {
  const auto lines = text::Split(text, '\n');
  if (lines.empty() || lines[0] != kEmbeddingHeader) throw ParseError("not an embedding file", 1);
  long long dim = 0;
  if (lines.size() < 2 || !text::ParseInt(lines[1], dim) || dim < 1) throw ParseError("bad dimension line", 2);
  EmbeddingTable table;
  table.embed_dim = static_cast<int>(dim);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    const auto f = text::Split(line, '\t');
    if (line.front() == '#') {
      if (f[0] == "#source" && f.size() == 2) {
        table.source_checkpoint = std::string(f[1]);
      } else if (f[0] == "#n_test" && f.size() == 3) {
        long long n = 0;
        if (!text::ParseInt(f[2], n)) throw ParseError("bad test-utterance count", lineno);
        table.n_test_utterances[std::string(f[1])] = static_cast<int>(n);
      }
      continue;
    }
    if (f.size() != 2) throw ParseError("expected 'id<TAB>values'", lineno);
    const std::string id(f[0]);
    const auto values = text::Split(f[1], ' ');
    if (static_cast<long long>(values.size()) != dim) {
      throw ParseError(id + " has " + std::to_string(values.size()) + " values, expected " + std::to_string(dim), lineno);
    }
    Eigen::VectorXd v(dim);
    for (long long k = 0; k < dim; ++k) {
      if (!text::ParseDouble(values[static_cast<std::size_t>(k)], v(k))) {
        throw ParseError("bad value '" + std::string(values[static_cast<std::size_t>(k)]) + "'", lineno);
      }
    }
    if (!table.entries.emplace(id, std::move(v)).second) throw ParseError("duplicate id " + id, lineno);
  }
  for (const auto& [id, n] : table.n_test_utterances) {
    if (!table.entries.count(id)) throw ParseError("test-utterance count for unknown id " + id, 0);
  }
  try {
    table.Validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
  return table;
}

void WriteEmbeddings(const std::filesystem::path& path, const EmbeddingTable& table) {
  text::WriteFile(path, FormatEmbeddings(table));
}

EmbeddingTable ReadEmbeddings(const std::filesystem::path& path) {
  try {
    return ParseEmbeddings(text::ReadFile(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line(), e.column());
  }
}

}  // namespace atlas
