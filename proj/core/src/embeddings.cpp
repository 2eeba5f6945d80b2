#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cmpgen/error.hpp"
#include "cmpgen/lm.hpp"

namespace cmpgen {
namespace {

constexpr const char* kEmbeddingMagic = "cmpgen-embeddings/1";

}  // namespace

EmbeddingTable::EmbeddingTable(Vocabulary vocab, std::size_t dimension,
                               std::vector<double> values)
    : vocab_(std::move(vocab)), dim_(dimension), values_(std::move(values)) {
  if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
  if (values_.size() != vocab_.size() * dim_)
    throw ConfigError("embedding table size does not match vocabulary x dimension");
  if (!std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); }))
    throw ConfigError("embedding values must be finite");
}

std::span<const double> EmbeddingTable::vector(TokenId id) const {
  if (id >= vocab_.size()) throw ConfigError("token id out of range");
  return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

std::span<const double> EmbeddingTable::vector(std::string_view token) const {
  return vector(vocab_.id(token));
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write embeddings: " + path.string());
  out << kEmbeddingMagic << ' ' << vocab_.size() << ' ' << dim_ << '\n';
  char buf[32];
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    out << vocab_.token(static_cast<TokenId>(i));
    for (std::size_t d = 0; d < dim_; ++d) {
      std::snprintf(buf, sizeof(buf), " %.17g", values_[i * dim_ + d]);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("error while writing embeddings: " + path.string());
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read embeddings: " + path.string());
  std::string magic;
  std::size_t rows = 0, dim = 0;
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  if (!(hs >> magic >> rows >> dim) || magic != kEmbeddingMagic)
    throw ConfigError("not an embedding file: " + path.string());
  if (rows < 3) throw ConfigError("embedding file lacks reserved tokens");

  std::vector<std::string> words;
  std::vector<double> values;
  values.reserve(rows * dim);
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw ConfigError("embedding file truncated: " + path.string());
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    if (r < 3) {
      const std::string_view expected = r == 0   ? Vocabulary::kBosToken
                                        : r == 1 ? Vocabulary::kEosToken
                                                 : Vocabulary::kUnkToken;
      if (token != expected) throw ConfigError("embedding file lacks reserved tokens");
    } else {
      words.push_back(token);
    }
    for (std::size_t d = 0; d < dim; ++d) {
      std::string field;
      if (!(ls >> field)) throw ConfigError("embedding row too short: " + token);
      values.push_back(std::strtod(field.c_str(), nullptr));
    }
  }
  return EmbeddingTable(Vocabulary(words), dim, std::move(values));
}

EmbeddingTable train_embeddings(const std::vector<TokenSequence>& corpus,
                                std::size_t dimension, std::size_t window) {
  return train_embeddings(corpus, Vocabulary::build(corpus), dimension, window);
}

EmbeddingTable train_embeddings(const std::vector<TokenSequence>& corpus,
                                const Vocabulary& vocab, std::size_t dimension,
                                std::size_t window) {
  if (corpus.empty()) throw ConfigError("cannot train embeddings on an empty corpus");
  if (window == 0) throw ConfigError("co-occurrence window must be positive");
  const auto v = static_cast<Eigen::Index>(vocab.size());
  if (dimension == 0 || dimension > vocab.size())
    throw ConfigError("embedding dimension must be in [1, vocabulary size]");

  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(v, v);
  for (const auto& sentence : corpus) {
    const auto ids = vocab.encode(sentence);
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const std::size_t hi = std::min(ids.size(), a + window + 1);
      for (std::size_t b = a + 1; b < hi; ++b) {
        counts(ids[a], ids[b]) += 1.0;
        counts(ids[b], ids[a]) += 1.0;
      }
    }
  }

  const Eigen::VectorXd marginal = counts.rowwise().sum();
  const double total = marginal.sum();
  Eigen::MatrixXd ppmi = Eigen::MatrixXd::Zero(v, v);
  std::vector<bool> zero_row(static_cast<std::size_t>(v), true);
  for (Eigen::Index i = 0; i < v; ++i) {
    for (Eigen::Index j = 0; j < v; ++j) {
      const double c = counts(i, j);
      if (c <= 0.0) continue;
      const double pmi = std::log(c * total / (marginal(i) * marginal(j)));
      if (pmi > 0.0) {
        ppmi(i, j) = pmi;
        zero_row[static_cast<std::size_t>(i)] = false;
      }
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(ppmi, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::MatrixXd u = svd.matrixU();

  const auto dim = static_cast<Eigen::Index>(dimension);
  std::vector<double> values(vocab.size() * dimension, 0.0);
  for (Eigen::Index c = 0; c < dim; ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < v; ++i)
      if (std::abs(u(i, c)) > std::abs(u(arg, c))) arg = i;
    const double sign = u(arg, c) < 0.0 ? -1.0 : 1.0;
    const double scale = sign * std::sqrt(std::max(sigma(c), 0.0));
    for (Eigen::Index i = 0; i < v; ++i) {
      if (zero_row[static_cast<std::size_t>(i)]) continue;
      values[static_cast<std::size_t>(i) * dimension + static_cast<std::size_t>(c)] =
          u(i, c) * scale;
    }
  }
  return EmbeddingTable(vocab, dimension, std::move(values));
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ConfigError("cosine_similarity: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  // sqrt(fl(x*x)) == x, so s(h, h) is exactly 1.
  return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

}  // namespace cmpgen
