#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "seqlab/tensor.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

template <class Real>
struct PretrainedEmbeddings {
  Tensor<Real> matrix;  // vocab.size() x dim
  double coverage = 0;  // fraction of non-reserved vocab found in the file
};

// Text format: "token v1 ... v_dim" per line. In-vocab rows are copied;
// missing tokens get U(-0.5/dim, 0.5/dim) rows; the <pad> row stays zero.
template <class Real>
PretrainedEmbeddings<Real> load_pretrained_embeddings(const std::string& path,
                                                      const Vocab& vocab,
                                                      std::size_t dim,
                                                      std::uint64_t seed = 1) {
  require(dim >= 1, "embeddings: dim must be >= 1");
  std::ifstream is(path);
  require(is.good(), "cannot open embedding file: ", path);

  PretrainedEmbeddings<Real> result;
  Rng rng(seed);
  Real bound = Real(0.5) / static_cast<Real>(dim);
  result.matrix = Tensor<Real>::uniform(Shape{vocab.size(), dim}, -bound, bound, rng);
  for (std::size_t j = 0; j < dim; ++j) result.matrix.at(Vocab::kPad, j) = 0;

  std::vector<bool> covered(vocab.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<Real> values;
    values.reserve(dim);
    double v;
    while (ls >> v) values.push_back(static_cast<Real>(v));
    require(values.size() == dim, path, ":", line_no, ": expected ", dim,
            " values, found ", values.size());
    if (!vocab.contains(token)) continue;
    std::size_t idx = vocab.lookup(token);
    for (std::size_t j = 0; j < dim; ++j) result.matrix.at(idx, j) = values[j];
    covered[idx] = true;
  }

  std::size_t hits = 0, total = 0;
  for (std::size_t i = Vocab::kReservedCount; i < vocab.size(); ++i) {
    ++total;
    if (covered[i]) ++hits;
  }
  result.coverage = total == 0 ? 0.0 : double(hits) / double(total);
  return result;
}

}  // namespace seqlab
