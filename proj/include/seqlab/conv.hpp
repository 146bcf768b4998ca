#pragma once

#include <string>
#include <vector>

#include "seqlab/graph.hpp"
#include "seqlab/param_store.hpp"

namespace seqlab {

// 2 x d bigram kernel, stride 1 valid convolution.
struct BigramKernelSpec {
  std::string name;
  std::size_t dim = 0;
};

template <class Real>
BigramKernelSpec register_bigram_kernel(ParamStore<Real>& store,
                                        const std::string& name, std::size_t dim,
                                        Rng& rng) {
  const Real bound = static_cast<Real>(std::sqrt(1.0 / double(dim)));
  store.add(name, Tensor<Real>::uniform(Shape{2, dim}, -bound, bound, rng));
  return BigramKernelSpec{name, dim};
}

// B_i = I_i (*) K_0 + I_{i+1} (*) K_1 elementwise over rows: m+1 padded input
// rows become m bigram rows.
template <class Real>
std::vector<Var> bigram_conv(Graph<Real>& g, const std::vector<Var>& padded_rows,
                             Var kernel) {
  require(padded_rows.size() >= 2, "bigram conv: needs at least 2 input rows");
  Var k0 = g.row(kernel, 0);
  Var k1 = g.row(kernel, 1);
  std::vector<Var> out(padded_rows.size() - 1);
  for (std::size_t i = 0; i + 1 < padded_rows.size(); ++i)
    out[i] = g.add(g.mul(padded_rows[i], k0), g.mul(padded_rows[i + 1], k1));
  return out;
}

}  // namespace seqlab
