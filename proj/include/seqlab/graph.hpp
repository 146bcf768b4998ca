#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "seqlab/param_store.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/tensor.hpp"

namespace seqlab {

// Handle into a Graph's tape.
struct Var {
  std::uint32_t idx = 0;
};

// Reverse-mode tape. Every operation appends a node whose closure scatters
// the node's gradient into its parents; creation order is a topological
// order, so backward() is a single reverse sweep.
template <class Real>
class Graph {
 public:
  explicit Graph(Mode mode = Mode::kEval, std::uint64_t dropout_seed = 0)
      : mode_(mode), rng_(dropout_seed) {}

  Mode mode() const { return mode_; }
  std::size_t size() const { return nodes_.size(); }

  const Tensor<Real>& value(Var v) const { return nodes_[v.idx].value; }
  const Tensor<Real>& grad(Var v) const { return nodes_[v.idx].grad; }

  // -- leaves ---------------------------------------------------------------

  Var constant(Tensor<Real> t) {
    return push("constant", std::move(t), nullptr, nullptr);
  }

  Var zeros(Shape shape) { return constant(Tensor<Real>::zeros(std::move(shape))); }

  Var param(ParamStore<Real>& store, const std::string& name) {
    auto& p = store.get(name);
    Var v = push("param", p.value, nullptr, &p.grad);
    return v;
  }

  // -- elementwise ----------------------------------------------------------

  Var add(Var a, Var b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "add: shape mismatch ", shape_str(ta.shape),
            " vs ", shape_str(tb.shape));
    Tensor<Real> out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += tb.data[i];
    return push("add", std::move(out), [a, b](Graph& g, const Node& n) {
      g.accumulate(a, n.grad.data, Real(1));
      g.accumulate(b, n.grad.data, Real(1));
    });
  }

  Var sub(Var a, Var b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "sub: shape mismatch");
    Tensor<Real> out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] -= tb.data[i];
    return push("sub", std::move(out), [a, b](Graph& g, const Node& n) {
      g.accumulate(a, n.grad.data, Real(1));
      g.accumulate(b, n.grad.data, Real(-1));
    });
  }

  Var mul(Var a, Var b) {
    const auto& ta = val(a);
    const auto& tb = val(b);
    require(ta.same_shape(tb), "mul: shape mismatch");
    Tensor<Real> out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= tb.data[i];
    return push("mul", std::move(out), [a, b](Graph& g, const Node& n) {
      auto& ga = g.nodes_[a.idx].grad;
      auto& gb = g.nodes_[b.idx].grad;
      const auto& va = g.val(a);
      const auto& vb = g.val(b);
      for (std::size_t i = 0; i < n.grad.numel(); ++i) {
        ga.data[i] += n.grad.data[i] * vb.data[i];
        gb.data[i] += n.grad.data[i] * va.data[i];
      }
    });
  }

  Var scale(Var a, Real k) {
    Tensor<Real> out = val(a);
    for (Real& x : out.data) x *= k;
    return push("scale", std::move(out), [a, k](Graph& g, const Node& n) {
      g.accumulate(a, n.grad.data, k);
    });
  }

  // vec * broadcast scalar node
  Var scale_by(Var vec, Var scalar) {
    const auto& tv = val(vec);
    Real s = val(scalar).value();
    Tensor<Real> out = tv;
    for (Real& x : out.data) x *= s;
    return push("scale_by", std::move(out), [vec, scalar, s](Graph& g, const Node& n) {
      g.accumulate(vec, n.grad.data, s);
      Real ds = 0;
      const auto& v = g.val(vec);
      for (std::size_t i = 0; i < v.numel(); ++i) ds += n.grad.data[i] * v.data[i];
      g.nodes_[scalar.idx].grad.data[0] += ds;
    });
  }

  Var neg(Var a) { return scale(a, Real(-1)); }

  Var tanh_(Var a) {
    Tensor<Real> out = val(a);
    for (Real& x : out.data) x = std::tanh(x);
    Var r = push("tanh", std::move(out), nullptr);
    nodes_[r.idx].back = [a, r](Graph& g, const Node& n) {
      auto& ga = g.nodes_[a.idx].grad;
      const auto& y = n.value;
      for (std::size_t i = 0; i < y.numel(); ++i)
        ga.data[i] += n.grad.data[i] * (Real(1) - y.data[i] * y.data[i]);
    };
    return r;
  }

  Var sigmoid_(Var a) {
    Tensor<Real> out = val(a);
    for (Real& x : out.data) x = sigmoid_scalar(x);
    Var r = push("sigmoid", std::move(out), nullptr);
    nodes_[r.idx].back = [a](Graph& g, const Node& n) {
      auto& ga = g.nodes_[a.idx].grad;
      const auto& y = n.value;
      for (std::size_t i = 0; i < y.numel(); ++i)
        ga.data[i] += n.grad.data[i] * y.data[i] * (Real(1) - y.data[i]);
    };
    return r;
  }

  // -- linear algebra ---------------------------------------------------------

  // W [r x c] times x [c] -> [r]
  Var matvec(Var w, Var x) {
    const auto& tw = val(w);
    const auto& tx = val(x);
    require(tw.rank() == 2 && tx.rank() == 1 && tw.shape[1] == tx.shape[0],
            "matvec: ", shape_str(tw.shape), " * ", shape_str(tx.shape));
    std::size_t r = tw.shape[0], c = tw.shape[1];
    Tensor<Real> out(Shape{r});
    for (std::size_t i = 0; i < r; ++i) {
      Real s = 0;
      const Real* wrow = tw.data.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) s += wrow[j] * tx.data[j];
      out.data[i] = s;
    }
    return push("matvec", std::move(out), [w, x, r, c](Graph& g, const Node& n) {
      auto& gw = g.nodes_[w.idx].grad;
      auto& gx = g.nodes_[x.idx].grad;
      const auto& vw = g.val(w);
      const auto& vx = g.val(x);
      for (std::size_t i = 0; i < r; ++i) {
        Real d = n.grad.data[i];
        if (d == Real(0)) continue;
        Real* gwrow = gw.data.data() + i * c;
        const Real* wrow = vw.data.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) {
          gwrow[j] += d * vx.data[j];
          gx.data[j] += d * wrow[j];
        }
      }
    });
  }

  Var affine(Var w, Var x, Var b) { return add(matvec(w, x), b); }

  // -- indexing -------------------------------------------------------------

  Var row(Var m, std::size_t i) {
    const auto& tm = val(m);
    require(tm.rank() == 2, "row: rank-2 expected");
    require(i < tm.shape[0], "row: index ", i, " out of ", tm.shape[0]);
    std::size_t c = tm.shape[1];
    Tensor<Real> out(Shape{c});
    std::copy_n(tm.data.begin() + i * c, c, out.data.begin());
    return push("row", std::move(out), [m, i, c](Graph& g, const Node& n) {
      auto& gm = g.nodes_[m.idx].grad;
      for (std::size_t j = 0; j < c; ++j) gm.data[i * c + j] += n.grad.data[j];
    });
  }

  Var col(Var m, std::size_t j) {
    const auto& tm = val(m);
    require(tm.rank() == 2, "col: rank-2 expected");
    require(j < tm.shape[1], "col: index ", j, " out of ", tm.shape[1]);
    std::size_t r = tm.shape[0], c = tm.shape[1];
    Tensor<Real> out(Shape{r});
    for (std::size_t i = 0; i < r; ++i) out.data[i] = tm.data[i * c + j];
    return push("col", std::move(out), [m, j, r, c](Graph& g, const Node& n) {
      auto& gm = g.nodes_[m.idx].grad;
      for (std::size_t i = 0; i < r; ++i) gm.data[i * c + j] += n.grad.data[i];
    });
  }

  Var pick(Var v, std::size_t i) {
    const auto& tv = val(v);
    require(tv.rank() == 1, "pick: rank-1 expected");
    require(i < tv.shape[0], "pick: index ", i, " out of ", tv.shape[0]);
    return push("pick", Tensor<Real>::scalar(tv.data[i]),
                [v, i](Graph& g, const Node& n) {
                  g.nodes_[v.idx].grad.data[i] += n.grad.data[0];
                });
  }

  // Joins scalars and vectors into one rank-1 tensor.
  Var concat(const std::vector<Var>& parts) {
    require(!parts.empty(), "concat: no inputs");
    std::size_t total = 0;
    for (Var p : parts) {
      require(val(p).rank() <= 1, "concat: scalar or rank-1 inputs expected");
      total += val(p).numel();
    }
    Tensor<Real> out(Shape{total});
    std::size_t off = 0;
    for (Var p : parts) {
      const auto& t = val(p);
      std::copy(t.data.begin(), t.data.end(), out.data.begin() + off);
      off += t.numel();
    }
    std::vector<Var> ps = parts;
    return push("concat", std::move(out), [ps](Graph& g, const Node& n) {
      std::size_t off = 0;
      for (Var p : ps) {
        auto& gp = g.nodes_[p.idx].grad;
        for (std::size_t j = 0; j < gp.numel(); ++j)
          gp.data[j] += n.grad.data[off + j];
        off += gp.numel();
      }
    });
  }

  // -- reductions -------------------------------------------------------------

  Var sum(Var v) {
    Real s = 0;
    for (Real x : val(v).data) s += x;
    return push("sum", Tensor<Real>::scalar(s), [v](Graph& g, const Node& n) {
      Real d = n.grad.data[0];
      auto& gv = g.nodes_[v.idx].grad;
      for (Real& x : gv.data) x += d;
    });
  }

  // log(sum(exp(v))) over a rank-1 input, max-shifted for stability.
  Var logsumexp(Var v) {
    const auto& tv = val(v);
    require(tv.rank() == 1 && tv.numel() > 0, "logsumexp: non-empty rank-1 expected");
    Real mx = tv.data[0];
    for (Real x : tv.data) mx = std::max(mx, x);
    Real s = 0;
    for (Real x : tv.data) s += std::exp(x - mx);
    Real lse = mx + std::log(s);
    Var r = push("logsumexp", Tensor<Real>::scalar(lse), nullptr);
    nodes_[r.idx].back = [v](Graph& g, const Node& n) {
      Real d = n.grad.data[0];
      Real out = n.value.data[0];
      auto& gv = g.nodes_[v.idx].grad;
      const auto& vv = g.val(v);
      for (std::size_t i = 0; i < vv.numel(); ++i)
        gv.data[i] += d * std::exp(vv.data[i] - out);
    };
    return r;
  }

  // -- regularization ---------------------------------------------------------

  // Inverted dropout: train mode keeps each value with probability 1-rate and
  // rescales by 1/(1-rate); eval mode is the identity.
  Var dropout(Var v, Real rate) {
    require(rate >= Real(0) && rate < Real(1), "dropout: rate must be in [0,1)");
    if (mode_ == Mode::kEval || rate == Real(0)) return v;
    const auto& tv = val(v);
    Tensor<Real> out = tv;
    std::vector<Real> mask(tv.numel());
    Real keep = Real(1) - rate;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      mask[i] = rng_.uniform() < rate ? Real(0) : Real(1) / keep;
      out.data[i] *= mask[i];
    }
    return push("dropout", std::move(out),
                [v, mask = std::move(mask)](Graph& g, const Node& n) {
                  auto& gv = g.nodes_[v.idx].grad;
                  for (std::size_t i = 0; i < mask.size(); ++i)
                    gv.data[i] += n.grad.data[i] * mask[i];
                });
  }

  // -- backward ---------------------------------------------------------------

  // Accumulates dloss/dparam into each reachable parameter's gradient buffer.
  // Buffers are not cleared here, so per-batch accumulation works; callers
  // zero the store between optimizer steps.
  void backward(Var loss) {
    backward_deferred(loss);
    flush_param_grads();
  }

  // Backward sweep that leaves parameter gradients on the tape. Lets several
  // graphs over distinct sentences run concurrently against a shared store;
  // flush_param_grads() then merges under the caller's lock.
  void backward_deferred(Var loss) {
    require(val(loss).numel() == 1, "backward: loss must be scalar, got shape ",
            shape_str(val(loss).shape));
    nodes_[loss.idx].grad.data[0] = Real(1);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      Node& n = nodes_[i];
      if (n.back) n.back(*this, n);
      if (n.sink) {
        for (std::size_t j = 0; j < n.grad.numel(); ++j)
          require(std::isfinite(static_cast<double>(n.grad.data[j])),
                  "backward: NaN encountered during accumulation");
      }
    }
  }

  void flush_param_grads() {
    for (Node& n : nodes_)
      if (n.sink)
        for (std::size_t j = 0; j < n.grad.numel(); ++j)
          n.sink->data[j] += n.grad.data[j];
  }

 private:
  struct Node {
    Tensor<Real> value;
    Tensor<Real> grad;
    std::function<void(Graph&, const Node&)> back;
    Tensor<Real>* sink = nullptr;
  };

  static Real sigmoid_scalar(Real x) {
    if (x >= Real(0)) return Real(1) / (Real(1) + std::exp(-x));
    Real e = std::exp(x);
    return e / (Real(1) + e);
  }

  const Tensor<Real>& val(Var v) const { return nodes_[v.idx].value; }

  void accumulate(Var target, const std::vector<Real>& d, Real k) {
    auto& g = nodes_[target.idx].grad;
    for (std::size_t i = 0; i < d.size(); ++i) g.data[i] += k * d[i];
  }

  Var push(const char* op, Tensor<Real> value,
           std::function<void(Graph&, const Node&)> back,
           Tensor<Real>* sink = nullptr) {
    require(value.finite(), op, ": non-finite result");
    Node n;
    n.grad = Tensor<Real>::zeros(value.shape);
    n.value = std::move(value);
    n.back = std::move(back);
    n.sink = sink;
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Mode mode_;
  Rng rng_;
  std::vector<Node> nodes_;
};

}  // namespace seqlab
