// Copyright 2026 The DCA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dca/tape.hpp"

#include <algorithm>
#include <cmath>

#include "dca/error.hpp"

namespace dca::ad {

const Matrix& Var::value() const { return tape->value(*this); }

double Var::scalar() const {
  const Matrix& m = value();
  if (m.rows() != 1 || m.cols() != 1) throw DimensionError("scalar(): node is " + m.shape_string());
  return m[0];
}

Tape::Tape(const ParamStore& store, Gradients* sink) : store_(&store), sink_(sink) {
  if (sink_ != nullptr && sink_->size() != store.size()) {
    throw DimensionError("Tape: gradient sink does not match the parameter store");
  }
  nodes_.reserve(512);
}

Var Tape::param(std::string_view name) {
  const std::size_t idx = store_->index(name);
  if (auto it = param_nodes_.find(idx); it != param_nodes_.end()) return Var{this, it->second};
  Node n;
  n.ref = &store_->value(idx);
  n.requires_grad = recording();
  if (recording()) n.grad_target = &(*sink_)[idx];
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(idx, id);
  return Var{this, id};
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(std::move(n));
  return Var{this, id};
}

const Matrix& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.ref != nullptr ? *n.ref : n.value;
}

Var Tape::push(Matrix value, std::initializer_list<Var> parents, Backprop backprop) {
  return push(std::move(value), std::span<const Var>(parents.begin(), parents.size()),
              std::move(backprop));
}

Var Tape::push(Matrix value, std::span<const Var> parents, Backprop backprop) {
  Node n;
  n.value = std::move(value);
  if (recording()) {
    n.requires_grad = std::any_of(parents.begin(), parents.end(),
                                  [this](Var p) { return nodes_[p.id].requires_grad; });
  }
  if (n.requires_grad) n.backprop = std::move(backprop);
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(std::move(n));
  return Var{this, id};
}

void Tape::rewind(std::size_t mark) {
  if (recording()) throw Error("rewind() on a recording tape");
  if (mark > nodes_.size()) throw Error("rewind(): mark beyond tape end");
  nodes_.resize(mark);
  std::erase_if(param_nodes_, [mark](const auto& kv) { return kv.second >= mark; });
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  n.touched = true;
  if (n.grad_target != nullptr) return *n.grad_target;
  if (n.grad.empty()) {
    const Matrix& val = n.ref != nullptr ? *n.ref : n.value;
    n.grad = Matrix(val.rows(), val.cols());
  }
  return n.grad;
}

void Tape::backward(Var loss, double seed) {
  if (backward_done_) throw DoubleBackwardError("backward() called twice on the same tape");
  if (!recording()) throw Error("backward() on an inference tape");
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw DimensionError("backward(): loss must be 1x1, got " + lv.shape_string());
  }
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;
  grad(loss)[0] += seed;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.touched || !n.backprop) continue;
    n.backprop(*this, n.value, n.grad);
  }
}

namespace {

bool needs(Var v) { return v.tape->requires_grad(v); }

Tape& tape_of(Var a, Var b) {
  if (a.tape != b.tape) throw Error("ops on Vars from different tapes");
  return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(dca::matmul(a.value(), b.value()), {a, b},
                [a, b](Tape& t, const Matrix&, const Matrix& g) {
                  if (needs(a)) t.grad(a) += dca::matmul_nt(g, b.value());
                  if (needs(b)) t.grad(b) += dca::matmul_tn(a.value(), g);
                });
}

Var matmul_nt(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(dca::matmul_nt(a.value(), b.value()), {a, b},
                [a, b](Tape& t, const Matrix&, const Matrix& g) {
                  if (needs(a)) t.grad(a) += dca::matmul(g, b.value());
                  if (needs(b)) t.grad(b) += dca::matmul_tn(g, a.value());
                });
}

Var transpose(Var a) {
  return a.tape->push(dca::transpose(a.value()), {a},
                      [a](Tape& t, const Matrix&, const Matrix& g) {
                        t.grad(a) += dca::transpose(g);
                      });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(a.value() + b.value(), {a, b}, [a, b](Tape& t, const Matrix&, const Matrix& g) {
    if (needs(a)) t.grad(a) += g;
    if (needs(b)) t.grad(b) += g;
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(a.value() - b.value(), {a, b}, [a, b](Tape& t, const Matrix&, const Matrix& g) {
    if (needs(a)) t.grad(a) += g;
    if (needs(b)) t.grad(b) -= g;
  });
}

Var add_row(Var a, Var r) {
  Tape& t = tape_of(a, r);
  const Matrix& av = a.value();
  const Matrix& rv = r.value();
  check_shapes(rv.rows() == 1 && rv.cols() == av.cols(), "add_row", av, rv);
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto o = out.row(i);
    for (std::size_t j = 0; j < o.size(); ++j) o[j] += rv[j];
  }
  return t.push(std::move(out), {a, r}, [a, r](Tape& t, const Matrix&, const Matrix& g) {
    if (needs(a)) t.grad(a) += g;
    if (needs(r)) {
      Matrix& gr = t.grad(r);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        auto gi = g.row(i);
        for (std::size_t j = 0; j < gi.size(); ++j) gr[j] += gi[j];
      }
    }
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(hadamard(a.value(), b.value()), {a, b},
                [a, b](Tape& t, const Matrix&, const Matrix& g) {
                  if (needs(a)) t.grad(a) += hadamard(g, b.value());
                  if (needs(b)) t.grad(b) += hadamard(g, a.value());
                });
}

Var scale(Var a, double s) {
  return a.tape->push(s * a.value(), {a}, [a, s](Tape& t, const Matrix&, const Matrix& g) {
    t.grad(a).add_scaled(g, s);
  });
}

Var one_minus(Var a) {
  Matrix out = a.value();
  for (double& v : out.data()) v = 1.0 - v;
  return a.tape->push(std::move(out), {a}, [a](Tape& t, const Matrix&, const Matrix& g) {
    t.grad(a) -= g;
  });
}

Var add_scalar(Var a, double c) {
  Matrix out = a.value();
  for (double& v : out.data()) v += c;
  return a.tape->push(std::move(out), {a}, [a](Tape& t, const Matrix&, const Matrix& g) {
    t.grad(a) += g;
  });
}

Var sigmoid(Var a) {
  Matrix out = a.value();
  for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  return a.tape->push(std::move(out), {a}, [a](Tape& t, const Matrix& y, const Matrix& g) {
    Matrix& ga = t.grad(a);
    for (std::size_t i = 0; i < y.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var tanh(Var a) {
  Matrix out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  return a.tape->push(std::move(out), {a}, [a](Tape& t, const Matrix& y, const Matrix& g) {
    Matrix& ga = t.grad(a);
    for (std::size_t i = 0; i < y.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var softmax_rows(Var a) {
  return a.tape->push(dca::softmax_rows(a.value()), {a},
                      [a](Tape& t, const Matrix& y, const Matrix& g) {
                        Matrix& ga = t.grad(a);
                        for (std::size_t i = 0; i < y.rows(); ++i) {
                          auto yi = y.row(i);
                          auto gi = g.row(i);
                          double dot = 0.0;
                          for (std::size_t j = 0; j < yi.size(); ++j) dot += yi[j] * gi[j];
                          auto out = ga.row(i);
                          for (std::size_t j = 0; j < yi.size(); ++j) out[j] += yi[j] * (gi[j] - dot);
                        }
                      });
}

Var concat_cols(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  check_shapes(av.rows() == bv.rows(), "concat_cols", av, bv);
  const std::size_t ca = av.cols();
  Matrix out(av.rows(), ca + bv.cols());
  for (std::size_t i = 0; i < av.rows(); ++i) {
    auto o = out.row(i);
    std::copy(av.row(i).begin(), av.row(i).end(), o.begin());
    std::copy(bv.row(i).begin(), bv.row(i).end(), o.begin() + static_cast<std::ptrdiff_t>(ca));
  }
  return t.push(std::move(out), {a, b}, [a, b, ca](Tape& t, const Matrix&, const Matrix& g) {
    if (needs(a)) {
      Matrix& ga = t.grad(a);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < ca; ++j) ga(i, j) += g(i, j);
    }
    if (needs(b)) {
      Matrix& gb = t.grad(b);
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < gb.cols(); ++j) gb(i, j) += g(i, ca + j);
    }
  });
}

Var row(Var a, std::size_t i) {
  const Matrix& av = a.value();
  if (i >= av.rows()) throw DimensionError("row(): index out of range for " + av.shape_string());
  return a.tape->push(Matrix::row_vector(av.row(i)), {a},
                      [a, i](Tape& t, const Matrix&, const Matrix& g) {
                        auto gr = t.grad(a).row(i);
                        for (std::size_t j = 0; j < gr.size(); ++j) gr[j] += g[j];
                      });
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw DimensionError("stack_rows(): no rows");
  Tape& t = *rows.front().tape;
  const std::size_t c = rows.front().cols();
  Matrix out(rows.size(), c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Matrix& r = rows[i].value();
    if (r.rows() != 1 || r.cols() != c) throw DimensionError("stack_rows(): ragged rows");
    std::copy(r.data().begin(), r.data().end(), out.row(i).begin());
  }
  std::vector<Var> parents(rows.begin(), rows.end());
  return t.push(std::move(out), rows, [parents](Tape& t, const Matrix&, const Matrix& g) {
    for (std::size_t i = 0; i < parents.size(); ++i) {
      if (!needs(parents[i])) continue;
      Matrix& gi = t.grad(parents[i]);
      auto src = g.row(i);
      for (std::size_t j = 0; j < src.size(); ++j) gi[j] += src[j];
    }
  });
}

Var gather_rows(Var table, std::span<const std::size_t> ids) {
  const Matrix& tv = table.value();
  Matrix out(ids.size(), tv.cols());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] >= tv.rows()) {
      throw DimensionError("gather_rows(): id " + std::to_string(ids[k]) + " out of range for " +
                           tv.shape_string());
    }
    std::copy(tv.row(ids[k]).begin(), tv.row(ids[k]).end(), out.row(k).begin());
  }
  std::vector<std::size_t> idx(ids.begin(), ids.end());
  return table.tape->push(std::move(out), {table},
                          [table, idx](Tape& t, const Matrix&, const Matrix& g) {
                            Matrix& gt = t.grad(table);
                            for (std::size_t k = 0; k < idx.size(); ++k) {
                              auto dst = gt.row(idx[k]);
                              auto src = g.row(k);
                              for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
                            }
                          });
}

Var outer_flat(Var a, Var b) {
  Tape& t = tape_of(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  check_shapes(av.rows() == 1 && bv.rows() == 1, "outer_flat", av, bv);
  const std::size_t p = av.cols();
  const std::size_t q = bv.cols();
  Matrix out(1, p * q);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) out[i * q + j] = av[i] * bv[j];
  return t.push(std::move(out), {a, b}, [a, b, p, q](Tape& t, const Matrix&, const Matrix& g) {
    const Matrix& av = a.value();
    const Matrix& bv = b.value();
    if (needs(a)) {
      Matrix& ga = t.grad(a);
      for (std::size_t i = 0; i < p; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < q; ++j) acc += g[i * q + j] * bv[j];
        ga[i] += acc;
      }
    }
    if (needs(b)) {
      Matrix& gb = t.grad(b);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) gb[j] += g[i * q + j] * av[i];
    }
  });
}

Var mean(std::span<const Var> xs) {
  if (xs.empty()) throw DimensionError("mean(): no operands");
  Matrix out = xs.front().value();
  for (std::size_t k = 1; k < xs.size(); ++k) out += xs[k].value();
  const double inv = 1.0 / static_cast<double>(xs.size());
  out *= inv;
  std::vector<Var> parents(xs.begin(), xs.end());
  return xs.front().tape->push(std::move(out), xs,
                               [parents, inv](Tape& t, const Matrix&, const Matrix& g) {
                                 for (Var p : parents) {
                                   if (needs(p)) t.grad(p).add_scaled(g, inv);
                                 }
                               });
}

Var sum(Var a) {
  return a.tape->push(Matrix(1, 1, dca::sum(a.value())), {a},
                      [a](Tape& t, const Matrix&, const Matrix& g) {
                        Matrix& ga = t.grad(a);
                        for (double& v : ga.data()) v += g[0];
                      });
}

Var frobenius_dot(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return t.push(Matrix(1, 1, dca::frobenius_dot(a.value(), b.value())), {a, b},
                [a, b](Tape& t, const Matrix&, const Matrix& g) {
                  // a and b may be the same node; both contributions land.
                  if (needs(a)) t.grad(a).add_scaled(b.value(), g[0]);
                  if (needs(b)) t.grad(b).add_scaled(a.value(), g[0]);
                });
}

Var nll(Var logits, std::size_t target) {
  const Matrix& lv = logits.value();
  if (lv.rows() != 1 || target >= lv.cols()) {
    throw DimensionError("nll(): target " + std::to_string(target) + " for logits " +
                         lv.shape_string());
  }
  const double mx = *std::max_element(lv.data().begin(), lv.data().end());
  double z = 0.0;
  for (double v : lv.data()) z += std::exp(v - mx);
  const double lse = mx + std::log(z);
  return logits.tape->push(Matrix(1, 1, lse - lv[target]), {logits},
                           [logits, target, lse](Tape& t, const Matrix&, const Matrix& g) {
                             const Matrix& lv = logits.value();
                             Matrix& gl = t.grad(logits);
                             for (std::size_t j = 0; j < lv.cols(); ++j) {
                               gl[j] += g[0] * std::exp(lv[j] - lse);
                             }
                             gl[target] -= g[0];
                           });
}

Var dropout(Var a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  const double keep = 1.0 / (1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (double& m : mask.data()) m = rng.uniform() < rate ? 0.0 : keep;
  Matrix out = hadamard(a.value(), mask);
  return a.tape->push(std::move(out), {a},
                      [a, mask = std::move(mask)](Tape& t, const Matrix&, const Matrix& g) {
                        t.grad(a) += hadamard(g, mask);
                      });
}

}  // namespace dca::ad
