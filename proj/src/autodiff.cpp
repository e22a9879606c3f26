#include "coref/autodiff.hpp"

#include "coref/parameters.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coref::ad {

const Matrix& Var::value() const { return tape_->value(id_); }

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), nullptr, nullptr, {}, false, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{{}, &p.value, &p, {}, true, {}});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Matrix value, bool needs_grad, Backward backward) {
  if (!needs_grad) backward = nullptr;
  nodes_.push_back(Node{std::move(value), nullptr, nullptr, {}, needs_grad, std::move(backward)});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Matrix& Tape::value(int id) const {
  const Node& n = nodes_[id];
  return n.ref ? *n.ref : n.value;
}

Matrix& Tape::grad_storage(int id) {
  Node& n = nodes_[id];
  Matrix& g = n.param ? n.param->grad : n.grad;
  const Matrix& v = value(id);
  if (g.rows() != v.rows() || g.cols() != v.cols()) g = Matrix::Zero(v.rows(), v.cols());
  return g;
}

void Tape::accumulate(int id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (!n.param && n.grad.size() == 0) {
    n.grad = g;
    return;
  }
  grad_storage(id) += g;
}

void Tape::accumulate_rows(int id, std::span<const Eigen::Index> rows, const Matrix& g) {
  if (!nodes_[id].needs_grad) return;
  Matrix& dst = grad_storage(id);
  for (std::size_t r = 0; r < rows.size(); ++r) dst.row(rows[r]) += g.row(static_cast<Eigen::Index>(r));
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw std::logic_error("backward: root belongs to another tape");
  const Matrix& v = value(root.id());
  if (v.rows() != 1 || v.cols() != 1) throw std::logic_error("backward: root must be 1x1");
  if (!nodes_[root.id()].needs_grad) return;
  accumulate(root.id(), Matrix::Ones(1, 1));
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.backward || n.param || n.grad.size() == 0) continue;
    n.backward(*this, n.grad);
  }
}

namespace {

Var make(Tape& t, Matrix value, std::initializer_list<Var> inputs, Tape::Backward backward) {
  bool needs = false;
  for (const Var& v : inputs) needs = needs || t.needs_grad(v.id());
  return t.record(std::move(value), needs, std::move(backward));
}

Tape& tape_of(Var a) {
  assert(a.valid());
  return *a.tape();
}

double logsumexp(const double* x, const char* mask, Index n) {
  double m = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    if (mask[i]) m = std::max(m, x[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < n; ++i)
    if (mask[i]) s += std::exp(x[i] - m);
  return m + std::log(s);
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  const int ia = a.id(), ib = b.id();
  return make(t, a.value() * b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g * t.value(ib).transpose());
    if (t.needs_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  const int ia = a.id(), ib = b.id();
  return make(t, a.value() + b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  const int ia = a.id(), ib = b.id();
  return make(t, a.value() - b.value(), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    if (t.needs_grad(ib)) t.accumulate(ib, -g);
  });
}

Var add_row(Var a, Var row) {
  Tape& t = tape_of(a);
  const int ia = a.id(), ir = row.id();
  Matrix v = a.value();
  v.rowwise() += row.value().row(0);
  return make(t, std::move(v), {a, row}, [ia, ir](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    if (t.needs_grad(ir)) t.accumulate(ir, g.colwise().sum());
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a);
  const int ia = a.id(), ib = b.id();
  return make(t, a.value().cwiseProduct(b.value()), {a, b}, [ia, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g.cwiseProduct(t.value(ib)));
    if (t.needs_grad(ib)) t.accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var scale(Var a, Var s) {
  Tape& t = tape_of(a);
  const int ia = a.id(), is = s.id();
  return make(t, a.value() * s.scalar(), {a, s}, [ia, is](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g * t.value(is)(0, 0));
    if (t.needs_grad(is)) t.accumulate(is, Matrix::Constant(1, 1, g.cwiseProduct(t.value(ia)).sum()));
  });
}

Var scale(Var a, double s) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return make(t, a.value() * s, {a}, [ia, s](Tape& t, const Matrix& g) { t.accumulate(ia, g * s); });
}

Var relu(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return make(t, a.value().cwiseMax(0.0), {a}, [ia](Tape& t, const Matrix& g) {
    t.accumulate(ia, (t.value(ia).array() > 0.0).select(g.array(), 0.0).matrix());
  });
}

Var tanh(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return make(t, a.value().array().tanh().matrix(), {a}, [ia](Tape& t, const Matrix& g) {
    const Matrix y = t.value(ia).array().tanh().matrix();
    t.accumulate(ia, g.cwiseProduct((1.0 - y.array().square()).matrix()));
  });
}

Var hcat(std::span<const Var> parts) {
  if (parts.empty()) throw std::logic_error("hcat: no inputs");
  Tape& t = tape_of(parts[0]);
  const Index rows = parts[0].rows();
  Index cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw std::logic_error("hcat: row count mismatch");
    cols += p.cols();
    needs = needs || t.needs_grad(p.id());
  }
  Matrix v(rows, cols);
  std::vector<std::pair<int, Index>> layout;  // (id, width)
  Index off = 0;
  for (const Var& p : parts) {
    v.middleCols(off, p.cols()) = p.value();
    layout.emplace_back(p.id(), p.cols());
    off += p.cols();
  }
  return t.record(std::move(v), needs, [layout](Tape& t, const Matrix& g) {
    Index off = 0;
    for (const auto& [id, w] : layout) {
      if (t.needs_grad(id)) t.accumulate(id, g.middleCols(off, w));
      off += w;
    }
  });
}

Var hcat(std::initializer_list<Var> parts) { return hcat(std::span<const Var>(parts.begin(), parts.size())); }

Var gather_rows(Var a, IndexList idx) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  const Matrix& av = a.value();
  Matrix v(static_cast<Index>(idx.size()), av.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) v.row(static_cast<Index>(r)) = av.row(idx[r]);
  return make(t, std::move(v), {a},
              [ia, idx = std::move(idx)](Tape& t, const Matrix& g) { t.accumulate_rows(ia, idx, g); });
}

Var row_sum(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  const Index c = a.cols();
  return make(t, a.value().rowwise().sum(), {a},
              [ia, c](Tape& t, const Matrix& g) { t.accumulate(ia, g.replicate(1, c)); });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return make(t, Matrix::Constant(1, 1, a.value().sum()), {a}, [ia](Tape& t, const Matrix& g) {
    const Matrix& v = t.value(ia);
    t.accumulate(ia, Matrix::Constant(v.rows(), v.cols(), g(0, 0)));
  });
}

Var add_scalars(std::span<const Var> terms) {
  if (terms.empty()) throw std::logic_error("add_scalars: no terms");
  Tape& t = tape_of(terms[0]);
  double total = 0.0;
  bool needs = false;
  std::vector<int> ids;
  for (const Var& v : terms) {
    total += v.scalar();
    needs = needs || t.needs_grad(v.id());
    ids.push_back(v.id());
  }
  return t.record(Matrix::Constant(1, 1, total), needs, [ids](Tape& t, const Matrix& g) {
    for (int id : ids) t.accumulate(id, g);
  });
}

Var window_mean(Var a, int radius) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  const Matrix& av = a.value();
  const Index n = av.rows();
  Matrix v = Matrix::Zero(n, av.cols());
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - radius), hi = std::min<Index>(n - 1, i + radius);
    for (Index j = lo; j <= hi; ++j) v.row(i) += av.row(j);
    v.row(i) /= static_cast<double>(hi - lo + 1);
  }
  return make(t, std::move(v), {a}, [ia, radius](Tape& t, const Matrix& g) {
    const Index n = g.rows();
    Matrix d = Matrix::Zero(n, g.cols());
    for (Index i = 0; i < n; ++i) {
      const Index lo = std::max<Index>(0, i - radius), hi = std::min<Index>(n - 1, i + radius);
      const RowVector share = g.row(i) / static_cast<double>(hi - lo + 1);
      for (Index j = lo; j <= hi; ++j) d.row(j) += share;
    }
    t.accumulate(ia, d);
  });
}

Var dropout(Var a, double rate, std::mt19937_64* rng) {
  if (rate <= 0.0 || rng == nullptr) return a;
  Tape& t = tape_of(a);
  const int ia = a.id();
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (Index j = 0; j < mask.cols(); ++j)
    for (Index i = 0; i < mask.rows(); ++i) mask(i, j) = keep(*rng) ? 1.0 / (1.0 - rate) : 0.0;
  Matrix v = a.value().cwiseProduct(mask);
  return make(t, std::move(v), {a},
              [ia, mask = std::move(mask)](Tape& t, const Matrix& g) { t.accumulate(ia, g.cwiseProduct(mask)); });
}

std::vector<Vector> span_attention_weights(const Matrix& scores, std::span<const SpanBounds> spans) {
  std::vector<Vector> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    Vector w = scores.col(0).segment(s.start, s.end - s.start + 1);
    w = (w.array() - w.maxCoeff()).exp().matrix();
    w /= w.sum();
    out.push_back(std::move(w));
  }
  return out;
}

Var span_attention(Var x, Var scores, std::vector<SpanBounds> spans) {
  Tape& t = tape_of(x);
  const int ix = x.id(), is = scores.id();
  auto alphas = span_attention_weights(scores.value(), spans);
  const Matrix& xv = x.value();
  Matrix v(static_cast<Index>(spans.size()), xv.cols());
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto& b = spans[s];
    v.row(static_cast<Index>(s)) = alphas[s].transpose() * xv.middleRows(b.start, b.end - b.start + 1);
  }
  return make(t, std::move(v), {x, scores},
              [ix, is, spans = std::move(spans), alphas = std::move(alphas)](Tape& t, const Matrix& g) {
                const Matrix& xv = t.value(ix);
                Matrix dx = Matrix::Zero(xv.rows(), xv.cols());
                Matrix ds = Matrix::Zero(xv.rows(), 1);
                for (std::size_t s = 0; s < spans.size(); ++s) {
                  const auto& b = spans[s];
                  const Index w = b.end - b.start + 1;
                  const auto gs = g.row(static_cast<Index>(s));
                  const Vector proj = xv.middleRows(b.start, w) * gs.transpose();
                  const double mean = alphas[s].dot(proj);
                  for (Index k = 0; k < w; ++k) {
                    dx.row(b.start + k) += alphas[s](k) * gs;
                    ds(b.start + k, 0) += alphas[s](k) * (proj(k) - mean);
                  }
                }
                if (t.needs_grad(ix)) t.accumulate(ix, dx);
                if (t.needs_grad(is)) t.accumulate(is, ds);
              });
}

Var scatter(Var values, IndexList rows, IndexList cols, Index n, Index c, double fill) {
  Tape& t = tape_of(values);
  const int iv = values.id();
  Matrix v = Matrix::Constant(n, c, fill);
  const Matrix& src = values.value();
  for (std::size_t p = 0; p < rows.size(); ++p) v(rows[p], cols[p]) = src(static_cast<Index>(p), 0);
  return make(t, std::move(v), {values},
              [iv, rows = std::move(rows), cols = std::move(cols)](Tape& t, const Matrix& g) {
                Matrix d(static_cast<Index>(rows.size()), 1);
                for (std::size_t p = 0; p < rows.size(); ++p) d(static_cast<Index>(p), 0) = g(rows[p], cols[p]);
                t.accumulate(iv, d);
              });
}

Var softmax_cross_entropy(Var logits, std::vector<int> labels) {
  Tape& t = tape_of(logits);
  const Matrix& z = logits.value();
  if (static_cast<Index>(labels.size()) != z.rows()) throw std::logic_error("softmax_cross_entropy: label count");
  int labelled = 0;
  for (int l : labels) labelled += l >= 0;
  if (labelled == 0) return t.constant(Matrix::Zero(1, 1));
  double loss = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    if (labels[i] < 0) continue;
    const double m = z.row(i).maxCoeff();
    loss += m + std::log((z.row(i).array() - m).exp().sum()) - z(i, labels[i]);
  }
  loss /= labelled;
  const int iz = logits.id();
  return make(t, Matrix::Constant(1, 1, loss), {logits},
              [iz, labels = std::move(labels), labelled](Tape& t, const Matrix& g) {
                const Matrix& z = t.value(iz);
                Matrix d = Matrix::Zero(z.rows(), z.cols());
                const double w = g(0, 0) / labelled;
                for (Index i = 0; i < z.rows(); ++i) {
                  if (labels[i] < 0) continue;
                  RowVector p = (z.row(i).array() - z.row(i).maxCoeff()).exp();
                  p /= p.sum();
                  p(labels[i]) -= 1.0;
                  d.row(i) = w * p;
                }
                t.accumulate(iz, d);
              });
}

Var marginal_nll(Var scores, std::vector<char> valid, std::vector<char> gold) {
  Tape& t = tape_of(scores);
  const Matrix& s = scores.value();
  const Index n = s.rows(), c = s.cols();
  if (static_cast<Index>(valid.size()) != n * c || static_cast<Index>(gold.size()) != n * c)
    throw std::logic_error("marginal_nll: mask size");
  // Row-major copy so each row is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = s;
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double* row = rm.data() + i * c;
    loss += logsumexp(row, valid.data() + i * c, c) - logsumexp(row, gold.data() + i * c, c);
  }
  const int is = scores.id();
  return make(t, Matrix::Constant(1, 1, loss), {scores},
              [is, valid = std::move(valid), gold = std::move(gold)](Tape& t, const Matrix& g) {
                const Matrix& s = t.value(is);
                const Index n = s.rows(), c = s.cols();
                Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = s;
                Matrix d = Matrix::Zero(n, c);
                for (Index i = 0; i < n; ++i) {
                  const double* row = rm.data() + i * c;
                  const double all = logsumexp(row, valid.data() + i * c, c);
                  const double good = logsumexp(row, gold.data() + i * c, c);
                  for (Index j = 0; j < c; ++j) {
                    double v = 0.0;
                    if (valid[i * c + j]) v += std::exp(row[j] - all);
                    if (gold[i * c + j]) v -= std::exp(row[j] - good);
                    d(i, j) = g(0, 0) * v;
                  }
                }
                t.accumulate(is, d);
              });
}

}  // namespace coref::ad
