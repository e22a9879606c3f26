// Reverse-mode differentiation over dense Eigen matrices.
//
// A Tape records every operation of one forward pass; backward() replays the
// records in reverse and accumulates gradients. Parameters live outside the
// tape (see parameters.hpp) and receive their gradients directly.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <span>
#include <vector>

namespace coref {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct Parameter;

namespace ad {

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const { return value()(0, 0); }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, const Matrix& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a parameter. The value is referenced, not copied.
  Var parameter(Parameter& p);
  /// Records an op result. `backward` may be empty when no input needs a gradient.
  Var record(Matrix value, bool needs_grad, Backward backward);

  /// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates.
  void backward(Var root);

  const Matrix& value(int id) const;
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  /// Adds `g` into the gradient of node `id` (no-op for constants).
  void accumulate(int id, const Matrix& g);
  /// Adds row r of `g` into row rows[r] of the gradient of node `id`.
  void accumulate_rows(int id, std::span<const Eigen::Index> rows, const Matrix& g);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix* ref = nullptr;
    Parameter* param = nullptr;
    Matrix grad;
    bool needs_grad = false;
    Backward backward;
  };
  Matrix& grad_storage(int id);

  std::vector<Node> nodes_;
};

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// ---- Elementwise and linear algebra -----------------------------------------

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// Adds a 1 x c row to every row of a.
Var add_row(Var a, Var row);
/// Elementwise product.
Var mul(Var a, Var b);
/// Multiplies every entry by the 1x1 node s.
Var scale(Var a, Var s);
Var scale(Var a, double s);
Var relu(Var a);
Var tanh(Var a);
/// Concatenates along columns.
Var hcat(std::span<const Var> parts);
Var hcat(std::initializer_list<Var> parts);
/// Row r of the result is row idx[r] of a.
Var gather_rows(Var a, IndexList idx);
/// n x 1 row sums.
Var row_sum(Var a);
/// 1x1 sum of all entries.
Var sum(Var a);
/// Sum of 1x1 nodes.
Var add_scalars(std::span<const Var> terms);

// ---- Structured ops ----------------------------------------------------------

/// Row t becomes the mean of rows max(0,t-r)..min(T-1,t+r).
Var window_mean(Var a, int radius);

/// Inverted dropout; identity when rate <= 0 or rng is null.
Var dropout(Var a, double rate, std::mt19937_64* rng);

struct SpanBounds {
  Index start;
  Index end;  // inclusive
};

/// Attention-pooled rows: out[s] = sum_t alpha_t * x[t] over t in spans[s], with
/// alpha the softmax of scores (T x 1) restricted to the span.
Var span_attention(Var x, Var scores, std::vector<SpanBounds> spans);
/// The attention weights span_attention would use, for inspection.
std::vector<Vector> span_attention_weights(const Matrix& scores, std::span<const SpanBounds> spans);

/// Scatters a P x 1 column into an n x c matrix at (rows[p], cols[p]); all other
/// entries are the constant `fill`.
Var scatter(Var values, IndexList rows, IndexList cols, Index n, Index c, double fill);

/// Mean softmax cross entropy over rows with label >= 0; rows labelled < 0 are
/// ignored. Returns 0 (and no gradient) when no row is labelled.
Var softmax_cross_entropy(Var logits, std::vector<int> labels);

/// Sum over rows of  logsumexp(scores[valid]) - logsumexp(scores[gold]).
/// `valid` and `gold` are row-major n x c masks; gold must imply valid and
/// every row must have at least one gold entry.
Var marginal_nll(Var scores, std::vector<char> valid, std::vector<char> gold);

}  // namespace ad
}  // namespace coref
