// Named trainable tensors and the feed-forward block shared by every scorer.
#pragma once

#include "coref/autodiff.hpp"

#include <deque>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace coref {

/// Optimizer partition. Encoder and Coreference parameters are trained by the
/// coreference optimizer; Auxiliary parameters belong to the auxiliary heads.
enum class ParamGroup { Encoder, Coreference, Auxiliary };

std::string_view to_string(ParamGroup group);

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  ParamGroup group = ParamGroup::Coreference;
};

/// Insertion-ordered parameter collection with stable element addresses.
class ParameterStore {
 public:
  /// Returns the index of the new parameter. Names must be unique.
  std::size_t add(std::string name, Matrix init, ParamGroup group);

  Parameter& at(std::size_t i) { return params_[i]; }
  const Parameter& at(std::size_t i) const { return params_[i]; }
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  Eigen::Index scalar_count() const;
  void zero_grad();

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::deque<Parameter> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Glorot-uniform initial values.
Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

/// ReLU feed-forward network: `layers` hidden layers of width `hidden`, then a
/// linear projection to `output` units.
class Ffnn {
 public:
  Ffnn() = default;
  Ffnn(ParameterStore& store, const std::string& prefix, int input, int hidden, int layers, int output,
       ParamGroup group, std::mt19937_64& rng);

  /// x is n x input; returns n x output.
  ad::Var apply(ad::Tape& tape, ParameterStore& store, ad::Var x, double dropout = 0.0,
                std::mt19937_64* rng = nullptr) const;

  int input_dim() const { return input_; }
  int output_dim() const { return output_; }
  /// Parameter indices, weights and biases interleaved per layer.
  const std::vector<std::size_t>& parameter_indices() const { return params_; }

 private:
  std::vector<std::size_t> params_;
  int input_ = 0;
  int output_ = 0;
};

}  // namespace coref
