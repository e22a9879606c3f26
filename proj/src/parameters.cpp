#include "coref/parameters.hpp"

#include <cmath>
#include <stdexcept>

namespace coref {

std::string_view to_string(ParamGroup group) {
  switch (group) {
    case ParamGroup::Encoder: return "encoder";
    case ParamGroup::Coreference: return "coreference";
    case ParamGroup::Auxiliary: return "auxiliary";
  }
  return "?";
}

std::size_t ParameterStore::add(std::string name, Matrix init, ParamGroup group) {
  if (index_.contains(name)) throw std::logic_error("duplicate parameter " + name);
  const std::size_t i = params_.size();
  index_.emplace(name, i);
  Matrix grad = Matrix::Zero(init.rows(), init.cols());
  params_.push_back(Parameter{std::move(name), std::move(init), std::move(grad), group});
  return i;
}

std::size_t ParameterStore::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + std::string(name));
  return it->second;
}

Parameter& ParameterStore::get(std::string_view name) { return params_[index_of(name)]; }
const Parameter& ParameterStore::get(std::string_view name) const { return params_[index_of(name)]; }
bool ParameterStore::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

Eigen::Index ParameterStore::scalar_count() const {
  Eigen::Index n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero(p.value.rows(), p.value.cols());
}

Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

Ffnn::Ffnn(ParameterStore& store, const std::string& prefix, int input, int hidden, int layers, int output,
           ParamGroup group, std::mt19937_64& rng)
    : input_(input), output_(output) {
  int in = input;
  for (int l = 0; l < layers; ++l) {
    const auto tag = prefix + ".hidden" + std::to_string(l);
    params_.push_back(store.add(tag + ".weight", glorot(in, hidden, rng), group));
    params_.push_back(store.add(tag + ".bias", Matrix::Zero(1, hidden), group));
    in = hidden;
  }
  params_.push_back(store.add(prefix + ".out.weight", glorot(in, output, rng), group));
  params_.push_back(store.add(prefix + ".out.bias", Matrix::Zero(1, output), group));
}

ad::Var Ffnn::apply(ad::Tape& tape, ParameterStore& store, ad::Var x, double dropout, std::mt19937_64* rng) const {
  ad::Var h = x;
  const std::size_t last = params_.size() - 2;
  for (std::size_t i = 0; i < params_.size(); i += 2) {
    h = ad::add_row(ad::matmul(h, tape.parameter(store.at(params_[i]))), tape.parameter(store.at(params_[i + 1])));
    if (i != last) h = ad::dropout(ad::relu(h), dropout, rng);
  }
  return h;
}

}  // namespace coref
