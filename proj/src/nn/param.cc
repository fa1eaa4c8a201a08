// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tasres/nn/param.h"

#include <cmath>

#include "tasres/error.h"

namespace tasres::nn {

double Softplus(double u) {
  if (u > 30.0) return u + std::exp(-u);
  if (u < -30.0) return std::exp(u);
  return std::log1p(std::exp(u));
}

double InverseSoftplus(double v) {
  Require(v > 0.0, "inverse softplus needs a positive value");
  if (v > 30.0) return v + std::log(-std::expm1(-v));
  return std::log(std::expm1(v));
}

Matrix Param::Effective() const {
  if (constraint == Constraint::kNone) return values;
  return values.unaryExpr([](double u) { return Softplus(u); });
}

ParameterStore::ParameterStore(const ParameterStore& other) { *this = other; }

ParameterStore& ParameterStore::operator=(const ParameterStore& other) {
  if (this == &other) return *this;
  params_.clear();
  index_ = other.index_;
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Param>(*p));
  return *this;
}

Param& ParameterStore::Add(const std::string& name, Matrix values, Constraint constraint) {
  Require(!index_.contains(name), "duplicate parameter name: " + name);
  auto p = std::make_unique<Param>();
  p->name = name;
  p->grad = Matrix::Zero(values.rows(), values.cols());
  p->values = std::move(values);
  p->constraint = constraint;
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Param& ParameterStore::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) Fail(ErrorCode::kInvalidArgument, "unknown parameter: " + name);
  return *params_[it->second];
}

const Param& ParameterStore::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) Fail(ErrorCode::kInvalidArgument, "unknown parameter: " + name);
  return *params_[it->second];
}

std::vector<Param*> ParameterStore::All() {
  std::vector<Param*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Param*> ParameterStore::All() const {
  std::vector<const Param*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::NumScalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void ParameterStore::ZeroGrad() {
  for (auto& p : params_) p->grad.setZero();
}

double ParameterStore::GradNorm() const {
  double acc = 0.0;
  for (const auto& p : params_) acc += p->grad.squaredNorm();
  return std::sqrt(acc);
}

}  // namespace tasres::nn
