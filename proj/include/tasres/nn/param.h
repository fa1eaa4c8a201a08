// Copyright 2026 The tasres Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TASRES_NN_PARAM_H_
#define TASRES_NN_PARAM_H_

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace tasres::nn {

// Features x frames for latents; rows x cols for weights. Column-major, so
// one frame is one contiguous column.
using Matrix = Eigen::MatrixXd;

enum class Constraint { kNone, kPositive };

// A trainable tensor. With kPositive the stored values are the unconstrained
// u and the value seen by the network is softplus(u).
struct Param {
  std::string name;
  Matrix values;
  Matrix grad;
  Constraint constraint = Constraint::kNone;

  Matrix Effective() const;
  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

double Softplus(double u);
// Inverse of softplus for v > 0.
double InverseSoftplus(double v);

// Owns every parameter of a model. Insertion order is preserved and is the
// iteration order for optimizers and checkpoints.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Param& Add(const std::string& name, Matrix values,
             Constraint constraint = Constraint::kNone);
  Param& Get(const std::string& name);
  const Param& Get(const std::string& name) const;
  bool Contains(const std::string& name) const { return index_.contains(name); }

  std::vector<Param*> All();
  std::vector<const Param*> All() const;
  std::size_t size() const { return params_.size(); }
  std::size_t NumScalars() const;

  void ZeroGrad();
  // Global l2 norm of all gradients.
  double GradNorm() const;

 private:
  std::vector<std::unique_ptr<Param>> params_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace tasres::nn

#endif  // TASRES_NN_PARAM_H_
