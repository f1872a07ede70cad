#ifndef OCP_NEURAL_OPTIM_H_
#define OCP_NEURAL_OPTIM_H_

#include <string>
#include <vector>

#include "ocp/neural/autodiff.h"

namespace ocp::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Decoupled; never applied to bias or normalization parameters.
  double weight_decay = 0.0;
  // Global gradient-norm clip, 0 to disable.
  double clip_norm = 0.0;
};

// Adam with decoupled weight decay over the trainable parameters.
class AdamW {
 public:
  AdamW(std::vector<Parameter> params, AdamConfig cfg);

  void zero_grad();
  void step();

  // Names of parameters that receive weight decay.
  std::vector<std::string> decayed_parameters() const;
  const std::vector<Parameter>& parameters() const { return params_; }
  long steps() const { return t_; }

 private:
  std::vector<Parameter> params_;
  std::vector<Matrix> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace ocp::nn

#endif  // OCP_NEURAL_OPTIM_H_
