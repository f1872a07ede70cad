#include "ocp/neural/optim.h"

#include <cmath>

namespace ocp::nn {

AdamW::AdamW(std::vector<Parameter> params, AdamConfig cfg) : cfg_(cfg) {
  for (Parameter& p : params) {
    if (!p.var->requires_grad) continue;
    m_.push_back(Matrix::Zero(p.var->value.rows(), p.var->value.cols()));
    v_.push_back(Matrix::Zero(p.var->value.rows(), p.var->value.cols()));
    params_.push_back(std::move(p));
  }
}

void AdamW::zero_grad() {
  for (Parameter& p : params_) p.var->grad.resize(0, 0);
}

std::vector<std::string> AdamW::decayed_parameters() const {
  std::vector<std::string> names;
  if (cfg_.weight_decay == 0.0) return names;
  for (const Parameter& p : params_) {
    if (decays(p)) names.push_back(p.name);
  }
  return names;
}

void AdamW::step() {
  ++t_;
  double clip = 1.0;
  if (cfg_.clip_norm > 0.0) {
    double sq = 0.0;
    for (const Parameter& p : params_) {
      if (p.var->grad.size()) sq += p.var->grad.squaredNorm();
    }
    double norm = std::sqrt(sq);
    if (norm > cfg_.clip_norm) clip = cfg_.clip_norm / (norm + 1e-6);
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t k = 0; k < params_.size(); ++k) {
    Node& n = *params_[k].var;
    if (cfg_.weight_decay > 0.0 && decays(params_[k])) {
      n.value *= 1.0 - cfg_.learning_rate * cfg_.weight_decay;
    }
    if (n.grad.size() == 0) continue;
    Matrix g = n.grad * clip;
    m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * g;
    v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    n.value.array() -= cfg_.learning_rate * (m_[k].array() / bc1) /
                       ((v_[k].array() / bc2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace ocp::nn
