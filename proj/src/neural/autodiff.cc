#include "ocp/neural/autodiff.h"

#include <cmath>
#include <unordered_set>

#include "ocp/error.h"

namespace ocp::nn {

namespace {

void accumulate(Node& n, const Matrix& g) {
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

bool any_grad(const std::vector<Var>& inputs) {
  for (const Var& v : inputs) {
    if (v->requires_grad) return true;
  }
  return false;
}

Var make(Matrix value, std::vector<Var> inputs, std::function<void(Node&)> bw) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = any_grad(inputs);
  if (n->requires_grad) {
    n->inputs = std::move(inputs);
    n->backward = std::move(bw);
  }
  return n;
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
  throw Error(ErrorCode::kDimensionMismatch,
              std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                  " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

Var constant(Matrix value) { return leaf(std::move(value), false); }

Var leaf(Matrix value, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = requires_grad;
  return n;
}

void backward(const Var& root) {
  if (root->value.size() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "backward needs a scalar root");
  }
  if (!root->requires_grad) return;
  // Iterative post-order so long recurrent chains do not exhaust the stack.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->grad = Matrix::Ones(1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
  }
  // Interior gradients are only needed during the sweep.
  for (Node* n : order) {
    if (n->backward) n->grad.resize(0, 0);
  }
}

Var matmul(const Var& a, const Var& b) {
  if (a->value.cols() != b->value.rows()) shape_error("matmul", a->value, b->value);
  Node* pa = a.get();
  Node* pb = b.get();
  return make(a->value * b->value, {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad) accumulate(*pa, self.grad * pb->value.transpose());
    if (pb->requires_grad) accumulate(*pb, pa->value.transpose() * self.grad);
  });
}

Var add(const Var& a, const Var& b) {
  Node* pa = a.get();
  Node* pb = b.get();
  if (a->value.rows() == b->value.rows() && a->value.cols() == b->value.cols()) {
    return make(a->value + b->value, {a, b}, [pa, pb](Node& self) {
      accumulate(*pa, self.grad);
      accumulate(*pb, self.grad);
    });
  }
  if (b->value.rows() == 1 && a->value.cols() == b->value.cols()) {
    Matrix out = a->value.rowwise() + b->value.row(0);
    return make(std::move(out), {a, b}, [pa, pb](Node& self) {
      accumulate(*pa, self.grad);
      if (pb->requires_grad) accumulate(*pb, self.grad.colwise().sum());
    });
  }
  shape_error("add", a->value, b->value);
}

Var sub(const Var& a, const Var& b) {
  if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols()) {
    shape_error("sub", a->value, b->value);
  }
  Node* pa = a.get();
  Node* pb = b.get();
  return make(a->value - b->value, {a, b}, [pa, pb](Node& self) {
    accumulate(*pa, self.grad);
    if (pb->requires_grad) accumulate(*pb, -self.grad);
  });
}

Var mul(const Var& a, const Var& b) {
  if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols()) {
    shape_error("mul", a->value, b->value);
  }
  Node* pa = a.get();
  Node* pb = b.get();
  return make(a->value.cwiseProduct(b->value), {a, b}, [pa, pb](Node& self) {
    if (pa->requires_grad) accumulate(*pa, self.grad.cwiseProduct(pb->value));
    if (pb->requires_grad) accumulate(*pb, self.grad.cwiseProduct(pa->value));
  });
}

Var mul_const(const Var& a, const Matrix& mask) {
  Matrix m;
  if (mask.rows() == a->value.rows()) {
    m = mask;
  } else if (mask.rows() == 1) {
    m = mask.replicate(a->value.rows(), 1);
  }
  if (m.rows() != a->value.rows() || m.cols() != a->value.cols()) {
    shape_error("mul_const", a->value, mask);
  }
  Node* pa = a.get();
  Matrix out = a->value.cwiseProduct(m);
  return make(std::move(out), {a}, [pa, m = std::move(m)](Node& self) {
    accumulate(*pa, self.grad.cwiseProduct(m));
  });
}

Var scale(const Var& a, double s) {
  Node* pa = a.get();
  return make(a->value * s, {a}, [pa, s](Node& self) { accumulate(*pa, self.grad * s); });
}

Var transpose(const Var& a) {
  Node* pa = a.get();
  return make(a->value.transpose(), {a},
              [pa](Node& self) { accumulate(*pa, self.grad.transpose()); });
}

Var tanh(const Var& a) {
  Node* pa = a.get();
  Matrix out = a->value.array().tanh().matrix();
  return make(std::move(out), {a}, [pa](Node& self) {
    accumulate(*pa, (self.grad.array() * (1.0 - self.value.array().square())).matrix());
  });
}

Var sigmoid(const Var& a) {
  Node* pa = a.get();
  Matrix out = a->value.unaryExpr([](double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
  });
  return make(std::move(out), {a}, [pa](Node& self) {
    accumulate(*pa, (self.grad.array() * self.value.array() * (1.0 - self.value.array())).matrix());
  });
}

Var gelu(const Var& a) {
  Node* pa = a.get();
  Matrix out = a->value.unaryExpr([](double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); });
  return make(std::move(out), {a}, [pa](Node& self) {
    Matrix d = pa->value.unaryExpr([](double x) {
      constexpr double kInvSqrt2Pi = 0.39894228040143267794;
      return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
    });
    accumulate(*pa, self.grad.cwiseProduct(d));
  });
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    double m = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

Var softmax_rows(const Var& a) {
  Node* pa = a.get();
  return make(softmax_rows(a->value), {a}, [pa](Node& self) {
    Matrix g(self.value.rows(), self.value.cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      double dot = self.grad.row(r).dot(self.value.row(r));
      g.row(r) = (self.grad.row(r).array() - dot).matrix().cwiseProduct(self.value.row(r));
    }
    accumulate(*pa, g);
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const Matrix& v = x->value;
  const Eigen::Index cols = v.cols();
  if (gamma->value.cols() != cols || beta->value.cols() != cols) {
    shape_error("layer_norm", v, gamma->value);
  }
  Matrix xhat(v.rows(), cols);
  Eigen::VectorXd inv_std(v.rows());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    double mean = v.row(r).mean();
    double var = (v.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mean).matrix() * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * gamma->value.row(0).array()).matrix();
  out.rowwise() += beta->value.row(0);
  Node* px = x.get();
  Node* pg = gamma.get();
  Node* pb = beta.get();
  return make(std::move(out), {x, gamma, beta},
              [px, pg, pb, xhat = std::move(xhat), inv_std](Node& self) {
                if (pg->requires_grad) accumulate(*pg, self.grad.cwiseProduct(xhat).colwise().sum());
                if (pb->requires_grad) accumulate(*pb, self.grad.colwise().sum());
                if (!px->requires_grad) return;
                Matrix dxhat = (self.grad.array().rowwise() * pg->value.row(0).array()).matrix();
                Matrix dx(dxhat.rows(), dxhat.cols());
                for (Eigen::Index r = 0; r < dx.rows(); ++r) {
                  double m1 = dxhat.row(r).mean();
                  double m2 = dxhat.row(r).dot(xhat.row(r)) / static_cast<double>(dx.cols());
                  dx.row(r) = (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2).matrix() * inv_std(r);
                }
                accumulate(*px, dx);
              });
}

Var gather_rows(const Var& table, const std::vector<int>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table->value.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table->value.rows()) {
      throw Error(ErrorCode::kOutOfRange, "row id " + std::to_string(ids[i]) + " outside table of " +
                                              std::to_string(table->value.rows()));
    }
    out.row(static_cast<Eigen::Index>(i)) = table->value.row(ids[i]);
  }
  Node* pt = table.get();
  return make(std::move(out), {table}, [pt, ids](Node& self) {
    if (!pt->requires_grad) return;
    if (pt->grad.size() == 0) pt->grad = Matrix::Zero(pt->value.rows(), pt->value.cols());
    for (size_t i = 0; i < ids.size(); ++i) pt->grad.row(ids[i]) += self.grad.row(static_cast<Eigen::Index>(i));
  });
}

Var slice_rows(const Var& a, long start, long count) {
  if (start < 0 || count < 0 || start + count > a->value.rows()) {
    throw Error(ErrorCode::kOutOfRange, "slice_rows out of range");
  }
  Node* pa = a.get();
  return make(a->value.middleRows(start, count), {a}, [pa, start, count](Node& self) {
    if (pa->grad.size() == 0) pa->grad = Matrix::Zero(pa->value.rows(), pa->value.cols());
    pa->grad.middleRows(start, count) += self.grad;
  });
}

Var slice_cols(const Var& a, long start, long count) {
  if (start < 0 || count < 0 || start + count > a->value.cols()) {
    throw Error(ErrorCode::kOutOfRange, "slice_cols out of range");
  }
  Node* pa = a.get();
  return make(a->value.middleCols(start, count), {a}, [pa, start, count](Node& self) {
    if (pa->grad.size() == 0) pa->grad = Matrix::Zero(pa->value.rows(), pa->value.cols());
    pa->grad.middleCols(start, count) += self.grad;
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error(ErrorCode::kEmptyList, "concat_rows of nothing");
  Eigen::Index rows = 0, cols = parts[0]->value.cols();
  for (const Var& p : parts) {
    if (p->value.cols() != cols) shape_error("concat_rows", parts[0]->value, p->value);
    rows += p->value.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p->value.rows()) = p->value;
    at += p->value.rows();
  }
  return make(std::move(out), parts, [](Node& self) {
    Eigen::Index at = 0;
    for (const Var& p : self.inputs) {
      Eigen::Index r = p->value.rows();
      if (p->requires_grad) accumulate(*p, self.grad.middleRows(at, r));
      at += r;
    }
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error(ErrorCode::kEmptyList, "concat_cols of nothing");
  Eigen::Index rows = parts[0]->value.rows(), cols = 0;
  for (const Var& p : parts) {
    if (p->value.rows() != rows) shape_error("concat_cols", parts[0]->value, p->value);
    cols += p->value.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p->value.cols()) = p->value;
    at += p->value.cols();
  }
  return make(std::move(out), parts, [](Node& self) {
    Eigen::Index at = 0;
    for (const Var& p : self.inputs) {
      Eigen::Index c = p->value.cols();
      if (p->requires_grad) accumulate(*p, self.grad.middleCols(at, c));
      at += c;
    }
  });
}

Var soft_cross_entropy_logits(const Var& logits, const Matrix& targets) {
  if (logits->value.rows() != targets.rows() || logits->value.cols() != targets.cols()) {
    shape_error("soft_cross_entropy", logits->value, targets);
  }
  Matrix q = softmax_rows(logits->value);
  const double rows = static_cast<double>(q.rows());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      if (targets(r, c) != 0.0) loss -= targets(r, c) * std::log(std::max(q(r, c), kProbabilityFloor));
    }
  }
  Matrix out(1, 1);
  out(0, 0) = rows > 0 ? loss / rows : 0.0;
  Node* pl = logits.get();
  return make(std::move(out), {logits}, [pl, q = std::move(q), targets, rows](Node& self) {
    Matrix g = q.array().colwise() * targets.rowwise().sum().array();
    g -= targets;
    accumulate(*pl, g * (self.grad(0, 0) / rows));
  });
}

bool decays(const Parameter& p) {
  return p.role != ParamRole::kBias && p.role != ParamRole::kNorm;
}

}  // namespace ocp::nn
