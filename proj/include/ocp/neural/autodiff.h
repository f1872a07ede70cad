#ifndef OCP_NEURAL_AUTODIFF_H_
#define OCP_NEURAL_AUTODIFF_H_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ocp::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One value in a reverse-mode graph. Leaves are parameters or constants;
// interior nodes keep their inputs alive and know how to push their
// gradient back into them.
struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows in
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
};

using Var = std::shared_ptr<Node>;

Var constant(Matrix value);
Var leaf(Matrix value, bool requires_grad);

// Runs backpropagation from a 1x1 root.
void backward(const Var& root);

Var matmul(const Var& a, const Var& b);
// Elementwise a + b; b may also be a single row broadcast over a's rows.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
// Elementwise product with a constant (dropout masks).
Var mul_const(const Var& a, const Matrix& mask);
Var scale(const Var& a, double s);
Var transpose(const Var& a);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
Var gelu(const Var& a);
Var softmax_rows(const Var& a);
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-12);
// Rows of `table` selected by `ids`.
Var gather_rows(const Var& table, const std::vector<int>& ids);
Var slice_rows(const Var& a, long start, long count);
Var slice_cols(const Var& a, long start, long count);
Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
// Mean over rows of -sum_j p_j ln(max(q_j, 1e-7)) with q = softmax(logits).
// The gradient with respect to logits is (q * sum(p) - p) / rows.
Var soft_cross_entropy_logits(const Var& logits, const Matrix& targets);

Matrix softmax_rows(const Matrix& logits);

constexpr double kProbabilityFloor = 1e-7;

enum class ParamRole { kWeight, kBias, kNorm, kEmbedding };

struct Parameter {
  std::string name;
  ParamRole role = ParamRole::kWeight;
  Var var;
};

// Parameters that take part in decoupled weight decay.
bool decays(const Parameter& p);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_AUTODIFF_H_
