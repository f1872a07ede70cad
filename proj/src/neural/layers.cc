#include "ocp/neural/layers.h"

#include <cmath>

namespace ocp::nn {

Matrix init_matrix(Init init, long rows, long cols, Rng& rng) {
  Matrix m(rows, cols);
  switch (init) {
    case Init::kNormal002:
      for (long i = 0; i < m.size(); ++i) m.data()[i] = 0.02 * rng.normal();
      break;
    case Init::kGlorotUniform: {
      double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
      break;
    }
    case Init::kOrthogonal: {
      long big = std::max(rows, cols), small = std::min(rows, cols);
      Eigen::MatrixXd a(big, small);
      for (long r = 0; r < big; ++r) {
        for (long c = 0; c < small; ++c) a(r, c) = rng.normal();
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
      Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
      for (long c = 0; c < small; ++c) {
        if (r(c, c) < 0) q.col(c) *= -1.0;
      }
      if (rows >= cols) {
        m = q;
      } else {
        m = q.transpose();
      }
      break;
    }
    case Init::kZeros:
      m.setZero();
      break;
    case Init::kOnes:
      m.setOnes();
      break;
  }
  return m;
}

Var add_parameter(std::vector<Parameter>& registry, const std::string& name, ParamRole role,
                  Matrix value) {
  Var v = leaf(std::move(value), true);
  registry.push_back({name, role, v});
  return v;
}

Linear make_linear(std::vector<Parameter>& registry, const std::string& name, long in, long out,
                   Init init, Rng& rng) {
  Linear l;
  l.weight = add_parameter(registry, name + ".weight", ParamRole::kWeight, init_matrix(init, in, out, rng));
  l.bias = add_parameter(registry, name + ".bias", ParamRole::kBias, Matrix::Zero(1, out));
  return l;
}

LayerNorm make_layer_norm(std::vector<Parameter>& registry, const std::string& name, long dim) {
  LayerNorm ln;
  ln.gamma = add_parameter(registry, name + ".gamma", ParamRole::kNorm, Matrix::Ones(1, dim));
  ln.beta = add_parameter(registry, name + ".beta", ParamRole::kNorm, Matrix::Zero(1, dim));
  return ln;
}

Matrix dropout_mask(long rows, long cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - rate);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < rate ? 0.0 : keep;
  return m;
}

Var dropout(const Var& x, double rate, Rng* rng) {
  if (!rng || rate <= 0.0) return x;
  return mul_const(x, dropout_mask(x->value.rows(), x->value.cols(), rate, *rng));
}

Lstm make_lstm(std::vector<Parameter>& registry, const std::string& name, long in, long hidden,
               Rng& rng) {
  Lstm l;
  l.hidden = hidden;
  l.kernel = add_parameter(registry, name + ".kernel", ParamRole::kWeight,
                           init_matrix(Init::kGlorotUniform, in, 4 * hidden, rng));
  l.recurrent = add_parameter(registry, name + ".recurrent", ParamRole::kWeight,
                              init_matrix(Init::kOrthogonal, hidden, 4 * hidden, rng));
  Matrix b = Matrix::Zero(1, 4 * hidden);
  b.middleCols(hidden, hidden).setOnes();
  l.bias = add_parameter(registry, name + ".bias", ParamRole::kBias, std::move(b));
  return l;
}

Var Lstm::run(const Var& xs, bool reverse, const Matrix& input_mask,
              const Matrix& recurrent_mask) const {
  Var inputs = input_mask.size() ? mul_const(xs, input_mask) : xs;
  Var projected = add(matmul(inputs, kernel), bias);
  Var h = constant(Matrix::Zero(1, hidden));
  Var c = constant(Matrix::Zero(1, hidden));
  const long steps = xs->value.rows();
  for (long k = 0; k < steps; ++k) {
    long t = reverse ? steps - 1 - k : k;
    Var h_in = recurrent_mask.size() ? mul_const(h, recurrent_mask) : h;
    Var gates = add(slice_rows(projected, t, 1), matmul(h_in, recurrent));
    Var i = sigmoid(slice_cols(gates, 0, hidden));
    Var f = sigmoid(slice_cols(gates, hidden, hidden));
    Var g = tanh(slice_cols(gates, 2 * hidden, hidden));
    Var o = sigmoid(slice_cols(gates, 3 * hidden, hidden));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh(c));
  }
  return h;
}

Gru make_gru(std::vector<Parameter>& registry, const std::string& name, long in, long hidden,
             Rng& rng) {
  Gru g;
  g.hidden = hidden;
  g.kernel = add_parameter(registry, name + ".kernel", ParamRole::kWeight,
                           init_matrix(Init::kGlorotUniform, in, 3 * hidden, rng));
  g.recurrent = add_parameter(registry, name + ".recurrent", ParamRole::kWeight,
                              init_matrix(Init::kOrthogonal, hidden, 3 * hidden, rng));
  g.input_bias = add_parameter(registry, name + ".input_bias", ParamRole::kBias, Matrix::Zero(1, 3 * hidden));
  g.recurrent_bias =
      add_parameter(registry, name + ".recurrent_bias", ParamRole::kBias, Matrix::Zero(1, 3 * hidden));
  return g;
}

Var Gru::run(const Var& xs, bool reverse) const {
  Var projected = add(matmul(xs, kernel), input_bias);
  Var h = constant(Matrix::Zero(1, hidden));
  const long steps = xs->value.rows();
  for (long k = 0; k < steps; ++k) {
    long t = reverse ? steps - 1 - k : k;
    Var xp = slice_rows(projected, t, 1);
    Var hp = add(matmul(h, recurrent), recurrent_bias);
    Var r = sigmoid(add(slice_cols(xp, 0, hidden), slice_cols(hp, 0, hidden)));
    Var z = sigmoid(add(slice_cols(xp, hidden, hidden), slice_cols(hp, hidden, hidden)));
    Var n = tanh(add(slice_cols(xp, 2 * hidden, hidden), mul(r, slice_cols(hp, 2 * hidden, hidden))));
    // h' = (1 - z) * n + z * h = n + z * (h - n)
    h = add(n, mul(z, sub(h, n)));
  }
  return h;
}

}  // namespace ocp::nn
