#ifndef OCP_NEURAL_LAYERS_H_
#define OCP_NEURAL_LAYERS_H_

#include <string>
#include <vector>

#include "ocp/neural/autodiff.h"
#include "ocp/rng.h"

namespace ocp::nn {

enum class Init { kNormal002, kGlorotUniform, kOrthogonal, kZeros, kOnes };

Matrix init_matrix(Init init, long rows, long cols, Rng& rng);

// Creates a parameter leaf and records it in `registry`.
Var add_parameter(std::vector<Parameter>& registry, const std::string& name, ParamRole role,
                  Matrix value);

struct Linear {
  Var weight;  // in x out
  Var bias;    // 1 x out

  Var operator()(const Var& x) const { return add(matmul(x, weight), bias); }
};

Linear make_linear(std::vector<Parameter>& registry, const std::string& name, long in, long out,
                   Init init, Rng& rng);

struct LayerNorm {
  Var gamma;
  Var beta;

  Var operator()(const Var& x) const { return layer_norm(x, gamma, beta); }
};

LayerNorm make_layer_norm(std::vector<Parameter>& registry, const std::string& name, long dim);

// Dropout mask with entries 0 or 1/(1-rate). A single row is broadcast over
// the rows it multiplies, which gives per-feature (spatial) dropout.
Matrix dropout_mask(long rows, long cols, double rate, Rng& rng);
Var dropout(const Var& x, double rate, Rng* rng);

// Gate order i, f, g, o; forget bias starts at 1.
struct Lstm {
  Var kernel;     // in x 4h
  Var recurrent;  // h x 4h
  Var bias;       // 1 x 4h
  long hidden = 0;

  // Runs over the rows of `xs` and returns the final hidden state (1 x h).
  // Masks, when non-empty, are fixed for the whole sequence.
  Var run(const Var& xs, bool reverse, const Matrix& input_mask = {},
          const Matrix& recurrent_mask = {}) const;
};

Lstm make_lstm(std::vector<Parameter>& registry, const std::string& name, long in, long hidden,
               Rng& rng);

// Gate order r, z, n with separate input and recurrent biases.
struct Gru {
  Var kernel;          // in x 3h
  Var recurrent;       // h x 3h
  Var input_bias;      // 1 x 3h
  Var recurrent_bias;  // 1 x 3h
  long hidden = 0;

  Var run(const Var& xs, bool reverse) const;
};

Gru make_gru(std::vector<Parameter>& registry, const std::string& name, long in, long hidden,
             Rng& rng);

}  // namespace ocp::nn

#endif  // OCP_NEURAL_LAYERS_H_
