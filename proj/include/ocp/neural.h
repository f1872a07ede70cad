#ifndef OCP_NEURAL_H_
#define OCP_NEURAL_H_

#include "ocp/neural/autodiff.h"
#include "ocp/neural/checkpoint.h"
#include "ocp/neural/classifier.h"
#include "ocp/neural/finetune.h"
#include "ocp/neural/layers.h"
#include "ocp/neural/model.h"
#include "ocp/neural/optim.h"
#include "ocp/neural/soft_lstm.h"
#include "ocp/neural/tokenizer.h"

#endif  // OCP_NEURAL_H_
