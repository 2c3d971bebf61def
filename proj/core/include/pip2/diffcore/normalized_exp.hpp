#pragma once

#include "pip2/diffcore/jet_tape.hpp"

namespace pip2::diffcore {

// Column-wise normalized exponential (softmax) applied to a jet: outputs are positive and
// sum to one in every column; derivative streams are transformed by the chain rule.
JetBlock normalized_exp(const JetBlock& logits);

// Pulls output seeds back to seeds on the logits. `features` must be normalized_exp(logits).
JetBlock normalized_exp_backward(const JetBlock& logits, const JetBlock& features,
                                 const JetBlock& seeds);

}  // namespace pip2::diffcore
