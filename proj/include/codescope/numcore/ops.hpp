#pragma once

#include <vector>

#include "codescope/numcore/autograd.hpp"

namespace codescope::nc {

// ---- elementwise / arithmetic ----
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var abs(const Var& a);
Var sigmoid(const Var& a);
Var gelu(const Var& a);
Var square(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);

/// Broadcast: adds 1-D bias [C] to every row of [N x C].
Var add_rowvec(const Var& m, const Var& b);
/// Broadcast: multiplies tensor by a scalar Var.
Var mul_scalar(const Var& scalar, const Var& t);

// ---- linear algebra ----
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var dot(const Var& u, const Var& v);
Var cosine_similarity(const Var& u, const Var& v);

// ---- reductions / reshaping ----
Var sum(const Var& a);
Var mean_rows(const Var& m);            // [N x C] -> [C]
Var row(const Var& m, int64_t i);       // [N x C] -> [C]
Var stack_rows(const std::vector<Var>& rows);   // k x [C] -> [k x C]
Var concat(const std::vector<Var>& vecs);       // 1-D concat
Var slice_cols(const Var& m, int64_t c0, int64_t c1);
Var concat_cols(const std::vector<Var>& mats);
Var add_many(const std::vector<Var>& terms);

// ---- nn primitives ----
Var softmax(const Var& x, int axis = -1);
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
Var cross_entropy(const Var& logits, const std::vector<int64_t>& targets);
/// Gathers rows of `table` by token id; gradient scatters back.
Var embedding_rows(const Var& table, const std::vector<int64_t>& ids);

// ---- non-differentiable helpers on plain tensors ----
double cosine_similarity(const Tensor& u, const Tensor& v);

}  // namespace codescope::nc
