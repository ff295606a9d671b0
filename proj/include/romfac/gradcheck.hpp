#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "romfac/net.hpp"
#include "romfac/tensor.hpp"

namespace romfac::diffcore {

struct GradCheckReport {
    int cases = 0;
    int checked_values = 0;
    int failures = 0;
    double max_rel_error = 0.0;
    std::string first_failure;
    bool pass() const { return failures == 0; }
};

// Central-difference comparison: |analytic - numeric| must stay within
// rel_tol relative to max(|analytic|, |numeric|), or abs_tol near zero.
bool gradients_agree(double analytic, double numeric, double rel_tol, double abs_tol,
                     double* rel_error_out);

// Loss evaluated at (net, input); perturbs every parameter and every
// input coordinate with central differences (step h) and compares to the
// analytic gradients supplied per flat coordinate.
struct GradCheckCase {
    std::function<double(const FeedforwardNet&, const Tensor&)> loss;
    std::vector<double> analytic_param_grads;  // for_each_param order, flattened
    std::vector<double> analytic_input_grads;
};

GradCheckReport check_case(const FeedforwardNet& net, const Tensor& input,
                           const GradCheckCase& c, double step, double rel_tol, double abs_tol);

// Standard suite: random nets/inputs with tape gradients of
// cross-entropy-after-softmax and of weighted-logit losses.
GradCheckReport run_gradcheck_suite(int cases, std::uint64_t seed);

}  // namespace romfac::diffcore
