#pragma once

#include <string>

namespace romfac::trainer {

enum class ScheduleKind { constant, single_ramp, repetitive };

ScheduleKind schedule_kind_from_name(const std::string& name);
std::string schedule_kind_name(ScheduleKind k);

// Piecewise-linear coefficient schedule over 1-indexed training rounds.
//   constant:    target everywhere
//   single_ramp: 0 through the warmup, then a linear rise over
//                ramp_fraction * loop_rounds rounds, then flat at target
//   repetitive:  the same rise restarted every loop_rounds rounds
//                (a sawtooth with a plateau), repeated loop_count times
struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;
    double target = 0.0;
    int warmup_rounds = 1;    // rounds before the first rise
    int loop_rounds = 1;      // length of one rise-plateau loop
    int loop_count = 1;       // number of loops after the warmup
    double ramp_fraction = 0.5;  // share of a loop spent rising

    int total_rounds() const { return warmup_rounds + loop_count * loop_rounds; }
    void validate() const;  // throws std::invalid_argument
};

// Value for round m (1-indexed). Throws std::invalid_argument for m < 1
// or an invalid spec.
double schedule_value(int round, const ScheduleSpec& spec);

}  // namespace romfac::trainer
