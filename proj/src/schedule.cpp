#include "romfac/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace romfac::trainer {

ScheduleKind schedule_kind_from_name(const std::string& name) {
    if (name == "constant") return ScheduleKind::constant;
    if (name == "single_ramp") return ScheduleKind::single_ramp;
    if (name == "repetitive") return ScheduleKind::repetitive;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string schedule_kind_name(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::single_ramp: return "single_ramp";
        case ScheduleKind::repetitive: return "repetitive";
    }
    return "?";
}

void ScheduleSpec::validate() const {
    if (!std::isfinite(target) || target < 0.0)
        throw std::invalid_argument("schedule target must be finite and non-negative");
    if (kind == ScheduleKind::constant) return;
    if (warmup_rounds < 1) throw std::invalid_argument("schedule warmup must be at least 1 round");
    if (loop_rounds < 1) throw std::invalid_argument("schedule loop length must be at least 1");
    if (loop_count < 1) throw std::invalid_argument("schedule loop count must be at least 1");
    if (!(ramp_fraction > 0.0) || ramp_fraction > 1.0)
        throw std::invalid_argument("schedule ramp fraction must be in (0,1]");
}

double schedule_value(int round, const ScheduleSpec& spec) {
    spec.validate();
    if (round < 1) throw std::invalid_argument("schedule rounds are 1-indexed");
    if (spec.kind == ScheduleKind::constant) return spec.target;

    const int past_warmup = std::max(round - spec.warmup_rounds, 0);
    const double rise = spec.ramp_fraction * spec.loop_rounds;
    double progress;
    if (spec.kind == ScheduleKind::single_ramp)
        progress = std::min(static_cast<double>(past_warmup), rise);
    else
        progress = std::min(static_cast<double>(past_warmup % spec.loop_rounds), rise);
    return progress / rise * spec.target;
}

}  // namespace romfac::trainer
