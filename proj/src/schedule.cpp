#include "vexp/schedule.hpp"

#include <cmath>
#include <cstdio>

#include "vexp/errors.hpp"

namespace vexp::schedule {

const char* strategy_name(Strategy s) {
    switch (s) {
    case Strategy::uniform: return "uniform";
    case Strategy::exponential: return "exponential";
    case Strategy::explicit_targets: return "explicit";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "uniform") return Strategy::uniform;
    if (name == "exponential") return Strategy::exponential;
    if (name == "explicit") return Strategy::explicit_targets;
    throw InvalidArgument("unknown strategy \"" + name + "\" (uniform|exponential|explicit)");
}

namespace {

void check_shape(uint64_t budget, uint32_t stages) {
    if (stages < 2)
        throw InvalidArgument("stages must be >= 2");
    if (budget < 1)
        throw InvalidArgument("budget must be >= 1");
}

} // namespace

ExpansionSchedule exponential_schedule(uint64_t budget, uint32_t stages) {
    check_shape(budget, stages);
    ExpansionSchedule s{Strategy::exponential, stages, budget, {}};
    s.cumulative.reserve(stages);
    s.cumulative.push_back(0);
    for (uint32_t i = 2; i < stages; ++i) {
        uint64_t doubling = i - 2 < 63 ? uint64_t(1) << (i - 2) : budget;
        s.cumulative.push_back(std::min(doubling, budget));
    }
    s.cumulative.push_back(budget); // final stage always lands on the budget
    return s;
}

ExpansionSchedule uniform_schedule(uint64_t budget, uint32_t stages) {
    check_shape(budget, stages);
    ExpansionSchedule s{Strategy::uniform, stages, budget, {}};
    s.cumulative.reserve(stages);
    for (uint32_t i = 1; i <= stages; ++i) {
        // round_half_up(budget * (i-1) / (stages-1)) in integers
        uint64_t num = 2 * budget * (i - 1) + (stages - 1);
        s.cumulative.push_back(num / (2 * uint64_t(stages - 1)));
    }
    return s;
}

ExpansionSchedule explicit_schedule(std::vector<uint64_t> cumulative) {
    if (cumulative.size() < 2)
        throw InvalidArgument("explicit schedule needs at least 2 stages");
    if (cumulative.front() != 0)
        throw InvalidArgument("explicit schedule must start at 0 new tokens");
    for (size_t i = 1; i < cumulative.size(); ++i)
        if (cumulative[i] < cumulative[i - 1])
            throw InvalidArgument("explicit schedule must be non-decreasing");
    if (cumulative.back() < 1)
        throw InvalidArgument("explicit schedule budget must be >= 1");
    ExpansionSchedule s{Strategy::explicit_targets, uint32_t(cumulative.size()),
                        cumulative.back(), std::move(cumulative)};
    return s;
}

MixturePlan mixture_schedule(uint32_t stages, double start_pct, double end_pct,
                             double constant_pct) {
    if (stages < 2)
        throw InvalidArgument("stages must be >= 2");
    if (!(start_pct >= 0) || !(start_pct < end_pct))
        throw InvalidArgument("need 0 <= start_pct < end_pct");
    if (!(end_pct + constant_pct <= 100) || constant_pct < 0)
        throw InvalidArgument("need end_pct + constant_pct <= 100 and constant_pct >= 0");

    MixturePlan plan{stages, start_pct, end_pct, constant_pct, {}};
    plan.rows.reserve(stages);
    const double pi = std::acos(-1.0);
    for (uint32_t i = 1; i <= stages; ++i) {
        double arabic =
            end_pct - (end_pct - start_pct) * std::cos(pi * (i - 1) / (2.0 * (stages - 1)));
        plan.rows.push_back(MixtureRow{arabic, 100.0 - constant_pct - arabic, constant_pct});
    }
    return plan;
}

std::vector<StagePlan> stage_plans(const ExpansionSchedule& exp, const MixturePlan& mix,
                                   uint64_t base_size, int64_t per_stage_tokens) {
    if (exp.stages != mix.stages || exp.cumulative.size() != mix.rows.size())
        throw InvalidArgument("expansion and mixture plans disagree on stage count");
    std::vector<StagePlan> plans;
    plans.reserve(exp.stages);
    for (uint32_t i = 0; i < exp.stages; ++i)
        plans.push_back(StagePlan{i + 1, exp.cumulative[i], base_size + exp.cumulative[i],
                                  mix.rows[i], per_stage_tokens});
    return plans;
}

double round2(double x) {
    return std::floor(x * 100.0 + 0.5) / 100.0;
}

std::string schedule_csv(const std::vector<StagePlan>& plans) {
    std::string out =
        "stage,new_subwords_cumulative,vocab_target,arabic_pct,english_pct,math_code_pct,"
        "token_budget\n";
    char line[256];
    for (const StagePlan& p : plans) {
        std::snprintf(line, sizeof line, "%u,%llu,%llu,%.2f,%.2f,%.2f,%lld\n", p.stage,
                      (unsigned long long)p.cumulative_new, (unsigned long long)p.vocab_target,
                      round2(p.mixture.arabic_pct), round2(p.mixture.english_pct),
                      round2(p.mixture.math_code_pct), (long long)p.token_budget);
        out += line;
    }
    return out;
}

} // namespace vexp::schedule
