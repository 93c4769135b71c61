#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vexp::schedule {

enum class Strategy : uint8_t { uniform, exponential, explicit_targets };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Cumulative new-token counts per stage: c_1 = 0, c_T = budget,
// non-decreasing.
struct ExpansionSchedule {
    Strategy strategy = Strategy::exponential;
    uint32_t stages = 0;
    uint64_t budget = 0;
    std::vector<uint64_t> cumulative; // size = stages
};

// c_i = min(2^(i-2), budget) for 1 < i < T; final stage clamps to budget.
ExpansionSchedule exponential_schedule(uint64_t budget, uint32_t stages);

// c_i = round_half_up(budget * (i-1)/(stages-1)); c_T = budget exactly.
ExpansionSchedule uniform_schedule(uint64_t budget, uint32_t stages);

ExpansionSchedule explicit_schedule(std::vector<uint64_t> cumulative);

struct MixtureRow {
    double arabic_pct = 0;
    double english_pct = 0;
    double math_code_pct = 0;
};

// Per-stage corpus composition. Rows hold unrounded values (they sum to 100
// exactly); rounding to 2 decimals happens at serialization.
struct MixturePlan {
    uint32_t stages = 0;
    double start_pct = 30.0;
    double end_pct = 90.0;
    double constant_pct = 5.0;
    std::vector<MixtureRow> rows;
};

// arabic(i) = end - (end-start) * cos(pi*(i-1) / (2*(stages-1))), a quarter
// cosine from start to end; english = 100 - constant - arabic.
MixturePlan mixture_schedule(uint32_t stages, double start_pct = 30.0,
                             double end_pct = 90.0, double constant_pct = 5.0);

struct StagePlan {
    uint32_t stage = 0;          // 1-based
    uint64_t cumulative_new = 0; // c_i
    uint64_t vocab_target = 0;   // base_size + c_i
    MixtureRow mixture;
    int64_t token_budget = 0;
};

std::vector<StagePlan> stage_plans(const ExpansionSchedule& exp,
                                   const MixturePlan& mix, uint64_t base_size,
                                   int64_t per_stage_tokens);

// Half-up rounding to 2 decimals, the reporting rule for percentages.
double round2(double x);

// CSV with header stage,new_subwords_cumulative,vocab_target,arabic_pct,
// english_pct,math_code_pct,token_budget; 2-decimal percentages.
std::string schedule_csv(const std::vector<StagePlan>& plans);

} // namespace vexp::schedule
