#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "troupe/hyperparams.hpp"
#include "troupe/plan.hpp"

namespace troupe {

inline constexpr double kPriorAlpha = 1.0; // Beta(1,1) uniform prior
inline constexpr double kPriorBeta = 1.0;

struct TrustKey {
    std::string agent_id;
    std::string role_id;
    std::string category_id;

    auto operator<=>(const TrustKey&) const = default;
};

// Per-(agent, role, category) reliability state.
//
// pos_count / neg_count are cumulative soft evidence on top of a Beta(1,1)
// prior; ema_short tracks scaled rewards in [-1,1], ema_long tracks the
// posterior mean in [0,1]; score is the blended trust estimate in [0,1].
struct TrustEntry {
    double pos_count = kPriorAlpha;
    double neg_count = kPriorBeta;
    double ema_short = 0.0;
    double ema_long = 0.5;
    double score = 0.5;

    double posterior_mean() const { return pos_count / (pos_count + neg_count); }

    bool operator==(const TrustEntry&) const = default;
};

// Reward values at each stage of the transformation chain.
struct Reward {
    double raw = 0.0;              // pre-clamp, may exit [-1,1] via the penalty term
    double clamped = 0.0;          // in [-1,1]
    double scaled = 0.0;           // ramp_factor * clamped, in [-1,1]
    double success_fraction = 0.5; // (scaled + 1) / 2, in [0,1]
};

// Ablation switches for the update chain. All on by default; each "off"
// freezes that stage at a neutral value:
//   scaling off  -> ramp factor identically 1
//   bayes off    -> posterior mean pinned at 0.5, counts untouched
//   dual_ema off -> score becomes the scaled reward clamped to [0,1]
struct UpdateToggles {
    bool use_scaling = true;
    bool use_bayes = true;
    bool use_dual_ema = true;
};

// One applied update, for trajectory export and inspection.
struct UpdateRecord {
    std::string agent_id;
    std::string role_id;
    std::string category_id;
    double reward_raw = 0.0;
    double reward_scaled = 0.0;
    double posterior_mean = 0.5;
    double ema_short = 0.0;
    double ema_long = 0.5;
    double score = 0.5;
};

// All trust state: lazily initialized entries, per-category query counts,
// and the global step counter. Absent keys read as a fresh TrustEntry
// (score 0.5). Writes must be externally serialized; concurrent reads are
// fine as long as no write overlaps them.
class TrustStore {
  public:
    using EntryMap = std::map<TrustKey, TrustEntry>;

    // Read access; never creates an entry.
    TrustEntry entry(const TrustKey& key) const;
    double score(const std::string& agent, const std::string& role,
                 const std::string& category) const;

    // Write access; lazily initializes.
    TrustEntry& obtain(const TrustKey& key) { return entries_[key]; }

    std::uint64_t category_count(const std::string& category) const;
    void record_query(const std::string& category) { ++category_counts_[category]; }

    std::uint64_t step() const { return step_; }
    void advance_step() { ++step_; }

    // Ordered by (agent, role, category); the stable enumeration the
    // snapshot writer relies on.
    const EntryMap& entries() const { return entries_; }
    const std::map<std::string, std::uint64_t>& category_counts() const {
        return category_counts_;
    }

    void restore(EntryMap entries, std::map<std::string, std::uint64_t> counts,
                 std::uint64_t step) {
        entries_ = std::move(entries);
        category_counts_ = std::move(counts);
        step_ = step;
    }

    bool operator==(const TrustStore&) const = default;

  private:
    EntryMap entries_;
    std::map<std::string, std::uint64_t> category_counts_;
    std::uint64_t step_ = 0;
};

// Soft reward from per-agent and final-answer similarity.
// Agreement branch:  R = 2*sim_agent - 1.
// Divergence branch: R = 2*sim_agent - 1 - kappa * max(0, sim_final - sim_agent).
// Throws domain_error if a similarity is outside [0,1].
double compute_reward(double sim_agent, double sim_final, bool agreement, double kappa);

// min(1, max(-1, raw)).
double clamp_reward(double raw);

// 1 - exp(-category_count / ramp_t), in [0,1), nondecreasing in the count.
double ramp_factor(std::uint64_t category_count, double ramp_t);

// Adds success_fraction / (1 - success_fraction) to the soft counts and
// returns the new posterior mean. Total count grows by exactly 1.
double bayes_update(TrustEntry& entry, double success_fraction);

// In-place dual EMA step; f tracks the scaled reward, g the posterior mean.
void ema_update(TrustEntry& entry, double scaled_reward, double posterior_mean,
                const HyperParams& params);

// mu*f + (1-mu)*g + gamma*scaled_reward, clamped to [0,1].
double final_score(double ema_short, double ema_long, double scaled_reward,
                   const HyperParams& params);

// Runs the full chain for every assignment in the plan, touching only the
// (agent, assigned-role, plan-category) triples. Entries of other agents,
// roles, and categories are untouched. Increments the step counter once.
// Throws contract_error if a selected agent has no similarity.
std::vector<UpdateRecord> apply_outcome(TrustStore& store, const RoutingPlan& plan,
                                        const std::map<std::string, double>& per_agent_similarity,
                                        double final_similarity, bool agreement,
                                        const HyperParams& params,
                                        const UpdateToggles& toggles = {});

} // namespace troupe
