#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentinel/learn.hpp"
#include "sentinel/matrix.hpp"

namespace sentinel {

enum class DomainKind { Linear, Log, Integer, Categorical };

struct ParamDomain {
    std::string name;
    DomainKind kind = DomainKind::Linear;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::string> choices;  // Categorical only

    static ParamDomain linear(std::string name, double lo, double hi);
    static ParamDomain log(std::string name, double lo, double hi);
    static ParamDomain integer(std::string name, std::int64_t lo, std::int64_t hi);
    static ParamDomain categorical(std::string name, std::vector<std::string> choices);
};

// A point holds one native value per domain: the real value for continuous
// domains, a whole number for integer domains and the choice index for
// categorical ones.
using ParamPoint = std::vector<double>;

struct SearchSpace {
    std::vector<ParamDomain> params;

    std::size_t size() const { return params.size(); }
    // Throws InvalidArgument on empty or non-finite domains.
    void validate() const;
    nlohmann::json to_json(const ParamPoint& point) const;
    ParamPoint from_json(const nlohmann::json& document) const;
};

// Stage names used in trial records and the tuning log.
inline constexpr const char* kStageValidation = "validation";
inline constexpr const char* kStageCrossValidation = "cv";

inline constexpr double kFailedObjective = std::numeric_limits<double>::lowest();

struct Trial {
    std::size_t index = 0;
    ParamPoint params;
    double objective = kFailedObjective;
    std::vector<double> fold_scores;  // empty or one per fold
    std::string stage;
    std::uint64_t seed = 0;
    bool failed = false;
};

// `validation` scores a point on a fixed validation split. `cross_validation`,
// when set, returns per-fold scores whose mean is the objective; without it
// the later stages fall back to `validation`. Both must be deterministic in
// (point, seed) and, for parallel GA evaluation, thread-safe.
struct Objective {
    std::function<double(const ParamPoint&, std::uint64_t)> validation;
    std::function<std::vector<double>(const ParamPoint&, std::uint64_t)> cross_validation;
};

struct TuneBudget {
    std::size_t bo_stage1_trials = 30;
    std::size_t bo_stage2_trials = 20;
    std::size_t ga_population = 50;
    std::size_t ga_generations = 3;
    std::size_t ga_finetune_generations = 2;

    void validate() const;
};

struct TuneOptions {
    std::size_t bo_random_startup = 10;
    double tpe_gamma = 0.25;
    std::size_t tpe_candidates = 64;
    std::size_t bo_stage2_seeds = 5;

    std::size_t ga_tournament = 3;
    double ga_crossover_rate = 0.9;
    double ga_mutation_rate = 0.1;
    double ga_mutation_sigma = 0.1;  // fraction of the (transformed) range
    std::size_t ga_finetune_pool = 10;

    // Evaluated as the first BO trial / first GA individual when set.
    std::optional<ParamPoint> warm_start;
    // Initial GA population; overrides random initialization when non-empty.
    std::vector<ParamPoint> ga_initial_population;
    std::size_t jobs = 1;
};

struct TuneResult {
    Trial best;
    std::vector<Trial> trials;
    // GA: best objective after each generation, validation stage first.
    std::vector<double> generation_best;

    std::size_t evaluations() const { return trials.size(); }
};

// Two-stage Bayesian optimization with a tree-structured Parzen estimator.
// Stage 1 scores budget.bo_stage1_trials points on the validation objective;
// stage 2 re-scores the stage-1 top points under cross-validation and then
// continues TPE on the stage-2 history. Returns the best stage-2 trial.
TuneResult tune_bo(const SearchSpace& space, const Objective& objective, const TuneBudget& budget,
                   std::uint64_t seed, const TuneOptions& options = {});

// Genetic algorithm: ga_generations generations of ga_population individuals
// on the validation objective (elitism 1, the elite is not re-evaluated), then
// the top ga_finetune_pool individuals are re-scored under cross-validation
// and evolved for ga_finetune_generations more generations with halved
// mutation sigma. Returns the best cross-validated individual.
TuneResult tune_ga(const SearchSpace& space, const Objective& objective, const TuneBudget& budget,
                   std::uint64_t seed, const TuneOptions& options = {});

// Number of objective evaluations each tuner performs for a budget.
std::size_t bo_evaluation_count(const TuneBudget& budget);
std::size_t ga_evaluation_count(const TuneBudget& budget, const TuneOptions& options = {});

// CSV: trial_index, params (JSON), objective, stage.
void write_tuning_log(std::ostream& out, const SearchSpace& space, std::span<const Trial> trials);

// ---------------------------------------------------------------------------
// Cross-validation.
// ---------------------------------------------------------------------------

// Stratified fold assignment: each class's indices are shuffled with a stream
// derived from (seed, class) and dealt round-robin. Returns the validation
// indices of each fold, sorted. Throws FoldClassMissing when a class has
// fewer members than folds.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, std::size_t folds, std::uint64_t seed);

// Trains on the complement of fold_validation and returns p_fake for its rows.
using FoldModel = std::function<std::vector<double>(std::span<const std::size_t> train,
                                                    std::span<const std::size_t> validation)>;

// Per-fold F1 of `model` under stratified_folds.
std::vector<double> cross_validate(std::span<const int> y, std::size_t folds, std::uint64_t seed,
                                   const FoldModel& model);

// Mean stratified k-fold F1 of a classifier configuration.
double cv_objective(const Matrix& x, std::span<const int> y, const ClassifierConfig& config, std::size_t folds = 5,
                    std::uint64_t seed = 0);
std::vector<double> cv_fold_scores(const Matrix& x, std::span<const int> y, const ClassifierConfig& config,
                                   std::size_t folds = 5, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Classifier search spaces.
// ---------------------------------------------------------------------------

// GBDT: n_trees [50, 400] int, learning_rate [0.01, 0.3] log, max_depth
// [2, 8] int, lambda_l2 [0.1, 10] log, min_samples_leaf [1, 20] int.
SearchSpace default_search_space(ClassifierKind kind);
ClassifierConfig config_from_point(ClassifierKind kind, const SearchSpace& space, const ParamPoint& point);
ParamPoint point_from_config(const ClassifierConfig& config, const SearchSpace& space);

// Objective over a training matrix: validation on a fixed stratified 80/20
// holdout, cross-validation over `folds` stratified folds. Both split streams
// derive from `seed`.
Objective classifier_objective(const Matrix& x, std::span<const int> y, ClassifierKind kind,
                               const SearchSpace& space, std::uint64_t seed, std::size_t folds = 5);

}  // namespace sentinel
