#include "sentinel/tune.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sentinel/csv.hpp"
#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/model.hpp"
#include "sentinel/parallel.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

ParamDomain ParamDomain::linear(std::string name, double lo, double hi) {
    return {std::move(name), DomainKind::Linear, lo, hi, {}};
}

ParamDomain ParamDomain::log(std::string name, double lo, double hi) {
    return {std::move(name), DomainKind::Log, lo, hi, {}};
}

ParamDomain ParamDomain::integer(std::string name, std::int64_t lo, std::int64_t hi) {
    return {std::move(name), DomainKind::Integer, static_cast<double>(lo), static_cast<double>(hi), {}};
}

ParamDomain ParamDomain::categorical(std::string name, std::vector<std::string> choices) {
    const double hi = choices.empty() ? 0.0 : static_cast<double>(choices.size() - 1);
    return {std::move(name), DomainKind::Categorical, 0.0, hi, std::move(choices)};
}

void SearchSpace::validate() const {
    if (params.empty()) {
        throw Error(ErrorCode::InvalidArgument, "search space has no parameters");
    }
    for (const auto& p : params) {
        if (p.kind == DomainKind::Categorical) {
            if (p.choices.empty()) {
                throw Error(ErrorCode::InvalidArgument, "categorical domain '" + p.name + "' has no choices");
            }
            continue;
        }
        if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo > p.hi) {
            throw Error(ErrorCode::InvalidArgument, "domain '" + p.name + "' has invalid bounds");
        }
        if (p.kind == DomainKind::Log && p.lo <= 0.0) {
            throw Error(ErrorCode::InvalidArgument, "log domain '" + p.name + "' must be positive");
        }
        if (p.kind == DomainKind::Integer && (p.lo != std::floor(p.lo) || p.hi != std::floor(p.hi))) {
            throw Error(ErrorCode::InvalidArgument, "integer domain '" + p.name + "' has fractional bounds");
        }
    }
}

nlohmann::json SearchSpace::to_json(const ParamPoint& point) const {
    if (point.size() != params.size()) {
        throw Error(ErrorCode::DimensionMismatch, "point does not match search space");
    }
    nlohmann::json document = nlohmann::json::object();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        switch (p.kind) {
            case DomainKind::Categorical:
                document[p.name] = p.choices.at(static_cast<std::size_t>(point[i]));
                break;
            case DomainKind::Integer:
                document[p.name] = static_cast<std::int64_t>(point[i]);
                break;
            default:
                document[p.name] = point[i];
        }
    }
    return document;
}

ParamPoint SearchSpace::from_json(const nlohmann::json& document) const {
    ParamPoint point;
    for (const auto& p : params) {
        if (!document.contains(p.name)) {
            throw Error(ErrorCode::Parse, "parameter '" + p.name + "' missing");
        }
        const auto& value = document.at(p.name);
        if (p.kind == DomainKind::Categorical) {
            const auto text = value.get<std::string>();
            const auto it = std::find(p.choices.begin(), p.choices.end(), text);
            if (it == p.choices.end()) {
                throw Error(ErrorCode::Parse, "unknown choice '" + text + "' for " + p.name);
            }
            point.push_back(static_cast<double>(it - p.choices.begin()));
        } else {
            point.push_back(value.get<double>());
        }
    }
    return point;
}

void TuneBudget::validate() const {
    if (bo_stage1_trials == 0 || bo_stage2_trials == 0 || ga_population == 0 || ga_generations == 0 ||
        ga_finetune_generations == 0) {
        throw Error(ErrorCode::InvalidArgument, "tuning budget entries must be positive");
    }
}

namespace {

// Genes live in the unit interval for ordered domains (log domains in log
// space, integers as equal-width cells) and as the choice index for
// categorical domains.
using Genome = std::vector<double>;

bool ordered(const ParamDomain& d) { return d.kind != DomainKind::Categorical; }

double encode(const ParamDomain& d, double native) {
    switch (d.kind) {
        case DomainKind::Categorical:
            return native;
        case DomainKind::Integer:
            return (native - d.lo + 0.5) / (d.hi - d.lo + 1.0);
        case DomainKind::Log:
            if (d.hi == d.lo) {
                return 0.5;
            }
            return (std::log(native) - std::log(d.lo)) / (std::log(d.hi) - std::log(d.lo));
        case DomainKind::Linear:
            break;
    }
    if (d.hi == d.lo) {
        return 0.5;
    }
    return (native - d.lo) / (d.hi - d.lo);
}

double decode(const ParamDomain& d, double gene) {
    switch (d.kind) {
        case DomainKind::Categorical:
            return gene;
        case DomainKind::Integer:
            return std::clamp(std::floor(d.lo + gene * (d.hi - d.lo + 1.0)), d.lo, d.hi);
        case DomainKind::Log:
            return std::clamp(std::exp(std::log(d.lo) + gene * (std::log(d.hi) - std::log(d.lo))), d.lo, d.hi);
        case DomainKind::Linear:
            break;
    }
    return std::clamp(d.lo + gene * (d.hi - d.lo), d.lo, d.hi);
}

ParamPoint decode(const SearchSpace& space, const Genome& genome) {
    ParamPoint point(genome.size());
    for (std::size_t i = 0; i < genome.size(); ++i) {
        point[i] = decode(space.params[i], genome[i]);
    }
    return point;
}

Genome encode(const SearchSpace& space, const ParamPoint& point) {
    if (point.size() != space.size()) {
        throw Error(ErrorCode::DimensionMismatch, "point does not match search space");
    }
    Genome genome(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        genome[i] = std::clamp(encode(space.params[i], point[i]), 0.0,
                               ordered(space.params[i]) ? 1.0 : static_cast<double>(space.params[i].choices.size() - 1));
    }
    return genome;
}

Genome random_genome(const SearchSpace& space, Rng& rng) {
    Genome genome;
    for (const auto& d : space.params) {
        genome.push_back(ordered(d) ? rng.uniform() : static_cast<double>(rng.index(d.choices.size())));
    }
    return genome;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t index) {
    return derive_seed(seed, "trial:" + std::to_string(index));
}

Trial evaluate(const Objective& objective, const ParamPoint& point, std::size_t index, std::uint64_t seed,
               const char* stage) {
    Trial trial;
    trial.index = index;
    trial.params = point;
    trial.stage = stage;
    trial.seed = trial_seed(seed, index);
    const bool use_cv = std::string_view(stage) == kStageCrossValidation && objective.cross_validation;
    try {
        double value = 0.0;
        if (use_cv) {
            trial.fold_scores = objective.cross_validation(point, trial.seed);
            if (trial.fold_scores.empty()) {
                throw Error(ErrorCode::EmptySet, "cross-validation returned no folds");
            }
            value = std::accumulate(trial.fold_scores.begin(), trial.fold_scores.end(), 0.0) /
                    static_cast<double>(trial.fold_scores.size());
        } else {
            value = objective.validation(point, trial.seed);
        }
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::InvalidArgument, "objective returned a non-finite value");
        }
        trial.objective = value;
    } catch (const std::exception& e) {
        spdlog::warn("trial {} failed: {}", index, e.what());
        trial.objective = kFailedObjective;
        trial.fold_scores.clear();
        trial.failed = true;
    }
    return trial;
}

// Higher objective first; earlier trial wins ties.
bool better(const Trial& a, const Trial& b) {
    if (a.objective != b.objective) {
        return a.objective > b.objective;
    }
    return a.index < b.index;
}

const Trial& best_of(std::span<const Trial> trials) {
    return *std::min_element(trials.begin(), trials.end(), better);
}

// ---------------------------------------------------------------------------
// Tree-structured Parzen estimator.
// ---------------------------------------------------------------------------

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// One-dimensional Parzen estimator on [0, 1]: truncated Gaussians at the
// observations plus one uniform prior component, equally weighted.
struct Parzen {
    std::vector<double> centers;
    double sigma = 0.25;

    explicit Parzen(std::vector<double> points) : centers(std::move(points)) {
        const double m = static_cast<double>(centers.size());
        if (centers.size() >= 2) {
            const double mean = std::accumulate(centers.begin(), centers.end(), 0.0) / m;
            double var = 0.0;
            for (const double c : centers) {
                var += (c - mean) * (c - mean);
            }
            const double sd = std::sqrt(var / m);
            sigma = std::clamp(1.06 * sd * std::pow(m, -0.2), 0.03, 0.5);
        }
    }

    double density(double x) const {
        double total = 1.0;  // uniform prior on [0, 1]
        for (const double c : centers) {
            const double mass = normal_cdf((1.0 - c) / sigma) - normal_cdf(-c / sigma);
            const double z = (x - c) / sigma;
            total += std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * 3.14159265358979323846) * mass);
        }
        return total / static_cast<double>(centers.size() + 1);
    }

    double sample(Rng& rng) const {
        const std::size_t component = rng.index(centers.size() + 1);
        if (component == centers.size()) {
            return rng.uniform();
        }
        for (int attempt = 0; attempt < 64; ++attempt) {
            const double x = rng.normal(centers[component], sigma);
            if (x >= 0.0 && x <= 1.0) {
                return x;
            }
        }
        return std::clamp(centers[component], 0.0, 1.0);
    }
};

struct Categorical {
    std::vector<double> weights;

    Categorical(const std::vector<double>& indices, std::size_t choices) : weights(choices, 1.0) {
        for (const double i : indices) {
            weights[static_cast<std::size_t>(i)] += 1.0;
        }
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (auto& w : weights) {
            w /= total;
        }
    }

    double density(double index) const { return weights[static_cast<std::size_t>(index)]; }

    double sample(Rng& rng) const {
        double u = rng.uniform();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (u < weights[i]) {
                return static_cast<double>(i);
            }
            u -= weights[i];
        }
        return static_cast<double>(weights.size() - 1);
    }
};

Genome tpe_propose(const SearchSpace& space, std::span<const Trial> history, const TuneOptions& options, Rng& rng) {
    std::vector<const Trial*> ranked;
    for (const auto& t : history) {
        ranked.push_back(&t);
    }
    std::sort(ranked.begin(), ranked.end(), [](const Trial* a, const Trial* b) { return better(*a, *b); });
    const auto n_good = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(options.tpe_gamma * static_cast<double>(ranked.size()))));

    std::vector<Genome> genomes;
    for (const auto* t : ranked) {
        genomes.push_back(encode(space, t->params));
    }

    const std::size_t dims = space.size();
    std::vector<Genome> candidates(options.tpe_candidates, Genome(dims));
    std::vector<double> scores(options.tpe_candidates, 0.0);
    for (std::size_t dim = 0; dim < dims; ++dim) {
        std::vector<double> good;
        std::vector<double> bad;
        for (std::size_t r = 0; r < genomes.size(); ++r) {
            (r < n_good ? good : bad).push_back(genomes[r][dim]);
        }
        const auto& domain = space.params[dim];
        if (ordered(domain)) {
            const Parzen l(good);
            const Parzen g(bad);
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const double x = l.sample(rng);
                candidates[c][dim] = x;
                scores[c] += std::log(l.density(x)) - std::log(g.density(x));
            }
        } else {
            const Categorical l(good, domain.choices.size());
            const Categorical g(bad, domain.choices.size());
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                const double x = l.sample(rng);
                candidates[c][dim] = x;
                scores[c] += std::log(l.density(x)) - std::log(g.density(x));
            }
        }
    }
    const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
    return candidates[static_cast<std::size_t>(best)];
}

}  // namespace

std::size_t bo_evaluation_count(const TuneBudget& budget) { return budget.bo_stage1_trials + budget.bo_stage2_trials; }

std::size_t ga_evaluation_count(const TuneBudget& budget, const TuneOptions& options) {
    const std::size_t pool = std::min(options.ga_finetune_pool, budget.ga_population);
    return budget.ga_population + (budget.ga_generations - 1) * (budget.ga_population - 1) + pool +
           budget.ga_finetune_generations * (pool - 1);
}

TuneResult tune_bo(const SearchSpace& space, const Objective& objective, const TuneBudget& budget,
                   std::uint64_t seed, const TuneOptions& options) {
    space.validate();
    budget.validate();
    if (!objective.validation) {
        throw Error(ErrorCode::InvalidArgument, "objective has no validation function");
    }
    Rng rng(derive_seed(seed, "bo"));
    TuneResult result;

    std::vector<Trial> stage1;
    for (std::size_t i = 0; i < budget.bo_stage1_trials; ++i) {
        Genome genome;
        if (i == 0 && options.warm_start) {
            genome = encode(space, *options.warm_start);
        } else if (i < options.bo_random_startup) {
            genome = random_genome(space, rng);
        } else {
            genome = tpe_propose(space, stage1, options, rng);
        }
        stage1.push_back(evaluate(objective, decode(space, genome), result.trials.size(), seed, kStageValidation));
        result.trials.push_back(stage1.back());
    }

    std::vector<Trial> ranked = stage1;
    std::sort(ranked.begin(), ranked.end(), better);
    const std::size_t seeds = std::min({options.bo_stage2_seeds, ranked.size(), budget.bo_stage2_trials});
    std::vector<Trial> stage2;
    for (std::size_t i = 0; i < budget.bo_stage2_trials; ++i) {
        const ParamPoint point =
            i < seeds ? ranked[i].params : decode(space, tpe_propose(space, stage2, options, rng));
        stage2.push_back(evaluate(objective, point, result.trials.size(), seed, kStageCrossValidation));
        result.trials.push_back(stage2.back());
    }
    result.best = best_of(stage2);
    return result;
}

TuneResult tune_ga(const SearchSpace& space, const Objective& objective, const TuneBudget& budget,
                   std::uint64_t seed, const TuneOptions& options) {
    space.validate();
    budget.validate();
    if (!objective.validation) {
        throw Error(ErrorCode::InvalidArgument, "objective has no validation function");
    }
    Rng rng(derive_seed(seed, "ga"));
    TuneResult result;

    struct Individual {
        Genome genome;
        Trial trial;
    };

    auto evaluate_batch = [&](std::vector<Genome> genomes, const char* stage) {
        const std::size_t first = result.trials.size();
        std::vector<Individual> batch(genomes.size());
        parallel_for(genomes.size(), options.jobs, [&](std::size_t i) {
            batch[i].genome = genomes[i];
            batch[i].trial = evaluate(objective, decode(space, genomes[i]), first + i, seed, stage);
        });
        for (const auto& ind : batch) {
            result.trials.push_back(ind.trial);
        }
        return batch;
    };

    auto rank = [](std::vector<Individual>& population) {
        std::stable_sort(population.begin(), population.end(),
                         [](const Individual& a, const Individual& b) { return better(a.trial, b.trial); });
    };

    auto tournament = [&](const std::vector<Individual>& population) -> const Individual& {
        std::size_t winner = rng.index(population.size());
        for (std::size_t t = 1; t < options.ga_tournament; ++t) {
            const std::size_t challenger = rng.index(population.size());
            if (better(population[challenger].trial, population[winner].trial)) {
                winner = challenger;
            }
        }
        return population[winner];
    };

    auto offspring = [&](const std::vector<Individual>& population, std::size_t count, double sigma) {
        std::vector<Genome> children;
        for (std::size_t c = 0; c < count; ++c) {
            const Genome& a = tournament(population).genome;
            const Genome& b = tournament(population).genome;
            Genome child = a;
            if (rng.bernoulli(options.ga_crossover_rate)) {
                for (std::size_t g = 0; g < child.size(); ++g) {
                    if (rng.bernoulli(0.5)) {
                        child[g] = b[g];
                    }
                }
            }
            for (std::size_t g = 0; g < child.size(); ++g) {
                if (!rng.bernoulli(options.ga_mutation_rate)) {
                    continue;
                }
                const auto& domain = space.params[g];
                if (ordered(domain)) {
                    child[g] = std::clamp(child[g] + rng.normal(0.0, sigma), 0.0, 1.0);
                } else {
                    child[g] = static_cast<double>(rng.index(domain.choices.size()));
                }
            }
            children.push_back(std::move(child));
        }
        return children;
    };

    // Each new generation: the elite survives with its score, the rest are
    // offspring of the previous generation.
    auto evolve = [&](std::vector<Individual> population, std::size_t generations, double sigma, const char* stage) {
        for (std::size_t gen = 0; gen < generations; ++gen) {
            rank(population);
            auto children = evaluate_batch(offspring(population, population.size() - 1, sigma), stage);
            std::vector<Individual> next{population.front()};
            next.insert(next.end(), children.begin(), children.end());
            population = std::move(next);
            rank(population);
            result.generation_best.push_back(population.front().trial.objective);
        }
        return population;
    };

    std::vector<Genome> initial;
    for (const auto& point : options.ga_initial_population) {
        if (initial.size() < budget.ga_population) {
            initial.push_back(encode(space, point));
        }
    }
    if (initial.empty() && options.warm_start) {
        initial.push_back(encode(space, *options.warm_start));
    }
    while (initial.size() < budget.ga_population) {
        initial.push_back(random_genome(space, rng));
    }
    auto population = evaluate_batch(std::move(initial), kStageValidation);
    rank(population);
    result.generation_best.push_back(population.front().trial.objective);
    population = evolve(std::move(population), budget.ga_generations - 1, options.ga_mutation_sigma, kStageValidation);

    const std::size_t pool = std::min(options.ga_finetune_pool, population.size());
    std::vector<Genome> finalists;
    for (std::size_t i = 0; i < pool; ++i) {
        finalists.push_back(population[i].genome);
    }
    auto fine = evaluate_batch(std::move(finalists), kStageCrossValidation);
    rank(fine);
    result.generation_best.push_back(fine.front().trial.objective);
    fine = evolve(std::move(fine), budget.ga_finetune_generations, options.ga_mutation_sigma / 2.0,
                  kStageCrossValidation);

    std::vector<Trial> cv_trials;
    for (const auto& t : result.trials) {
        if (t.stage == kStageCrossValidation) {
            cv_trials.push_back(t);
        }
    }
    result.best = best_of(cv_trials);
    return result;
}

void write_tuning_log(std::ostream& out, const SearchSpace& space, std::span<const Trial> trials) {
    out << "trial_index,params,objective,stage\n";
    for (const auto& t : trials) {
        csv::write_row(out, {std::to_string(t.index), space.to_json(t.params).dump(),
                             t.failed ? std::string("NA") : csv::format_exact(t.objective), t.stage});
    }
}

// ---------------------------------------------------------------------------
// Cross-validation.
// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> y, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) {
        throw Error(ErrorCode::InvalidArgument, "at least two folds are required");
    }
    std::vector<std::vector<std::size_t>> assignment(folds);
    std::size_t offset = 0;
    for (const int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] == cls) {
                members.push_back(i);
            }
        }
        if (members.size() < folds) {
            throw Error(ErrorCode::FoldClassMissing,
                        fmt::format("class {} has {} members for {} folds", cls == 1 ? "fake" : "legit",
                                    members.size(), folds));
        }
        Rng rng(derive_seed(seed, "fold:" + std::to_string(cls)));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            assignment[(offset + i) % folds].push_back(members[i]);
        }
        offset = (offset + members.size()) % folds;
    }
    for (auto& fold : assignment) {
        std::sort(fold.begin(), fold.end());
    }
    return assignment;
}

std::vector<double> cross_validate(std::span<const int> y, std::size_t folds, std::uint64_t seed,
                                   const FoldModel& model) {
    const auto assignment = stratified_folds(y, folds, seed);
    std::vector<double> scores;
    for (const auto& validation : assignment) {
        std::vector<std::size_t> train;
        std::size_t v = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (v < validation.size() && validation[v] == i) {
                ++v;
            } else {
                train.push_back(i);
            }
        }
        const auto p = model(train, validation);
        if (p.size() != validation.size()) {
            throw Error(ErrorCode::DimensionMismatch, "fold model returned the wrong number of predictions");
        }
        std::vector<int> truth;
        for (const auto i : validation) {
            truth.push_back(y[i]);
        }
        scores.push_back(f1_score(confusion(p, truth)).value_or(0.0));
    }
    return scores;
}

namespace {

Matrix select_rows(const Matrix& x, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(x.row(rows[r]).begin(), x.row(rows[r]).end(), out.row(r).begin());
    }
    return out;
}

std::vector<int> select_labels(std::span<const int> y, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto r : rows) {
        out.push_back(y[r]);
    }
    return out;
}

std::vector<double> fit_and_predict(const Matrix& x, std::span<const int> y, const ClassifierConfig& config,
                                    std::span<const std::size_t> train, std::span<const std::size_t> validation) {
    const Matrix xt = select_rows(x, train);
    const auto yt = select_labels(y, train);
    const auto model = train_classifier(config, xt, yt);
    return predict_proba(model, select_rows(x, validation));
}

}  // namespace

std::vector<double> cv_fold_scores(const Matrix& x, std::span<const int> y, const ClassifierConfig& config,
                                   std::size_t folds, std::uint64_t seed) {
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
    }
    return cross_validate(y, folds, seed, [&](auto train, auto validation) {
        return fit_and_predict(x, y, config, train, validation);
    });
}

double cv_objective(const Matrix& x, std::span<const int> y, const ClassifierConfig& config, std::size_t folds,
                    std::uint64_t seed) {
    const auto scores = cv_fold_scores(x, y, config, folds, seed);
    return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------
// Classifier search spaces.
// ---------------------------------------------------------------------------

SearchSpace default_search_space(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::Gbdt:
        case ClassifierKind::GbdtAlt:
            return {{ParamDomain::integer("n_trees", 50, 400), ParamDomain::log("learning_rate", 0.01, 0.3),
                     ParamDomain::integer("max_depth", 2, 8), ParamDomain::log("lambda_l2", 0.1, 10.0),
                     ParamDomain::integer("min_samples_leaf", 1, 20)}};
        case ClassifierKind::LogReg:
            return {{ParamDomain::log("l2", 1e-5, 1.0), ParamDomain::log("learning_rate", 0.01, 2.0),
                     ParamDomain::integer("epochs", 50, 1000)}};
        case ClassifierKind::Knn:
            return {{ParamDomain::integer("k", 1, 31)}};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown classifier kind");
}

ClassifierConfig config_from_point(ClassifierKind kind, const SearchSpace& space, const ParamPoint& point) {
    if (point.size() != space.size()) {
        throw Error(ErrorCode::DimensionMismatch, "point does not match search space");
    }
    nlohmann::json params = space.to_json(point);
    return classifier_config_from_json(kind, params);
}

ParamPoint point_from_config(const ClassifierConfig& config, const SearchSpace& space) {
    const auto params = classifier_params_to_json(config);
    ParamPoint point;
    for (const auto& d : space.params) {
        if (!params.contains(d.name)) {
            throw Error(ErrorCode::InvalidArgument, "configuration has no parameter '" + d.name + "'");
        }
        point.push_back(std::clamp(params.at(d.name).get<double>(), d.lo, d.hi));
    }
    return point;
}

Objective classifier_objective(const Matrix& x, std::span<const int> y, ClassifierKind kind,
                               const SearchSpace& space, std::uint64_t seed, std::size_t folds) {
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "feature rows and labels differ in length");
    }
    struct Shared {
        Matrix x;
        std::vector<int> y;
        SearchSpace space;
        std::vector<std::size_t> train;
        std::vector<std::size_t> validation;
    };
    auto shared = std::make_shared<Shared>(Shared{x, {y.begin(), y.end()}, space, {}, {}});
    // Holdout = first of five stratified folds (an 80/20 split).
    const auto holdout = stratified_folds(shared->y, 5, derive_seed(seed, "holdout"));
    shared->validation = holdout.front();
    for (std::size_t i = 0, v = 0; i < shared->y.size(); ++i) {
        if (v < shared->validation.size() && shared->validation[v] == i) {
            ++v;
        } else {
            shared->train.push_back(i);
        }
    }
    const std::uint64_t cv_seed = derive_seed(seed, "cv");

    Objective objective;
    objective.validation = [shared, kind](const ParamPoint& point, std::uint64_t) {
        const auto config = config_from_point(kind, shared->space, point);
        const auto p = fit_and_predict(shared->x, shared->y, config, shared->train, shared->validation);
        return f1_score(confusion(p, select_labels(shared->y, shared->validation))).value_or(0.0);
    };
    objective.cross_validation = [shared, kind, folds, cv_seed](const ParamPoint& point, std::uint64_t) {
        return cv_fold_scores(shared->x, shared->y, config_from_point(kind, shared->space, point), folds, cv_seed);
    };
    return objective;
}

}  // namespace sentinel
