#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sentinel/error.hpp"
#include "sentinel/eval.hpp"
#include "sentinel/tune.hpp"

using namespace sentinel;
using Catch::Matchers::WithinAbs;

namespace {

Objective validation_only(std::function<double(const ParamPoint&)> f) {
    Objective objective;
    objective.validation = [f](const ParamPoint& p, std::uint64_t) { return f(p); };
    return objective;
}

double quadratic(const ParamPoint& p) { return -(p[0] - 0.3) * (p[0] - 0.3); }

// Argmax of f over a 1000-point grid on [lo, hi].
double grid_argmax(const std::function<double(double)>& f, double lo, double hi) {
    double best_x = lo;
    double best = -1e300;
    for (int i = 0; i < 1000; ++i) {
        const double x = lo + (hi - lo) * i / 999.0;
        if (f(x) > best) {
            best = f(x);
            best_x = x;
        }
    }
    return best_x;
}

const std::vector<std::string> kChoices{"red", "green", "blue"};
const ParamPoint kTarget{2, 0, 1, 2};

SearchSpace hamming_space() {
    SearchSpace space;
    for (std::size_t i = 0; i < kTarget.size(); ++i) {
        space.params.push_back(ParamDomain::categorical("g" + std::to_string(i), kChoices));
    }
    return space;
}

double neg_hamming(const ParamPoint& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += p[i] != kTarget[i] ? 1.0 : 0.0;
    return -d;
}

// Exhaustive enumeration of the 3^4 categorical grid.
ParamPoint enumerate_best() {
    ParamPoint best;
    double top = -1e300;
    for (int code = 0; code < 81; ++code) {
        ParamPoint p;
        for (int c = code, i = 0; i < 4; ++i, c /= 3) p.push_back(c % 3);
        if (neg_hamming(p) > top) {
            top = neg_hamming(p);
            best = p;
        }
    }
    return best;
}

struct Dataset {
    Matrix x;
    std::vector<int> y;
};

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Dataset data{Matrix(n, d), std::vector<int>(n)};
    for (std::size_t r = 0; r < n; ++r) {
        double score = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            data.x(r, c) = normal(gen);
            score += data.x(r, c);
        }
        data.y[r] = score + normal(gen) > 0.0 ? 1 : 0;
    }
    return data;
}

}  // namespace

TEST_CASE("default budgets give 50 BO and 176 GA evaluations") {
    const TuneBudget budget;
    CHECK(bo_evaluation_count(budget) == 50);
    CHECK(ga_evaluation_count(budget) == 176);

    SearchSpace space{{ParamDomain::linear("x", 0, 1)}};
    const auto bo = tune_bo(space, validation_only(quadratic), budget, 1);
    const auto ga = tune_ga(space, validation_only(quadratic), budget, 1);
    CHECK(bo.evaluations() == 50);
    CHECK(ga.evaluations() == 176);
    for (std::size_t i = 0; i < ga.trials.size(); ++i) {
        CHECK(ga.trials[i].index == i);
        CHECK(ga.trials[i].stage == (i < 148 ? kStageValidation : kStageCrossValidation));
    }
    for (std::size_t i = 0; i < bo.trials.size(); ++i) {
        CHECK(bo.trials[i].stage == (i < 30 ? kStageValidation : kStageCrossValidation));
    }
    // Validation generations 1..3, then the fine-tune pool and two more generations.
    CHECK(ga.generation_best.size() == 6);
}

TEST_CASE("both tuners find the 1-D quadratic optimum within 0.05") {
    const double oracle = grid_argmax([](double x) { return quadratic({x}); }, 0.0, 1.0);
    SearchSpace space{{ParamDomain::linear("x", 0, 1)}};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto bo = tune_bo(space, validation_only(quadratic), TuneBudget{}, seed);
        const auto ga = tune_ga(space, validation_only(quadratic), TuneBudget{}, seed);
        CHECK(std::abs(bo.best.params[0] - oracle) <= 0.05);
        CHECK(std::abs(ga.best.params[0] - oracle) <= 0.05);
        CHECK(bo.best.stage == kStageCrossValidation);
        CHECK(ga.best.stage == kStageCrossValidation);
    }
}

TEST_CASE("GA recovers a categorical target found by enumeration") {
    const auto oracle = enumerate_best();
    REQUIRE(oracle == kTarget);
    const auto ga = tune_ga(hamming_space(), validation_only(neg_hamming), TuneBudget{}, 0);
    CHECK(ga.best.params == oracle);
    CHECK(ga.best.objective == 0.0);
    for (std::size_t i = 1; i < ga.generation_best.size(); ++i) {
        if (i != 3) {  // index 3 starts the cross-validated stage
            CHECK(ga.generation_best[i] >= ga.generation_best[i - 1]);
        }
    }
}

TEST_CASE("single-point space makes every trial identical") {
    SearchSpace space{{ParamDomain::linear("x", 0.4, 0.4), ParamDomain::categorical("c", {"only"})}};
    for (const auto& result : {tune_bo(space, validation_only(quadratic), TuneBudget{}, 1),
                               tune_ga(space, validation_only(quadratic), TuneBudget{}, 1)}) {
        for (const auto& t : result.trials) CHECK(t.params == ParamPoint{0.4, 0});
        CHECK(result.best.params == ParamPoint{0.4, 0});
    }
}

TEST_CASE("GA without variation keeps the initial individual") {
    SearchSpace space{{ParamDomain::linear("x", 0, 1), ParamDomain::integer("n", 0, 9)}};
    TuneOptions options;
    options.ga_crossover_rate = 0.0;
    options.ga_mutation_rate = 0.0;
    options.ga_initial_population.assign(50, ParamPoint{0.6, 4});
    const auto result = tune_ga(space, validation_only(quadratic), TuneBudget{}, 2, options);
    for (const auto& t : result.trials) CHECK(t.params == ParamPoint{0.6, 4});
    CHECK(result.best.params == ParamPoint{0.6, 4});
}

TEST_CASE("best trial is the top cross-validated trial") {
    const auto bo = tune_bo(hamming_space(), validation_only(neg_hamming), TuneBudget{}, 2);
    double top = kFailedObjective;
    for (const auto& t : bo.trials) {
        if (t.stage == kStageCrossValidation) top = std::max(top, t.objective);
    }
    CHECK(bo.best.objective == top);
}

TEST_CASE("tuners are deterministic and GA ignores the job count") {
    SearchSpace space{{ParamDomain::log("a", 0.01, 10.0), ParamDomain::categorical("c", {"x", "y", "z"}),
                       ParamDomain::integer("n", 1, 9)}};
    const auto f = validation_only([](const ParamPoint& p) { return -std::abs(std::log(p[0])) + p[1] - p[2]; });
    const auto a = tune_bo(space, f, TuneBudget{}, 9);
    const auto b = tune_bo(space, f, TuneBudget{}, 9);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].params == b.trials[i].params);

    TuneOptions serial;
    TuneOptions parallel;
    parallel.jobs = 4;
    const auto g1 = tune_ga(space, f, TuneBudget{}, 9, serial);
    const auto g4 = tune_ga(space, f, TuneBudget{}, 9, parallel);
    REQUIRE(g1.trials.size() == g4.trials.size());
    for (std::size_t i = 0; i < g1.trials.size(); ++i) {
        CHECK(g1.trials[i].params == g4.trials[i].params);
        CHECK(g1.trials[i].objective == g4.trials[i].objective);
    }
}

TEST_CASE("points stay inside their domains") {
    SearchSpace space{{ParamDomain::log("a", 0.01, 10.0), ParamDomain::categorical("c", {"x", "y", "z"}),
                       ParamDomain::integer("n", 1, 9), ParamDomain::linear("u", -2, 2)}};
    const auto f = validation_only([](const ParamPoint& p) { return p[0] + p[3]; });
    for (const auto& result : {tune_bo(space, f, TuneBudget{}, 3), tune_ga(space, f, TuneBudget{}, 3)}) {
        for (const auto& t : result.trials) {
            CHECK(t.params[0] >= 0.01);
            CHECK(t.params[0] <= 10.0);
            CHECK(std::set<double>{0, 1, 2}.count(t.params[1]) == 1);
            CHECK(t.params[2] == std::floor(t.params[2]));
            CHECK(t.params[2] >= 1);
            CHECK(t.params[2] <= 9);
            CHECK(t.params[3] >= -2);
            CHECK(t.params[3] <= 2);
        }
    }
}

TEST_CASE("warm start is the first trial") {
    SearchSpace space{{ParamDomain::linear("x", 0, 1)}};
    TuneOptions options;
    options.warm_start = ParamPoint{0.77};
    CHECK(tune_bo(space, validation_only(quadratic), TuneBudget{}, 0, options).trials[0].params == ParamPoint{0.77});
    CHECK(tune_ga(space, validation_only(quadratic), TuneBudget{}, 0, options).trials[0].params == ParamPoint{0.77});
}

TEST_CASE("failing trials are recorded and tuning carries on") {
    SearchSpace space{{ParamDomain::linear("x", 0, 1)}};
    const auto f = validation_only([](const ParamPoint& p) {
        if (p[0] > 0.5) throw Error(ErrorCode::SingleClass, "boom");
        return p[0];
    });
    const auto result = tune_bo(space, f, TuneBudget{}, 5);
    CHECK(result.evaluations() == 50);
    const auto failed = std::count_if(result.trials.begin(), result.trials.end(), [](const Trial& t) { return t.failed; });
    CHECK(failed > 0);
    CHECK_FALSE(result.best.failed);
    CHECK(result.best.params[0] <= 0.5);

    std::ostringstream log;
    write_tuning_log(log, space, result.trials);
    const auto text = log.str();
    CHECK(text.rfind("trial_index,params,objective,stage\n", 0) == 0);
    CHECK(text.find(",NA,") != std::string::npos);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == 51);
}

TEST_CASE("cross-validation stage uses fold scores when provided") {
    SearchSpace space{{ParamDomain::linear("x", 0, 1)}};
    Objective objective = validation_only(quadratic);
    objective.cross_validation = [](const ParamPoint& p, std::uint64_t) {
        return std::vector<double>{p[0], p[0] + 1.0};
    };
    const auto result = tune_bo(space, objective, TuneBudget{}, 0);
    for (const auto& t : result.trials) {
        if (t.stage == kStageCrossValidation) {
            REQUIRE(t.fold_scores.size() == 2);
            CHECK_THAT(t.objective, WithinAbs(t.params[0] + 0.5, 1e-15));
        } else {
            CHECK(t.fold_scores.empty());
        }
    }
}

TEST_CASE("invalid spaces and budgets are rejected") {
    const auto f = validation_only(quadratic);
    CHECK_THROWS_AS(tune_bo(SearchSpace{}, f, TuneBudget{}, 0), Error);
    CHECK_THROWS_AS(tune_bo(SearchSpace{{ParamDomain::log("a", 0.0, 1.0)}}, f, TuneBudget{}, 0), Error);
    CHECK_THROWS_AS(tune_ga(SearchSpace{{ParamDomain::linear("a", 2.0, 1.0)}}, f, TuneBudget{}, 0), Error);
    CHECK_THROWS_AS(tune_ga(SearchSpace{{ParamDomain::categorical("c", {})}}, f, TuneBudget{}, 0), Error);
    TuneBudget empty;
    empty.ga_population = 0;
    CHECK_THROWS_AS(tune_ga(SearchSpace{{ParamDomain::linear("a", 0, 1)}}, f, empty, 0), Error);
}

TEST_CASE("stratified folds partition indices and balance classes") {
    std::vector<int> y(53);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 3 == 0 ? 1 : 0;
    const auto folds = stratified_folds(y, 5, 7);
    REQUIRE(folds.size() == 5);
    std::vector<std::size_t> all;
    std::vector<std::size_t> pos;
    for (const auto& fold : folds) {
        CHECK(std::is_sorted(fold.begin(), fold.end()));
        all.insert(all.end(), fold.begin(), fold.end());
        pos.push_back(static_cast<std::size_t>(std::count_if(fold.begin(), fold.end(), [&](auto i) { return y[i] == 1; })));
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expected(53);
    std::iota(expected.begin(), expected.end(), 0U);
    CHECK(all == expected);
    CHECK(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()) <= 1);
    std::size_t largest = 0;
    std::size_t smallest = 100;
    for (const auto& fold : folds) {
        largest = std::max(largest, fold.size());
        smallest = std::min(smallest, fold.size());
    }
    CHECK(largest - smallest <= 1);
    CHECK(stratified_folds(y, 5, 7) == folds);
    CHECK(stratified_folds(y, 5, 8) != folds);
}

TEST_CASE("five folds over ten points hold each point once") {
    const std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto folds = stratified_folds(y, 5, 0);
    std::multiset<std::size_t> seen;
    for (const auto& fold : folds) {
        REQUIRE(fold.size() == 2);
        CHECK(y[fold[0]] + y[fold[1]] == 1);
        seen.insert(fold.begin(), fold.end());
    }
    for (std::size_t i = 0; i < 10; ++i) CHECK(seen.count(i) == 1);
}

TEST_CASE("a class smaller than the fold count is fatal") {
    const std::vector<int> y{0, 0, 0, 0, 0, 1, 1};
    try {
        stratified_folds(y, 3, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FoldClassMissing);
    }
}

TEST_CASE("always-fake model gives the hand-computed fold F1") {
    // 6 fakes and 9 legit over 3 folds: every fold has 2 fakes and 3 legit,
    // so F1 = 2*2 / (2*2 + 3) = 4/7 each time.
    std::vector<int> y(15, 0);
    for (std::size_t i = 0; i < 6; ++i) y[i * 2] = 1;
    const auto scores = cross_validate(y, 3, 1, [](auto, auto validation) {
        return std::vector<double>(validation.size(), 1.0);
    });
    REQUIRE(scores.size() == 3);
    for (const double s : scores) CHECK_THAT(s, WithinAbs(4.0 / 7.0, 1e-15));

    // Always-legit has no predicted positives: F1 is undefined and scored 0.
    const auto none = cross_validate(y, 3, 1, [](auto, auto validation) {
        return std::vector<double>(validation.size(), 0.0);
    });
    for (const double s : none) CHECK(s == 0.0);
}

TEST_CASE("cv_objective equals a manual fold loop") {
    const auto data = random_dataset(90, 4, 5);
    auto config = default_classifier_config(ClassifierKind::Gbdt);
    config.gbdt.n_trees = 20;
    const auto folds = stratified_folds(data.y, 5, 3);
    double total = 0.0;
    for (const auto& validation : folds) {
        Matrix xt;
        std::vector<int> yt;
        Matrix xv;
        std::vector<int> yv;
        for (std::size_t i = 0; i < 90; ++i) {
            const bool held = std::binary_search(validation.begin(), validation.end(), i);
            (held ? xv : xt).append_row(data.x.row(i));
            (held ? yv : yt).push_back(data.y[i]);
        }
        const auto model = train_classifier(config, xt, yt);
        total += f1_score(confusion(predict_proba(model, xv), yv)).value_or(0.0);
    }
    CHECK_THAT(cv_objective(data.x, data.y, config, 5, 3), WithinAbs(total / 5.0, 1e-12));
}

TEST_CASE("search spaces convert to and from configurations") {
    for (const auto kind : kAllClassifiers) {
        const auto space = default_search_space(kind);
        space.validate();
        const auto config = default_classifier_config(kind);
        const auto point = point_from_config(config, space);
        const auto back = config_from_point(kind, space, point);
        CHECK(space.from_json(space.to_json(point)) == point);
        CHECK(point_from_config(back, space) == point);
    }
    const auto gbdt = default_search_space(ClassifierKind::Gbdt);
    REQUIRE(gbdt.size() == 5);
    CHECK(gbdt.params[0].lo == 50);
    CHECK(gbdt.params[0].hi == 400);
}

TEST_CASE("classifier objective stays within [0, 1] and is repeatable") {
    const auto data = random_dataset(80, 3, 6);
    const auto space = default_search_space(ClassifierKind::Knn);
    const auto objective = classifier_objective(data.x, data.y, ClassifierKind::Knn, space, 2);
    const ParamPoint point{5};
    const double v = objective.validation(point, 0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(objective.validation(point, 99) == v);
    const auto folds = objective.cross_validation(point, 0);
    CHECK(folds.size() == 5);
    CHECK(objective.cross_validation(point, 1) == folds);
}
