#include "sentinel/model.hpp"

#include <fstream>
#include <sstream>

#include "sentinel/error.hpp"

namespace sentinel {

using nlohmann::json;

std::string_view classifier_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::Gbdt: return "gbdt";
        case ClassifierKind::GbdtAlt: return "gbdt-alt";
        case ClassifierKind::LogReg: return "logreg";
        case ClassifierKind::Knn: return "knn";
    }
    return "?";
}

std::optional<ClassifierKind> parse_classifier(std::string_view text) {
    for (const auto kind : kAllClassifiers) {
        if (text == classifier_name(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

ClassifierConfig default_classifier_config(ClassifierKind kind) {
    ClassifierConfig config;
    config.kind = kind;
    if (kind == ClassifierKind::GbdtAlt) {
        config.gbdt = GbdtParams{.n_trees = 300, .learning_rate = 0.05, .max_depth = 6, .min_samples_leaf = 3,
                                 .lambda_l2 = 3.0};
    }
    return config;
}

Classifier train_classifier(const ClassifierConfig& config, const Matrix& x, std::span<const int> y) {
    switch (config.kind) {
        case ClassifierKind::Gbdt:
        case ClassifierKind::GbdtAlt: return train_gbdt(x, y, config.gbdt);
        case ClassifierKind::LogReg: return train_logreg(x, y, config.logreg);
        case ClassifierKind::Knn: return train_knn(x, y, config.knn.k);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown classifier kind");
}

double predict_proba(const Classifier& classifier, std::span<const double> x) {
    return std::visit([&](const auto& model) { return model.predict_proba(x); }, classifier);
}

std::vector<double> predict_proba(const Classifier& classifier, const Matrix& x) {
    std::vector<double> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out[r] = predict_proba(classifier, x.row(r));
    }
    return out;
}

double TrainedModel::predict_proba(const std::string& profile_id, const NumericFeatures& numeric,
                                   std::span<const double> ste) const {
    const auto features = pipeline.transform(profile_id, numeric, ste);
    return sentinel::predict_proba(classifier, features.values);
}

json classifier_params_to_json(const ClassifierConfig& config) {
    switch (config.kind) {
        case ClassifierKind::Gbdt:
        case ClassifierKind::GbdtAlt:
            return json{{"n_trees", config.gbdt.n_trees},
                        {"learning_rate", config.gbdt.learning_rate},
                        {"max_depth", config.gbdt.max_depth},
                        {"min_samples_leaf", config.gbdt.min_samples_leaf},
                        {"lambda_l2", config.gbdt.lambda_l2}};
        case ClassifierKind::LogReg:
            return json{{"l2", config.logreg.l2},
                        {"epochs", config.logreg.epochs},
                        {"learning_rate", config.logreg.learning_rate}};
        case ClassifierKind::Knn: return json{{"k", config.knn.k}};
    }
    return json::object();
}

ClassifierConfig classifier_config_from_json(ClassifierKind kind, const json& params) {
    ClassifierConfig config = default_classifier_config(kind);
    if (params.is_null()) {
        return config;
    }
    switch (kind) {
        case ClassifierKind::Gbdt:
        case ClassifierKind::GbdtAlt: {
            auto& g = config.gbdt;
            g.n_trees = params.value("n_trees", g.n_trees);
            g.learning_rate = params.value("learning_rate", g.learning_rate);
            g.max_depth = params.value("max_depth", g.max_depth);
            g.min_samples_leaf = params.value("min_samples_leaf", g.min_samples_leaf);
            g.lambda_l2 = params.value("lambda_l2", g.lambda_l2);
            break;
        }
        case ClassifierKind::LogReg: {
            auto& l = config.logreg;
            l.l2 = params.value("l2", l.l2);
            l.epochs = params.value("epochs", l.epochs);
            l.learning_rate = params.value("learning_rate", l.learning_rate);
            break;
        }
        case ClassifierKind::Knn: config.knn.k = params.value("k", config.knn.k); break;
    }
    return config;
}

namespace {

json normalizer_to_json(const std::optional<Normalizer>& norm) {
    if (!norm) {
        return nullptr;
    }
    return json{{"mean", norm->mean}, {"stddev", norm->stddev}};
}

json pca_to_json(const std::optional<PcaModel>& pca) {
    if (!pca) {
        return nullptr;
    }
    return json{{"mean", pca->mean},
                {"components", pca->components},
                {"explained_variance", pca->explained_variance},
                {"explained_variance_ratio", pca->explained_variance_ratio}};
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw Error(ErrorCode::Corrupt, "stored matrix has the wrong number of values");
    }
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = data[r * cols + c];
        }
    }
    return m;
}

json classifier_body(const Classifier& classifier) {
    if (const auto* gbdt = std::get_if<GbdtModel>(&classifier)) {
        json trees = json::array();
        for (const auto& tree : gbdt->trees) {
            json nodes = json::array();
            for (const auto& node : tree.nodes) {
                nodes.push_back(json::array({node.feature, node.threshold, node.left, node.right, node.value}));
            }
            trees.push_back(std::move(nodes));
        }
        return json{{"base_score", gbdt->base_score}, {"trees", std::move(trees)}};
    }
    if (const auto* logreg = std::get_if<LogRegModel>(&classifier)) {
        return json{{"weights", logreg->weights}, {"bias", logreg->bias}, {"l2", logreg->l2}};
    }
    const auto& knn = std::get<KnnModel>(classifier);
    return json{{"points", matrix_to_json(knn.points)}, {"labels", knn.labels}, {"k", knn.k}};
}

}  // namespace

json model_to_json(const TrainedModel& model) {
    return json{{"version", kModelFormatVersion},
                {"encoder", model.encoder},
                {"layout", layout_name(model.pipeline.layout)},
                {"normalizer", normalizer_to_json(model.pipeline.normalizer)},
                {"pca", pca_to_json(model.pipeline.pca)},
                {"classifier_kind", classifier_name(model.config.kind)},
                {"classifier_params", classifier_params_to_json(model.config)},
                {"classifier", classifier_body(model.classifier)}};
}

namespace {

// Children must come after their parent so traversal always terminates.
void validate_tree(const RegressionTree& tree, std::size_t input_dim) {
    if (tree.nodes.empty()) {
        throw Error(ErrorCode::Corrupt, "stored tree has no nodes");
    }
    const auto size = static_cast<int>(tree.nodes.size());
    for (int id = 0; id < size; ++id) {
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.is_leaf()) {
            continue;
        }
        if (static_cast<std::size_t>(node.feature) >= input_dim || node.left <= id || node.right <= id ||
            node.left >= size || node.right >= size) {
            throw Error(ErrorCode::Corrupt, "stored tree node references an invalid feature or child");
        }
    }
}

}  // namespace

TrainedModel model_from_json(const json& document) {
    if (!document.is_object() || !document.contains("version")) {
        throw Error(ErrorCode::Corrupt, "model document has no version field");
    }
    if (!document["version"].is_number_integer() || document["version"].get<int>() != kModelFormatVersion) {
        throw Error(ErrorCode::Version, "unsupported model version " + document["version"].dump());
    }
    try {
        TrainedModel model;
        model.encoder = document.at("encoder").get<std::string>();
        const auto layout = parse_layout(document.at("layout").get<std::string>());
        const auto kind = parse_classifier(document.at("classifier_kind").get<std::string>());
        if (!layout || !kind) {
            throw Error(ErrorCode::Corrupt, "unknown layout or classifier kind");
        }
        model.pipeline.layout = *layout;
        if (const auto& n = document.at("normalizer"); !n.is_null()) {
            model.pipeline.normalizer =
                Normalizer{n.at("mean").get<std::vector<double>>(), n.at("stddev").get<std::vector<double>>()};
        }
        if (const auto& p = document.at("pca"); !p.is_null()) {
            model.pipeline.pca = PcaModel{p.at("mean").get<std::vector<double>>(),
                                          p.at("components").get<std::vector<std::vector<double>>>(),
                                          p.at("explained_variance").get<std::vector<double>>(),
                                          p.at("explained_variance_ratio").get<std::vector<double>>()};
        }
        model.config = classifier_config_from_json(*kind, document.at("classifier_params"));
        const auto& body = document.at("classifier");
        switch (*kind) {
            case ClassifierKind::Gbdt:
            case ClassifierKind::GbdtAlt: {
                GbdtModel gbdt;
                gbdt.params = model.config.gbdt;
                gbdt.base_score = body.at("base_score").get<double>();
                for (const auto& tree_json : body.at("trees")) {
                    RegressionTree tree;
                    for (const auto& node : tree_json) {
                        tree.nodes.push_back(TreeNode{node.at(0).get<int>(), node.at(1).get<double>(),
                                                      node.at(2).get<int>(), node.at(3).get<int>(),
                                                      node.at(4).get<double>()});
                    }
                    validate_tree(tree, model.pipeline.output_dim());
                    gbdt.trees.push_back(std::move(tree));
                }
                model.classifier = std::move(gbdt);
                break;
            }
            case ClassifierKind::LogReg:
                model.classifier = LogRegModel{body.at("weights").get<std::vector<double>>(),
                                               body.at("bias").get<double>(), body.at("l2").get<double>()};
                break;
            case ClassifierKind::Knn:
                model.classifier = KnnModel{matrix_from_json(body.at("points")), body.at("labels").get<std::vector<int>>(),
                                            body.at("k").get<int>()};
                break;
        }
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Corrupt, std::string("malformed model document: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write model file " + path.string());
    }
    out << model_to_json(model).dump() << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read model file " + path.string());
    }
    json document;
    try {
        document = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Corrupt, std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(document);
}

}  // namespace sentinel
