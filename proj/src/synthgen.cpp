#include "sentinel/synthgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sentinel/error.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/text.hpp"

#ifndef PROFILE_SENTINEL_ASSET_DIR
#define PROFILE_SENTINEL_ASSET_DIR "assets"
#endif

namespace sentinel {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path default_vocab_dir() {
    if (const char* env = std::getenv("PROFILE_SENTINEL_VOCAB_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return fs::path(PROFILE_SENTINEL_ASSET_DIR) / "vocab";
}

namespace {

std::vector<std::string> read_pool(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::EmptyPool, "vocabulary pool " + path.string() + " is missing");
    }
    std::vector<std::string> items;
    std::string line;
    while (std::getline(in, line)) {
        auto item = text::normalize(line);
        if (!item.empty()) {
            items.push_back(std::move(item));
        }
    }
    if (items.empty()) {
        throw Error(ErrorCode::EmptyPool, "vocabulary pool " + path.string() + " is empty");
    }
    return items;
}

}  // namespace

VocabPools load_vocab(const fs::path& dir) {
    VocabPools pools;
    pools.first_names = read_pool(dir / "first_names.txt");
    pools.last_names = read_pool(dir / "last_names.txt");
    pools.locations = read_pool(dir / "locations.txt");
    pools.institutions = read_pool(dir / "institutions.txt");
    pools.degrees = read_pool(dir / "degrees.txt");
    pools.companies = read_pool(dir / "companies.txt");
    pools.spam_phrases = read_pool(dir / "spam_phrases.txt");
    pools.summary_templates = read_pool(dir / "summary_templates.txt");
    pools.recommendation_templates = read_pool(dir / "recommendation_templates.txt");
    for (const auto& line : read_pool(dir / "synonyms.txt")) {
        const auto words = text::tokenize(line);
        if (words.size() != 3) {
            throw Error(ErrorCode::Parse, "synonym line needs three words: " + line);
        }
        pools.synonyms[words[0]] = {words[1], words[2]};
    }
    std::vector<fs::path> domain_dirs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir / "domains", ec)) {
        if (entry.is_directory()) {
            domain_dirs.push_back(entry.path());
        }
    }
    if (domain_dirs.empty()) {
        throw Error(ErrorCode::EmptyPool, "no domains under " + (dir / "domains").string());
    }
    std::sort(domain_dirs.begin(), domain_dirs.end());
    for (const auto& d : domain_dirs) {
        pools.domains.push_back({d.filename().string(), read_pool(d / "titles.txt"), read_pool(d / "skills.txt"),
                                 read_pool(d / "duties.txt"), read_pool(d / "fields.txt")});
    }
    return pools;
}

// ---------------------------------------------------------------------------
// Config.
// ---------------------------------------------------------------------------

GenConfig::GenConfig() {
    // FLP structure matches legit; its anomalies come from the injected
    // probabilities below. Each LLM class carries one structural tell that
    // legit profiles never show (long recommendation lists, oversized skill
    // lists) and numerics close to legit.
    shape[Label::LLP] = ShapeParams{};
    shape[Label::FLP] = ShapeParams{};
    shape[Label::GPT35P] = ShapeParams{2, 4, 2, 3, 1, 2, 6, 10, 4, 5, 5, 7};
    shape[Label::GPT4P] = ShapeParams{1, 5, 1, 2, 1, 3, 13, 16, 1, 3, 2, 4};

    numeric[Label::LLP] = NumericParams{};
    numeric[Label::FLP] = NumericParams{5.0, 0.7, 0.3, 0.8, 0.05, 20.0};
    numeric[Label::GPT35P] = NumericParams{5.8, 0.5, 0.0, 0.1, 0.3, 3.0};
    numeric[Label::GPT4P] = NumericParams{5.8, 0.5, 0.0, 0.3, 0.3, 3.0};
}

void GenConfig::validate() const {
    auto probability = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("{} must lie in [0, 1]", name));
        }
    };
    probability(llm_similarity, "llm_similarity");
    probability(flp_missing_section, "flp_missing_section");
    probability(flp_truncated_summary, "flp_truncated_summary");
    probability(flp_inconsistent_counts, "flp_inconsistent_counts");
    probability(flp_domain_mix, "flp_domain_mix");
    probability(flp_spam, "flp_spam");
    if (vector_dim == 0) {
        throw Error(ErrorCode::InvalidArgument, "vector_dim must be positive");
    }
    for (const double v : {topic_scale, noise_scale, style_scale_gpt35, style_scale_gpt4}) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "vector scales must be finite and non-negative");
        }
    }
    for (const auto label : kAllLabels) {
        const auto& s = shape.at(label);
        const std::pair<int, int> ranges[] = {{s.jobs_min, s.jobs_max},
                                              {s.duties_min, s.duties_max},
                                              {s.education_min, s.education_max},
                                              {s.skills_min, s.skills_max},
                                              {s.recommendations_min, s.recommendations_max},
                                              {s.summary_min, s.summary_max}};
        for (const auto& [lo, hi] : ranges) {
            if (lo < 0 || lo > hi) {
                throw Error(ErrorCode::InvalidArgument, fmt::format("invalid shape range for {}", to_string(label)));
            }
        }
        if (s.jobs_min < 1 || s.education_min < 1) {
            throw Error(ErrorCode::InvalidArgument, "every class needs at least one job and one education entry");
        }
        const auto& n = numeric.at(label);
        for (const double v : {n.connections_mu, n.connections_sigma, n.ratio_mu, n.ratio_sigma, n.ratio_min,
                               n.ratio_max}) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::InvalidArgument, "numeric parameters must be finite");
            }
        }
        if (n.connections_sigma < 0.0 || n.ratio_sigma < 0.0 || n.ratio_min < 0.0 || n.ratio_min > n.ratio_max) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("invalid numeric params for {}", to_string(label)));
        }
    }
}

namespace {

json shape_json(const ShapeParams& s) {
    return json{{"jobs", {s.jobs_min, s.jobs_max}},
                {"duties", {s.duties_min, s.duties_max}},
                {"education", {s.education_min, s.education_max}},
                {"skills", {s.skills_min, s.skills_max}},
                {"recommendations", {s.recommendations_min, s.recommendations_max}},
                {"summary", {s.summary_min, s.summary_max}}};
}

void apply_shape(ShapeParams& s, const json& j) {
    auto range = [&](const char* key, int& lo, int& hi) {
        if (j.contains(key)) {
            lo = j.at(key).at(0).get<int>();
            hi = j.at(key).at(1).get<int>();
        }
    };
    range("jobs", s.jobs_min, s.jobs_max);
    range("duties", s.duties_min, s.duties_max);
    range("education", s.education_min, s.education_max);
    range("skills", s.skills_min, s.skills_max);
    range("recommendations", s.recommendations_min, s.recommendations_max);
    range("summary", s.summary_min, s.summary_max);
}

json numeric_json(const NumericParams& n) {
    return json{{"connections_mu", n.connections_mu}, {"connections_sigma", n.connections_sigma},
                {"ratio_mu", n.ratio_mu},             {"ratio_sigma", n.ratio_sigma},
                {"ratio_min", n.ratio_min},           {"ratio_max", n.ratio_max}};
}

void apply_numeric(NumericParams& n, const json& j) {
    n.connections_mu = j.value("connections_mu", n.connections_mu);
    n.connections_sigma = j.value("connections_sigma", n.connections_sigma);
    n.ratio_mu = j.value("ratio_mu", n.ratio_mu);
    n.ratio_sigma = j.value("ratio_sigma", n.ratio_sigma);
    n.ratio_min = j.value("ratio_min", n.ratio_min);
    n.ratio_max = j.value("ratio_max", n.ratio_max);
}

Label label_key(const std::string& key) {
    const auto label = parse_label(key);
    if (!label) {
        throw Error(ErrorCode::Parse, "unknown label '" + key + "' in generator config");
    }
    return *label;
}

}  // namespace

GenConfig gen_config_from_json(const json& overrides) {
    GenConfig config;
    if (overrides.is_null()) {
        return config;
    }
    if (!overrides.is_object()) {
        throw Error(ErrorCode::Parse, "generator config must be an object");
    }
    static const std::set<std::string> kKnown{
        "counts",      "llm_similarity", "seed",        "vocab_dir",         "shape",
        "numeric",     "flp_missing_section", "flp_truncated_summary", "flp_inconsistent_counts",
        "flp_domain_mix", "flp_spam",    "vector_dim",  "topic_scale",       "noise_scale",
        "style_scale_gpt35", "style_scale_gpt4"};
    try {
        for (const auto& [key, value] : overrides.items()) {
            if (kKnown.count(key) == 0) {
                throw Error(ErrorCode::Parse, "unknown generator config key '" + key + "'");
            }
        }
        if (overrides.contains("counts")) {
            for (const auto& [key, value] : overrides.at("counts").items()) {
                const auto count = value.get<std::int64_t>();
                if (count < 0) {
                    throw Error(ErrorCode::InvalidArgument, "class counts must be non-negative");
                }
                config.counts[label_key(key)] = static_cast<std::size_t>(count);
            }
        }
        if (overrides.contains("shape")) {
            for (const auto& [key, value] : overrides.at("shape").items()) {
                apply_shape(config.shape[label_key(key)], value);
            }
        }
        if (overrides.contains("numeric")) {
            for (const auto& [key, value] : overrides.at("numeric").items()) {
                apply_numeric(config.numeric[label_key(key)], value);
            }
        }
        config.llm_similarity = overrides.value("llm_similarity", config.llm_similarity);
        config.seed = overrides.value("seed", config.seed);
        if (overrides.contains("vocab_dir")) {
            config.vocab_dir = overrides.at("vocab_dir").get<std::string>();
        }
        config.flp_missing_section = overrides.value("flp_missing_section", config.flp_missing_section);
        config.flp_truncated_summary = overrides.value("flp_truncated_summary", config.flp_truncated_summary);
        config.flp_inconsistent_counts = overrides.value("flp_inconsistent_counts", config.flp_inconsistent_counts);
        config.flp_domain_mix = overrides.value("flp_domain_mix", config.flp_domain_mix);
        config.flp_spam = overrides.value("flp_spam", config.flp_spam);
        config.vector_dim = overrides.value("vector_dim", config.vector_dim);
        config.topic_scale = overrides.value("topic_scale", config.topic_scale);
        config.noise_scale = overrides.value("noise_scale", config.noise_scale);
        config.style_scale_gpt35 = overrides.value("style_scale_gpt35", config.style_scale_gpt35);
        config.style_scale_gpt4 = overrides.value("style_scale_gpt4", config.style_scale_gpt4);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("generator config: ") + e.what());
    }
    config.validate();
    return config;
}

json to_json(const GenConfig& config) {
    json counts = json::object();
    json shape = json::object();
    json numeric = json::object();
    for (const auto label : kAllLabels) {
        const std::string key(to_string(label));
        counts[key] = config.counts.count(label) ? config.counts.at(label) : 0;
        shape[key] = shape_json(config.shape.at(label));
        numeric[key] = numeric_json(config.numeric.at(label));
    }
    return json{{"counts", counts},
                {"llm_similarity", config.llm_similarity},
                {"seed", config.seed},
                {"shape", shape},
                {"numeric", numeric},
                {"flp_missing_section", config.flp_missing_section},
                {"flp_truncated_summary", config.flp_truncated_summary},
                {"flp_inconsistent_counts", config.flp_inconsistent_counts},
                {"flp_domain_mix", config.flp_domain_mix},
                {"flp_spam", config.flp_spam},
                {"vector_dim", config.vector_dim},
                {"topic_scale", config.topic_scale},
                {"noise_scale", config.noise_scale},
                {"style_scale_gpt35", config.style_scale_gpt35},
                {"style_scale_gpt4", config.style_scale_gpt4}};
}

json to_json(const GenReport& report) {
    json counts = json::object();
    json similarity = json::object();
    for (const auto& [label, n] : report.counts) {
        counts[std::string(to_string(label))] = n;
    }
    for (const auto& [label, s] : report.similarity_to_legit) {
        similarity[std::string(to_string(label))] = s;
    }
    return json{{"counts", counts},
                {"similarity_to_legit", similarity},
                {"similarity_metric", "mean over profiles of the max cosine between the profile's mean section "
                                      "embedding and any other legit profile's (built-in encoder)"},
                {"vocabulary_size", report.vocabulary_size},
                {"seed", report.seed},
                {"llm_similarity", report.llm_similarity}};
}

// ---------------------------------------------------------------------------
// Profile generation.
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMinSummaryWords = 10;
constexpr double kRatioLow = 0.3;
constexpr double kRatioHigh = 3.0;

int draw(Rng& rng, int lo, int hi) { return static_cast<int>(rng.integer(lo, hi)); }

std::string fill(std::string pattern, const std::string& key, const std::function<std::string()>& value) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos)) {
        const auto v = value();
        pattern.replace(pos, key.size(), v);
        pos += v.size();
    }
    return pattern;
}

std::vector<std::string> sample_distinct(const std::vector<std::string>& pool, std::size_t n, Rng& rng) {
    std::vector<std::string> copy = pool;
    rng.shuffle(copy);
    copy.resize(std::min(n, copy.size()));
    return copy;
}

class ProfileFactory {
public:
    ProfileFactory(const VocabPools& pools, const GenConfig& config, Rng& rng)
        : pools_(pools), config_(config), rng_(rng) {}

    // Coherent single-domain profile with the class's shape.
    Profile coherent(const ShapeParams& shape) {
        const auto& domain = rng_.pick(pools_.domains);
        return build(shape, [&]() -> const DomainPools& { return domain; }, domain);
    }

    // Manual-fake: sections may drift to random domains.
    Profile mixed(const ShapeParams& shape) {
        const auto& home = rng_.pick(pools_.domains);
        return build(
            shape,
            [&]() -> const DomainPools& {
                return rng_.bernoulli(config_.flp_domain_mix) ? rng_.pick(pools_.domains) : home;
            },
            home);
    }

    std::string spam() { return rng_.pick(pools_.spam_phrases) + "."; }

private:
    template <class DomainFn>
    Profile build(const ShapeParams& shape, DomainFn domain_for_section, const DomainPools& home) {
        Profile p;
        p.name = rng_.pick(pools_.first_names) + " " + rng_.pick(pools_.last_names);
        p.location = rng_.pick(pools_.locations);

        std::vector<std::string> jobs;
        {
            const auto& d = domain_for_section();
            const int n = draw(rng_, shape.jobs_min, shape.jobs_max);
            for (int j = 0; j < n; ++j) {
                std::string entry = rng_.pick(d.titles) + " at " + rng_.pick(pools_.companies) + ".";
                const int duties = draw(rng_, shape.duties_min, shape.duties_max);
                for (const auto& duty : sample_distinct(d.duties, static_cast<std::size_t>(duties), rng_)) {
                    entry += " " + duty + ".";
                }
                jobs.push_back(entry);
            }
        }
        std::vector<std::string> education;
        {
            const auto& d = domain_for_section();
            const int n = draw(rng_, shape.education_min, shape.education_max);
            for (int j = 0; j < n; ++j) {
                education.push_back(rng_.pick(pools_.degrees) + " in " + rng_.pick(d.fields) + ", " +
                                    rng_.pick(pools_.institutions));
            }
        }
        std::vector<std::string> skills;
        {
            const auto& d = domain_for_section();
            skills = sample_distinct(d.skills, static_cast<std::size_t>(draw(rng_, shape.skills_min, shape.skills_max)),
                                     rng_);
        }
        std::vector<std::string> recommendations;
        {
            const auto& d = domain_for_section();
            const int n = draw(rng_, shape.recommendations_min, shape.recommendations_max);
            for (int j = 0; j < n; ++j) {
                auto r = fill(rng_.pick(pools_.recommendation_templates), "{name}",
                              [&] { return rng_.pick(pools_.first_names); });
                r = fill(r, "{skill}", [&] { return rng_.pick(d.skills); });
                recommendations.push_back(r);
            }
        }
        {
            const auto& d = domain_for_section();
            const int n = draw(rng_, shape.summary_min, shape.summary_max);
            std::string summary;
            for (int j = 0; j < n; ++j) {
                auto s = fill(rng_.pick(pools_.summary_templates), "{title}", [&] { return rng_.pick(home.titles); });
                s = fill(s, "{skill}", [&] { return rng_.pick(d.skills); });
                summary += (summary.empty() ? "" : " ") + s;
            }
            p.summary = summary;
        }
        p.sections.push_back({SectionTag::Education, education});
        p.sections.push_back({SectionTag::Experience, jobs});
        if (!skills.empty()) {
            p.sections.push_back({SectionTag::Skills, skills});
        }
        if (!recommendations.empty()) {
            p.sections.push_back({SectionTag::Recommendations, recommendations});
        }
        return p;
    }

    const VocabPools& pools_;
    const GenConfig& config_;
    Rng& rng_;
};

void draw_counts(Profile& p, const NumericParams& params, Rng& rng) {
    const auto connections = std::max<std::int64_t>(
        1, std::min<std::int64_t>(30000, std::llround(rng.lognormal(params.connections_mu, params.connections_sigma))));
    const double ratio = std::clamp(rng.lognormal(params.ratio_mu, params.ratio_sigma), params.ratio_min,
                                    params.ratio_max);
    p.numeric["connections"] = connections;
    p.numeric["followers"] = std::max<std::int64_t>(0, std::llround(static_cast<double>(connections) * ratio));
}

void remove_section(Profile& p, SectionTag tag) {
    p.sections.erase(std::remove_if(p.sections.begin(), p.sections.end(),
                                    [&](const Section& s) { return s.tag == tag; }),
                     p.sections.end());
}

// Word-level synonym substitution. Only words with a known synonym consume
// randomness, so llm_similarity = 1 leaves the text byte-identical.
std::string substitute(const std::string& input, const VocabPools& pools, bool gpt4, double keep, Rng& rng) {
    std::string out;
    std::size_t pos = 0;
    while (pos < input.size()) {
        if (!std::isalpha(static_cast<unsigned char>(input[pos]))) {
            out.push_back(input[pos++]);
            continue;
        }
        std::size_t end = pos;
        while (end < input.size() && std::isalpha(static_cast<unsigned char>(input[end]))) {
            ++end;
        }
        std::string word = input.substr(pos, end - pos);
        std::string lower = word;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        const auto it = pools.synonyms.find(lower);
        if (it != pools.synonyms.end() && !rng.bernoulli(keep)) {
            std::string replacement = gpt4 ? it->second.second : it->second.first;
            if (std::isupper(static_cast<unsigned char>(word[0]))) {
                replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
            }
            word = replacement;
        }
        out += word;
        pos = end;
    }
    return out;
}

void substitute_profile(Profile& p, const VocabPools& pools, bool gpt4, double keep, Rng& rng) {
    p.summary = substitute(p.summary, pools, gpt4, keep, rng);
    for (auto& section : p.sections) {
        for (auto& entry : section.entries) {
            entry = substitute(entry, pools, gpt4, keep, rng);
        }
    }
}

// ---------------------------------------------------------------------------
// Word vectors.
// ---------------------------------------------------------------------------

std::vector<double> random_direction(std::size_t dim, double scale, Rng& rng) {
    std::vector<double> v(dim);
    const double sd = scale / std::sqrt(static_cast<double>(dim));
    for (auto& x : v) {
        x = rng.normal(0.0, sd);
    }
    return v;
}

// Values pass through the six-decimal text form so the in-memory table equals
// one read back from word_vectors.txt.
double quantize(double v) {
    const auto text = fmt::format("{:.6f}", v);
    return std::strtod(text.c_str(), nullptr);
}

WordVectorTable build_vectors(const VocabPools& pools, const GenConfig& config) {
    Rng rng(derive_seed(config.seed, "synthgen:vectors"));
    const std::size_t dim = config.vector_dim;
    WordVectorTable table(dim);

    auto add_topic = [&](const std::vector<std::string>& items, const std::vector<double>& center) {
        for (const auto& item : items) {
            for (const auto& token : text::tokenize(item)) {
                if (token.front() == '{' || !table.find(token).empty()) {
                    continue;
                }
                auto noise = random_direction(dim, config.noise_scale, rng);
                std::vector<double> v(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    v[i] = quantize(center[i] + noise[i]);
                }
                table.insert(token, v);
            }
        }
    };
    auto center = [&] { return random_direction(dim, config.topic_scale, rng); };

    std::vector<std::string> tag_words;
    for (const auto tag : kAllTags) {
        tag_words.emplace_back(tag_name(tag));
    }
    add_topic(tag_words, center());
    for (const auto& d : pools.domains) {
        const auto c = center();
        add_topic(d.titles, c);
        add_topic(d.skills, c);
        add_topic(d.duties, c);
        add_topic(d.fields, c);
    }
    const auto general = center();
    std::vector<std::string> template_words;
    for (const auto& t : pools.summary_templates) {
        template_words.push_back(fill(fill(t, "{title}", [] { return ""; }), "{skill}", [] { return ""; }));
    }
    for (const auto& t : pools.recommendation_templates) {
        template_words.push_back(fill(fill(t, "{name}", [] { return ""; }), "{skill}", [] { return ""; }));
    }
    add_topic(template_words, general);
    add_topic({"at", "in"}, general);
    const auto people = center();
    add_topic(pools.first_names, people);
    add_topic(pools.last_names, people);
    add_topic(pools.locations, center());
    const auto orgs = center();
    add_topic(pools.institutions, orgs);
    add_topic(pools.degrees, orgs);
    add_topic(pools.companies, orgs);
    add_topic(pools.spam_phrases, center());

    const auto style35 = random_direction(dim, config.style_scale_gpt35, rng);
    const auto style4 = random_direction(dim, config.style_scale_gpt4, rng);
    for (const auto& [word, pair] : pools.synonyms) {
        auto base = table.find(word);
        std::vector<double> source(base.begin(), base.end());
        if (source.empty()) {
            source = random_direction(dim, config.noise_scale, rng);
            for (auto& x : source) {
                x += general[&x - source.data()];
            }
        }
        for (const auto& [token, style] : {std::pair{pair.first, &style35}, std::pair{pair.second, &style4}}) {
            if (!table.find(token).empty()) {
                continue;
            }
            auto noise = random_direction(dim, 0.1 * config.noise_scale, rng);
            std::vector<double> v(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] = quantize(source[i] + (*style)[i] + noise[i]);
            }
            table.insert(token, v);
        }
    }
    return table;
}

std::vector<double> text_vector(const Profile& p, const WordVectorTable& table) {
    std::vector<double> acc(table.dim(), 0.0);
    std::size_t n = 0;
    for (const auto& [tag, body] : p.tagged_texts()) {
        if (tag == SectionTag::Name || tag == SectionTag::Location) {
            continue;
        }
        const auto v = embed_section(body, table);
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] += v.values[i];
        }
        ++n;
    }
    for (auto& x : acc) {
        x /= static_cast<double>(std::max<std::size_t>(n, 1));
    }
    return acc;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return na > 0.0 && nb > 0.0 ? dot / std::sqrt(na * nb) : 0.0;
}

std::map<Label, double> similarity_report(const std::vector<Profile>& profiles, const WordVectorTable& table) {
    std::vector<std::vector<double>> vectors;
    std::vector<std::size_t> legit;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        vectors.push_back(text_vector(profiles[i], table));
        if (profiles[i].label == Label::LLP) {
            legit.push_back(i);
        }
    }
    std::map<Label, double> sums;
    std::map<Label, std::size_t> counts;
    if (legit.empty()) {
        return {};
    }
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        double best = -1.0;
        for (const auto j : legit) {
            if (j != i) {
                best = std::max(best, cosine(vectors[i], vectors[j]));
            }
        }
        if (best > -1.0) {
            sums[profiles[i].label] += best;
            ++counts[profiles[i].label];
        }
    }
    std::map<Label, double> out;
    for (const auto& [label, sum] : sums) {
        out[label] = sum / static_cast<double>(counts[label]);
    }
    return out;
}

}  // namespace

GeneratedCorpus generate(const GenConfig& config) {
    config.validate();
    const VocabPools pools = load_vocab(config.vocab_dir);
    GeneratedCorpus out;
    out.word_vectors = build_vectors(pools, config);

    Rng rng(derive_seed(config.seed, "synthgen:profiles"));
    ProfileFactory factory(pools, config, rng);
    std::size_t serial = 0;
    for (const auto label : kAllLabels) {
        const auto it = config.counts.find(label);
        const std::size_t count = it == config.counts.end() ? 0 : it->second;
        const auto& shape = config.shape.at(label);
        const auto& numeric = config.numeric.at(label);
        for (std::size_t k = 0; k < count; ++k) {
            const auto id = fmt::format("p{:06d}", ++serial);
            Profile p;
            switch (label) {
                case Label::LLP:
                    p = factory.coherent(shape);
                    draw_counts(p, numeric, rng);
                    break;
                case Label::FLP: {
                    p = factory.mixed(shape);
                    if (rng.bernoulli(config.flp_spam)) {
                        p.summary += " " + factory.spam();
                        for (auto& section : p.sections) {
                            if (section.tag == SectionTag::Skills) {
                                section.entries.push_back(factory.spam());
                            }
                        }
                    }
                    draw_counts(p, numeric, rng);
                    if (rng.bernoulli(config.flp_missing_section)) {
                        switch (rng.index(3)) {
                            case 0: remove_section(p, SectionTag::Skills); break;
                            case 1: remove_section(p, SectionTag::Recommendations); break;
                            default: p.summary.clear();
                        }
                    }
                    if (rng.bernoulli(config.flp_truncated_summary) && !p.summary.empty()) {
                        auto words = text::tokenize(p.summary);
                        words.resize(std::min<std::size_t>(words.size(), static_cast<std::size_t>(draw(rng, 2, 6))));
                        std::string cut;
                        for (const auto& w : words) {
                            cut += (cut.empty() ? "" : " ") + w;
                        }
                        p.summary = cut;
                    }
                    if (rng.bernoulli(config.flp_inconsistent_counts)) {
                        if (rng.bernoulli(0.5)) {
                            p.numeric["followers"] = std::max<std::int64_t>(1, p.numeric["connections"]);
                            p.numeric["connections"] = 0;
                        } else {
                            p.numeric["followers"] =
                                std::llround(static_cast<double>(p.numeric["connections"]) * rng.uniform(10.0, 50.0));
                        }
                    }
                    break;
                }
                case Label::GPT35P:
                case Label::GPT4P: {
                    Profile source = factory.coherent(shape);
                    p = source;
                    substitute_profile(p, pools, label == Label::GPT4P, config.llm_similarity, rng);
                    draw_counts(p, numeric, rng);
                    source.label = label;
                    out.templates.emplace(id, std::move(source));
                    break;
                }
            }
            p.label = label;
            p.id = id;
            out.profiles.push_back(std::move(p));
        }
        out.report.counts[label] = count;
    }
    // Round-trip each profile through the cleaner so the in-memory corpus is
    // exactly what load_corpus would return for the written file.
    for (auto& p : out.profiles) {
        auto cleaned = clean_profile(to_json(p));
        if (auto* rejection = std::get_if<Rejection>(&cleaned)) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("generator produced an invalid profile {}: {}", p.id, rejection->detail));
        }
        p = std::get<Profile>(std::move(cleaned));
    }
    for (auto& [id, t] : out.templates) {
        t.id = id;
        auto cleaned = clean_profile(to_json(t));
        if (auto* profile = std::get_if<Profile>(&cleaned)) {
            t = std::move(*profile);
        }
    }
    out.report.similarity_to_legit = similarity_report(out.profiles, out.word_vectors);
    out.report.vocabulary_size = out.word_vectors.size();
    out.report.seed = config.seed;
    out.report.llm_similarity = config.llm_similarity;
    return out;
}

GenReport generate_to(const GenConfig& config, const fs::path& dir) {
    const auto corpus = generate(config);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create " + dir.string());
    }
    write_corpus(dir / "corpus.jsonl", corpus.profiles);
    {
        std::ofstream out(dir / "word_vectors.txt", std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write word vectors in " + dir.string());
        }
        write_word_vectors(out, corpus.word_vectors);
    }
    {
        std::ofstream out(dir / "gen_report.json", std::ios::binary);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write generator report in " + dir.string());
        }
        out << to_json(corpus.report).dump(2) << '\n';
    }
    return corpus.report;
}

std::vector<std::string> structural_violations(const Profile& profile) {
    std::vector<std::string> out;
    if (profile.entries(SectionTag::Skills).empty() || profile.entries(SectionTag::Recommendations).empty() ||
        profile.summary.empty()) {
        out.emplace_back("missing_section");
    }
    if (!profile.summary.empty() && text::word_count(profile.summary) < kMinSummaryWords) {
        out.emplace_back("short_summary");
    }
    const double connections = static_cast<double>(profile.numeric_or("connections", 0));
    const double followers = static_cast<double>(profile.numeric_or("followers", 0));
    // Followers are rounded from connections * ratio, so allow half a count.
    if (connections < 1.0 || followers < kRatioLow * connections - 0.5 || followers > kRatioHigh * connections + 0.5) {
        out.emplace_back("inconsistent_counts");
    }
    return out;
}

CorpusDiagnostics validate_corpus(const fs::path& path) {
    const auto load = load_corpus(path);
    CorpusDiagnostics diagnostics;
    diagnostics.records = load.profiles.size() + load.rejections.size();
    for (const auto& p : load.profiles) {
        ++diagnostics.class_counts[p.label];
    }
    diagnostics.violations = load.rejections;
    for (const auto& r : load.rejections) {
        if (r.reason == RejectReason::DuplicateId) {
            diagnostics.duplicate_ids.push_back(r.id);
        }
    }
    return diagnostics;
}

json to_json(const CorpusDiagnostics& diagnostics) {
    json counts = json::object();
    for (const auto& [label, n] : diagnostics.class_counts) {
        counts[std::string(to_string(label))] = n;
    }
    json violations = json::array();
    for (const auto& r : diagnostics.violations) {
        violations.push_back(
            {{"line", r.line}, {"id", r.id}, {"reason", std::string(to_string(r.reason))}, {"detail", r.detail}});
    }
    return json{{"records", diagnostics.records},
                {"class_counts", counts},
                {"duplicate_ids", diagnostics.duplicate_ids},
                {"violations", violations},
                {"ok", diagnostics.ok()}};
}

}  // namespace sentinel
