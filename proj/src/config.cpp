#include "coordnet/config.hpp"

#include <fstream>

#include "coordnet/errors.hpp"

namespace coordnet {

using json = nlohmann::json;

namespace {

// Tracks which keys of an object were consumed so leftovers can be rejected.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj.is_object()) throw ConfigError(path_ + " must be a JSON object");
    }

    ~Section() = default;

    const json* take(const char* key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key()))
                throw ConfigError("unknown key \"" + path_ + "." + it.key() + "\"");
        }
    }

    const std::string& path() const { return path_; }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string key_path(const Section& section, const char* key) {
    return section.path() + "." + key;
}

void read_uint(Section& section, const char* key, std::uint64_t& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            throw ConfigError(key_path(section, key) + " must be a non-negative integer");
        out = v->get<std::uint64_t>();
    }
}

void read_size(Section& section, const char* key, std::size_t& out) {
    std::uint64_t v = out;
    read_uint(section, key, v);
    out = static_cast<std::size_t>(v);
}

void read_int64(Section& section, const char* key, std::int64_t& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_number_integer() && !v->is_number_unsigned())
            throw ConfigError(key_path(section, key) + " must be an integer");
        out = v->get<std::int64_t>();
    }
}

void read_double(Section& section, const char* key, double& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_number()) throw ConfigError(key_path(section, key) + " must be a number");
        out = v->get<double>();
    }
}

void read_bool(Section& section, const char* key, bool& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_boolean()) throw ConfigError(key_path(section, key) + " must be a boolean");
        out = v->get<bool>();
    }
}

void read_string(Section& section, const char* key, std::string& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_string()) throw ConfigError(key_path(section, key) + " must be a string");
        out = v->get<std::string>();
    }
}

void read_string_list(Section& section, const char* key, std::vector<std::string>& out) {
    if (const json* v = section.take(key)) {
        if (!v->is_array()) throw ConfigError(key_path(section, key) + " must be an array");
        out.clear();
        for (const auto& entry : *v) {
            if (!entry.is_string())
                throw ConfigError(key_path(section, key) + " entries must be strings");
            out.push_back(entry.get<std::string>());
        }
    }
}

}  // namespace

PipelineConfig config_from_json(const json& doc) {
    PipelineConfig config;
    Section root(doc, "config");

    if (const json* v = root.take("ingest")) {
        Section s(*v, "config.ingest");
        std::string format = "jsonl";
        read_string(s, "format", format);
        if (format == "jsonl") config.input_format = InputFormat::jsonl;
        else if (format == "csv") config.input_format = InputFormat::csv;
        else throw ConfigError("config.ingest.format must be \"jsonl\" or \"csv\"");
        s.finish();
    }

    if (const json* v = root.take("filter")) {
        Section s(*v, "config.filter");
        read_string_list(s, "keywords", config.filter_keywords);
        std::vector<std::string> fields;
        read_string_list(s, "fields", fields);
        if (!fields.empty()) {
            config.filter_fields.clear();
            for (const auto& name : fields) {
                auto f = text_field_from_name(name);
                if (!f) throw ConfigError("config.filter.fields: unknown field \"" + name + "\"");
                config.filter_fields.insert(*f);
            }
        }
        s.finish();
    }

    if (const json* v = root.take("normalization")) {
        Section s(*v, "config.normalization");
        read_size(s, "min_text_length", config.normalization.min_text_length);
        read_string_list(s, "tracking_params", config.normalization.tracking_params);
        read_bool(s, "strip_fragment", config.normalization.strip_fragment);
        s.finish();
        if (config.normalization.min_text_length < 1)
            throw ConfigError("config.normalization.min_text_length must be >= 1");
    }

    if (const json* v = root.take("detection")) {
        Section s(*v, "config.detection");
        read_int64(s, "window_seconds", config.detection.window_seconds);
        read_size(s, "min_chain_shares", config.detection.min_chain_shares);
        read_size(s, "min_distinct_groups", config.detection.min_distinct_groups);
        read_bool(s, "estimate_threshold", config.estimate_threshold);
        read_double(s, "quantile", config.quantile);
        std::vector<std::string> kinds;
        read_string_list(s, "estimate_kinds", kinds);
        if (!kinds.empty()) {
            config.estimate_kinds.clear();
            for (const auto& name : kinds) {
                auto k = key_kind_from_name(name);
                if (!k)
                    throw ConfigError("config.detection.estimate_kinds: unknown kind \"" + name +
                                      "\"");
                config.estimate_kinds.insert(*k);
            }
        }
        s.finish();
        if (config.detection.window_seconds < 1)
            throw ConfigError("config.detection.window_seconds must be >= 1");
        if (config.detection.min_chain_shares < 2)
            throw ConfigError("config.detection.min_chain_shares must be >= 2");
        if (config.detection.min_distinct_groups < 1)
            throw ConfigError("config.detection.min_distinct_groups must be >= 1");
        if (!(config.quantile > 0.0) || config.quantile > 1.0)
            throw ConfigError("config.detection.quantile must be in (0, 1]");
    }

    if (const json* v = root.take("graph")) {
        Section s(*v, "config.graph");
        read_double(s, "min_degree", config.min_degree);
        std::string comparator = "at_least";
        read_string(s, "comparator", comparator);
        if (comparator == "at_least") config.comparator = DegreeComparator::at_least;
        else if (comparator == "greater") config.comparator = DegreeComparator::greater;
        else throw ConfigError("config.graph.comparator must be \"at_least\" or \"greater\"");
        read_bool(s, "iterative", config.iterative_filter);
        s.finish();
        if (config.min_degree < 0.0) throw ConfigError("config.graph.min_degree must be >= 0");
    }

    if (const json* v = root.take("communities")) {
        Section s(*v, "config.communities");
        read_double(s, "resolution", config.resolution);
        read_uint(s, "seed", config.seed);
        read_uint(s, "best_of_k", config.best_of_k);
        s.finish();
        if (config.resolution <= 0.0)
            throw ConfigError("config.communities.resolution must be positive");
        if (config.best_of_k < 1) throw ConfigError("config.communities.best_of_k must be >= 1");
    }

    if (const json* v = root.take("report")) {
        Section s(*v, "config.report");
        read_string(s, "output_dir", config.output_dir);
        read_size(s, "top_n", config.top_n);
        s.finish();
        if (config.top_n < 1) throw ConfigError("config.report.top_n must be >= 1");
    }

    if (const json* v = root.take("scenario")) {
        Section s(*v, "config.scenario");
        ScenarioConfig scenario;
        read_uint(s, "seed", scenario.seed);
        read_int64(s, "horizon_seconds", scenario.horizon_seconds);
        read_size(s, "n_groups", scenario.n_groups);
        if (const json* o = s.take("organic")) {
            Section os(*o, "config.scenario.organic");
            read_size(os, "n_posts", scenario.organic.n_posts);
            read_double(os, "key_reuse_probability", scenario.organic.key_reuse_probability);
            os.finish();
        }
        if (const json* cs = s.take("campaigns")) {
            if (!cs->is_array())
                throw ConfigError("config.scenario.campaigns must be an array");
            for (std::size_t i = 0; i < cs->size(); ++i) {
                Section c((*cs)[i], "config.scenario.campaigns[" + std::to_string(i) + "]");
                CampaignConfig camp;
                read_size(c, "n_groups", camp.n_groups);
                read_size(c, "n_keys", camp.n_keys);
                read_size(c, "shares_per_key", camp.shares_per_key);
                read_int64(c, "burst_interval_seconds", camp.burst_interval_seconds);
                read_int64(c, "jitter_seconds", camp.jitter_seconds);
                c.finish();
                scenario.campaigns.push_back(camp);
            }
        }
        s.finish();
        if (scenario.horizon_seconds < 0)
            throw ConfigError("config.scenario.horizon_seconds must be >= 0");
        if (scenario.organic.key_reuse_probability < 0.0 ||
            scenario.organic.key_reuse_probability > 1.0)
            throw ConfigError("config.scenario.organic.key_reuse_probability must be in [0, 1]");
        for (const auto& camp : scenario.campaigns) {
            if (camp.burst_interval_seconds < 0 || camp.jitter_seconds < 0)
                throw ConfigError("config.scenario campaign intervals must be >= 0");
        }
        config.scenario = std::move(scenario);
    }

    root.finish();
    return config;
}

json config_to_json(const PipelineConfig& config) {
    json doc;
    doc["ingest"] = {{"format", config.input_format == InputFormat::jsonl ? "jsonl" : "csv"}};

    json fields = json::array();
    for (TextField f : config.filter_fields) fields.push_back(std::string(text_field_name(f)));
    doc["filter"] = {{"keywords", config.filter_keywords}, {"fields", std::move(fields)}};

    doc["normalization"] = {{"min_text_length", config.normalization.min_text_length},
                            {"tracking_params", config.normalization.tracking_params},
                            {"strip_fragment", config.normalization.strip_fragment}};

    json kinds = json::array();
    for (ContentKey::Kind k : config.estimate_kinds)
        kinds.push_back(std::string(key_kind_name(k)));
    doc["detection"] = {{"window_seconds", config.detection.window_seconds},
                        {"min_chain_shares", config.detection.min_chain_shares},
                        {"min_distinct_groups", config.detection.min_distinct_groups},
                        {"estimate_threshold", config.estimate_threshold},
                        {"quantile", config.quantile},
                        {"estimate_kinds", std::move(kinds)}};

    doc["graph"] = {{"min_degree", config.min_degree},
                    {"comparator", config.comparator == DegreeComparator::at_least ? "at_least"
                                                                                   : "greater"},
                    {"iterative", config.iterative_filter}};

    doc["communities"] = {{"resolution", config.resolution},
                          {"seed", config.seed},
                          {"best_of_k", config.best_of_k}};

    doc["report"] = {{"output_dir", config.output_dir}, {"top_n", config.top_n}};

    if (config.scenario) {
        const ScenarioConfig& s = *config.scenario;
        json campaigns = json::array();
        for (const auto& camp : s.campaigns) {
            campaigns.push_back({{"n_groups", camp.n_groups},
                                 {"n_keys", camp.n_keys},
                                 {"shares_per_key", camp.shares_per_key},
                                 {"burst_interval_seconds", camp.burst_interval_seconds},
                                 {"jitter_seconds", camp.jitter_seconds}});
        }
        doc["scenario"] = {{"seed", s.seed},
                           {"horizon_seconds", s.horizon_seconds},
                           {"n_groups", s.n_groups},
                           {"organic",
                            {{"n_posts", s.organic.n_posts},
                             {"key_reuse_probability", s.organic.key_reuse_probability}}},
                           {"campaigns", std::move(campaigns)}};
    }
    return doc;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file \"" + path + "\"");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError("config file \"" + path + "\": " + ex.what());
    }
    return config_from_json(doc);
}

}  // namespace coordnet
