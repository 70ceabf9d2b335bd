#include "adaptswarm/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adaptswarm/errors.hpp"

namespace adaptswarm::harness {

using nlohmann::json;

namespace {

template <class T>
T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path + " must be a boolean");
        return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(path + " must be a string");
        return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(path + " must be a number");
        return v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) throw ConfigError(path + " must be a non-negative integer");
        return v.get<T>();
    } else {
        static_assert(std::is_integral_v<T>);
        if (!v.is_number_integer()) throw ConfigError(path + " must be an integer");
        const auto wide = v.get<std::int64_t>();
        if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
            throw ConfigError(path + " is out of range");
        }
        return static_cast<T>(wide);
    }
}

/// Reads the keys a binder names and rejects every other key.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError((path_.empty() ? "config" : path_) + " must be an object");
    }

    template <class T>
    void operator()(const char* key, T& out) {
        if (const json* v = take(key)) out = convert<T>(*v, at(key));
    }

    template <class F>
    void section(const char* key, F&& bind) {
        if (const json* v = take(key)) {
            Reader sub(*v, at(key));
            bind(sub);
            sub.finish();
        }
    }

    template <class T, class F>
    void list(const char* key, std::vector<T>& items, F&& bind) {
        const json* v = take(key);
        if (!v) return;
        if (!v->is_array()) throw ConfigError(at(key) + " must be an array");
        items.clear();
        for (std::size_t i = 0; i < v->size(); ++i) {
            T item{};
            Reader sub((*v)[i], at(key) + "[" + std::to_string(i) + "]");
            bind(sub, item);
            sub.finish();
            items.push_back(std::move(item));
        }
    }

    template <class T>
    void values(const char* key, std::vector<T>& out) {
        const json* v = take(key);
        if (!v) return;
        if (!v->is_array()) throw ConfigError(at(key) + " must be an array");
        out.clear();
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(convert<T>((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
    }

    template <class T, class Parse>
    void named(const char* key, T& out, std::string_view (*)(T), Parse parse, const std::string& choices) {
        if (const json* v = take(key)) {
            const auto name = convert<std::string>(*v, at(key));
            const auto parsed = parse(name);
            if (!parsed) throw ConfigError(at(key) + " must be one of {" + choices + "}, got '" + name + "'");
            out = *parsed;
        }
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.contains(item.key())) throw ConfigError("unknown config key " + at(item.key()));
        }
    }

private:
    const json* take(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

class Writer {
public:
    explicit Writer(json& j) : j_(j) { j_ = json::object(); }

    template <class T>
    void operator()(const char* key, const T& v) {
        j_[key] = v;
    }

    template <class F>
    void section(const char* key, F&& bind) {
        Writer sub(j_[key]);
        bind(sub);
    }

    template <class T, class F>
    void list(const char* key, std::vector<T>& items, F&& bind) {
        json arr = json::array();
        for (T& item : items) {
            json obj;
            Writer sub(obj);
            bind(sub, item);
            arr.push_back(std::move(obj));
        }
        j_[key] = std::move(arr);
    }

    template <class T>
    void values(const char* key, const std::vector<T>& v) {
        j_[key] = v;
    }

    template <class T, class Parse>
    void named(const char* key, T& v, std::string_view (*to_text)(T), Parse, const std::string&) {
        j_[key] = std::string(to_text(v));
    }

private:
    json& j_;
};

std::optional<nn::OptimizerKind> parse_optimizer(std::string_view s) {
    if (s == "adam") return nn::OptimizerKind::adam;
    if (s == "sgd") return nn::OptimizerKind::sgd;
    return std::nullopt;
}

std::string_view optimizer_name(nn::OptimizerKind k) { return k == nn::OptimizerKind::adam ? "adam" : "sgd"; }
std::string_view algorithm_name(agents::Algorithm a) { return agents::to_string(a); }
std::string_view dueling_name(agents::DuelingMode m) { return agents::to_string(m); }

template <class IO>
void bind_workload(IO& io, sim::WorkloadModel& w) {
    io("base", w.base);
    io("amplitude", w.amplitude);
    io("period", w.period);
    io("noise_sigma", w.noise_sigma);
    io("spike_probability", w.spike_probability);
    io("spike_multiplier", w.spike_multiplier);
}

template <class IO>
void bind_cluster(IO& io, sim::ClusterConfig& c) {
    io("managers", c.managers);
    io("workers", c.workers);
    io("max_nodes", c.max_nodes);
    io("cpu_capacity", c.cpu_capacity);
    io("mem_capacity", c.mem_capacity);
    io("disk_capacity", c.disk_capacity);
    io("net_capacity", c.net_capacity);
    io.list("services", c.services, [](IO& s, sim::ServiceConfig& svc) {
        s("name", svc.name);
        s.section("workload", [&](IO& w) { bind_workload(w, svc.workload); });
        s("initial_replicas", svc.initial_replicas);
        s("cpu_limit", svc.cpu_limit);
        s("mem_limit", svc.mem_limit);
    });
    io("min_replicas", c.min_replicas);
    io("max_replicas", c.max_replicas);
    io("cpu_limit_min", c.cpu_limit_min);
    io("cpu_limit_max", c.cpu_limit_max);
    io("mem_limit_min", c.mem_limit_min);
    io("mem_limit_max", c.mem_limit_max);
    io("vertical_step", c.vertical_step);
    io("p_fail", c.p_fail);
    io("disk_initial", c.disk_initial);
    io("disk_growth", c.disk_growth);
    io("disk_reclaim", c.disk_reclaim);
    io("mem_base", c.mem_base);
    io("mem_ratio", c.mem_ratio);
    io("net_per_millicore", c.net_per_millicore);
    io.section("slo", [&](IO& s) {
        s("low", c.slo.low);
        s("high", c.slo.high);
    });
}

template <class IO>
void bind_env(IO& io, env::EnvConfig& e) {
    io("max_steps", e.max_steps);
    io("gamma", e.gamma);
    io.section("reward", [&](IO& r) {
        r("c_conv", e.reward.c_conv);
        r("c_fail", e.reward.c_fail);
        r("c_step", e.reward.c_step);
        r("c_viol", e.reward.c_viol);
    });
    io.section("durations", [&](IO& d) {
        d("noop", e.durations.noop);
        d("horizontal", e.durations.horizontal);
        d("vertical", e.durations.vertical);
        d("compose", e.durations.compose);
        d("recover", e.durations.recover);
    });
    io.section("binding", [&](IO& b) {
        b("horizontal", e.binding.horizontal);
        b("vertical", e.binding.vertical);
        b("compose", e.binding.compose);
    });
}

template <class IO>
void bind_gate(IO& io, raft::GateConfig& g) {
    io("rounds_per_step", g.rounds_per_step);
    io("ballot_timeout", g.ballot_timeout);
    io("election_timeout_min", g.election_timeout_min);
    io("election_timeout_max", g.election_timeout_max);
    io("heartbeat_interval", g.heartbeat_interval);
    io("election_give_up_terms", g.election_give_up_terms);
}

template <class IO>
void bind_faults(IO& io, raft::FaultProfile& f) {
    io("drop_probability", f.drop_probability);
    io("min_delay", f.min_delay);
    io("max_delay", f.max_delay);
    io.list("crashes", f.crashes, [](IO& c, raft::ScheduledCrash& crash) {
        c("tick", crash.tick);
        c("node", crash.node);
    });
}

template <class IO>
void bind_agent(IO& io, agents::AgentConfig& a) {
    io("epsilon_start", a.epsilon.start);
    io("epsilon_min", a.epsilon.min);
    io("epsilon_decay_steps", a.epsilon.decay_steps);
    io("buffer_capacity", a.buffer_capacity);
    io("batch_size", a.batch_size);
    io("target_period", a.target_period);
    io("sequence_length", a.sequence_length);
    io("hidden_units", a.hidden_units);
    io.named("dueling_mode", a.dueling, &dueling_name, agents::parse_dueling_mode, "uncentered, mean_centered");
    io.named("optimizer", a.optimizer, &optimizer_name, parse_optimizer, "adam, sgd");
    io("learning_rate", a.learning_rate);
    io("actor_learning_rate", a.actor_learning_rate);
    io("critic_learning_rate", a.critic_learning_rate);
    io("tau", a.tau);
    io("ou_theta", a.ou_theta);
    io("ou_sigma", a.ou_sigma);
    io("ou_dt", a.ou_dt);
    io("pg_batch_episodes", a.pg_batch_episodes);
    io("pg_hidden_units", a.pg_hidden_units);
    io("train_every", a.train_every);
}

template <class IO>
void bind_experiment(IO& io, ExperimentConfig& c) {
    io.named("algorithm", c.algorithm, &algorithm_name, agents::parse_algorithm, agents::algorithm_list());
    io("episodes", c.episodes);
    io.values("seeds", c.seeds);
    io("output_dir", c.output_dir);
    io.section("cluster", [&](IO& s) { bind_cluster(s, c.env.cluster); });
    io.section("gate", [&](IO& s) { bind_gate(s, c.env.gate); });
    io.section("faults", [&](IO& s) { bind_faults(s, c.env.faults); });
    io.section("env", [&](IO& s) { bind_env(s, c.env); });
    io.section("agent", [&](IO& s) { bind_agent(s, c.agent); });
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    Reader r(doc, "");
    bind_experiment(r, c);
    r.finish();
    c.algorithm_set = doc.contains("algorithm");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_json(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    json doc;
    Writer w(doc);
    bind_experiment(w, c);
    return doc.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
    return out;
}

agents::AgentConfig effective_agent_config(const ExperimentConfig& config) {
    agents::AgentConfig a = config.agent;
    a.gamma = config.env.gamma;
    return a;
}

void validate(const ExperimentConfig& c) {
    if (c.episodes < 1) throw ConfigError("episodes must be at least 1, got " + std::to_string(c.episodes));
    if (c.seeds.empty()) throw ConfigError("at least one seed is required");
    env::validate(c.env);
    agents::validate(effective_agent_config(c));
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, comma - pos);
        std::uint64_t v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            throw ConfigError("seed list must be comma-separated non-negative integers, got '" + std::string(text) + "'");
        }
        seeds.push_back(v);
        pos = comma + 1;
    }
    return seeds;
}

}  // namespace adaptswarm::harness
