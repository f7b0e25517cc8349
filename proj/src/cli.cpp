#include "vcsim/cli.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "vcsim/error.hpp"

namespace vcsim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_field(const std::string& key, const std::string& what) {
    fail(ErrorKind::configuration, "config field '" + key + "': " + what);
}

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) bad_field(key, "expected a number");
    return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        bad_field(key, "expected a nonnegative integer");
    return v.get<std::size_t>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) bad_field(key, "expected a string");
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) bad_field(key, "expected true or false");
    return v.get<bool>();
}

template <class T>
std::vector<T> get_list(const json& v, const std::string& key) {
    if (!v.is_array()) bad_field(key, "expected a list of integers");
    std::vector<T> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) bad_field(key, "expected a list of integers");
        out.push_back(e.get<T>());
    }
    return out;
}

// Rewraps module errors so the message names the field.
template <class F>
auto parse_enum(const json& v, const std::string& key, F parse) {
    const auto s = get_string(v, key);
    try {
        return parse(s);
    } catch (const Error& e) {
        bad_field(key, e.what());
    }
}

AdversarySpec adversary_from_json(const json& doc) {
    if (!doc.is_object()) bad_field("adversary", "expected an object or null");
    AdversarySpec a;
    for (const auto& [key, v] : doc.items()) {
        const std::string name = "adversary." + key;
        if (key == "briber_candidates") a.briber_candidates = get_list<CandidateId>(v, name);
        else if (key == "bribed_voters") a.bribed_voters = get_list<VoterId>(v, name);
        else if (key == "bribe_top_stake") a.bribe_top_stake = get_count(v, name);
        else if (key == "mode") a.mode = parse_enum(v, name, parse_bribery_mode);
        else if (key == "from_round") a.from_round = get_count(v, name);
        else bad_field(name, "unknown field");
    }
    return a;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

json config_to_json(const ScenarioConfig& c) {
    json doc = {
        {"name", c.name},
        {"num_voters", c.num_voters},
        {"num_candidates", c.num_candidates},
        {"k_supernodes", c.k_supernodes},
        {"rounds", c.rounds},
        {"alpha", c.alpha},
        {"rho", c.rho},
        {"availability_fn", std::string(to_string(c.availability_fn))},
        {"score_form", std::string(to_string(c.score_form))},
        {"clip_delta", c.clip_delta},
        {"block_reward", c.block_reward},
        {"stake_choices", c.stake_choices},
        {"stakes", c.stakes},
        {"capability_order", c.capability_order},
        {"unavailability_step", c.unavailability_step},
        {"trust_enabled", c.trust_enabled},
        {"seed", c.seed},
        {"insensitivity_agreement", c.insensitivity_agreement},
        {"insensitivity_reward_tolerance", c.insensitivity_reward_tolerance},
    };
    if (c.adversary) {
        const auto& a = *c.adversary;
        doc["adversary"] = {
            {"briber_candidates", a.briber_candidates},
            {"bribed_voters", a.bribed_voters},
            {"bribe_top_stake", a.bribe_top_stake},
            {"mode", std::string(to_string(a.mode))},
            {"from_round", a.from_round},
        };
    } else {
        doc["adversary"] = nullptr;
    }
    return doc;
}

ScenarioConfig config_from_json(const json& doc) {
    if (!doc.is_object()) fail(ErrorKind::configuration, "config must be a JSON object");
    ScenarioConfig c;
    for (const auto& [key, v] : doc.items()) {
        if (key == "name") c.name = get_string(v, key);
        else if (key == "num_voters") c.num_voters = get_count(v, key);
        else if (key == "num_candidates") c.num_candidates = get_count(v, key);
        else if (key == "k_supernodes") c.k_supernodes = get_count(v, key);
        else if (key == "rounds") c.rounds = get_count(v, key);
        else if (key == "alpha") c.alpha = get_number(v, key);
        else if (key == "rho") c.rho = get_number(v, key);
        else if (key == "availability_fn") c.availability_fn = parse_enum(v, key, parse_availability_fn);
        else if (key == "score_form") c.score_form = parse_enum(v, key, parse_score_form);
        else if (key == "clip_delta") c.clip_delta = get_number(v, key);
        else if (key == "block_reward") c.block_reward = get_number(v, key);
        else if (key == "stake_choices") c.stake_choices = get_list<int>(v, key);
        else if (key == "stakes") c.stakes = get_list<int>(v, key);
        else if (key == "capability_order") c.capability_order = get_list<CandidateId>(v, key);
        else if (key == "unavailability_step") c.unavailability_step = get_number(v, key);
        else if (key == "trust_enabled") c.trust_enabled = get_bool(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned()) bad_field(key, "expected a nonnegative 64-bit integer");
            c.seed = v.get<std::uint64_t>();
        }
        else if (key == "insensitivity_agreement") c.insensitivity_agreement = get_number(v, key);
        else if (key == "insensitivity_reward_tolerance")
            c.insensitivity_reward_tolerance = get_number(v, key);
        else if (key == "adversary") {
            if (!v.is_null()) c.adversary = adversary_from_json(v);
        }
        else bad_field(key, "unknown field");
    }
    c.validate();
    return c;
}

json read_config_document(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::configuration,
            "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        fail(ErrorKind::configuration, path.string() + ":" + std::to_string(line) + ":" +
                                           std::to_string(col) + ": invalid JSON");
    }
    // A run manifest carries the config it ran with.
    if (doc.is_object() && doc.contains("config") && doc.contains("tool")) return doc["config"];
    return doc;
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string_view::npos && eq > 0, ErrorKind::configuration,
            "override '" + std::string(assignment) + "' must look like key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::string rest = key;
    for (auto dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
        const auto head = rest.substr(0, dot);
        if (!node->contains(head) || !(*node)[head].is_object()) (*node)[head] = json::object();
        node = &(*node)[head];
        rest = rest.substr(dot + 1);
    }
    (*node)[rest] = value;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::configuration, "cannot write " + path.string());
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::vector<std::string> write_simulation(const ExperimentResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    const std::size_t n = result.voters.size();
    const std::size_t m = result.candidates.size();

    {
        std::ofstream out(dir / "rewards.csv", std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorKind::configuration, "cannot write rewards.csv");
        out << "round,voter,stake,cumulative_reward\n";
        for (std::size_t k = 0; k < result.rounds.size(); ++k)
            for (VoterId i = 0; i < n; ++i)
                out << k + 1 << ',' << i << ',' << result.voters[i].stake << ','
                    << format_double(result.cumulative_rewards(k, i)) << '\n';
    }
    {
        std::ofstream out(dir / "elections.csv", std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorKind::configuration, "cannot write elections.csv");
        out << "round,candidate,score,elected,unavailable\n";
        for (const auto& r : result.rounds) {
            std::vector<std::uint8_t> elected(m, 0);
            for (auto j : r.elected_set) elected[j] = 1;
            for (CandidateId j = 0; j < m; ++j)
                out << r.round << ',' << j << ',' << format_double(r.scores[j]) << ','
                    << int(elected[j]) << ',' << int(r.unavailable[j]) << '\n';
        }
    }
    {
        std::ofstream out(dir / "trust.csv", std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorKind::configuration, "cannot write trust.csv");
        out << "round,voter,candidate,t\n";
        for (const auto& r : result.rounds)
            for (VoterId i = 0; i < n; ++i)
                for (CandidateId j = 0; j < m; ++j)
                    out << r.round << ',' << i << ',' << j << ','
                        << format_double(r.trust(i, j)) << '\n';
    }
    return {"rewards.csv", "elections.csv", "trust.csv"};
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json manifest_to_json(const Manifest& m) {
    return {
        {"tool", kToolName},
        {"version", kToolVersion},
        {"command", m.command},
        {"config", m.config},
        {"seed", m.seed},
        {"started_at", m.started_at},
        {"finished_at", m.finished_at},
        {"outputs", m.outputs},
        {"warnings", m.warnings},
    };
}

void write_manifest(const Manifest& m, const fs::path& dir) {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::configuration, "cannot write manifest.json");
    out << manifest_to_json(m).dump(2) << '\n';
}

} // namespace vcsim::cli
