#include "coderag/config.hpp"

#include "coderag/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace coderag {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw DataError("'" + key + "': cannot parse '" + text + "' as a number");
    }
    return value;
}

double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v)) {
        throw DataError("'" + key + "': cannot parse '" + text + "' as a number");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw DataError("'" + key + "': expected true or false, got '" + text + "'");
}

// Shortest text that parses back to the same double.
std::string real_text(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, ',')) {
        auto b = cur.find_first_not_of(" \t");
        auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

struct Field {
    std::string key; // section.name
    std::function<void(AppConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const AppConfig&)> get;
};

#define SIZE_FIELD(KEY, MEMBER)                                                                                     \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_number<std::size_t>(k, v); }, \
            [](const AppConfig& c) { return std::to_string(c.MEMBER); }                                             \
    }
#define U64_FIELD(KEY, MEMBER)                                                                                      \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_number<std::uint64_t>(k, v); }, \
            [](const AppConfig& c) { return std::to_string(c.MEMBER); }                                             \
    }
#define INT_FIELD(KEY, MEMBER)                                                                                      \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_number<int>(k, v); },  \
            [](const AppConfig& c) { return std::to_string(c.MEMBER); }                                             \
    }
#define REAL_FIELD(KEY, MEMBER)                                                                                     \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_real(k, v); },         \
            [](const AppConfig& c) { return real_text(c.MEMBER); }                                                  \
    }
#define STRING_FIELD(KEY, MEMBER)                                                                                   \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string&, const std::string& v) { c.MEMBER = unescape(v); },                \
            [](const AppConfig& c) { return escape(c.MEMBER); }                                                     \
    }
#define BOOL_FIELD(KEY, MEMBER)                                                                                     \
    Field {                                                                                                         \
        KEY, [](AppConfig& c, const std::string& k, const std::string& v) { c.MEMBER = parse_bool(k, v); },         \
            [](const AppConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }                             \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> kFields = {
        STRING_FIELD("corpus.root", corpus.root),
        SIZE_FIELD("corpus.window", corpus.window),
        SIZE_FIELD("corpus.stride", corpus.stride),
        SIZE_FIELD("corpus.sample", corpus.sample),
        U64_FIELD("corpus.seed", corpus.seed),
        REAL_FIELD("corpus.test_fraction", corpus.test_fraction),
        SIZE_FIELD("corpus.block_length", corpus.block_length),
        SIZE_FIELD("corpus.max_define_body_chars", corpus.filter.max_define_body_chars),
        REAL_FIELD("corpus.max_nonascii_comment_ratio", corpus.filter.max_nonascii_comment_ratio),
        Field{"corpus.extensions",
              [](AppConfig& c, const std::string&, const std::string& v) { c.corpus.filter.extensions = split_commas(v); },
              [](const AppConfig& c) { return join(c.corpus.filter.extensions); }},
        SIZE_FIELD("corpus.threads", corpus.filter.threads),

        Field{"retrieval.strategy",
              [](AppConfig& c, const std::string&, const std::string& v) {
                  c.retrieval.strategy = strategy_from_string(v);
              },
              [](const AppConfig& c) { return std::string(to_string(c.retrieval.strategy)); }},
        SIZE_FIELD("retrieval.k", retrieval.k),
        U64_FIELD("retrieval.seed", retrieval.seed),
        REAL_FIELD("retrieval.k1", retrieval.bm25.k1),
        REAL_FIELD("retrieval.b", retrieval.bm25.b),

        STRING_FIELD("prompt.separator", prompt.separator),
        SIZE_FIELD("prompt.max_prompt_tokens", prompt.max_prompt_tokens),
        BOOL_FIELD("prompt.include_source_header", prompt.include_source_header),

        BOOL_FIELD("providers.mock", providers.mock),
        STRING_FIELD("providers.embed_endpoint", providers.embed.endpoint),
        STRING_FIELD("providers.embed_model", providers.embed.model_name),
        SIZE_FIELD("providers.embed_dims", providers.embed.dims),
        SIZE_FIELD("providers.embed_batch_size", providers.embed.batch_size),
        INT_FIELD("providers.embed_timeout_ms", providers.embed.timeout_ms),
        STRING_FIELD("providers.complete_endpoint", providers.complete.endpoint),
        STRING_FIELD("providers.complete_model", providers.complete.model_name),
        INT_FIELD("providers.complete_timeout_ms", providers.complete.timeout_ms),
        Field{"providers.retries",
              [](AppConfig& c, const std::string& k, const std::string& v) {
                  c.providers.embed.retry.attempts = c.providers.complete.retry.attempts = parse_number<int>(k, v);
              },
              [](const AppConfig& c) { return std::to_string(c.providers.complete.retry.attempts); }},
        Field{"providers.backoff_ms",
              [](AppConfig& c, const std::string& k, const std::string& v) {
                  c.providers.embed.retry.initial_backoff_ms = c.providers.complete.retry.initial_backoff_ms =
                      parse_number<int>(k, v);
              },
              [](const AppConfig& c) { return std::to_string(c.providers.complete.retry.initial_backoff_ms); }},
        Field{"providers.max_in_flight",
              [](AppConfig& c, const std::string& k, const std::string& v) {
                  c.providers.embed.max_in_flight = c.providers.complete.max_in_flight =
                      parse_number<std::size_t>(k, v);
              },
              [](const AppConfig& c) { return std::to_string(c.providers.complete.max_in_flight); }},
        Field{"providers.token_env",
              [](AppConfig& c, const std::string&, const std::string& v) {
                  c.providers.embed.token_env = c.providers.complete.token_env = unescape(v);
              },
              [](const AppConfig& c) { return escape(c.providers.complete.token_env); }},
        U64_FIELD("providers.mock_seed", providers.embed.mock_seed),
        STRING_FIELD("providers.mock_completion", providers.mock_completion),
        STRING_FIELD("providers.mock_constant_text", providers.mock_constant_text),
        SIZE_FIELD("providers.mock_match_lines", providers.mock_match_lines),
        REAL_FIELD("providers.mock_latency_base_ms", providers.mock_latency.base_ms),
        REAL_FIELD("providers.mock_latency_per_prompt_token_ms", providers.mock_latency.per_prompt_token_ms),
        REAL_FIELD("providers.mock_latency_per_prompt_token_sq_ms", providers.mock_latency.per_prompt_token_sq_ms),
        REAL_FIELD("providers.mock_latency_per_completion_token_ms", providers.mock_latency.per_completion_token_ms),

        SIZE_FIELD("bench.concurrency", bench.concurrency),
        INT_FIELD("bench.max_tokens", bench.max_tokens),
        REAL_FIELD("bench.max_failure_rate", bench.max_failure_rate),
        Field{"bench.ks", [](AppConfig& c, const std::string&, const std::string& v) { c.bench.ks = parse_int_list(v); },
              [](const AppConfig& c) {
                  std::vector<std::string> parts;
                  for (auto k : c.bench.ks) parts.push_back(std::to_string(k));
                  return join(parts);
              }},
        Field{"bench.fractions",
              [](AppConfig& c, const std::string&, const std::string& v) { c.bench.fractions = parse_double_list(v); },
              [](const AppConfig& c) {
                  std::vector<std::string> parts;
                  for (auto f : c.bench.fractions) parts.push_back(real_text(f));
                  return join(parts);
              }},
        Field{"bench.timing_log",
              [](AppConfig& c, const std::string& k, const std::string& v) {
                  if (v == "separate") {
                      c.bench.timing_log = TimingLog::separate;
                  } else if (v == "inline") {
                      c.bench.timing_log = TimingLog::inline_;
                  } else {
                      throw DataError("'" + k + "': expected separate or inline, got '" + v + "'");
                  }
              },
              [](const AppConfig& c) {
                  return std::string(c.bench.timing_log == TimingLog::separate ? "separate" : "inline");
              }},
        U64_FIELD("bench.scale_seed", bench.scale_seed),
    };
    return kFields;
}

#undef SIZE_FIELD
#undef U64_FIELD
#undef INT_FIELD
#undef REAL_FIELD
#undef STRING_FIELD
#undef BOOL_FIELD

} // namespace

std::string unescape(const std::string& s) {
    std::string v = s;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != '\\' || i + 1 == v.size()) {
            out += v[i];
            continue;
        }
        switch (v[++i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 's': out += ' '; break;
        case '\\': out += '\\'; break;
        default:
            out += '\\';
            out += v[i];
        }
    }
    return out;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\\': out += "\\\\"; break;
        default: out += c;
        }
    }
    if (!out.empty() && (out.front() == ' ' || out.back() == ' ')) out = "\"" + out + "\"";
    return out;
}

std::vector<std::size_t> parse_int_list(const std::string& text) {
    std::vector<std::size_t> out;
    auto range = text.find("..");
    if (range != std::string::npos) {
        const auto lo = parse_number<std::size_t>("range", text.substr(0, range));
        const auto hi = parse_number<std::size_t>("range", text.substr(range + 2));
        if (hi < lo) throw DataError("empty range '" + text + "'");
        for (auto k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    for (const auto& part : split_commas(text)) out.push_back(parse_number<std::size_t>("list", part));
    if (out.empty()) throw DataError("empty list '" + text + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_commas(text)) out.push_back(parse_real("list", part));
    if (out.empty()) throw DataError("empty list '" + text + "'");
    return out;
}

void AppConfig::set(const std::string& dotted_key, const std::string& value) {
    for (const auto& f : fields()) {
        if (f.key == dotted_key) {
            f.set(*this, dotted_key, value);
            return;
        }
    }
    throw DataError("unknown configuration key '" + dotted_key + "'");
}

void AppConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw DataError("override '" + assignment + "' is not of the form section.key=value");
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string AppConfig::render() const {
    std::string out, section;
    for (const auto& f : fields()) {
        const auto dot = f.key.find('.');
        const auto sec = f.key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += f.key.substr(dot + 1) + " = " + f.get(*this) + "\n";
    }
    return out;
}

void AppConfig::validate() const {
    if (corpus.window == 0) throw DataError("corpus.window must be at least 1");
    if (corpus.stride == 0) throw DataError("corpus.stride must be at least 1");
    if (!(corpus.test_fraction >= 0.0 && corpus.test_fraction < 1.0)) {
        throw DataError("corpus.test_fraction must be in [0, 1)");
    }
    corpus.filter.validate();
    prompt.validate();
    providers.embed.validate();
    if (providers.mock_completion != "copy_oracle" && providers.mock_completion != "constant") {
        throw DataError("providers.mock_completion must be copy_oracle or constant");
    }
    if (bench.concurrency == 0) throw DataError("bench.concurrency must be at least 1");
    if (bench.max_tokens < 1) throw DataError("bench.max_tokens must be at least 1");
}

AppConfig load_config(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw DataError("config '" + path.string() + "': " + e.what());
    }
    AppConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw DataError("config '" + path.string() + "': key '" + section + "' is outside a section");
        for (const auto& [key, value] : body) cfg.set(section + "." + key, value.data());
    }
    return cfg;
}

} // namespace coderag
