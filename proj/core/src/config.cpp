#include "tagnn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tagnn/errors.hpp"

namespace tagnn {

void ModelConfig::validate() const {
    if (window_len < 4) throw ConfigError("window_len must be >= 4");
    if (ma_window < 1) throw ConfigError("ma_window must be >= 1");
    if (gaussian_sigma <= 0) throw ConfigError("gaussian_sigma must be positive");
    if (extractor_hidden < 1 || encoder_hidden < 1) throw ConfigError("hidden widths must be >= 1");
    if (encoder_head_widths.empty() || encoder_head_widths.back() != 1)
        throw ConfigError("encoder_head_widths must end in 1");
    if (decoder_widths.empty() || decoder_widths.back() != 1)
        throw ConfigError("decoder_widths must end in 1 per axis");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("dropout_rate must be in [0,1)");
    if (horizons_ms.empty()) throw ConfigError("horizons_ms must not be empty");
    for (double t : horizons_ms)
        if (t <= 0) throw ConfigError("horizons_ms entries must be positive");
    if (horizon_weights.size() != horizons_ms.size())
        throw ConfigError("horizon_weights must match horizons_ms (" +
                          std::to_string(horizon_weights.size()) + " vs " +
                          std::to_string(horizons_ms.size()) + ")");
    for (double w : horizon_weights)
        if (!(w > 0.0 && w <= 1.0)) throw ConfigError("horizon weights must lie in (0,1]");
    if (taylor_order < 0 || taylor_order > 2) throw ConfigError("taylor_order must be 0..2");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr_decay must be in (0,1]");
    if (lr_decay_interval < 1) throw ConfigError("lr_decay_interval must be >= 1");
    if (weight_decay < 0) throw ConfigError("weight_decay must be >= 0");
    if (stride < 1 || val_stride < 1) throw ConfigError("strides must be >= 1");
}

std::string format_double(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        std::ostringstream os;
        os << static_cast<long long>(v);
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    std::string s = os.str();
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        std::ostringstream t;
        t.precision(prec);
        t << v;
        double back = 0.0;
        std::istringstream(t.str()) >> back;
        if (back == v) return t.str();
    }
    return s;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x < 0 || x != std::floor(x))
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_double(key, item));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    for (double d : parse_double_list(key, v)) {
        if (d < 0 || d != std::floor(d))
            throw ConfigError("key '" + key + "': expected integers, got '" + v + "'");
        out.push_back(static_cast<std::size_t>(d));
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

void apply_config_line(Config& cfg, const std::string& key, const std::string& value) {
    ModelConfig& m = cfg.model;
    TrainConfig& t = cfg.train;
    if (key == "layout") m.layout = parse_layout(value);
    else if (key == "window_len") m.window_len = parse_size(key, value);
    else if (key == "ma_window") m.ma_window = parse_size(key, value);
    else if (key == "gaussian_sigma") m.gaussian_sigma = parse_double(key, value);
    else if (key == "extractor_hidden") m.extractor_hidden = parse_size(key, value);
    else if (key == "encoder_hidden") m.encoder_hidden = parse_size(key, value);
    else if (key == "encoder_head_widths") m.encoder_head_widths = parse_size_list(key, value);
    else if (key == "dropout_rate") m.dropout_rate = parse_double(key, value);
    else if (key == "decoder_widths") m.decoder_widths = parse_size_list(key, value);
    else if (key == "horizons_ms") m.horizons_ms = parse_double_list(key, value);
    else if (key == "horizon_weights") m.horizon_weights = parse_double_list(key, value);
    else if (key == "taylor_order") m.taylor_order = static_cast<int>(parse_size(key, value));
    else if (key == "use_kfe") m.use_kfe = parse_bool(key, value);
    else if (key == "use_gcn") m.use_gcn = parse_bool(key, value);
    else if (key == "raw_adjacency") m.raw_adjacency = parse_bool(key, value);
    else if (key == "epochs") t.epochs = parse_size(key, value);
    else if (key == "batch_size") t.batch_size = parse_size(key, value);
    else if (key == "learning_rate") t.learning_rate = parse_double(key, value);
    else if (key == "lr_decay") t.lr_decay = parse_double(key, value);
    else if (key == "lr_decay_interval") t.lr_decay_interval = parse_size(key, value);
    else if (key == "weight_decay") t.weight_decay = parse_double(key, value);
    else if (key == "seed") t.seed = static_cast<std::uint64_t>(parse_size(key, value));
    else if (key == "deterministic") t.deterministic = parse_bool(key, value);
    else if (key == "stride") t.stride = parse_size(key, value);
    else if (key == "val_stride") t.val_stride = parse_size(key, value);
    else throw ConfigError("unknown key '" + key + "'");
}

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" +
                              line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto ke = key.find_last_not_of(" \t");
        key = key.substr(0, ke == std::string::npos ? 0 : ke + 1);
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        apply_config_line(cfg, key, value);
    }
    cfg.model.validate();
    cfg.train.validate();
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::map<std::string, std::string> config_to_map(const ModelConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["layout"] = layout_name(cfg.layout);
    kv["window_len"] = std::to_string(cfg.window_len);
    kv["ma_window"] = std::to_string(cfg.ma_window);
    kv["gaussian_sigma"] = format_double(cfg.gaussian_sigma);
    kv["extractor_hidden"] = std::to_string(cfg.extractor_hidden);
    kv["encoder_hidden"] = std::to_string(cfg.encoder_hidden);
    kv["encoder_head_widths"] = join_sizes(cfg.encoder_head_widths);
    kv["dropout_rate"] = format_double(cfg.dropout_rate);
    kv["decoder_widths"] = join_sizes(cfg.decoder_widths);
    kv["horizons_ms"] = join_doubles(cfg.horizons_ms);
    kv["horizon_weights"] = join_doubles(cfg.horizon_weights);
    kv["taylor_order"] = std::to_string(cfg.taylor_order);
    kv["use_kfe"] = cfg.use_kfe ? "true" : "false";
    kv["use_gcn"] = cfg.use_gcn ? "true" : "false";
    kv["raw_adjacency"] = cfg.raw_adjacency ? "true" : "false";
    return kv;
}

ModelConfig model_config_from_map(const std::map<std::string, std::string>& kv) {
    Config cfg;
    for (const auto& [k, v] : kv) apply_config_line(cfg, k, v);
    cfg.model.validate();
    return cfg.model;
}

}  // namespace tagnn
