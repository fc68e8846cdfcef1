#include "exwave/config.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace exwave {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& section, const std::string& key,
                        const std::string& value) {
    const std::string full = section.empty() ? key : section + "." + key;
    TrainConfig& t = config.train;
    if (full == "train.epochs") t.epochs = static_cast<int>(parse_int(full, value));
    else if (full == "train.batch_size") t.batch_size = static_cast<int>(parse_int(full, value));
    else if (full == "train.learning_rate") t.learning_rate = parse_double(full, value);
    else if (full == "train.adam_beta1") t.adam_beta1 = parse_double(full, value);
    else if (full == "train.adam_beta2") t.adam_beta2 = parse_double(full, value);
    else if (full == "train.adam_eps") t.adam_eps = parse_double(full, value);
    else if (full == "train.seed") t.master_seed = static_cast<uint64_t>(parse_int(full, value));
    else if (full == "train.mode") t.mode = mode_from_name(value);
    else if (full == "train.dataset") t.dataset = dataset_from_name(value);
    else if (full == "train.layers") t.layer_count = static_cast<int>(parse_int(full, value));
    else if (full == "train.side") t.side = static_cast<int>(parse_int(full, value));
    else if (full == "train.threads") t.threads = static_cast<int>(parse_int(full, value));
    else if (full == "train.train_samples") t.train_limit = static_cast<size_t>(parse_int(full, value));
    else if (full == "train.test_samples") t.test_limit = static_cast<size_t>(parse_int(full, value));
    else if (full == "geometry.wavelength") config.wavelength = parse_double(full, value);
    else if (full == "geometry.pitch") config.pitch = parse_double(full, value);
    else if (full == "geometry.spacing") config.spacing = parse_double(full, value);
    else if (full == "paths.data_dir") config.data_dir = value;
    else if (full == "paths.out_dir") config.out_dir = value;
    else if (full == "paths.checkpoint") config.checkpoint = value;
    else if (full == "output.render_phases") config.render_phases = parse_bool(full, value);
    else throw std::invalid_argument("config: unknown key '" + full + "'");
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    RunConfig config;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value': " + s);
        }
        apply_config_entry(config, section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return config;
}

void write_resolved_config(const std::filesystem::path& path, const RunConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const TrainConfig& t = config.train;
    out << "[train]\n";
    out << "epochs = " << t.epochs << "\n";
    out << "batch_size = " << t.batch_size << "\n";
    out << "learning_rate = " << format_g9(t.learning_rate) << "\n";
    out << "adam_beta1 = " << format_g9(t.adam_beta1) << "\n";
    out << "adam_beta2 = " << format_g9(t.adam_beta2) << "\n";
    out << "adam_eps = " << format_g9(t.adam_eps) << "\n";
    out << "seed = " << t.master_seed << "\n";
    out << "mode = " << mode_name(t.mode) << "\n";
    out << "dataset = " << dataset_name(t.dataset) << "\n";
    out << "layers = " << t.layer_count << "\n";
    out << "side = " << t.side << "\n";
    out << "threads = " << t.threads << "\n";
    out << "train_samples = " << t.train_limit << "\n";
    out << "test_samples = " << t.test_limit << "\n";
    out << "\n[geometry]\n";
    out << "wavelength = " << format_g9(config.wavelength) << "\n";
    out << "pitch = " << format_g9(config.pitch) << "\n";
    out << "spacing = " << format_g9(config.spacing) << "\n";
    out << "\n[paths]\n";
    out << "data_dir = " << config.data_dir.string() << "\n";
    out << "out_dir = " << config.out_dir.string() << "\n";
    if (!config.checkpoint.empty()) out << "checkpoint = " << config.checkpoint.string() << "\n";
    out << "\n[output]\n";
    out << "render_phases = " << (config.render_phases ? "true" : "false") << "\n";
}

}  // namespace exwave
