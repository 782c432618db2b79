#include "dhg/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dhg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InvalidInput("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw InvalidInput("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InvalidInput("config line " + std::to_string(lineno) + ": empty key or value");
        table.values_[section][key] = value;
    }
    return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
    const auto sit = values_.find(section);
    return sit != values_.end() && sit->second.count(key) > 0;
}

double TomlTable::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("config [" + section + "] " + key + ": not a number: " + raw);
    }
}

int TomlTable::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    try {
        std::size_t used = 0;
        const int v = std::stoi(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw InvalidInput("config [" + section + "] " + key + ": not an integer: " + raw);
    }
}

bool TomlTable::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    if (raw == "true") return true;
    if (raw == "false") return false;
    throw InvalidInput("config [" + section + "] " + key + ": expected true/false, got " + raw);
}

std::string TomlTable::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    if (!has(section, key)) return fallback;
    std::string raw = values_.at(section).at(key);
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        raw = raw.substr(1, raw.size() - 2);
    return raw;
}

void TomlTable::set(const std::string& section, const std::string& key, const std::string& raw) {
    values_[section][key] = raw;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

PipelineConfig PipelineConfig::defaults() { return PipelineConfig{}; }

namespace {

void load_from_table(PipelineConfig& cfg, const TomlTable& t) {
    cfg.energy.lambda_phh = t.get_double("energy", "lambda_phh", cfg.energy.lambda_phh);
    cfg.energy.lambda_pho = t.get_double("energy", "lambda_pho", cfg.energy.lambda_pho);
    cfg.energy.learning_rate = t.get_double("energy", "learning_rate", cfg.energy.learning_rate);
    cfg.energy.right_rate_scale = t.get_double("energy", "right_rate_scale", cfg.energy.right_rate_scale);
    cfg.energy.beta1 = t.get_double("energy", "beta1", cfg.energy.beta1);
    cfg.energy.beta2 = t.get_double("energy", "beta2", cfg.energy.beta2);
    cfg.energy.max_iterations = t.get_int("energy", "max_iterations", cfg.energy.max_iterations);
    cfg.energy.stop_phh = t.get_double("energy", "stop_phh", cfg.energy.stop_phh);
    cfg.energy.stop_pho = t.get_double("energy", "stop_pho", cfg.energy.stop_pho);
    cfg.energy.discard_depth = t.get_double("energy", "discard_depth", cfg.energy.discard_depth);
    cfg.energy.max_pairs = t.get_int("energy", "max_pairs", cfg.energy.max_pairs);

    cfg.loss.lambda_w = t.get_double("loss", "lambda_w", cfg.loss.lambda_w);
    cfg.loss.lambda_ori = t.get_double("loss", "lambda_ori", cfg.loss.lambda_ori);
    cfg.loss.lambda_pose = t.get_double("loss", "lambda_pose", cfg.loss.lambda_pose);
    cfg.loss.lambda_vertices = t.get_double("loss", "lambda_vertices", cfg.loss.lambda_vertices);
    cfg.loss.lambda_mask = t.get_double("loss", "lambda_mask", cfg.loss.lambda_mask);
    cfg.loss.lambda_con = t.get_double("loss", "lambda_con", cfg.loss.lambda_con);
    cfg.loss.lambda_part = t.get_double("loss", "lambda_part", cfg.loss.lambda_part);
    cfg.loss.lambda_hand = t.get_double("loss", "lambda_hand", cfg.loss.lambda_hand);
    cfg.loss.lambda_pen = t.get_double("loss", "lambda_pen", cfg.loss.lambda_pen);

    cfg.tta.lambda_pen = t.get_double("tta", "lambda_pen", cfg.tta.lambda_pen);
    cfg.tta.lambda_con = t.get_double("tta", "lambda_con", cfg.tta.lambda_con);
    cfg.tta.lambda_dir = t.get_double("tta", "lambda_dir", cfg.tta.lambda_dir);
    cfg.tta.steps = t.get_int("tta", "steps", cfg.tta.steps);
    cfg.tta.learning_rate = t.get_double("tta", "learning_rate", cfg.tta.learning_rate);

    cfg.ddpm.steps = t.get_int("ddpm", "steps", cfg.ddpm.steps);
    cfg.ddpm.beta_start = t.get_double("ddpm", "beta_start", cfg.ddpm.beta_start);
    cfg.ddpm.beta_end = t.get_double("ddpm", "beta_end", cfg.ddpm.beta_end);
    cfg.ddpm.guidance_scale = t.get_double("ddpm", "guidance_scale", cfg.ddpm.guidance_scale);

    cfg.contact.sharpness = t.get_double("contact", "sharpness", cfg.contact.sharpness);
    cfg.contact.part_threshold = t.get_double("contact", "part_threshold", cfg.contact.part_threshold);
}

}  // namespace

PipelineConfig PipelineConfig::from_toml(const std::string& text) {
    PipelineConfig cfg;
    load_from_table(cfg, TomlTable::parse(text));
    cfg.digest = fnv1a64(text);
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_toml(buf.str());
}

void PipelineConfig::apply_environment() {
    // DHG_<SECTION>_<KEY> with KEY in upper snake case, e.g.
    // DHG_ENERGY_LEARNING_RATE=1e-2.
    struct Binding {
        const char* env;
        const char* section;
        const char* key;
    };
    static const Binding bindings[] = {
        {"DHG_ENERGY_LAMBDA_PHH", "energy", "lambda_phh"},
        {"DHG_ENERGY_LAMBDA_PHO", "energy", "lambda_pho"},
        {"DHG_ENERGY_LEARNING_RATE", "energy", "learning_rate"},
        {"DHG_ENERGY_RIGHT_RATE_SCALE", "energy", "right_rate_scale"},
        {"DHG_ENERGY_MAX_ITERATIONS", "energy", "max_iterations"},
        {"DHG_ENERGY_STOP_PHH", "energy", "stop_phh"},
        {"DHG_ENERGY_STOP_PHO", "energy", "stop_pho"},
        {"DHG_ENERGY_DISCARD_DEPTH", "energy", "discard_depth"},
        {"DHG_ENERGY_MAX_PAIRS", "energy", "max_pairs"},
        {"DHG_LOSS_LAMBDA_W", "loss", "lambda_w"},
        {"DHG_LOSS_LAMBDA_ORI", "loss", "lambda_ori"},
        {"DHG_LOSS_LAMBDA_POSE", "loss", "lambda_pose"},
        {"DHG_LOSS_LAMBDA_VERTICES", "loss", "lambda_vertices"},
        {"DHG_LOSS_LAMBDA_MASK", "loss", "lambda_mask"},
        {"DHG_LOSS_LAMBDA_CON", "loss", "lambda_con"},
        {"DHG_LOSS_LAMBDA_PART", "loss", "lambda_part"},
        {"DHG_LOSS_LAMBDA_HAND", "loss", "lambda_hand"},
        {"DHG_LOSS_LAMBDA_PEN", "loss", "lambda_pen"},
        {"DHG_TTA_LAMBDA_PEN", "tta", "lambda_pen"},
        {"DHG_TTA_LAMBDA_CON", "tta", "lambda_con"},
        {"DHG_TTA_LAMBDA_DIR", "tta", "lambda_dir"},
        {"DHG_TTA_STEPS", "tta", "steps"},
        {"DHG_TTA_LEARNING_RATE", "tta", "learning_rate"},
        {"DHG_DDPM_STEPS", "ddpm", "steps"},
        {"DHG_DDPM_BETA_START", "ddpm", "beta_start"},
        {"DHG_DDPM_BETA_END", "ddpm", "beta_end"},
        {"DHG_DDPM_GUIDANCE_SCALE", "ddpm", "guidance_scale"},
        {"DHG_CONTACT_SHARPNESS", "contact", "sharpness"},
        {"DHG_CONTACT_PART_THRESHOLD", "contact", "part_threshold"},
    };
    TomlTable overrides;
    bool any = false;
    for (const auto& b : bindings) {
        const char* value = std::getenv(b.env);
        if (value == nullptr) continue;
        overrides.set(b.section, b.key, value);
        any = true;
    }
    if (any) load_from_table(*this, overrides);
}

}  // namespace dhg
