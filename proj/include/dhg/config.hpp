#pragma once

#include "dhg/contact_repr.hpp"
#include "dhg/losses.hpp"
#include "dhg/symopt.hpp"
#include "dhg/tta_refiner.hpp"
#include "dhg/types.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace dhg {

/// Minimal TOML subset: [section] headers, scalar key = value pairs
/// (numbers, booleans, double-quoted strings), # comments. That covers the
/// flat config sections this tool reads.
class TomlTable {
public:
    static TomlTable parse(const std::string& text);
    static TomlTable parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& raw);

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

struct DdpmConfig {
    int steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    double guidance_scale = 2.0;
};

/// Configuration for the whole pipeline, sections [energy], [loss], [tta],
/// [ddpm], [contact]. Environment variables DHG_<SECTION>_<KEY> override
/// file values; CLI flags override both.
struct PipelineConfig {
    EnergyConfig energy;
    LossConfig loss;
    TtaConfig tta;
    DdpmConfig ddpm;
    ContactConfig contact;
    std::uint64_t digest = 0;  // FNV-1a over the config file bytes

    static PipelineConfig defaults();
    static PipelineConfig from_toml(const std::string& text);
    static PipelineConfig from_file(const std::string& path);

    void apply_environment();
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace dhg
