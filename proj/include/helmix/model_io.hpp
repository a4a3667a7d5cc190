#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "helmix/constitutive.hpp"
#include "helmix/limits.hpp"
#include "helmix/mixing.hpp"
#include "helmix/regimes.hpp"

namespace helmix {

// Flat INI-style configuration: `[section]` headers and `key = value` lines, '#' or ';'
// comments. Values are kept as text. Every typed lookup that falls back to a default
// records that default, so dump() reproduces the fully resolved configuration.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    // "section.key=value"
    void apply_override(const std::string& assignment);
    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& section, const std::string& key, std::size_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // Comma-separated numbers.
    Vec get_vector(const std::string& section, const std::string& key, const Vec& fallback) const;
    // Semicolon-separated groups of comma-separated numbers.
    std::vector<Vec> get_vectors(const std::string& section, const std::string& key,
                                 const std::vector<Vec>& fallback) const;

    std::string dump() const;
    std::uint64_t hash() const;  // FNV-1a 64 of dump()

private:
    const std::string* find(const std::string& section, const std::string& key) const;
    mutable std::map<std::string, std::map<std::string, std::string>> values_;
};

std::string format_vector(const Vec& v);
std::uint64_t fnv1a64(const std::string& text);

// [model]: type = volume_additive | simple_law | section16 | ideal_gas | tabulated
ConstitutiveModel model_from_config(const Config& c);
// [region]
SampleRegion region_from_config(const Config& c);
// [states]: T and p lists, x as ';'-separated compositions; the Cartesian product.
std::vector<ThermoStateTPX> states_from_config(const Config& c, std::size_t species);
// [family]: kind = volume_additive | simple_law | band_warp
ModelFamily family_from_config(const Config& c);
// [probes]: compositions, scale factors and temperature for limit sweeps.
std::vector<ProbeState> probes_from_config(const Config& c, const ModelFamily& family);
MixingModel mixing_from_config(const Config& c);
ReferenceScales scales_from_config(const Config& c);

}  // namespace helmix
