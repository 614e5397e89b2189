#pragma once

#include <charconv>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "frfstat/errors.hpp"
#include "frfstat/grid.hpp"
#include "frfstat/signal.hpp"

namespace frfstat {

/// Named groups of FRFs on one grid, plus free-form metadata.
struct Dataset {
    FrequencyGrid grid;
    std::map<std::string, FrfSet> groups;
    std::map<std::string, std::string> metadata;

    const FrfSet& group(const std::string& name) const {
        const auto it = groups.find(name);
        if (it == groups.end()) {
            std::string known;
            for (const auto& [k, _] : groups) known += (known.empty() ? "" : ", ") + k;
            throw InvalidArgument("no group named '" + name + "' (available: " + known + ")");
        }
        return it->second;
    }

    void validate() const {
        // CSV cells and comment lines are trimmed on read, so edge whitespace would not survive
        const auto padded = [](const std::string& s) {
            return !s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                                  std::isspace(static_cast<unsigned char>(s.back())));
        };
        for (const auto& [name, set] : groups) {
            if (name.empty()) throw InvalidArgument("group names must be non-empty");
            if (name.find_first_of(",\n\r#") != std::string::npos || padded(name))
                throw InvalidArgument("group name '" + name + "' contains ',', '#', a newline or edge whitespace");
            if (set.empty()) throw InvalidArgument("group '" + name + "' has no samples");
            detail::require_aligned(set, grid);
        }
        for (const auto& [key, value] : metadata)
            if (key.empty() || key.find_first_of("=\n\r") != std::string::npos ||
                value.find_first_of("\n\r") != std::string::npos || padded(key) || padded(value))
                throw InvalidArgument("metadata key '" + key + "' or its value is not representable");
    }
};

enum class DataFormat { csv, json };

/// .json selects JSON, anything else CSV.
inline DataFormat format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".json" ? DataFormat::json : DataFormat::csv;
}

namespace detail {

/// Shortest text that parses back to the same double.
inline std::string exact_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s, std::size_t row, std::size_t column) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError("'" + std::string(s) + "' is not a finite number", row, column);
    return v;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// CSV layout:
///
///     # sample_rate_hz=22
///     # meta:<key>=<value>
///     group,re_1,im_1,...,re_M,im_M
///     freq_hz,<f_1>,,...,<f_M>,
///     <group name>,<re>,<im>,...
///
/// The frequency row carries values in the re_k columns only. Every later
/// row is one sample of the named group.
inline std::string to_csv(const Dataset& data) {
    data.validate();
    std::ostringstream out;
    out << "# sample_rate_hz=" << detail::exact_number(data.grid.sample_rate()) << '\n';
    for (const auto& [key, value] : data.metadata) out << "# meta:" << key << '=' << value << '\n';
    const std::size_t m = data.grid.size();
    out << "group";
    for (std::size_t k = 1; k <= m; ++k) out << ",re_" << k << ",im_" << k;
    out << "\nfreq_hz";
    for (double f : data.grid.frequencies()) out << ',' << detail::exact_number(f) << ',';
    out << '\n';
    for (const auto& [name, set] : data.groups)
        for (const auto& frf : set.samples()) {
            out << name;
            for (const auto& h : frf.values())
                out << ',' << detail::exact_number(h.real()) << ',' << detail::exact_number(h.imag());
            out << '\n';
        }
    return out.str();
}

inline Dataset parse_csv(std::string_view text) {
    std::optional<double> rate;
    std::map<std::string, std::string> metadata;
    std::optional<std::size_t> width;
    std::vector<double> freqs;
    bool have_freqs = false;
    std::map<std::string, std::vector<Frf>> groups;

    std::size_t row = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = detail::trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++row;
        if (line.empty()) continue;

        if (line.front() == '#') {
            std::string_view body = detail::trim(line.substr(1));
            if (body.starts_with("sample_rate_hz=")) {
                rate = detail::parse_number(body.substr(15), row, 1);
            } else if (body.starts_with("meta:")) {
                body.remove_prefix(5);
                const std::size_t eq = body.find('=');
                if (eq == std::string_view::npos || eq == 0)
                    throw ParseError("metadata line needs 'meta:<key>=<value>'", row);
                metadata.emplace(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
            }
            continue;
        }

        const auto cells = detail::split_csv(line);
        if (!width) {
            if (cells.size() < 3 || (cells.size() - 1) % 2 != 0)
                throw ParseError("header must be 'group' followed by re_k,im_k column pairs", row);
            width = cells.size();
            continue;
        }
        if (cells.size() != *width)
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(*width),
                             row);
        const std::string label(detail::trim(cells[0]));
        if (!have_freqs) {
            if (label != "freq_hz")
                throw ParseError("first data row must be the 'freq_hz' frequency row", row, 1);
            for (std::size_t c = 1; c < cells.size(); c += 2)
                freqs.push_back(detail::parse_number(cells[c], row, c + 1));
            have_freqs = true;
            continue;
        }
        if (label.empty()) throw ParseError("empty group name", row, 1);
        std::vector<Complex> h;
        h.reserve((cells.size() - 1) / 2);
        for (std::size_t c = 1; c < cells.size(); c += 2)
            h.emplace_back(detail::parse_number(cells[c], row, c + 1),
                           detail::parse_number(cells[c + 1], row, c + 2));
        groups[label].emplace_back(std::move(h));
    }
    if (!width) throw ParseError("missing header row");
    if (!have_freqs) throw ParseError("missing 'freq_hz' frequency row");

    Dataset data{derive_grid(freqs, rate), {}, std::move(metadata)};
    for (auto& [name, samples] : groups) data.groups.emplace(name, FrfSet(std::move(samples)));
    data.validate();
    return data;
}

/// JSON layout: {"frequencies": [...], "sample_rate": <Hz, optional>,
/// "groups": {"<name>": [[[re, im], ...], ...]}, "metadata": {...}}
inline nlohmann::json to_json(const Dataset& data) {
    data.validate();
    nlohmann::json j;
    j["frequencies"] = data.grid.frequencies();
    j["sample_rate"] = data.grid.sample_rate();
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& [name, set] : data.groups) {
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& frf : set.samples()) {
            nlohmann::json s = nlohmann::json::array();
            for (const auto& h : frf.values()) s.push_back({h.real(), h.imag()});
            samples.push_back(std::move(s));
        }
        groups[name] = std::move(samples);
    }
    j["groups"] = std::move(groups);
    if (!data.metadata.empty()) j["metadata"] = data.metadata;
    return j;
}

inline Dataset parse_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("frequencies") || !j.contains("groups"))
            throw ParseError("JSON dataset needs 'frequencies' and 'groups'");
        const auto freqs = j.at("frequencies").get<std::vector<double>>();
        std::optional<double> rate;
        if (j.contains("sample_rate") && !j.at("sample_rate").is_null())
            rate = j.at("sample_rate").get<double>();
        Dataset data{derive_grid(freqs, rate), {}, {}};
        if (j.contains("metadata"))
            for (const auto& [key, value] : j.at("metadata").items())
                data.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();

        for (const auto& [name, samples] : j.at("groups").items()) {
            if (!samples.is_array()) throw ParseError("group '" + name + "' must be an array of samples");
            std::vector<Frf> frfs;
            std::size_t i = 0;
            for (const auto& sample : samples) {
                ++i;
                if (!sample.is_array() || sample.size() != freqs.size())
                    throw ParseError("group '" + name + "' sample " + std::to_string(i) +
                                         " must hold " + std::to_string(freqs.size()) +
                                         " [re, im] pairs",
                                     i);
                std::vector<Complex> h;
                for (const auto& pair : sample) {
                    if (!pair.is_array() || pair.size() != 2)
                        throw ParseError("group '" + name + "' sample " + std::to_string(i) +
                                             " has a component that is not an [re, im] pair",
                                         i);
                    h.emplace_back(pair[0].get<double>(), pair[1].get<double>());
                }
                frfs.emplace_back(std::move(h));
            }
            data.groups.emplace(name, FrfSet(std::move(frfs)));
        }
        data.validate();
        return data;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON dataset: ") + e.what());
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    const std::string text = read_text_file(path);
    return format == DataFormat::json ? parse_json(text) : parse_csv(text);
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    return load_dataset(path, format_from_path(path));
}

inline void save_dataset(const Dataset& data, const std::filesystem::path& path, DataFormat format) {
    const std::string text = format == DataFormat::json ? to_json(data).dump(2) + "\n" : to_csv(data);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
}

inline void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    save_dataset(data, path, format_from_path(path));
}

}  // namespace frfstat
