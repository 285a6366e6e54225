#pragma once
// json campaign configs for the cli; kept separate so the core header
// does not drag the json dependency into every translation unit

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsalink/harness.hpp"

namespace lsalink::harness {

// cartesian campaign grid: every combination of waveform, antenna count,
// user count and scheme is swept over the same snr list
struct GridConfig {
    std::vector<Waveform> waveforms{Waveform::ofdm};
    std::vector<std::size_t> antennas{100};
    std::vector<std::size_t> users{1};
    std::vector<modem::ModScheme> schemes{modem::ModScheme::qpsk};
    std::vector<double> esn0_db;
    LinkConfig base;  // carries route, ofdm/sc/turbo knobs and flags
    std::size_t blocks_per_point = 500;
    std::size_t min_block_errors = 200;
    std::size_t max_blocks = 4000;
    std::size_t batch = 64;
    std::uint64_t seed = 1;
    std::string output = "results.csv";

    std::vector<CampaignConfig> expand() const {
        std::vector<CampaignConfig> out;
        for (Waveform wf : waveforms)
            for (std::size_t m : antennas)
                for (std::size_t k : users)
                    for (modem::ModScheme sch : schemes) {
                        CampaignConfig camp;
                        camp.link = base;
                        camp.link.waveform = wf;
                        camp.link.antennas = m;
                        camp.link.users = k;
                        camp.link.scheme = sch;
                        camp.link = camp.link.normalized();
                        camp.esn0_db = esn0_db;
                        camp.blocks_per_point = blocks_per_point;
                        camp.min_block_errors = min_block_errors;
                        camp.max_blocks = max_blocks;
                        camp.batch = batch;
                        camp.seed = seed;
                        camp.validate();
                        out.push_back(std::move(camp));
                    }
        return out;
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                           const std::string& where) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw std::invalid_argument("unknown config key " + where + item.key());
}

// grid axes accept either a scalar or a list
template <typename T, typename Parse>
std::vector<T> axis(const nlohmann::json& j, const char* key, std::vector<T> fallback,
                    Parse parse) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    std::vector<T> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(parse(e));
    else
        out.push_back(parse(v));
    if (out.empty()) throw std::invalid_argument(std::string(key) + " must be non-empty");
    return out;
}

inline channel::TapDelayProfile profile_from_json(const nlohmann::json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "etu") return channel::etu_profile();
        throw std::invalid_argument("unknown channel profile: " + v.get<std::string>());
    }
    reject_unknown(v, {"delays_ns", "powers_db"}, "profile.");
    channel::TapDelayProfile p;
    for (double d : v.at("delays_ns").get<std::vector<double>>()) p.delay_s.push_back(d * 1e-9);
    p.power_db = v.at("powers_db").get<std::vector<double>>();
    double sum = 0.0;
    for (double db : p.power_db) sum += std::pow(10.0, db / 10.0);
    for (double db : p.power_db) p.power_lin.push_back(std::pow(10.0, db / 10.0) / sum);
    p.validate();
    return p;
}

}  // namespace detail

inline GridConfig grid_from_json(const nlohmann::json& j) {
    detail::reject_unknown(
        j, {"waveforms", "antennas", "users", "schemes", "esn0_db", "route", "payload_bits",
            "filler_bits", "blocks_per_point", "min_block_errors", "max_blocks", "batch",
            "seed", "output", "profile", "fast_path", "allow_short_cp", "ofdm", "sc", "turbo"},
        "");
    GridConfig g;
    g.waveforms = detail::axis<Waveform>(j, "waveforms", g.waveforms, [](const nlohmann::json& e) {
        return parse_waveform(e.get<std::string>());
    });
    g.antennas = detail::axis<std::size_t>(j, "antennas", g.antennas, [](const nlohmann::json& e) {
        return e.get<std::size_t>();
    });
    g.users = detail::axis<std::size_t>(j, "users", g.users, [](const nlohmann::json& e) {
        return e.get<std::size_t>();
    });
    g.schemes =
        detail::axis<modem::ModScheme>(j, "schemes", g.schemes, [](const nlohmann::json& e) {
            return parse_scheme(e.get<std::string>());
        });
    if (!j.contains("esn0_db")) throw std::invalid_argument("config needs an esn0_db list");
    g.esn0_db = detail::axis<double>(j, "esn0_db", {}, [](const nlohmann::json& e) {
        return e.get<double>();
    });

    if (j.contains("route")) g.base.route = parse_route(j.at("route").get<std::string>());
    if (j.contains("payload_bits")) g.base.payload_bits = j.at("payload_bits").get<std::size_t>();
    if (j.contains("filler_bits")) g.base.filler_bits = j.at("filler_bits").get<std::size_t>();
    if (j.contains("fast_path")) g.base.fast_path = j.at("fast_path").get<bool>();
    if (j.contains("allow_short_cp"))
        g.base.allow_short_cp = j.at("allow_short_cp").get<bool>();
    if (j.contains("profile")) g.base.profile = detail::profile_from_json(j.at("profile"));

    if (j.contains("ofdm")) {
        const auto& o = j.at("ofdm");
        detail::reject_unknown(o, {"nfft", "used", "cp", "sample_rate"}, "ofdm.");
        if (o.contains("nfft")) g.base.ofdm.nfft = o.at("nfft").get<std::size_t>();
        if (o.contains("used")) g.base.ofdm.used = o.at("used").get<std::size_t>();
        if (o.contains("cp")) g.base.ofdm.cp = o.at("cp").get<std::size_t>();
        if (o.contains("sample_rate")) g.base.ofdm.sample_rate = o.at("sample_rate").get<double>();
    }
    if (j.contains("sc")) {
        const auto& s = j.at("sc");
        detail::reject_unknown(s, {"alpha", "beta", "span", "mf_taps", "template"}, "sc.");
        if (s.contains("alpha")) g.base.sc.alpha = s.at("alpha").get<std::size_t>();
        if (s.contains("beta")) g.base.sc.beta = s.at("beta").get<double>();
        if (s.contains("span")) g.base.sc.span = s.at("span").get<std::size_t>();
        if (s.contains("mf_taps")) g.base.sc.mf_taps = s.at("mf_taps").get<std::size_t>();
        if (s.contains("template")) {
            const std::string t = s.at("template").get<std::string>();
            if (t == "composite")
                g.base.sc.tmpl = sc::TemplateKind::composite;
            else if (t == "bandlimited")
                g.base.sc.tmpl = sc::TemplateKind::bandlimited;
            else
                throw std::invalid_argument("unknown sc template: " + t);
        }
    }
    if (j.contains("turbo")) {
        const auto& t = j.at("turbo");
        detail::reject_unknown(t, {"max_iterations", "extrinsic_scale", "early_stop"}, "turbo.");
        if (t.contains("max_iterations"))
            g.base.code.max_iterations = t.at("max_iterations").get<int>();
        if (t.contains("extrinsic_scale"))
            g.base.code.extrinsic_scale = t.at("extrinsic_scale").get<double>();
        if (t.contains("early_stop")) g.base.code.early_stop = t.at("early_stop").get<bool>();
    }

    if (j.contains("blocks_per_point"))
        g.blocks_per_point = j.at("blocks_per_point").get<std::size_t>();
    if (j.contains("min_block_errors"))
        g.min_block_errors = j.at("min_block_errors").get<std::size_t>();
    if (j.contains("max_blocks")) g.max_blocks = j.at("max_blocks").get<std::size_t>();
    if (j.contains("batch")) g.batch = j.at("batch").get<std::size_t>();
    if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) g.output = j.at("output").get<std::string>();
    return g;
}

inline GridConfig load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    try {
        return grid_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config error in " + path + ": " + e.what());
    }
}

}  // namespace lsalink::harness
