#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrobust/ev.hpp"
#include "qrobust/qaoa.hpp"
#include "qrobust/qubo.hpp"
#include "qrobust/robust.hpp"
#include "qrobust/scenario.hpp"
#include "qrobust/ucp.hpp"

namespace qrobust {

/// Shortest lossless decimal form of a double (17 significant digits).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- QUBO JSON ----

inline nlohmann::json qubo_to_json(const QuboProblem& q) {
    nlohmann::json j;
    j["num_vars"] = q.num_vars();
    j["offset"] = q.offset();
    nlohmann::json lin = nlohmann::json::object();
    for (const auto& [i, v] : q.linear()) lin[std::to_string(i)] = v;
    j["linear"] = lin;
    nlohmann::json quad = nlohmann::json::object();
    for (const auto& [ij, v] : q.quadratic())
        quad[std::to_string(ij.first) + "," + std::to_string(ij.second)] = v;
    j["quadratic"] = quad;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [name, i] : q.labels()) labels[name] = i;
    j["labels"] = labels;
    return j;
}

inline QuboProblem qubo_from_json(const nlohmann::json& j) {
    QuboProblem q(j.at("num_vars").get<std::size_t>());
    q.add_offset(j.value("offset", 0.0));
    if (j.contains("linear"))
        for (const auto& [key, v] : j.at("linear").items())
            q.add_linear(std::stoul(key), v.get<double>());
    if (j.contains("quadratic"))
        for (const auto& [key, v] : j.at("quadratic").items()) {
            const auto comma = key.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("quadratic key without comma: " + key);
            q.add_quadratic(std::stoul(key.substr(0, comma)), std::stoul(key.substr(comma + 1)),
                            v.get<double>());
        }
    if (j.contains("labels"))
        for (const auto& [name, idx] : j.at("labels").items())
            q.set_label(name, idx.get<std::size_t>());
    return q;
}

// ---- Instance JSON ----

inline nlohmann::json ucp_to_json(const UcpInstance& inst) {
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : inst.units)
        units.push_back({{"varcost", u.varcost},
                         {"startcost", u.startcost},
                         {"mingen", u.mingen},
                         {"maxgen", u.maxgen},
                         {"minup", u.minup},
                         {"mindown", u.mindown},
                         {"step", u.step}});
    return {{"units", units}, {"num_steps", inst.num_steps}};
}

inline UcpInstance ucp_from_json(const nlohmann::json& j) {
    UcpInstance inst;
    inst.num_steps = j.at("num_steps").get<int>();
    for (const auto& ju : j.at("units")) {
        UcpUnit u;
        u.varcost = ju.at("varcost").get<double>();
        u.startcost = ju.at("startcost").get<double>();
        u.mingen = ju.at("mingen").get<double>();
        u.maxgen = ju.at("maxgen").get<double>();
        u.minup = ju.at("minup").get<int>();
        u.mindown = ju.at("mindown").get<int>();
        u.step = ju.at("step").get<double>();
        inst.units.push_back(u);
    }
    validate(inst);
    return inst;
}

inline nlohmann::json ev_to_json(const EvInstance& inst) {
    nlohmann::json j;
    j["num_steps"] = inst.num_steps;
    if (inst.pv_kind == PvKind::gaussian)
        j["pv"] = {{"kind", "gaussian"}, {"mu", inst.pv_mu}, {"sigma", inst.pv_sigma}};
    else if (inst.pv_kind == PvKind::uniform)
        j["pv"] = {{"kind", "uniform"}, {"lo", inst.pv_lo}, {"hi", inst.pv_hi}};
    j["j_min"] = inst.j_min;
    j["j_max"] = inst.j_max;
    j["bits"] = inst.bits;
    j["e_min"] = inst.e_min;
    j["e_max"] = inst.e_max;
    return j;
}

inline EvInstance ev_from_json(const nlohmann::json& j) {
    EvInstance inst;
    inst.num_steps = j.at("num_steps").get<int>();
    if (j.contains("pv")) {
        const auto& pv = j.at("pv");
        const std::string kind = pv.at("kind").get<std::string>();
        if (kind == "gaussian") {
            inst.pv_kind = PvKind::gaussian;
            inst.pv_mu = pv.at("mu").get<std::vector<double>>();
            inst.pv_sigma = pv.at("sigma").get<std::vector<double>>();
        } else if (kind == "uniform") {
            inst.pv_kind = PvKind::uniform;
            inst.pv_lo = pv.at("lo").get<std::vector<double>>();
            inst.pv_hi = pv.at("hi").get<std::vector<double>>();
        } else {
            throw std::runtime_error("unknown pv kind: " + kind);
        }
    }
    inst.j_min = j.at("j_min").get<std::vector<std::int64_t>>();
    inst.j_max = j.at("j_max").get<std::vector<std::int64_t>>();
    inst.bits = j.at("bits").get<std::vector<int>>();
    inst.e_min = j.at("e_min").get<double>();
    inst.e_max = j.at("e_max").get<double>();
    validate(inst);
    return inst;
}

inline nlohmann::json scenarios_to_json(const ScenarioSet& s) {
    nlohmann::json j;
    j["scenarios"] = s.scenarios;
    if (s.has_probabilities()) j["probabilities"] = s.probabilities;
    return j;
}

inline ScenarioSet scenarios_from_json(const nlohmann::json& j) {
    ScenarioSet s;
    s.scenarios = j.at("scenarios").get<std::vector<std::vector<double>>>();
    if (j.contains("probabilities")) s.probabilities = j.at("probabilities").get<std::vector<double>>();
    validate(s);
    return s;
}

// ---- CSV exports ----

inline std::string samples_to_csv(const SampleSet& set) {
    std::string out = "bitstring,energy,multiplicity\n";
    for (const auto& e : set.entries) {
        out += to_string(e.bits);
        out += ',';
        out += format_double(e.energy);
        out += ',';
        out += std::to_string(e.multiplicity);
        out += '\n';
    }
    return out;
}

inline std::string schedule_to_csv(const UcpSchedule& s) {
    std::string out = "t,unit,on,start,power\n";
    for (std::size_t t = 0; t < s.on.size(); ++t)
        for (std::size_t i = 0; i < s.on[t].size(); ++i) {
            out += std::to_string(t);
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += std::to_string(static_cast<int>(s.on[t][i]));
            out += ',';
            out += std::to_string(static_cast<int>(s.start[t][i]));
            out += ',';
            out += format_double(s.power[t][i]);
            out += '\n';
        }
    return out;
}

inline std::string provenance_to_string(const std::map<std::string, std::uint64_t>& sources) {
    std::string out;
    for (const auto& [src, count] : sources) {
        if (!out.empty()) out += '|';
        out += src;
        out += ':';
        out += std::to_string(count);
    }
    return out;
}

/// One row per pooled candidate; the det_cost / mismatch_regret pair gives
/// the cost-versus-demand-regret scatter axes.
inline std::string report_to_csv(const RobustnessReport& r) {
    std::string out = "bitstring,feasible,det_cost,mismatch_regret,worst_case,regret,provenance\n";
    for (const auto& c : r.candidates) {
        out += to_string(c.bits);
        out += ',';
        out += c.feasible ? '1' : '0';
        out += ',';
        out += format_double(c.det_cost);
        out += ',';
        out += format_double(c.mismatch_regret);
        out += ',';
        out += format_double(c.worst_case);
        out += ',';
        out += format_double(c.regret);
        out += ',';
        out += provenance_to_string(c.provenance);
        out += '\n';
    }
    return out;
}

inline std::string landscape_to_csv(const GridSearchResult& g) {
    std::string out = "beta,gamma,expectation\n";
    for (std::size_t i = 0; i < g.beta_grid.size(); ++i)
        for (std::size_t j = 0; j < g.gamma_grid.size(); ++j) {
            out += format_double(g.beta_grid[i]);
            out += ',';
            out += format_double(g.gamma_grid[j]);
            out += ',';
            out += format_double(g.landscape[i][j]);
            out += '\n';
        }
    return out;
}

inline std::string histogram_to_csv(const HistogramGrid& h) {
    std::string out = "bin_x_lo,bin_y_lo,count\n";
    for (std::size_t xb = 0; xb < h.bins_per_axis; ++xb)
        for (std::size_t yb = 0; yb < h.bins_per_axis; ++yb) {
            out += format_double(h.x_lo + static_cast<double>(xb) * h.x_width);
            out += ',';
            out += format_double(h.y_lo + static_cast<double>(yb) * h.y_width);
            out += ',';
            out += std::to_string(h.at(xb, yb));
            out += '\n';
        }
    return out;
}

} // namespace qrobust
