#include "fockforge/reference_table.hpp"

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace fockforge {

PulseSequence ReferenceRow::sequence() const {
    std::vector<PulseStep> steps;
    for (size_t k = 0; k < beta.size(); ++k)
        steps.push_back(PulseStep{beta[k], chi_over_pi[k] * std::numbers::pi});
    return PulseSequence::for_target(target_n, std::move(steps));
}

ReferenceTable ReferenceTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reference table: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto j = nlohmann::json::parse(buf.str());

    ReferenceTable table;
    for (const auto& row : j.at("rows")) {
        ReferenceRow r;
        r.target_n = row.at("N").get<int>();
        r.beta = row.at("beta").get<std::vector<double>>();
        r.chi_over_pi = row.at("chi_over_pi").get<std::vector<double>>();
        r.m_steps = row.contains("M") ? row.at("M").get<int>() : static_cast<int>(r.beta.size());
        r.fidelity = row.at("fidelity").get<double>();
        if (r.beta.size() != r.chi_over_pi.size() ||
            static_cast<int>(r.beta.size()) != r.m_steps)
            throw ConfigError("malformed reference table row");
        table.rows_.push_back(std::move(r));
    }
    return table;
}

const ReferenceTable& ReferenceTable::bundled() {
    static const ReferenceTable table = [] {
        if (const char* env = std::getenv("FOCKFORGE_TABLE")) return load(env);
        return load(FOCKFORGE_BUNDLED_TABLE);
    }();
    return table;
}

const ReferenceRow& ReferenceTable::find(int target_n, int m_steps) const {
    for (const auto& r : rows_)
        if (r.target_n == target_n && r.m_steps == m_steps) return r;
    throw MissingParameters("no reference parameters for N=" + std::to_string(target_n) +
                            ", M=" + std::to_string(m_steps));
}

PulseSequence ReferenceTable::sequence_for(int target_n, int m_steps) const {
    return find(target_n, m_steps).sequence();
}

std::vector<int> ReferenceTable::targets_for_m(int m_steps) const {
    std::vector<int> out;
    for (const auto& r : rows_)
        if (r.m_steps == m_steps) out.push_back(r.target_n);
    return out;
}

}  // namespace fockforge
