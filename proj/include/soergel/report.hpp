#pragma once

// Check reports: a flat tree of sections, each a list of named pass/fail
// verdicts with an optional witness string. Emission is byte-stable for a
// fixed config and seed; timings are kept out of the output unless asked for.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace soergel {

using Json = nlohmann::ordered_json;

struct ReportCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ReportSection {
    std::string name;
    std::vector<ReportCheck> checks;

    ReportCheck& check(std::string cname, bool pass, std::string detail = {}) {
        checks.push_back(ReportCheck{std::move(cname), pass, std::move(detail)});
        return checks.back();
    }
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct Report {
    static constexpr const char* schema = "report/1";

    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<ReportSection> sections;
    std::vector<std::pair<std::string, long long>> timings_ms;
    bool with_timings = false;

    ReportSection& section(std::string name) {
        sections.push_back(ReportSection{std::move(name), {}});
        return sections.back();
    }

    bool all_pass() const {
        for (const auto& s : sections)
            if (!s.all_pass()) return false;
        return true;
    }
    std::size_t check_count() const {
        std::size_t n = 0;
        for (const auto& s : sections) n += s.checks.size();
        return n;
    }
    std::size_t pass_count() const {
        std::size_t n = 0;
        for (const auto& s : sections)
            for (const auto& c : s.checks) n += c.pass ? 1 : 0;
        return n;
    }
    int exit_code() const { return all_pass() ? 0 : 1; }

    std::string to_text() const {
        std::string out;
        out += "== soergel " + command + " (" + schema + ") ==\n";
        for (const auto& [k, v] : inputs) out += k + ": " + v + "\n";
        for (const auto& s : sections) {
            out += "-- " + s.name + " --\n";
            for (const auto& c : s.checks) {
                out += c.pass ? "  pass  " : "  FAIL  ";
                out += c.name;
                if (!c.detail.empty()) out += "  [" + c.detail + "]";
                out += "\n";
            }
        }
        if (with_timings) {
            out += "-- timings --\n";
            for (const auto& [k, ms] : timings_ms)
                out += "  " + k + ": " + std::to_string(ms) + " ms\n";
        }
        out += "== " + std::string(all_pass() ? "PASS" : "FAIL") + ": " +
               std::to_string(pass_count()) + "/" + std::to_string(check_count()) +
               " checks ==\n";
        return out;
    }

    Json to_json() const {
        Json j;
        j["schema"] = schema;
        j["command"] = command;
        Json in = Json::object();
        for (const auto& [k, v] : inputs) in[k] = v;
        j["inputs"] = std::move(in);
        Json secs = Json::array();
        for (const auto& s : sections) {
            Json js;
            js["name"] = s.name;
            Json cs = Json::array();
            for (const auto& c : s.checks) {
                Json jc;
                jc["name"] = c.name;
                jc["pass"] = c.pass;
                if (!c.detail.empty()) jc["detail"] = c.detail;
                cs.push_back(std::move(jc));
            }
            js["checks"] = std::move(cs);
            secs.push_back(std::move(js));
        }
        j["sections"] = std::move(secs);
        j["pass"] = all_pass();
        if (with_timings) {
            Json ts = Json::object();
            for (const auto& [k, ms] : timings_ms) ts[k] = ms;
            j["timings_ms"] = std::move(ts);
        }
        return j;
    }
};

} // namespace soergel
