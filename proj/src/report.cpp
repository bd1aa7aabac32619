#include "capflow/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "capflow/parallel.hpp"

namespace capflow {

CheckRecord CheckRecord::pass_fail(std::string name, std::string anchor, bool ok,
                                   ordered_json values, std::string bound, std::string note) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.values = std::move(values);
    r.bound = std::move(bound);
    r.status = ok ? "pass" : "fail";
    r.note = std::move(note);
    return r;
}

CheckRecord CheckRecord::recorded(std::string name, std::string anchor, ordered_json values,
                                  std::string bound, std::string note) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.values = std::move(values);
    r.bound = std::move(bound);
    r.status = "recorded";
    r.note = std::move(note);
    return r;
}

void Report::add(CheckRecord r) { records.push_back(std::move(r)); }

int Report::failed() const {
    int n = 0;
    for (const auto& r : records) n += r.status == "fail";
    return n;
}

int Report::passed() const {
    int n = 0;
    for (const auto& r : records) n += r.status == "pass";
    return n;
}

int Report::recorded_count() const {
    int n = 0;
    for (const auto& r : records) n += r.status == "recorded";
    return n;
}

bool Report::validate_anchors() {
    const auto& reg = anchors::registry();
    std::vector<std::string> orphans;
    for (const auto& r : records)
        if (reg.find(r.anchor) == reg.end()) orphans.push_back(r.anchor);
    ordered_json values;
    values["records"] = records.size();
    values["orphans"] = orphans;
    add(CheckRecord::pass_fail("every record anchor is registered", "report-registry",
                               orphans.empty(), values, "orphan count = 0"));
    return orphans.empty();
}

ordered_json Report::to_json() const {
    ordered_json j;
    j["title"] = title;
    j["timestamp"] = timestamp;
    j["environment"] = environment;
    j["config"] = config_echo;
    j["summary"] = {{"pass", passed()}, {"fail", failed()}, {"recorded", recorded_count()}};
    j["checks"] = ordered_json::array();
    for (const auto& r : records) {
        ordered_json c;
        c["name"] = r.name;
        c["anchor"] = r.anchor;
        c["status"] = r.status;
        c["bound"] = r.bound;
        c["values"] = r.values;
        if (!r.note.empty()) c["note"] = r.note;
        j["checks"].push_back(c);
    }
    return j;
}

void Report::write_json(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("Report: cannot write " + path);
    out << to_json().dump(2) << "\n";
}

void Report::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("Report: cannot write " + path);
    out << "name,anchor,status,bound,note\n";
    auto esc = [](const std::string& s) {
        std::string t = "\"";
        for (char ch : s) {
            if (ch == '"') t += "\"\"";
            else t += ch;
        }
        return t + "\"";
    };
    for (const auto& r : records)
        out << esc(r.name) << ',' << esc(r.anchor) << ',' << r.status << ',' << esc(r.bound) << ','
            << esc(r.note) << "\n";
}

ordered_json environment_stamp() {
    ordered_json env;
    env["threads"] = par::max_threads();
    env["parallel"] = par::mode() == par::Mode::OpenMP ? "openmp" : "serial";
#ifdef __VERSION__
    env["compiler"] = __VERSION__;
#endif
    env["pointer_bits"] = static_cast<int>(8 * sizeof(void*));
    return env;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace capflow
