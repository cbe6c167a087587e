#include "crr/trace.hpp"

#include <sstream>
#include <stdexcept>

namespace crr {

std::string TraceEvent::render() const {
    std::string s =
        "t=" + std::to_string(t) + " kind=" + kind + " actor=" + std::to_string(actor);
    if (!detail.empty()) {
        s += " detail=";
        bool first = true;
        for (const auto& [k, v] : detail) {
            if (!first) s += ",";
            first = false;
            s += k + "=" + v;
        }
    }
    return s;
}

std::optional<std::string> TraceEvent::get(const std::string& key) const {
    for (const auto& [k, v] : detail) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::string Trace::render() const {
    std::string out;
    for (const auto& e : events) {
        out += e.render();
        out += "\n";
    }
    return out;
}

namespace {

std::runtime_error bad_line(const std::string& line, const std::string& why) {
    return std::runtime_error("bad trace line (" + why + "): " + line);
}

}  // namespace

Trace parse_trace(const std::string& text) {
    Trace trace;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceEvent ev;
        std::istringstream ls(line);
        std::string tok;
        int field = 0;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw bad_line(line, "token without '='");
            std::string key = tok.substr(0, eq);
            std::string val = tok.substr(eq + 1);
            if (field == 0 && key != "t") throw bad_line(line, "expected t=");
            if (key == "t") {
                ev.t = std::stoll(val);
            } else if (key == "kind") {
                ev.kind = val;
            } else if (key == "actor") {
                ev.actor = std::stoi(val);
            } else if (key == "detail") {
                // split on commas outside {}
                std::string item;
                int depth = 0;
                auto flush = [&]() {
                    if (item.empty()) return;
                    auto ieq = item.find('=');
                    if (ieq == std::string::npos) throw bad_line(line, "detail entry without '='");
                    ev.detail.emplace_back(item.substr(0, ieq), item.substr(ieq + 1));
                    item.clear();
                };
                for (char c : val) {
                    if (c == '{') depth++;
                    if (c == '}') depth--;
                    if (c == ',' && depth == 0) {
                        flush();
                    } else {
                        item += c;
                    }
                }
                flush();
            } else {
                throw bad_line(line, "unknown field " + key);
            }
            field++;
        }
        if (ev.kind.empty()) throw bad_line(line, "missing kind");
        trace.events.push_back(std::move(ev));
    }
    return trace;
}

std::string ts_field(const Timestamp& ts) { return to_string(ts); }

std::optional<Timestamp> parse_ts(const std::string& s) {
    if (s.size() < 5 || s.front() != '(' || s.back() != ')') return std::nullopt;
    auto comma = s.find(',');
    if (comma == std::string::npos) return std::nullopt;
    try {
        Timestamp ts;
        ts.cnt = std::stoll(s.substr(1, comma - 1));
        ts.pid = std::stoi(s.substr(comma + 1, s.size() - comma - 2));
        return ts;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string set_field(const std::vector<std::string>& items) {
    std::string s = "{";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) s += ";";
        s += items[i];
    }
    return s + "}";
}

std::vector<std::string> parse_set(const std::string& s) {
    std::vector<std::string> out;
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') return out;
    std::string inner = s.substr(1, s.size() - 2);
    std::string item;
    for (char c : inner) {
        if (c == ';') {
            if (!item.empty()) out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace crr
