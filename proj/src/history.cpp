#include "crr/history.hpp"

#include <sstream>
#include <stdexcept>

#include "crr/trace.hpp"

namespace crr {

std::string HistoryRecord::render() const {
    std::string s = "op=";
    s += (kind == OpKind::Read ? "read" : "write");
    s += " client=" + std::to_string(client);
    s += " inv=" + std::to_string(invoke);
    s += " resp=" + (respond ? std::to_string(*respond) : std::string("-"));
    s += " val=" + (value.empty() ? std::string("-") : value);
    s += " tau=" + (tau ? to_string(*tau) : std::string("-"));
    return s;
}

std::string History::render() const {
    std::string out;
    for (const auto& r : records) {
        out += r.render();
        out += "\n";
    }
    return out;
}

History parse_history(const std::string& text) {
    History h;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        HistoryRecord rec;
        std::istringstream ls(line);
        std::string tok;
        bool saw_op = false;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("bad history line (token without '='): " + line);
            std::string key = tok.substr(0, eq);
            std::string val = tok.substr(eq + 1);
            if (key == "op") {
                if (val == "read") {
                    rec.kind = OpKind::Read;
                } else if (val == "write") {
                    rec.kind = OpKind::Write;
                } else {
                    throw std::runtime_error("bad history line (op kind): " + line);
                }
                saw_op = true;
            } else if (key == "client") {
                rec.client = std::stoi(val);
            } else if (key == "inv") {
                rec.invoke = std::stoll(val);
            } else if (key == "resp") {
                if (val != "-") rec.respond = std::stoll(val);
            } else if (key == "val") {
                if (val != "-") rec.value = val;
            } else if (key == "tau") {
                if (val != "-") {
                    auto ts = parse_ts(val);
                    if (!ts) throw std::runtime_error("bad history line (tau): " + line);
                    rec.tau = *ts;
                }
            } else {
                throw std::runtime_error("bad history line (unknown field " + key + "): " + line);
            }
        }
        if (!saw_op) throw std::runtime_error("bad history line (missing op): " + line);
        h.records.push_back(std::move(rec));
    }
    return h;
}

}  // namespace crr
