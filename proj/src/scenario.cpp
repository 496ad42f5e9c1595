#include "tcr/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tcr/errors.hpp"

namespace tcr {

using nlohmann::json;

namespace {

// Walks a JSON document and records every problem with its field path.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!ok.count(k)) fail(path + "." + k, "unknown key");
        return true;
    }

    const json* field(const json& j, const std::string& path, const char* key, bool required) {
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) fail(path + "." + key, "missing");
            return nullptr;
        }
        return &*it;
    }

    std::string str(const json& j, const std::string& path) {
        if (!j.is_string()) {
            fail(path, "expected a string");
            return {};
        }
        return j.get<std::string>();
    }

    std::int64_t integer(const json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return 0;
        }
        return j.get<std::int64_t>();
    }

    ExtendedDelta extended(const json& j, const std::string& path) {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        if (j.is_string()) {
            try {
                return ExtendedDelta::parse(j.get<std::string>());
            } catch (const std::exception&) {
            }
        }
        fail(path, "expected an integer, \"-inf\" or \"+inf\"");
        return 0;
    }

    std::vector<std::string> strings(const json& j, const std::string& path) {
        std::vector<std::string> out;
        if (!j.is_array()) {
            fail(path, "expected an array");
            return out;
        }
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(str(j[k], path + "[" + std::to_string(k) + "]"));
        return out;
    }
};

Context read_context(Reader& rd, const json& j) {
    Context ctx;
    const std::string P = "context";
    if (!rd.object(j, P, {"agents", "channels", "inputs", "shared_clock"})) return ctx;
    if (auto a = rd.field(j, P, "agents", true)) ctx.agents = rd.strings(*a, P + ".agents");
    if (auto ch = rd.field(j, P, "channels", false)) {
        if (!ch->is_array()) rd.fail(P + ".channels", "expected an array");
        else
            for (std::size_t k = 0; k < ch->size(); ++k) {
                const std::string q = P + ".channels[" + std::to_string(k) + "]";
                const json& c = (*ch)[k];
                if (!rd.object(c, q, {"from", "to", "bound"})) continue;
                Channel out;
                if (auto f = rd.field(c, q, "from", true)) out.from = rd.str(*f, q + ".from");
                if (auto t = rd.field(c, q, "to", true)) out.to = rd.str(*t, q + ".to");
                if (auto b = rd.field(c, q, "bound", true)) out.bound = rd.extended(*b, q + ".bound");
                ctx.channels.push_back(out);
            }
    }
    if (auto in = rd.field(j, P, "inputs", false)) {
        if (!in->is_array()) rd.fail(P + ".inputs", "expected an array");
        else
            for (std::size_t k = 0; k < in->size(); ++k) {
                const std::string q = P + ".inputs[" + std::to_string(k) + "]";
                const json& e = (*in)[k];
                if (!rd.object(e, q, {"id", "observer"})) continue;
                ExternalInput out;
                if (auto id = rd.field(e, q, "id", true)) out.id = rd.str(*id, q + ".id");
                if (auto o = rd.field(e, q, "observer", true)) out.observer = rd.str(*o, q + ".observer");
                ctx.inputs.push_back(out);
            }
    }
    if (auto sc = rd.field(j, P, "shared_clock", false)) {
        if (!sc->is_boolean()) rd.fail(P + ".shared_clock", "expected a boolean");
        else ctx.shared_clock = sc->get<bool>();
    }
    for (const auto& d : validate_context(ctx)) rd.fail(P, "[" + to_string(d.kind) + "] " + d.message);
    return ctx;
}

TcrSpec read_tcr(Reader& rd, const json& j, const Context& ctx) {
    TcrSpec spec;
    spec.context = ctx;
    const std::string P = "tcr";
    if (!rd.object(j, P, {"trigger", "agents", "delta"})) return spec;
    if (auto t = rd.field(j, P, "trigger", true)) {
        spec.trigger = rd.str(*t, P + ".trigger");
        if (t->is_string() && !ctx.input_index(spec.trigger))
            rd.fail(P + ".trigger", "'" + spec.trigger + "' is not a declared input");
    }
    if (auto a = rd.field(j, P, "agents", true)) {
        spec.agents = rd.strings(*a, P + ".agents");
        std::set<std::string> seen;
        for (std::size_t k = 0; k < spec.agents.size(); ++k) {
            const std::string q = P + ".agents[" + std::to_string(k) + "]";
            if (!ctx.agent_index(spec.agents[k])) rd.fail(q, "'" + spec.agents[k] + "' is not a context agent");
            if (!seen.insert(spec.agents[k]).second) rd.fail(q, "'" + spec.agents[k] + "' listed twice");
        }
        if (spec.agents.size() < 2) rd.fail(P + ".agents", "at least two agents are required");
    }
    spec.delta = ImplementationSpec(spec.agents);
    if (auto d = rd.field(j, P, "delta", false)) {
        if (!d->is_array()) rd.fail(P + ".delta", "expected an array");
        else {
            std::set<std::pair<std::string, std::string>> seen;
            for (std::size_t k = 0; k < d->size(); ++k) {
                const std::string q = P + ".delta[" + std::to_string(k) + "]";
                const json& e = (*d)[k];
                if (!rd.object(e, q, {"from", "to", "value"})) continue;
                std::string from, to;
                ExtendedDelta v = POS_INF;
                if (auto f = rd.field(e, q, "from", true)) from = rd.str(*f, q + ".from");
                if (auto t = rd.field(e, q, "to", true)) to = rd.str(*t, q + ".to");
                if (auto x = rd.field(e, q, "value", true)) v = rd.extended(*x, q + ".value");
                if (!seen.insert({from, to}).second) rd.fail(q, "duplicate entry " + from + "->" + to);
                try {
                    spec.delta.set(from, to, v);
                } catch (const AgentMismatch& err) {
                    rd.fail(q, err.what());
                }
            }
        }
    }
    return spec;
}

NdSchedule read_schedule(Reader& rd, const json& j, const std::string& P, const Context& ctx) {
    NdSchedule s;
    if (!rd.object(j, P, {"inputs", "delays"})) return s;
    if (auto in = rd.field(j, P, "inputs", false)) {
        if (!in->is_object()) rd.fail(P + ".inputs", "expected an object");
        else
            for (const auto& [id, t] : in->items()) {
                const std::string q = P + ".inputs." + id;
                if (!ctx.input_index(id)) rd.fail(q, "unknown input");
                const auto v = rd.integer(t, q);
                if (v < 0) rd.fail(q, "negative time");
                s.input_times[id] = static_cast<int>(v);
            }
    }
    if (auto d = rd.field(j, P, "delays", false)) {
        if (!d->is_array()) rd.fail(P + ".delays", "expected an array");
        else
            for (std::size_t k = 0; k < d->size(); ++k) {
                const std::string q = P + ".delays[" + std::to_string(k) + "]";
                const json& e = (*d)[k];
                if (!rd.object(e, q, {"from", "to", "sent", "delay"})) continue;
                MessageKey key;
                std::int64_t delay = 1;
                if (auto f = rd.field(e, q, "from", true)) key.sender = rd.str(*f, q + ".from");
                if (auto t = rd.field(e, q, "to", true)) key.recipient = rd.str(*t, q + ".to");
                if (auto x = rd.field(e, q, "sent", true)) key.send_time = static_cast<int>(rd.integer(*x, q + ".sent"));
                if (auto x = rd.field(e, q, "delay", true)) delay = rd.integer(*x, q + ".delay");
                const Channel* ch = nullptr;
                for (const auto& c : ctx.channels)
                    if (c.from == key.sender && c.to == key.recipient) ch = &c;
                if (!ch) rd.fail(q, "no channel " + key.sender + "->" + key.recipient);
                else if (delay < 1 || (ch->bound.is_finite() && delay > ch->bound.value()))
                    rd.fail(q + ".delay", "outside 1.." + ch->bound.to_string());
                if (key.send_time < 0) rd.fail(q + ".sent", "negative time");
                if (s.delays.count(key)) rd.fail(q, "duplicate message");
                s.delays[key] = static_cast<int>(delay);
            }
    }
    return s;
}

json extended_json(ExtendedDelta v) {
    if (v.is_finite()) return v.value();
    return v.to_string();
}

} // namespace

Scenario load_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    Reader rd;
    Scenario s;
    if (rd.object(doc, "$", {"context", "tcr", "schedules", "oracle"})) {
        Context ctx;
        if (auto c = rd.field(doc, "$", "context", true)) ctx = read_context(rd, *c);
        if (auto t = rd.field(doc, "$", "tcr", true)) s.tcr = read_tcr(rd, *t, ctx);
        else s.tcr.context = ctx;
        if (auto sc = rd.field(doc, "$", "schedules", false)) {
            if (!sc->is_object()) rd.fail("schedules", "expected an object");
            else
                for (const auto& [name, body] : sc->items())
                    s.schedules[name] = read_schedule(rd, body, "schedules." + name, ctx);
        }
        if (auto o = rd.field(doc, "$", "oracle", false)) {
            if (rd.object(*o, "oracle", {"horizon", "max_runs"})) {
                if (auto h = rd.field(*o, "oracle", "horizon", false)) {
                    s.oracle.horizon = static_cast<int>(rd.integer(*h, "oracle.horizon"));
                    if (s.oracle.horizon < 0) rd.fail("oracle.horizon", "negative");
                }
                if (auto m = rd.field(*o, "oracle", "max_runs", false)) {
                    const auto v = rd.integer(*m, "oracle.max_runs");
                    if (v < 1) rd.fail("oracle.max_runs", "must be positive");
                    else s.oracle.max_runs = static_cast<std::size_t>(v);
                }
            }
        }
    }
    if (!rd.errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : rd.errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize(const Scenario& s) {
    const Context& ctx = s.context();
    json c;
    c["agents"] = ctx.agents;
    c["channels"] = json::array();
    for (const auto& ch : ctx.channels)
        c["channels"].push_back({{"from", ch.from}, {"to", ch.to}, {"bound", extended_json(ch.bound)}});
    c["inputs"] = json::array();
    for (const auto& e : ctx.inputs) c["inputs"].push_back({{"id", e.id}, {"observer", e.observer}});
    c["shared_clock"] = ctx.shared_clock;

    json t;
    t["trigger"] = s.tcr.trigger;
    t["agents"] = s.tcr.agents;
    t["delta"] = json::array();
    const auto& d = s.tcr.delta;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (i != j && !d.at(i, j).is_pos_inf())
                t["delta"].push_back({{"from", d.agents[i]}, {"to", d.agents[j]}, {"value", extended_json(d.at(i, j))}});

    json sc = json::object();
    for (const auto& [name, sched] : s.schedules) {
        json body;
        body["inputs"] = json::object();
        for (const auto& [id, at] : sched.input_times) body["inputs"][id] = at;
        body["delays"] = json::array();
        for (const auto& [key, delay] : sched.delays)
            body["delays"].push_back(
                {{"from", key.sender}, {"to", key.recipient}, {"sent", key.send_time}, {"delay", delay}});
        sc[name] = body;
    }

    json doc;
    doc["context"] = c;
    doc["tcr"] = t;
    doc["schedules"] = sc;
    doc["oracle"] = {{"horizon", s.oracle.horizon}, {"max_runs", s.oracle.max_runs}};
    return doc.dump(2) + "\n";
}

} // namespace tcr
