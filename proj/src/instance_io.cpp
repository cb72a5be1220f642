#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "wrsn/instances.hpp"
#include "wrsn/text.hpp"

namespace wrsn {

void write_instance(std::ostream& os, const ProblemInstance& inst) {
    os << "wrsn-instance v1 " << to_string(inst.variant) << " n=" << inst.nodes.size() << " seed=" << inst.seed << '\n';
    os << "problem alpha=" << fmt_double(inst.alpha) << " epsilon=" << fmt_double(inst.epsilon_charge)
       << " k=" << inst.coverage_k << " t0=" << fmt_double(inst.t0) << " meet_dt=" << fmt_double(inst.meet_dt)
       << " area=" << fmt_double(inst.area.x0) << ',' << fmt_double(inst.area.y0) << ',' << fmt_double(inst.area.x1)
       << ',' << fmt_double(inst.area.y1) << '\n';
    const auto& ch = inst.charger;
    os << "charger depot_x=" << fmt_double(ch.depot.x) << " depot_y=" << fmt_double(ch.depot.y)
       << " end_x=" << fmt_double(ch.end_point.x) << " end_y=" << fmt_double(ch.end_point.y)
       << " speed=" << fmt_double(ch.speed) << " rate=" << fmt_double(ch.transfer_rate)
       << " xi=" << fmt_double(ch.travel_energy);
    if (ch.energy_capacity) os << " IE=" << fmt_double(*ch.energy_capacity);
    if (ch.timespan) os << " C=" << fmt_double(*ch.timespan);
    os << '\n';
    for (const auto& node : inst.nodes) {
        os << "node id=" << node.id << " x=" << fmt_double(node.position.x) << " y=" << fmt_double(node.position.y)
           << " B=" << fmt_double(node.capacity) << " B0=" << fmt_double(node.residual)
           << " beta=" << fmt_double(node.consumption);
        if (node.sensing_radius) os << " r=" << fmt_double(*node.sensing_radius);
        if (node.deadline) os << " D=" << fmt_double(*node.deadline);
        if (node.prize) os << " pi=" << *node.prize;
        if (node.trajectory) os << " vmax=" << fmt_double(node.trajectory->max_speed);
        os << '\n';
    }
    for (const auto& node : inst.nodes) {
        if (!node.trajectory) continue;
        for (const auto& w : node.trajectory->waypoints) {
            os << "wp id=" << node.id << " t=" << fmt_double(w.t) << " x=" << fmt_double(w.p.x)
               << " y=" << fmt_double(w.p.y) << '\n';
        }
    }
}

namespace {

class Fields {
public:
    Fields(const std::vector<std::string>& tokens, std::size_t first, int line) : line_(line) {
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string::npos || eq == 0) err("expected key=value, got '" + tokens[i] + "'");
            if (!kv_.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1)).second)
                err("duplicate key '" + tokens[i].substr(0, eq) + "'");
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double num(const std::string& key) const {
        const auto& s = raw(key);
        try {
            return parse_double(s);
        } catch (const ParseError&) {
            err("field '" + key + "': invalid number '" + s + "'");
        }
    }

    long long integer(const std::string& key) const {
        const auto& s = raw(key);
        long long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) err("field '" + key + "': invalid integer '" + s + "'");
        return v;
    }

    std::optional<double> opt_num(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return num(key);
    }

    const std::string& raw(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) err("missing field '" + key + "'");
        return it->second;
    }

    [[noreturn]] void err(const std::string& what) const {
        throw ParseError("line " + std::to_string(line_) + ": " + what);
    }

private:
    std::map<std::string, std::string> kv_;
    int line_;
};

}  // namespace

ProblemInstance read_instance(std::istream& is) {
    ProblemInstance inst;
    std::string text;
    int line_no = 0;
    long long declared_n = -1;
    bool have_charger = false;
    bool have_header = false;
    std::map<int, std::size_t> index_of;
    std::map<int, int> node_line;

    while (std::getline(is, text)) {
        ++line_no;
        const auto hash = text.find('#');
        if (hash != std::string::npos) text.resize(hash);
        const auto tokens = split_ws(text);
        if (tokens.empty()) continue;
        const std::string& kind = tokens[0];

        if (!have_header) {
            if (kind != "wrsn-instance" || tokens.size() < 3 || tokens[1] != "v1")
                throw ParseError("line " + std::to_string(line_no) + ": expected header 'wrsn-instance v1 <variant> ...'");
            try {
                inst.variant = parse_variant(tokens[2]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
            }
            Fields f(tokens, 3, line_no);
            declared_n = f.integer("n");
            inst.seed = static_cast<std::uint64_t>(f.integer("seed"));
            have_header = true;
        } else if (kind == "problem") {
            Fields f(tokens, 1, line_no);
            inst.alpha = f.num("alpha");
            inst.epsilon_charge = f.num("epsilon");
            inst.coverage_k = static_cast<int>(f.integer("k"));
            inst.t0 = f.num("t0");
            inst.meet_dt = f.num("meet_dt");
            const auto parts = split(f.raw("area"), ',');
            if (parts.size() != 4) f.err("field 'area': expected x0,y0,x1,y1");
            try {
                inst.area = {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]), parse_double(parts[3])};
            } catch (const ParseError&) {
                f.err("field 'area': invalid number");
            }
        } else if (kind == "charger") {
            Fields f(tokens, 1, line_no);
            auto& ch = inst.charger;
            ch.depot = {f.num("depot_x"), f.num("depot_y")};
            ch.end_point = {f.num("end_x"), f.num("end_y")};
            ch.speed = f.num("speed");
            ch.transfer_rate = f.num("rate");
            ch.travel_energy = f.num("xi");
            ch.energy_capacity = f.opt_num("IE");
            ch.timespan = f.opt_num("C");
            have_charger = true;
        } else if (kind == "node") {
            Fields f(tokens, 1, line_no);
            SensorNode node;
            node.id = static_cast<int>(f.integer("id"));
            node.position = {f.num("x"), f.num("y")};
            node.capacity = f.num("B");
            node.residual = f.num("B0");
            node.consumption = f.num("beta");
            node.sensing_radius = f.opt_num("r");
            node.deadline = f.opt_num("D");
            if (f.has("pi")) node.prize = static_cast<int>(f.integer("pi"));
            if (f.has("vmax")) node.trajectory = MobilityTrace{{}, f.num("vmax")};
            if (node.residual > node.capacity || node.residual < 0)
                throw ValidationError("line " + std::to_string(line_no) + ": node " + std::to_string(node.id) +
                                      ": residual B0 outside [0, B]");
            if (index_of.count(node.id)) f.err("duplicate node id " + std::to_string(node.id));
            index_of[node.id] = inst.nodes.size();
            node_line[node.id] = line_no;
            inst.nodes.push_back(std::move(node));
        } else if (kind == "wp") {
            Fields f(tokens, 1, line_no);
            const int id = static_cast<int>(f.integer("id"));
            auto it = index_of.find(id);
            if (it == index_of.end()) f.err("waypoint for unknown node " + std::to_string(id));
            auto& node = inst.nodes[it->second];
            if (!node.trajectory) f.err("waypoint for node " + std::to_string(id) + " without vmax");
            node.trajectory->waypoints.push_back({f.num("t"), {f.num("x"), f.num("y")}});
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown record '" + kind + "'");
        }
    }

    if (!have_header) throw ParseError("empty input: missing header");
    if (!have_charger) throw ParseError("truncated input: missing charger line");
    if (static_cast<long long>(inst.nodes.size()) != declared_n) {
        throw ParseError("truncated input: header declares n=" + std::to_string(declared_n) + " but " +
                         std::to_string(inst.nodes.size()) + " node lines were read");
    }
    for (const auto& node : inst.nodes) {
        if (node.trajectory && node.trajectory->waypoints.empty())
            throw ParseError("line " + std::to_string(node_line[node.id]) + ": node " + std::to_string(node.id) +
                             " declares vmax but has no waypoints");
    }
    validate(inst);
    return inst;
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path.string() + "' for writing");
    write_instance(os, inst);
    if (!os) throw Error("write to '" + path.string() + "' failed");
}

ProblemInstance load_instance(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path.string() + "'");
    return read_instance(is);
}

}  // namespace wrsn
