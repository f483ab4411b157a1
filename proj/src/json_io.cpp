#include "fim/json_io.hpp"

#include <cmath>
#include <cstdio>

namespace fim::io {

namespace {

double need_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw std::invalid_argument(std::string("missing numeric field '") + field + "'");
    return j[field].get<double>();
}

double number_or(const json& j, const char* field, double fallback) {
    return j.contains(field) ? j[field].get<double>() : fallback;
}

} // namespace

PayoffFn parse_payoff(const json& j) {
    std::string type = j.value("type", "");
    if (type == "call")
        return PayoffFn::call(need_number(j, "K"), number_or(j, "c", 1.0),
                              number_or(j, "delta", 0.0));
    if (type == "put")
        return PayoffFn::put(need_number(j, "K"), number_or(j, "c", 1.0),
                             number_or(j, "delta", 0.0));
    if (type == "power")
        return PayoffFn::power(need_number(j, "p"), number_or(j, "c", 1.0),
                               number_or(j, "delta", 0.0));
    if (type == "tabulated") {
        if (!j.contains("xs") || !j.contains("ys"))
            throw std::invalid_argument("tabulated payoff needs 'xs' and 'ys'");
        return PayoffFn::tabulated(j["xs"].get<std::vector<double>>(),
                                   j["ys"].get<std::vector<double>>());
    }
    throw std::invalid_argument("payoff 'type' must be call, put, power or tabulated");
}

GamePayoffPair parse_pair(const json& j) {
    if (!j.contains("f1") || !j.contains("f2"))
        throw std::invalid_argument("pair needs 'f1' and 'f2'");
    return GamePayoffPair(parse_payoff(j["f1"]), parse_payoff(j["f2"]), number_or(j, "L", 4.0));
}

ModelSpec parse_model(const json& j) {
    std::string type = j.value("type", "");
    double s0 = need_number(j, "s0");
    double T = number_or(j, "T", 1.0);
    double r = number_or(j, "r", 0.0);
    double rho = number_or(j, "rho", -0.5);
    ModelSpec m;
    if (type == "heston") {
        m = ModelSpec::heston(s0, r, T, need_number(j, "kappa"), need_number(j, "theta"),
                              need_number(j, "xi"), rho, need_number(j, "v0"));
    } else if (type == "hullwhite") {
        m = ModelSpec::hull_white(s0, r, T, need_number(j, "kappa"), need_number(j, "theta"), rho,
                                  need_number(j, "u0"));
    } else if (type == "scott") {
        m = ModelSpec::scott(s0, r, T, need_number(j, "lambda"), need_number(j, "kappa"),
                             need_number(j, "theta"), rho, need_number(j, "u0"));
    } else if (type == "roughfou") {
        m = ModelSpec::rough_fou(s0, r, T, need_number(j, "H"), need_number(j, "lambda"),
                                 number_or(j, "kappa_exp", 1.0), rho, need_number(j, "nu0"));
    } else {
        throw std::invalid_argument("model 'type' must be heston, hullwhite, scott or roughfou");
    }
    if (j.contains("rate_schedule")) {
        RateSchedule rs;
        rs.t_end.clear();
        rs.rates.clear();
        for (const auto& seg : j["rate_schedule"]) {
            rs.t_end.push_back(need_number(seg, "until"));
            rs.rates.push_back(need_number(seg, "rate"));
        }
        rs.t_end.back() = kInf;
        m.rate = rs;
    }
    m.validate();
    return m;
}

LatticeSpec parse_lattice(const json& j) {
    LatticeSpec s = LatticeSpec::with_cfl(
        number_or(j, "x_min", 1.0), number_or(j, "x_max", 3000.0),
        static_cast<int>(number_or(j, "n_y", 1200)), number_or(j, "u", 1.0),
        number_or(j, "v_lo", 1e-3), number_or(j, "v_hi", 6.0));
    if (j.contains("n_t")) {
        s.n_t = j["n_t"].get<int>();
        s.validate();
    }
    return s;
}

DiscreteMartingaleLaw parse_law(const json& j) {
    DiscreteMartingaleLaw law;
    law.s0 = need_number(j, "s0");
    law.T = number_or(j, "T", 1.0);
    law.n = static_cast<int>(need_number(j, "n"));
    if (!j.contains("steps")) throw std::invalid_argument("law needs 'steps'");
    for (const auto& step : j["steps"]) {
        std::vector<DiscreteMartingaleLaw::Conditional> conds;
        for (const auto& cj : step["conditionals"]) {
            DiscreteMartingaleLaw::Conditional c;
            c.given = need_number(cj, "given");
            c.support = cj["support"].get<std::vector<double>>();
            c.prob = cj["prob"].get<std::vector<double>>();
            double acc = 0.0;
            for (double p : c.prob) c.cdf.push_back(acc += p);
            conds.push_back(std::move(c));
        }
        law.steps.push_back(std::move(conds));
    }
    law.validate();
    return law;
}

namespace {

void parse_tree_node(const json& j, int parent, std::vector<TreeMarket::Node>& nodes) {
    TreeMarket::Node nd;
    nd.price = need_number(j, "price");
    nd.parent = parent;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(nd);
    if (parent >= 0) nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    if (j.contains("children"))
        for (const auto& ch : j["children"]) parse_tree_node(ch, id, nodes);
}

} // namespace

TreeMarket parse_tree(const json& j) {
    std::vector<TreeMarket::Node> nodes;
    parse_tree_node(j, -1, nodes);
    return TreeMarket::build(std::move(nodes));
}

std::vector<StaticInstrument> parse_statics(const json& j, const TreeMarket& tree) {
    std::vector<StaticInstrument> out;
    if (j.is_null()) return out;
    for (const auto& sj : j) {
        StaticInstrument s;
        s.price = need_number(sj, "price");
        if (sj.contains("payoff")) {
            auto v = sj["payoff"].get<std::vector<double>>();
            if (static_cast<int>(v.size()) != tree.n_paths())
                throw std::invalid_argument("static payoff length must match the path count");
            s.payoff = Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        } else if (sj.contains("call_strike")) {
            s.payoff = terminal_call_payoff(tree, sj["call_strike"].get<double>());
        } else if (sj.contains("put_strike")) {
            s.payoff = terminal_put_payoff(tree, sj["put_strike"].get<double>());
        } else {
            throw std::invalid_argument("static needs 'payoff', 'call_strike' or 'put_strike'");
        }
        out.push_back(std::move(s));
    }
    return out;
}

VectorXd parse_claim(const json& j, const TreeMarket& tree) {
    if (j.contains("payoff")) {
        auto v = j["payoff"].get<std::vector<double>>();
        if (static_cast<int>(v.size()) != tree.n_paths())
            throw std::invalid_argument("claim payoff length must match the path count");
        return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("call_strike")) return terminal_call_payoff(tree, j["call_strike"].get<double>());
    if (j.contains("put_strike")) return terminal_put_payoff(tree, j["put_strike"].get<double>());
    throw std::invalid_argument("claim needs 'payoff', 'call_strike' or 'put_strike'");
}

SteerTarget parse_target(const json& j, double nu0) {
    std::string type = j.value("type", "const");
    if (type == "const") return SteerTarget::constant(nu0);
    if (type == "exp_affine")
        return SteerTarget::exp_affine(nu0, number_or(j, "a", 0.0), number_or(j, "b", 0.0),
                                       number_or(j, "cap", 1.0));
    throw std::invalid_argument("steer target 'type' must be const or exp_affine");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void JsonWriter::comma() {
    if (!first_.empty()) {
        if (!first_.back()) out_ += ",";
        first_.back() = false;
    }
}

JsonWriter& JsonWriter::key(const std::string& k) {
    comma();
    out_ += "\"" + k + "\":";
    if (!first_.empty()) first_.back() = true; // value follows without comma
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(long v) {
    comma();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    comma();
    out_ += "\"" + v + "\"";
    return *this;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += "{";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += "}";
    first_.pop_back();
    if (!first_.empty()) first_.back() = false;
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    out_ += "[";
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += "]";
    first_.pop_back();
    if (!first_.empty()) first_.back() = false;
    return *this;
}

} // namespace fim::io
