#pragma once

#include "fim/lawdensity.hpp"
#include "fim/models.hpp"
#include "fim/payoff.hpp"
#include "fim/semistatic.hpp"
#include "fim/steering.hpp"
#include "fim/stopvalue.hpp"

#include <json.hpp>

#include <string>

namespace fim::io {

using nlohmann::json;

PayoffFn parse_payoff(const json& j);
GamePayoffPair parse_pair(const json& j);
ModelSpec parse_model(const json& j);
LatticeSpec parse_lattice(const json& j);
DiscreteMartingaleLaw parse_law(const json& j);
TreeMarket parse_tree(const json& j);
std::vector<StaticInstrument> parse_statics(const json& j, const TreeMarket& tree);
VectorXd parse_claim(const json& j, const TreeMarket& tree);
SteerTarget parse_target(const json& j, double nu0);

// Deterministic emission: insertion-ordered keys, doubles at 17 significant
// digits so every value round-trips.
class JsonWriter {
  public:
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(long v);
    JsonWriter& value(int v) { return value(static_cast<long>(v)); }
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    std::string str() const { return out_; }

  private:
    void comma();
    std::string out_;
    std::vector<bool> first_{};
};

std::string format_double(double v); // %.17g with inf/nan mapped to strings

} // namespace fim::io
