#include "ihs/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ihs/canonical.hpp"
#include "ihs/kovalevskaya.hpp"

namespace ihs {

using Json = nlohmann::ordered_json;

namespace {

std::size_t coordinate(const SymbolTable& symbols, const Json& name)
{
    if (!name.is_string()) throw ModelError("bivector entries must name coordinates");
    auto i = symbols.coordinate_index(name.get<std::string>());
    if (!i) throw ModelError("unknown coordinate '" + name.get<std::string>() + "'");
    return *i;
}

Expression expr(const Json& j, const SymbolTable& symbols, const char* what)
{
    if (!j.is_string()) throw ModelError(std::string(what) + " must be an expression string");
    try {
        return parse(j.get<std::string>(), symbols);
    } catch (const ParseError& e) {
        throw ModelError(std::string(what) + ": " + e.what());
    }
}

IntegrableModel from_json(const Json& j)
{
    if (!j.is_object()) throw ModelError("model file must hold a JSON object");
    if (j.contains("canonical")) {
        const Json& c = j["canonical"];
        CanonicalSpec spec;
        spec.r = c.value("r", 0);
        spec.ke = c.value("ke", 0);
        spec.kh = c.value("kh", 0);
        spec.kf = c.value("kf", 0);
        if (spec.r < 0 || spec.ke < 0 || spec.kh < 0 || spec.kf < 0 || spec.n() < 1)
            throw ModelError("invalid canonical shorthand");
        IntegrableModel m = build_canonical(spec).model;
        if (j.contains("name")) m.name = j["name"].get<std::string>();
        return m;
    }

    SymbolTable symbols;
    for (const auto& c : j.at("coordinates")) symbols.coordinates.push_back(c.get<std::string>());
    std::vector<double> params;
    if (j.contains("parameters")) {
        for (const auto& [name, value] : j["parameters"].items()) {
            symbols.parameters.push_back(name);
            params.push_back(value.get<double>());
        }
    }
    std::vector<LeafConstraint> leaf;
    std::vector<Expression> casimirs;
    if (j.contains("casimirs"))
        for (const auto& c : j["casimirs"]) {
            leaf.push_back({expr(c.at("expr"), symbols, "casimir"), expr(c.at("value"), symbols, "casimir value")});
            casimirs.push_back(leaf.back().casimir);
        }

    IntegrableModel m;
    m.name = j.value("name", std::string("model"));
    const Json& poisson = j.at("poisson");
    if (poisson.is_string()) {
        if (poisson.get<std::string>() != "canonical") throw ModelError("poisson must be \"canonical\" or a list");
        if (!casimirs.empty()) throw ModelError("a canonical chart has no Casimirs");
        m.structure = PoissonStructure::canonical(symbols);
    } else {
        std::vector<std::tuple<std::size_t, std::size_t, Expression>> upper;
        for (const auto& e : poisson) {
            if (!e.is_array() || e.size() != 3) throw ModelError("bivector entries are [a, b, expr] triples");
            upper.emplace_back(coordinate(symbols, e[0]), coordinate(symbols, e[1]),
                               expr(e[2], symbols, "bivector entry"));
        }
        m.structure = PoissonStructure::from_entries(symbols, upper, casimirs);
    }
    for (const auto& f : j.at("momentum")) {
        m.momentum_names.push_back(f.at("name").get<std::string>());
        m.momentum.push_back(expr(f.at("expr"), symbols, "momentum component"));
    }
    if (m.momentum.empty()) throw ModelError("model needs at least one momentum component");
    m.leaf = std::move(leaf);
    m.parameters = std::move(params);
    return m;
}

}  // namespace

IntegrableModel parse_model(const std::string& json_text)
{
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ModelError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const Json::exception& e) {
        throw ModelError(std::string("malformed model file: ") + e.what());
    }
}

IntegrableModel load_model_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot read model file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const IntegrableModel& m)
{
    const SymbolTable& s = m.symbols();
    Json j;
    j["name"] = m.name;
    j["coordinates"] = s.coordinates;
    Json params = Json::object();
    for (std::size_t i = 0; i < s.parameters.size(); ++i) params[s.parameters[i]] = m.parameters[i];
    j["parameters"] = params;
    if (m.structure.is_canonical()) {
        j["poisson"] = "canonical";
    } else {
        Json entries = Json::array();
        for (std::size_t a = 0; a < m.dimension(); ++a)
            for (std::size_t b = a + 1; b < m.dimension(); ++b) {
                const Expression& e = m.structure.entry(a, b);
                if (e.is_constant(0.0)) continue;
                entries.push_back(Json::array({s.coordinates[a], s.coordinates[b], to_string(e, s)}));
            }
        j["poisson"] = entries;
    }
    Json casimirs = Json::array();
    for (const auto& c : m.leaf) casimirs.push_back({{"expr", to_string(c.casimir, s)}, {"value", to_string(c.value, s)}});
    j["casimirs"] = casimirs;
    Json momentum = Json::array();
    for (std::size_t i = 0; i < m.n(); ++i)
        momentum.push_back({{"name", m.momentum_names[i]}, {"expr", to_string(m.momentum[i], s)}});
    j["momentum"] = momentum;
    return j.dump(2) + "\n";
}

std::optional<IntegrableModel> builtin_model(const std::string& name, std::optional<double> g)
{
    if (name == "kovalevskaya") return build_kovalevskaya(g.value_or(0.0));
    const std::string prefix = "canonical:";
    if (name.rfind(prefix, 0) == 0) return build_canonical(parse_canonical_spec(name.substr(prefix.size()))).model;
    return std::nullopt;
}

IntegrableModel resolve_model(const std::string& reference, std::optional<double> g)
{
    if (auto m = builtin_model(reference, g)) return *m;
    IntegrableModel m = load_model_file(reference);
    if (g) m.set_parameter("g", *g);
    return m;
}

}  // namespace ihs
