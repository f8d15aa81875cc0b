#include "hiercon/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ios>
#include <set>
#include <sstream>

namespace hiercon {

namespace {

// Cursor into the document that remembers where it is for error messages.
class Node {
public:
    Node(const Json& j, std::string where) : j_(j), where_(std::move(where)) {}

    [[nodiscard]] const std::string& where() const { return where_; }
    [[nodiscard]] const Json& raw() const { return j_; }

    [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(where_, msg); }

    void require_object(const std::set<std::string>& allowed) const {
        if (!j_.is_object()) {
            fail("expected an object");
        }
        for (const auto& [key, value] : j_.items()) {
            if (!allowed.contains(key)) {
                throw SchemaError(where_ + "/" + key, "unknown field");
            }
        }
    }

    [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

    [[nodiscard]] Node at(const std::string& key) const {
        if (!j_.contains(key)) {
            throw SchemaError(where_ + "/" + key, "missing required field");
        }
        return {j_.at(key), where_ + "/" + key};
    }

    [[nodiscard]] std::vector<Node> elements() const {
        if (!j_.is_array()) {
            fail("expected an array");
        }
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) {
            out.emplace_back(j_.at(i), where_ + "/" + std::to_string(i));
        }
        return out;
    }

    [[nodiscard]] double number() const {
        if (!j_.is_number()) {
            fail("expected a number");
        }
        return j_.get<double>();
    }

    [[nodiscard]] std::size_t positive_integer() const {
        if (j_.is_number_unsigned() || j_.is_number_integer()) {
            const auto v = j_.get<long long>();
            if (v >= 1) {
                return static_cast<std::size_t>(v);
            }
        }
        fail("expected a positive integer");
    }

    [[nodiscard]] bool boolean() const {
        if (!j_.is_boolean()) {
            fail("expected true or false");
        }
        return j_.get<bool>();
    }

    [[nodiscard]] std::string string() const {
        if (!j_.is_string()) {
            fail("expected a string");
        }
        return j_.get<std::string>();
    }

    [[nodiscard]] std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& e : elements()) {
            out.push_back(e.number());
        }
        return out;
    }

private:
    const Json& j_;
    std::string where_;
};

GroupSpec parse_group(const Node& n) {
    n.require_object({"size", "edges", "edge_weights"});
    GroupSpec g;
    g.size = n.at("size").positive_integer();
    if (n.has("edges")) {
        for (const auto& e : n.at("edges").elements()) {
            const auto ends = e.elements();
            if (ends.size() != 2) {
                e.fail("an edge is a pair [q, r]");
            }
            g.edges.push_back({ends[0].positive_integer() - 1, ends[1].positive_integer() - 1, 1.0});
        }
    }
    if (n.has("edge_weights")) {
        const auto w = n.at("edge_weights");
        const auto values = w.numbers();
        if (values.size() != g.edges.size()) {
            w.fail("expected " + std::to_string(g.edges.size()) + " weights, one per edge");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            g.edges[i].weight = values[i];
        }
    }
    return g;
}

LayerSpec parse_layer(const Node& n) {
    n.require_object({"groups", "collecting"});
    LayerSpec layer;
    for (const auto& g : n.at("groups").elements()) {
        layer.groups.push_back(parse_group(g));
    }
    if (n.has("collecting")) {
        std::vector<std::vector<double>> rows;
        for (const auto& row : n.at("collecting").elements()) {
            rows.push_back(row.numbers());
        }
        layer.collecting = std::move(rows);
    }
    return layer;
}

GeneratorFleet parse_fleet(const Node& root) {
    GeneratorFleet fleet;
    for (const auto& g : root.at("generators").elements()) {
        g.require_object({"p_max", "p_init"});
        fleet.generators.push_back({g.at("p_max").number(), g.at("p_init").number()});
    }
    if (root.has("demand")) {
        fleet.demand = root.at("demand").number();
    }
    return fleet;
}

SimBlock parse_sim(const Node& n) {
    n.require_object(
        {"step", "t_end", "tolerance", "sample_stride", "window_fraction", "align_activation", "initial_state"});
    SimBlock s;
    if (n.has("step")) {
        s.step = n.at("step").number();
    }
    if (n.has("t_end")) {
        s.t_end = n.at("t_end").number();
    }
    if (n.has("tolerance")) {
        s.tolerance = n.at("tolerance").number();
    }
    if (n.has("sample_stride")) {
        s.sample_stride = n.at("sample_stride").positive_integer();
    }
    if (n.has("window_fraction")) {
        s.window_fraction = n.at("window_fraction").number();
    }
    if (n.has("align_activation")) {
        s.align_activation = n.at("align_activation").boolean();
    }
    if (n.has("initial_state")) {
        s.initial_state = n.at("initial_state").numbers();
    }
    return s;
}

OutputBlock parse_output(const Node& n) {
    n.require_object({"csv", "report"});
    OutputBlock o;
    if (n.has("csv")) {
        o.csv = n.at("csv").string();
    }
    if (n.has("report")) {
        o.report = n.at("report").string();
    }
    return o;
}

Json complex_pair(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

}  // namespace

Scenario parse_scenario(const Json& doc) {
    const Node root(doc, "");
    root.require_object({"name", "description", "M", "layers", "physical_weights", "hop_delays", "generators",
                         "demand", "sim", "output"});
    Scenario s;
    if (root.has("name")) {
        s.name = root.at("name").string();
    }
    if (root.has("description")) {
        s.description = root.at("description").string();
    }
    for (const auto& l : root.at("layers").elements()) {
        s.spec.layers.push_back(parse_layer(l));
    }
    if (root.has("M") && root.at("M").positive_integer() != s.spec.layers.size()) {
        root.at("M").fail("M disagrees with the number of layers");
    }
    if (root.has("hop_delays")) {
        s.spec.hop_delays = root.at("hop_delays").numbers();
    }
    if (root.has("generators")) {
        s.fleet = parse_fleet(root);
    } else if (root.has("demand")) {
        root.at("demand").fail("demand given without generators");
    }
    if (root.has("physical_weights")) {
        s.spec.physical_weights = root.at("physical_weights").numbers();
    } else if (s.fleet) {
        for (const auto& g : s.fleet->generators) {
            s.spec.physical_weights.push_back(g.p_max);
        }
    } else {
        throw SchemaError("/physical_weights", "missing required field (or give generators)");
    }
    if (root.has("sim")) {
        s.sim = parse_sim(root.at("sim"));
    }
    if (root.has("output")) {
        s.output = parse_output(root.at("output"));
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(path + ": malformed JSON: " + e.what());
    }
    return parse_scenario(doc);
}

Json to_json(const Scenario& s) {
    Json out = Json::object();
    if (s.name) {
        out["name"] = *s.name;
    }
    if (s.description) {
        out["description"] = *s.description;
    }
    out["M"] = s.spec.layers.size();
    Json layers = Json::array();
    for (const auto& layer : s.spec.layers) {
        Json groups = Json::array();
        for (const auto& g : layer.groups) {
            Json jg = Json::object();
            jg["size"] = g.size;
            Json edges = Json::array();
            Json weights = Json::array();
            bool weighted = false;
            for (const auto& e : g.edges) {
                edges.push_back(Json::array({e.a + 1, e.b + 1}));
                weights.push_back(e.weight);
                weighted = weighted || e.weight != 1.0;
            }
            jg["edges"] = std::move(edges);
            if (weighted) {
                jg["edge_weights"] = std::move(weights);
            }
            groups.push_back(std::move(jg));
        }
        Json jl = Json::object();
        jl["groups"] = std::move(groups);
        if (layer.collecting) {
            jl["collecting"] = *layer.collecting;
        }
        layers.push_back(std::move(jl));
    }
    out["layers"] = std::move(layers);
    out["physical_weights"] = s.spec.physical_weights;
    out["hop_delays"] = s.spec.hop_delays;
    if (s.fleet) {
        Json gens = Json::array();
        for (const auto& g : s.fleet->generators) {
            gens.push_back(Json{{"p_max", g.p_max}, {"p_init", g.p_init}});
        }
        out["generators"] = std::move(gens);
        if (s.fleet->demand) {
            out["demand"] = *s.fleet->demand;
        }
    }
    if (s.sim) {
        Json sim = Json::object();
        const auto& b = *s.sim;
        if (b.step) sim["step"] = *b.step;
        if (b.t_end) sim["t_end"] = *b.t_end;
        if (b.tolerance) sim["tolerance"] = *b.tolerance;
        if (b.sample_stride) sim["sample_stride"] = *b.sample_stride;
        if (b.window_fraction) sim["window_fraction"] = *b.window_fraction;
        if (b.align_activation) sim["align_activation"] = *b.align_activation;
        if (b.initial_state) sim["initial_state"] = *b.initial_state;
        out["sim"] = std::move(sim);
    }
    if (s.output) {
        Json o = Json::object();
        if (s.output->csv) o["csv"] = *s.output->csv;
        if (s.output->report) o["report"] = *s.output->report;
        out["output"] = std::move(o);
    }
    return out;
}

ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport out = validate(s.spec);
    auto add = [&](std::string field, std::string msg) {
        out.push_back({std::nullopt, std::nullopt, std::move(field), std::move(msg)});
    };
    const auto n = s.spec.physical_count();
    if (s.fleet) {
        try {
            validate_fleet(*s.fleet);
        } catch (const DomainError& e) {
            add("generators", e.what());
        }
        const auto& gens = s.fleet->generators;
        if (gens.size() != n) {
            add("generators", std::to_string(gens.size()) + " generators for " + std::to_string(n) +
                                  " physical nodes");
        } else if (s.spec.physical_weights.size() == n) {
            for (std::size_t i = 0; i < n; ++i) {
                const double a = s.spec.physical_weights[i];
                const double p = gens[i].p_max;
                if (std::abs(a - p) > 1e-12 * std::max(1.0, std::abs(p))) {
                    add("physical_weights", "weight " + std::to_string(i + 1) + " differs from the generator's p_max");
                }
            }
        }
    }
    if (s.sim) {
        const auto& b = *s.sim;
        auto positive = [&](const std::optional<double>& v, const char* field) {
            if (v && !(*v > 0.0 && std::isfinite(*v))) {
                add(std::string("sim.") + field, "must be a positive number");
            }
        };
        positive(b.step, "step");
        positive(b.t_end, "t_end");
        positive(b.tolerance, "tolerance");
        if (b.window_fraction && !(*b.window_fraction > 0.0 && *b.window_fraction <= 0.5)) {
            add("sim.window_fraction", "must lie in (0, 0.5]");
        }
        if (b.initial_state) {
            if (b.initial_state->size() != n) {
                add("sim.initial_state", "expected " + std::to_string(n) + " entries, got " +
                                             std::to_string(b.initial_state->size()));
            }
            for (double v : *b.initial_state) {
                if (!std::isfinite(v)) {
                    add("sim.initial_state", "entries must be finite");
                    break;
                }
            }
        }
    }
    return out;
}

Vector initial_state(const Scenario& s, std::string* source) {
    auto set = [&](const char* text) {
        if (source) {
            *source = text;
        }
    };
    if (s.sim && s.sim->initial_state) {
        set("sim.initial_state");
        return Eigen::Map<const Vector>(s.sim->initial_state->data(),
                                        static_cast<Eigen::Index>(s.sim->initial_state->size()));
    }
    if (s.fleet) {
        set("generator output ratios");
        return build_scenario(*s.fleet, s.spec).x0;
    }
    set("default ramp x_i = i / N");
    const auto n = static_cast<Eigen::Index>(s.spec.physical_count());
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return x;
}

SimOptions sim_options(const Scenario& s) {
    SimOptions o;
    if (!s.sim) {
        return o;
    }
    const auto& b = *s.sim;
    o.step = b.step;
    o.t_end = b.t_end.value_or(o.t_end);
    o.convergence_tol = b.tolerance.value_or(o.convergence_tol);
    o.sample_stride = b.sample_stride.value_or(o.sample_stride);
    o.window_fraction = b.window_fraction.value_or(o.window_fraction);
    o.align_activation = b.align_activation.value_or(o.align_activation);
    return o;
}

Json to_json(const SpectralReport& r) {
    Json out = Json::object();
    Json layers = Json::array();
    for (const auto& ev : r.layer_eigenvalues) {
        layers.push_back(vector_json(ev));
    }
    out["layer_eigenvalues"] = std::move(layers);
    out["lambda_max"] = r.lambda_max;
    Json full = Json::array();
    for (const auto& z : r.full_spectrum) {
        full.push_back(complex_pair(z));
    }
    out["full_spectrum"] = std::move(full);
    out["zero_count"] = r.zero_count;
    out["union_check"] = Json{{"passed", r.union_result.passed},
                              {"tolerance", r.union_result.tolerance},
                              {"worst_distance", r.union_result.worst_distance}};
    out["consensus_weights"] = vector_json(r.consensus_weights);
    out["consensus_value"] = r.consensus_value ? Json(*r.consensus_value) : Json(nullptr);
    return out;
}

Json to_json(const DelayStabilityReport& r) {
    Json out = Json::object();
    out["effective_delays"] = r.effective_delays;
    Json layers = Json::array();
    for (const auto& b : r.layers) {
        Json jl = Json::object();
        jl["layer"] = b.layer + 1;
        jl["lambda_max"] = b.lambda_max;
        jl["cumulative_delay"] = b.cumulative_delay;
        jl["effective_delay"] = b.effective_delay;
        jl["bound"] = b.bound ? Json(*b.bound) : Json(nullptr);
        jl["margin"] = b.margin ? Json(*b.margin) : Json(nullptr);
        jl["rightmost_root"] = b.rightmost_root ? complex_pair(*b.rightmost_root) : Json(nullptr);
        layers.push_back(std::move(jl));
    }
    out["layers"] = std::move(layers);
    out["verdict"] = to_string(r.verdict);
    out["binding_layer"] = r.binding_layer ? Json(*r.binding_layer + 1) : Json(nullptr);
    Json binding = Json::array();
    for (auto l : r.binding_layers) {
        binding.push_back(l + 1);
    }
    out["binding_layers"] = std::move(binding);
    return out;
}

Json to_json(const Classification& c) {
    Json out = Json::object();
    out["regime"] = to_string(c.regime);
    out["consensus"] = c.consensus;
    out["last_window_max_deviation"] = c.last_window_max_deviation;
    out["previous_window_max_deviation"] = c.previous_window_max_deviation;
    out["last_window_amplitude"] = c.last_window_amplitude;
    out["previous_window_amplitude"] = c.previous_window_amplitude;
    if (!c.note.empty()) {
        out["note"] = c.note;
    }
    return out;
}

Json to_json(const PowerReport& r) {
    Json out = Json::object();
    out["final_ratio"] = vector_json(r.final_ratio);
    out["final_powers"] = vector_json(r.final_powers);
    out["balance_max_dev"] = r.balance_max_dev;
    out["classification"] = to_json(r.classification);
    return out;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    const auto n = traj.states.empty() ? 0 : traj.states.front().size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) {
        os << ",x" << (i + 1);
    }
    os << ",conservation\n";
    const auto old_precision = os.precision(12);
    const auto old_flags = os.flags();
    os.unsetf(std::ios::floatfield);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << traj.times[k];
        for (Eigen::Index i = 0; i < n; ++i) {
            os << ',' << traj.states[k](i);
        }
        os << ',' << traj.conservation[k] << '\n';
    }
    os.precision(old_precision);
    os.flags(old_flags);
}

}  // namespace hiercon
