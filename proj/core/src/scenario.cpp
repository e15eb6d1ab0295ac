#include "ionrabi/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ionrabi/errors.hpp"

namespace ionrabi {

namespace {

int line_of(const YAML::Node& node)
{
    const auto mark = node.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

std::string join(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_map(const YAML::Node& node, const std::string& path)
{
    if (!node.IsMap())
        throw SchemaError("expected a mapping", line_of(node), path);
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& path)
{
    for (auto it = map.begin(); it != map.end(); ++it) {
        const auto key = it->first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw SchemaError("unknown key", line_of(it->first), join(path, key));
    }
}

template <typename T>
T convert(const YAML::Node& node, const std::string& path)
{
    if (!node.IsScalar())
        throw SchemaError("expected a scalar value", line_of(node), path);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw SchemaError("cannot read value '" + node.Scalar() + "'", line_of(node), path);
    }
}

template <typename T>
T required(const YAML::Node& map, std::string_view key, const std::string& path)
{
    const YAML::Node node = map[std::string(key)];
    if (!node)
        throw SchemaError("missing required key", line_of(map), join(path, key));
    return convert<T>(node, join(path, key));
}

template <typename T>
T optional_value(const YAML::Node& map, std::string_view key, const std::string& path, T fallback)
{
    const YAML::Node node = map[std::string(key)];
    if (!node)
        return fallback;
    return convert<T>(node, join(path, key));
}

Qubit parse_qubit(const YAML::Node& node, const std::string& path)
{
    const auto s = convert<std::string>(node, path);
    if (s == "down" || s == "g")
        return Qubit::down;
    if (s == "up" || s == "e")
        return Qubit::up;
    throw SchemaError("qubit must be one of down, up, g, e", line_of(node), path);
}

ModelConfig parse_model(const YAML::Node& node)
{
    const std::string path = "model";
    require_map(node, path);
    check_keys(node,
               {"kind", "eta", "eta_barrier", "g", "omega_R", "omega0_R", "Omega", "nu", "delta_r",
                "delta_b", "phi_r", "phi_b"},
               path);
    ModelConfig m;
    const YAML::Node kind = node["kind"];
    if (!kind)
        throw SchemaError("missing required key", line_of(node), "model.kind");
    try {
        m.kind = model_kind_from_string(convert<std::string>(kind, "model.kind"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what(), line_of(kind), "model.kind");
    }
    m.eta = optional_value(node, "eta", path, 0.0);
    if (node["eta_barrier"])
        m.eta_barrier = convert<int>(node["eta_barrier"], "model.eta_barrier");
    m.g = optional_value(node, "g", path, 0.0);
    m.omega_R = optional_value(node, "omega_R", path, 0.0);
    m.omega0_R = optional_value(node, "omega0_R", path, 0.0);
    m.Omega = optional_value(node, "Omega", path, 0.0);
    m.nu = optional_value(node, "nu", path, 0.0);
    m.delta_r = optional_value(node, "delta_r", path, 0.0);
    m.delta_b = optional_value(node, "delta_b", path, 0.0);
    m.phi_r = optional_value(node, "phi_r", path, 0.0);
    m.phi_b = optional_value(node, "phi_b", path, 0.0);

    if (m.kind == ModelKind::TwoTone) {
        if (!node["Omega"])
            throw SchemaError("TwoTone needs Omega", line_of(node), "model.Omega");
    } else if (!node["g"]) {
        throw SchemaError("missing required key", line_of(node), "model.g");
    }
    if (is_nonlinear(m.kind) && !node["eta"])
        throw SchemaError("nonlinear models need eta", line_of(node), "model.eta");
    return m;
}

InitialConfig parse_initial(const YAML::Node& node)
{
    const std::string path = "initial";
    require_map(node, path);
    check_keys(node, {"qubit", "fock", "coherent", "thermal"}, path);
    InitialConfig init;
    if (node["qubit"])
        init.qubit = parse_qubit(node["qubit"], "initial.qubit");

    const int given = (node["fock"] ? 1 : 0) + (node["coherent"] ? 1 : 0) + (node["thermal"] ? 1 : 0);
    if (given != 1)
        throw SchemaError("exactly one of fock, coherent, thermal is required", line_of(node), path);

    if (node["fock"]) {
        init.kind = InitialKind::fock;
        init.n = convert<int>(node["fock"], "initial.fock");
        if (init.n < 0)
            throw SchemaError("Fock index must be >= 0", line_of(node["fock"]), "initial.fock");
    } else if (node["coherent"]) {
        init.kind = InitialKind::coherent;
        const YAML::Node a = node["coherent"];
        if (a.IsSequence()) {
            if (a.size() != 2)
                throw SchemaError("coherent amplitude must be a number or [re, im]", line_of(a),
                                  "initial.coherent");
            init.alpha = {convert<double>(a[0], "initial.coherent[0]"),
                          convert<double>(a[1], "initial.coherent[1]")};
        } else {
            init.alpha = convert<double>(a, "initial.coherent");
        }
    } else {
        init.kind = InitialKind::thermal;
        init.nbar = convert<double>(node["thermal"], "initial.thermal");
        if (!(init.nbar >= 0.0))
            throw SchemaError("mean phonon number must be >= 0", line_of(node["thermal"]), "initial.thermal");
    }
    return init;
}

Scenario parse_root(const YAML::Node& root)
{
    if (!root || root.IsNull())
        throw SchemaError("scenario is empty");
    require_map(root, "");
    check_keys(root,
               {"schema_version", "name", "model", "initial", "lindblad", "times", "outputs", "truncation"},
               "");

    Scenario s;
    s.schema_version = required<int>(root, "schema_version", "");
    if (s.schema_version != kSchemaVersion)
        throw SchemaError("unsupported schema_version " + std::to_string(s.schema_version) +
                              " (this build reads " + std::to_string(kSchemaVersion) + ")",
                          line_of(root["schema_version"]), "schema_version");
    s.name = required<std::string>(root, "name", "");
    if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
        throw SchemaError("name must be non-empty and contain no path separators", line_of(root["name"]), "name");

    if (!root["model"])
        throw SchemaError("missing required key", line_of(root), "model");
    s.model = parse_model(root["model"]);
    if (!root["initial"])
        throw SchemaError("missing required key", line_of(root), "initial");
    s.initial = parse_initial(root["initial"]);

    if (const YAML::Node l = root["lindblad"]) {
        require_map(l, "lindblad");
        check_keys(l, {"gamma_ratio"}, "lindblad");
        s.gamma_ratio = required<double>(l, "gamma_ratio", "lindblad");
        if (!(*s.gamma_ratio >= 0.0))
            throw SchemaError("gamma_ratio must be >= 0", line_of(l["gamma_ratio"]), "lindblad.gamma_ratio");
        if (s.model.kind == ModelKind::TwoTone)
            throw SchemaError("dissipation is not supported for the TwoTone model", line_of(l), "lindblad");
    }

    if (!root["times"])
        throw SchemaError("missing required key", line_of(root), "times");
    {
        const YAML::Node t = root["times"];
        require_map(t, "times");
        check_keys(t, {"t_end", "n_points"}, "times");
        s.times.t_end = required<double>(t, "t_end", "times");
        s.times.n_points = required<int>(t, "n_points", "times");
        if (!(s.times.t_end >= 0.0))
            throw SchemaError("t_end must be >= 0", line_of(t["t_end"]), "times.t_end");
        if (s.times.n_points < 1)
            throw SchemaError("n_points must be >= 1", line_of(t["n_points"]), "times.n_points");
    }

    if (const YAML::Node o = root["outputs"]) {
        require_map(o, "outputs");
        check_keys(o, {"observables", "snapshot_times"}, "outputs");
        if (const YAML::Node obs = o["observables"]) {
            if (!obs.IsSequence())
                throw SchemaError("expected a list", line_of(obs), "outputs.observables");
            s.outputs.observables.clear();
            for (const auto& item : obs) {
                const auto name = convert<std::string>(item, "outputs.observables");
                if (std::find(kAllObservables.begin(), kAllObservables.end(), name) == kAllObservables.end())
                    throw SchemaError("unknown observable '" + name + "'", line_of(item), "outputs.observables");
                s.outputs.observables.push_back(name);
            }
        }
        if (const YAML::Node snaps = o["snapshot_times"]) {
            if (!snaps.IsSequence())
                throw SchemaError("expected a list", line_of(snaps), "outputs.snapshot_times");
            for (const auto& item : snaps) {
                const double t = convert<double>(item, "outputs.snapshot_times");
                if (!(t >= 0.0) || t > s.times.t_end)
                    throw SchemaError("snapshot time outside [0, t_end]", line_of(item), "outputs.snapshot_times");
                s.outputs.snapshot_times.push_back(t);
            }
        }
    }

    if (const YAML::Node tr = root["truncation"]) {
        s.truncation = convert<int>(tr, "truncation");
        if (*s.truncation < 1)
            throw SchemaError("truncation must be >= 1", line_of(tr), "truncation");
    }
    return s;
}

std::string qubit_name(Qubit q)
{
    return q == Qubit::down ? "down" : "up";
}

} // namespace

Scenario parse_scenario_text(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw SchemaError(e.msg, e.mark.line + 1);
    }
    return parse_root(root);
}

Scenario parse_scenario(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw SchemaError("cannot read scenario file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string emit_scenario(const Scenario& s)
{
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << s.schema_version;
    out << YAML::Key << "name" << YAML::Value << s.name;

    out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.model.kind));
    const auto field = [&](const char* key, double v) {
        if (v != 0.0)
            out << YAML::Key << key << YAML::Value << v;
    };
    if (s.model.eta != 0.0 || is_nonlinear(s.model.kind))
        out << YAML::Key << "eta" << YAML::Value << s.model.eta;
    if (s.model.eta_barrier)
        out << YAML::Key << "eta_barrier" << YAML::Value << *s.model.eta_barrier;
    if (s.model.kind != ModelKind::TwoTone)
        out << YAML::Key << "g" << YAML::Value << s.model.g;
    else
        field("g", s.model.g);
    field("omega_R", s.model.omega_R);
    field("omega0_R", s.model.omega0_R);
    if (s.model.kind == ModelKind::TwoTone)
        out << YAML::Key << "Omega" << YAML::Value << s.model.Omega;
    else
        field("Omega", s.model.Omega);
    field("nu", s.model.nu);
    field("delta_r", s.model.delta_r);
    field("delta_b", s.model.delta_b);
    field("phi_r", s.model.phi_r);
    field("phi_b", s.model.phi_b);
    out << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "qubit" << YAML::Value << qubit_name(s.initial.qubit);
    switch (s.initial.kind) {
    case InitialKind::fock:
        out << YAML::Key << "fock" << YAML::Value << s.initial.n;
        break;
    case InitialKind::coherent:
        out << YAML::Key << "coherent" << YAML::Value << YAML::Flow << YAML::BeginSeq
            << s.initial.alpha.real() << s.initial.alpha.imag() << YAML::EndSeq;
        break;
    case InitialKind::thermal:
        out << YAML::Key << "thermal" << YAML::Value << s.initial.nbar;
        break;
    }
    out << YAML::EndMap;

    if (s.gamma_ratio) {
        out << YAML::Key << "lindblad" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "gamma_ratio" << YAML::Value << *s.gamma_ratio;
        out << YAML::EndMap;
    }

    out << YAML::Key << "times" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t_end" << YAML::Value << s.times.t_end;
    out << YAML::Key << "n_points" << YAML::Value << s.times.n_points;
    out << YAML::EndMap;

    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "observables" << YAML::Value << YAML::Flow << s.outputs.observables;
    out << YAML::Key << "snapshot_times" << YAML::Value << YAML::Flow << s.outputs.snapshot_times;
    out << YAML::EndMap;

    if (s.truncation)
        out << YAML::Key << "truncation" << YAML::Value << *s.truncation;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

ModelSpec physical_model(const Scenario& s)
{
    const ModelConfig& m = s.model;
    ModelSpec spec;
    spec.kind = m.kind;
    spec.eta = m.eta;
    if (m.eta_barrier) {
        double refined = 0.0;
        try {
            refined = barrier_eta(*m.eta_barrier, {std::max(0.0, m.eta - 5e-3), m.eta + 5e-3});
        } catch (const NoSignChange&) {
            throw SchemaError("no zero of f1(" + std::to_string(*m.eta_barrier) + ", eta) near eta = " +
                                  std::to_string(m.eta),
                              0, "model.eta_barrier");
        }
        if (std::abs(refined - m.eta) > 5e-4)
            throw SchemaError("eta differs from the f1 zero " + std::to_string(refined) + " by more than 5e-4",
                              0, "model.eta");
        spec.eta = refined;
    }
    spec.g = m.g * kFrequencyUnit;
    spec.omega_R = m.omega_R * kFrequencyUnit;
    spec.omega0_R = m.omega0_R * kFrequencyUnit;
    spec.Omega = m.Omega * kFrequencyUnit;
    spec.nu = m.nu * kFrequencyUnit;
    spec.delta_r = m.delta_r * kFrequencyUnit;
    spec.delta_b = m.delta_b * kFrequencyUnit;
    spec.phi_r = m.phi_r;
    spec.phi_b = m.phi_b;

    if (spec.kind == ModelKind::TwoTone) {
        if (spec.nu == 0.0)
            spec.nu = kDefaultTrapFrequency;
        const double derived = 0.5 * spec.eta * spec.Omega;
        if (spec.g != 0.0 && std::abs(spec.g - derived) > 1e-9 * std::abs(derived))
            throw SchemaError("g is inconsistent with eta * Omega / 2", 0, "model.g");
        spec.g = derived;
        const auto sim = simulated_frequencies(spec.delta_r, spec.delta_b);
        spec.omega_R = sim.omega_R;
        spec.omega0_R = sim.omega0_R;
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what(), 0, "model");
    }
    return spec;
}

double scenario_coupling(const Scenario& s)
{
    const double g = coupling_strength(physical_model(s));
    if (!(g > 0.0))
        throw SchemaError("times are measured in units of 2 pi / g, so g must be > 0", 0, "model.g");
    return g;
}

int scenario_truncation(const Scenario& s)
{
    if (s.truncation)
        return *s.truncation;
    const ModelSpec spec = physical_model(s);
    const int barrier = s.model.eta_barrier.value_or(0);
    const double alpha_abs = s.initial.kind == InitialKind::coherent ? std::abs(s.initial.alpha) : 0.0;
    double g_over_omega = 0.0;
    if ((spec.kind == ModelKind::QRM || spec.kind == ModelKind::NonlinearQRM || spec.kind == ModelKind::TwoTone) &&
        spec.omega_R != 0.0)
        g_over_omega = coupling_strength(spec) / std::abs(spec.omega_R);

    int n = default_truncation(barrier, alpha_abs, g_over_omega);
    switch (s.initial.kind) {
    case InitialKind::fock:
        n = std::max(n, s.initial.n + 1);
        break;
    case InitialKind::coherent:
        n = std::max(n, coherent_truncation(alpha_abs));
        break;
    case InitialKind::thermal:
        if (s.initial.nbar > 0.0) {
            const double q = s.initial.nbar / (s.initial.nbar + 1.0);
            n = std::max(n, static_cast<int>(std::ceil(std::log(1e-10) / std::log(q))));
        }
        break;
    }
    return n;
}

QuantumState initial_state(const Scenario& s, const HilbertSpace& space)
{
    switch (s.initial.kind) {
    case InitialKind::fock:
        return fock_state(space, s.initial.n, s.initial.qubit);
    case InitialKind::coherent:
        return coherent_state(space, s.initial.alpha, s.initial.qubit);
    case InitialKind::thermal:
        break;
    }
    return thermal_state(space, s.initial.nbar, s.initial.qubit);
}

void set_scenario_value(Scenario& s, std::string_view key, double value)
{
    const auto as_int = [&] {
        if (value != std::floor(value))
            throw SchemaError("value " + std::to_string(value) + " is not an integer", 0, std::string(key));
        return static_cast<int>(value);
    };
    ModelConfig& m = s.model;
    if (key == "model.eta") m.eta = value;
    else if (key == "model.eta_barrier") m.eta_barrier = as_int();
    else if (key == "model.g") m.g = value;
    else if (key == "model.omega_R") m.omega_R = value;
    else if (key == "model.omega0_R") m.omega0_R = value;
    else if (key == "model.Omega") m.Omega = value;
    else if (key == "model.nu") m.nu = value;
    else if (key == "model.delta_r") m.delta_r = value;
    else if (key == "model.delta_b") m.delta_b = value;
    else if (key == "model.phi_r") m.phi_r = value;
    else if (key == "model.phi_b") m.phi_b = value;
    else if (key == "initial.fock") s.initial.n = as_int();
    else if (key == "initial.coherent") s.initial.alpha = value;
    else if (key == "initial.thermal") s.initial.nbar = value;
    else if (key == "lindblad.gamma_ratio") s.gamma_ratio = value;
    else if (key == "times.t_end") s.times.t_end = value;
    else if (key == "times.n_points") s.times.n_points = as_int();
    else if (key == "truncation") s.truncation = as_int();
    else throw SchemaError("parameter cannot be swept", 0, std::string(key));
}

} // namespace ionrabi
