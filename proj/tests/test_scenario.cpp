#include <doctest.h>

#include <cmath>
#include <random>

#include "ionrabi/errors.hpp"
#include "ionrabi/scenario.hpp"

using namespace ionrabi;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(IONRABI_SOURCE_DIR) / "scenarios";

const char* kMinimal = R"(schema_version: 1
name: t
model:
  kind: JC
  g: 10
initial:
  fock: 2
times:
  t_end: 1
  n_points: 5
)";

int error_line(const std::string& text)
{
    try {
        parse_scenario_text(text);
    } catch (const SchemaError& e) {
        return e.line();
    }
    return -1;
}

std::string error_key(const std::string& text)
{
    try {
        parse_scenario_text(text);
    } catch (const SchemaError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST_SUITE("scenario")
{
    TEST_CASE("fig4 golden file")
    {
        const Scenario s = parse_scenario(kScenarios / "fig4.scenario");
        CHECK(s.model.kind == ModelKind::NonlinearQRM);
        CHECK(s.model.eta == 0.67898);
        CHECK(s.model.g / s.model.omega_R == doctest::Approx(4.0));
        CHECK(s.model.omega0_R == 0.0);
        CHECK(s.initial.kind == InitialKind::fock);
        CHECK(s.initial.n == 0);
        CHECK(s.initial.qubit == Qubit::down);

        const ModelSpec m = physical_model(s);
        CHECK(std::abs(m.eta - barrier_eta(7)) < 1e-15);
        CHECK(m.g == doctest::Approx(2.0 * M_PI * 45.24e3));
        CHECK(m.omega_R == doctest::Approx(2.0 * M_PI * 11.31e3));
        CHECK(scenario_truncation(s) == 84);
    }

    TEST_CASE("fig3 golden file")
    {
        const Scenario s = parse_scenario(kScenarios / "fig3.scenario");
        CHECK(s.model.kind == ModelKind::NonlinearAntiJC);
        CHECK(s.model.eta == 0.4518);
        REQUIRE(s.gamma_ratio.has_value());
        CHECK(*s.gamma_ratio == 2.0);
        CHECK(s.initial.kind == InitialKind::thermal);
        CHECK(s.initial.nbar == 1.0);
        CHECK(s.times.t_end == 100.0);
        CHECK(scenario_truncation(s) == 40);
    }

    TEST_CASE("round trip of every golden file")
    {
        for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
            CAPTURE(entry.path().string());
            const Scenario s = parse_scenario(entry.path());
            const std::string text = emit_scenario(s);
            CHECK(parse_scenario_text(text) == s);
            CHECK(emit_scenario(parse_scenario_text(text)) == text);
        }
    }

    TEST_CASE("round trip of random scenarios (property)")
    {
        std::mt19937 rng(314);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int trial = 0; trial < 50; ++trial) {
            Scenario s;
            s.name = "r" + std::to_string(trial);
            s.model.kind = ModelKind(trial % 7);
            s.model.eta = std::abs(u(rng)) / 7.0;
            s.model.g = std::abs(u(rng));
            s.model.omega_R = u(rng);
            s.model.omega0_R = u(rng) * 1e-7;
            s.model.Omega = trial % 3 && s.model.kind != ModelKind::TwoTone ? 0.0 : std::abs(u(rng)) * 1e5;
            s.model.phi_r = u(rng) / 3.0;
            if (trial % 4 == 0)
                s.model.eta_barrier = trial + 1;
            s.initial.kind = InitialKind(trial % 3);
            s.initial.n = trial;
            s.initial.alpha = s.initial.kind == InitialKind::coherent ? cplx(u(rng), u(rng)) : cplx{};
            s.initial.nbar = s.initial.kind == InitialKind::thermal ? std::abs(u(rng)) : 0.0;
            if (s.initial.kind != InitialKind::fock)
                s.initial.n = 0;
            s.initial.qubit = trial % 2 ? Qubit::up : Qubit::down;
            if (trial % 5 == 0 && s.model.kind != ModelKind::TwoTone)
                s.gamma_ratio = std::abs(u(rng));
            s.times.t_end = std::abs(u(rng)) + 1.0;
            s.times.n_points = 1 + trial;
            s.outputs.snapshot_times = {s.times.t_end / 3.0};
            if (trial % 2)
                s.outputs.observables = {"fidelity"};
            if (trial % 3 == 0)
                s.truncation = 10 + trial;
            CAPTURE(emit_scenario(s));
            CHECK(parse_scenario_text(emit_scenario(s)) == s);
        }
    }

    TEST_CASE("minimal scenario and defaults")
    {
        const Scenario s = parse_scenario_text(kMinimal);
        CHECK(s.outputs.observables == kAllObservables);
        CHECK_FALSE(s.gamma_ratio.has_value());
        CHECK_FALSE(s.truncation.has_value());
        CHECK(scenario_truncation(s) == 40);
        CHECK(scenario_coupling(s) == doctest::Approx(2.0 * M_PI * 1e4));
    }

    TEST_CASE("schema errors")
    {
        CHECK_THROWS_AS(parse_scenario_text(""), SchemaError);
        CHECK_THROWS_AS(parse_scenario_text("# only a comment\n"), SchemaError);
        CHECK_THROWS_AS(parse_scenario_text("- 1\n- 2\n"), SchemaError);
        CHECK_THROWS_AS(parse_scenario(kScenarios / "missing.scenario"), SchemaError);

        std::string text = kMinimal;
        CHECK(error_line(text + "colour: blue\n") == 11);
        CHECK(error_key(text + "colour: blue\n") == "colour");

        std::string bad = kMinimal;
        bad.replace(bad.find("g: 10"), 5, "gg: 10");
        CHECK(error_line(bad) == 5);
        CHECK(error_key(bad) == "model.gg");

        bad = kMinimal;
        bad.replace(bad.find("schema_version: 1"), 17, "schema_version: 2");
        CHECK(error_key(bad) == "schema_version");
        CHECK(error_line(bad) == 1);

        bad = kMinimal;
        bad.replace(bad.find("fock: 2"), 7, "fock: two");
        CHECK(error_key(bad) == "initial.fock");
        CHECK(error_line(bad) == 7);

        bad = kMinimal;
        bad.replace(bad.find("fock: 2"), 7, "fock: 2\n  thermal: 1");
        CHECK(error_key(bad) == "initial");

        bad = kMinimal;
        bad.replace(bad.find("kind: JC"), 8, "kind: Dicke");
        CHECK(error_key(bad) == "model.kind");

        bad = kMinimal;
        bad.replace(bad.find("  t_end: 1\n"), 11, "");
        CHECK(error_key(bad) == "times.t_end");

        CHECK(error_key(text + "outputs:\n  observables: [entropy]\n") == "outputs.observables");
        CHECK(error_key(text + "outputs:\n  snapshot_times: [5]\n") == "outputs.snapshot_times");
        CHECK(error_key(text + "truncation: 0\n") == "truncation");
    }

    TEST_CASE("initial state forms")
    {
        std::string text = kMinimal;
        text.replace(text.find("fock: 2"), 7, "qubit: e\n  coherent: [0.3, -0.4]");
        const Scenario s = parse_scenario_text(text);
        CHECK(s.initial.kind == InitialKind::coherent);
        CHECK(s.initial.alpha == cplx(0.3, -0.4));
        CHECK(s.initial.qubit == Qubit::up);
        const auto psi = initial_state(s, HilbertSpace(scenario_truncation(s)));
        CHECK(psi.is_pure());
    }

    TEST_CASE("eta refinement to the requested barrier")
    {
        Scenario s = parse_scenario(kScenarios / "fig3.scenario");
        CHECK(std::abs(physical_model(s).eta - barrier_eta(17)) < 1e-15);
        s.model.eta = 0.4530;  // 1.2e-3 away from the zero
        CHECK_THROWS_AS(physical_model(s), SchemaError);
        s.model.eta = 0.8;
        CHECK_THROWS_AS(physical_model(s), SchemaError);
        s.model.eta_barrier.reset();
        CHECK(physical_model(s).eta == 0.8);
    }

    TEST_CASE("two-tone scenario derives g")
    {
        Scenario s = parse_scenario(kScenarios / "fig4_twotone.scenario");
        const ModelSpec m = physical_model(s);
        CHECK(m.g == doctest::Approx(0.5 * barrier_eta(7) * 2.0 * M_PI * 133.26e3).epsilon(1e-14));
        CHECK(m.omega_R == doctest::Approx(2.0 * M_PI * 11.31e3));
        CHECK(std::abs(m.omega0_R) < 1e-9);
        s.model.g = 50.0;
        CHECK_THROWS_AS(physical_model(s), SchemaError);
    }

    TEST_CASE("dotted assignment")
    {
        Scenario s = parse_scenario_text(kMinimal);
        set_scenario_value(s, "model.eta", 0.3);
        set_scenario_value(s, "initial.fock", 4);
        set_scenario_value(s, "times.n_points", 11);
        set_scenario_value(s, "lindblad.gamma_ratio", 0.5);
        CHECK(s.model.eta == 0.3);
        CHECK(s.initial.n == 4);
        CHECK(s.times.n_points == 11);
        CHECK(s.gamma_ratio == 0.5);
        CHECK_THROWS_AS(set_scenario_value(s, "initial.fock", 1.5), SchemaError);
        CHECK_THROWS_AS(set_scenario_value(s, "name", 1.0), SchemaError);
    }
}
