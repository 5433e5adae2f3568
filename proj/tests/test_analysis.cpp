#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qdimer/analysis.hpp"
#include "qdimer/errors.hpp"

using namespace qdimer;

namespace {

constexpr double conv = constants::cm1_to_radps;

BathParams preset_bath() { return {200.0, 50.0, 25.0, 5e4, 0.0}; }
BathParams default_bath() { return {200.0, 50.0, 0.05, 5e4, 0.0}; }

double two_vr(double V, BathParams b, double T) {
    b.temperature = T;
    return 2.0 * V * std::exp(-oracle::simpson_phi(b, 400'000));
}

} // namespace

TEST_CASE("critical temperature: planted roots") {
    // dgamma/2 = 2 V_r(300 K), computed by the Simpson oracle
    const double dg300 = 2.0 * two_vr(250.0, preset_bath(), 300.0);
    const auto r = critical_temperature(dg300, 250.0, preset_bath());
    CHECK(std::abs(r.T_c - 300.0) < 1e-3);
    CHECK(r.bracket.first <= r.T_c);
    CHECK(r.T_c <= r.bracket.second);
    CHECK(std::abs(r.residual) <= 1e-8 * dg300 / 2);

    const double dg5 = 2.0 * two_vr(250.0, default_bath(), 5.0);
    const auto low = critical_temperature(dg5, 250.0, default_bath());
    CHECK(std::abs(low.T_c - 5.0) < 1e-3);
}

TEST_CASE("critical temperature: residual reproduced through the bath module") {
    const auto r = critical_temperature(5.0, 250.0, preset_bath());
    BathParams b = preset_bath();
    b.temperature = r.T_c;
    const double independent = 2.0 * renormalized_coupling(250.0, b, 1e-12).vr - 5.0 / 2.0;
    CHECK(independent == doctest::Approx(r.residual).epsilon(1e-6).scale(1e-9));
    CHECK(std::abs(independent) <= 1e-8 * 2.5);
}

TEST_CASE("critical temperature decreases with dgamma") {
    double prev = INFINITY;
    for (double dg = 0.5; dg <= 50.0; dg *= 1.5) {
        const double T = critical_temperature(dg, 250.0, preset_bath()).T_c;
        CHECK(T < prev);
        prev = T;
    }
    // default infrared cutoff: V_r is astronomically small, roots sit at a few K
    prev = INFINITY;
    for (double e = -250; e <= -40; e += 15) {
        const double T = critical_temperature(std::pow(10.0, e), 250.0, default_bath()).T_c;
        CHECK(T < prev);
        CHECK(T > 1.0);
        prev = T;
    }
}

TEST_CASE("critical temperature errors") {
    CHECK_THROWS_AS(critical_temperature(0.0, 250.0, preset_bath()), DomainError);
    CHECK_THROWS_AS(critical_temperature(-1.0, 250.0, preset_bath()), DomainError);
    try {
        critical_temperature(1000.0, 250.0, preset_bath()); // 2 V_r(1 K) ~ 64 < 500
        FAIL("expected NoRootError");
    } catch (const NoRootError& e) {
        CHECK(e.side() == NoRootError::Side::BelowBracket);
        CHECK(e.residual_lo() < 0);
        CHECK(std::string(e.what()).find("already incoherent") != std::string::npos);
    }
    try {
        critical_temperature(1e-40, 250.0, preset_bath()); // 2 V_r(1000 K) ~ 1e-25
        FAIL("expected NoRootError");
    } catch (const NoRootError& e) {
        CHECK(e.side() == NoRootError::Side::AboveBracket);
        CHECK(e.residual_hi() > 0);
    }
    CHECK_THROWS_AS(critical_temperature(1.0, 250.0, preset_bath(), 10.0, 5.0), InvalidInput);
}

TEST_CASE("passage time: Hermitian speed limit") {
    for (double v : {1.0, 32.0, 250.0}) {
        const Dimer p{0, 0, v, 0, 0};
        const double expected = std::numbers::pi / (2.0 * v * conv);
        const auto r = passage_time(p, 3.0 * expected);
        REQUIRE(r.tau_p);
        CHECK(*r.tau_p == doctest::Approx(expected).epsilon(1e-8));
        CHECK(r.p_m_at_tau == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("passage time: common damping cancels") {
    const Dimer bare{0, 0, 40, 0, 0}, damped{0, 0, 40, 7, 7};
    const auto a = passage_time(bare, 1.0), b = passage_time(damped, 1.0);
    CHECK(*a.tau_p == doctest::Approx(*b.tau_p).epsilon(1e-8));

    const Dimer p{0, 0, 40, 2, 9}, shifted{0, 0, 40, 2 + 13, 9 + 13};
    CHECK(*passage_time(p, 1.0).tau_p == doctest::Approx(*passage_time(shifted, 1.0).tau_p).epsilon(1e-8));
}

TEST_CASE("passage time matches dense brute force") {
    for (const Dimer& p : {Dimer{0, 0, 40, 2, 9}, Dimer{0, 0, 12, 14, 1}, Dimer{25, -5, 30, 3, 6}}) {
        const auto r = passage_time(p, 2.0);
        REQUIRE(r.tau_p);
        auto pm = [&](double t) { return transfer_probability(p, t); };
        const double brute = oracle::dense_argmax(pm, 0.0, 1.5 * *r.tau_p, 1'000'000);
        CHECK(*r.tau_p == doctest::Approx(brute).epsilon(1e-6));
        CHECK(r.p_m_at_tau >= 0.0);
        CHECK(r.p_m_at_tau <= 1.0);
        CHECK(*r.tau_p <= r.search_window.second);
    }
}

TEST_CASE("passage time boundary flag and preconditions") {
    const Dimer p{0, 0, 40, 0, 0};
    const auto r = passage_time(p, 0.05); // p_m still rising at t_max
    CHECK(r.at_boundary());
    CHECK_THROWS_AS(passage_time(p, 0.0), InvalidInput);
    CHECK_THROWS_AS(passage_time(p, 1.0, 16), InvalidInput);
}

TEST_CASE("coherence time") {
    const auto undamped = coherence_time(Dimer{0, 0, 50, 0, 0}, 0.05, 3.0);
    CHECK(undamped.persists);
    CHECK(undamped.time == 3.0);
    CHECK(undamped.rabi_period == doctest::Approx(2 * std::numbers::pi / (100 * conv)));

    // equal damping: peak-to-peak ~ 2 exp(-gamma t conv), so the time scales as 1/gamma
    const auto a = coherence_time(Dimer{0, 0, 200, 2.5, 2.5}, 0.05, 50.0);
    const auto b = coherence_time(Dimer{0, 0, 200, 5.0, 5.0}, 0.05, 50.0);
    CHECK_FALSE(a.persists);
    CHECK(a.time == doctest::Approx(std::log(2 / 0.05) / (2.5 * conv)).epsilon(0.02));
    CHECK(a.time / b.time == doctest::Approx(2.0).epsilon(0.02));

    CHECK_THROWS_AS(coherence_time(Dimer{0, 0, 1, 0, 10}, 0.05, 5.0), NotApplicable);
    CHECK_THROWS_AS(coherence_time(Dimer{0, 0, 2.5, 0, 10}, 0.05, 5.0), NotApplicable);
    CHECK_THROWS_AS(coherence_time(Dimer{0, 0, 50, 0, 0}, 1.5, 5.0), InvalidInput);
    CHECK_THROWS_AS(coherence_time(Dimer{0, 0, 50, 0, 0}, 0.0, 5.0), InvalidInput);
}
