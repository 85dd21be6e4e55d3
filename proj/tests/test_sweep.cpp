#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "qkdsim/sweep.hpp"

using namespace qkd;

namespace {

SweepConfig small_config(SweepProtocol protocol) {
    SweepConfig cfg;
    cfg.protocol = protocol;
    cfg.steps = 4;
    cfg.shots = 3000;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("protocol names round-trip") {
    for (SweepProtocol p : {SweepProtocol::Bb84Zx, SweepProtocol::Bb84Xy, SweepProtocol::E91PhiPlus,
                            SweepProtocol::E91PsiPlus, SweepProtocol::ChshPsiMinus}) {
        CHECK(parse_sweep_protocol(to_string(p)) == p);
    }
    CHECK_THROWS_AS(parse_sweep_protocol("bb84"), ValidationError);
}

TEST_CASE("each protocol advertises its quantity set") {
    auto q = protocol_quantities(SweepProtocol::Bb84Zx);
    CHECK(std::set<std::string>(q.begin(), q.end()) ==
          std::set<std::string>{"success", "p1_given_1", "pplus_given_plus", "p0_given_plus"});
    q = protocol_quantities(SweepProtocol::Bb84Xy);
    CHECK(std::set<std::string>(q.begin(), q.end()) ==
          std::set<std::string>{"success", "pplusi_given_plusi"});
    q = protocol_quantities(SweepProtocol::E91PhiPlus);
    CHECK(std::set<std::string>(q.begin(), q.end()) ==
          std::set<std::string>{"success", "p00", "p01", "p10", "p11"});
    q = protocol_quantities(SweepProtocol::ChshPsiMinus);
    CHECK(std::set<std::string>(q.begin(), q.end()) ==
          std::set<std::string>{"chsh_s", "corr_a1b2", "corr_a1b3", "corr_a2b2", "corr_a2b3"});
}

TEST_CASE("config validation rejects bad grids") {
    SweepConfig cfg;
    cfg.steps = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SweepConfig{};
    cfg.t_start = -5.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SweepConfig{};
    cfg.t_end = cfg.t_start;
    cfg.steps = 2;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SweepConfig{};
    cfg.shots = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SweepConfig{};
    cfg.quantities = {"no_such_quantity"};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SweepConfig{};
    cfg.quantities = {"success"};
    cfg.validate();
}

TEST_CASE("sweep rows are laid out grid-major, quantity-minor") {
    auto result = run_sweep(small_config(SweepProtocol::Bb84Zx));
    const auto quantities = protocol_quantities(SweepProtocol::Bb84Zx);
    REQUIRE(result.rows.size() == 4u * quantities.size());
    double prev_t = -1.0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        if (i % quantities.size() == 0) {
            CHECK(row.t > prev_t);
            prev_t = row.t;
        } else {
            CHECK(row.t == prev_t);
            CHECK(row.quantity > result.rows[i - 1].quantity);
        }
        CHECK(row.lambda == doctest::Approx(1.0 - std::exp(-row.t / 188610.0)).epsilon(1e-12));
    }
    CHECK(result.rows.front().t == 0.0);
    CHECK(result.rows.back().t == doctest::Approx(5.0 * 188610.0).epsilon(1e-15));
}

TEST_CASE("a zero-length grid is a single point") {
    SweepConfig cfg = small_config(SweepProtocol::Bb84Xy);
    cfg.steps = 1;
    cfg.t_start = 1000.0;
    auto result = run_sweep(cfg);
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows.front().t == 1000.0);
}

TEST_CASE("at zero idle time the simulation is error-free") {
    auto result = run_sweep(small_config(SweepProtocol::Bb84Zx));
    for (const auto& row : result.rows) {
        if (row.t != 0.0) continue;
        if (row.quantity == "success" || row.quantity == "p1_given_1" ||
            row.quantity == "pplus_given_plus") {
            CHECK(row.analytic == 1.0);
            CHECK(row.empirical == 1.0);
            CHECK(row.std_error == 0.0);
        }
        if (row.quantity == "success") CHECK(row.shots == 3000);
    }
}

TEST_CASE("monte carlo tracks the closed forms at 4 sigma on every protocol") {
    for (SweepProtocol p : {SweepProtocol::Bb84Zx, SweepProtocol::Bb84Xy, SweepProtocol::E91PhiPlus,
                            SweepProtocol::E91PsiPlus, SweepProtocol::ChshPsiMinus}) {
        auto result = run_sweep(small_config(p));
        auto report = compare(result, 4.0);
        INFO(report.text);
        CHECK(report.pass);
        CHECK(report.hard_failures.empty());
        CHECK(report.rows_checked > 0);
    }
}

TEST_CASE("comparison flags planted disagreement") {
    auto result = run_sweep(small_config(SweepProtocol::Bb84Xy));
    result.rows[3].empirical = result.rows[3].analytic + 50.0 * result.rows[3].std_error;
    auto report = compare(result, 4.0);
    CHECK_FALSE(report.pass);
    CHECK(report.failing_rows == std::vector<std::size_t>{3});

    // A deterministic null (rate exactly 1 at t=0) must be reproduced
    // bit-for-bit; any observed miss is a hard failure.
    auto exact = run_sweep(small_config(SweepProtocol::Bb84Xy));
    exact.rows[0].empirical = exact.rows[0].analytic - 1e-3;
    auto hard = compare(exact, 4.0);
    CHECK_FALSE(hard.pass);
    CHECK(hard.hard_failures == std::vector<std::size_t>{0});

    CHECK_THROWS_AS(compare(result, 0.0), ValidationError);
}

TEST_CASE("quantity filter trims the output") {
    SweepConfig cfg = small_config(SweepProtocol::E91PhiPlus);
    cfg.quantities = {"success"};
    auto result = run_sweep(cfg);
    REQUIRE(result.rows.size() == 4);
    for (const auto& row : result.rows) CHECK(row.quantity == "success");
}

TEST_CASE("csv serialization is stable and locale independent") {
    SweepConfig cfg = small_config(SweepProtocol::Bb84Xy);
    cfg.steps = 2;
    auto result = run_sweep(cfg);
    std::string csv = to_csv(result);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t_ns,lambda,quantity,analytic,empirical,std_error,shots");
    std::size_t data_lines = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) ++data_lines;
        CHECK(line.find(' ') == std::string::npos);
    }
    CHECK(data_lines == result.rows.size());

    CHECK(csv_number(0.25) == "0.25");
    CHECK(csv_number(188610.0) == "188610");
    CHECK_THROWS_AS(csv_number(std::nan("")), InvariantError);
    CHECK_THROWS_AS(csv_number(INFINITY), InvariantError);
}

TEST_CASE("identical configs give identical bytes at any worker count") {
    SweepConfig cfg = small_config(SweepProtocol::E91PsiPlus);
    auto first = to_csv(run_sweep(cfg));

    setenv("QKDSIM_THREADS", "1", 1);
    auto serial = to_csv(run_sweep(cfg));
    setenv("QKDSIM_THREADS", "3", 1);
    auto parallel = to_csv(run_sweep(cfg));
    unsetenv("QKDSIM_THREADS");

    CHECK(first == serial);
    CHECK(first == parallel);

    setenv("QKDSIM_THREADS", "0", 1);
    CHECK_THROWS_AS(run_sweep(cfg), ValidationError);
    setenv("QKDSIM_THREADS", "banana", 1);
    CHECK_THROWS_AS(run_sweep(cfg), ValidationError);
    unsetenv("QKDSIM_THREADS");
}

TEST_CASE("guessing-strategy evaluation agrees three ways") {
    auto eval = evaluate_eve(Bb84Variant::ZX, 0.4, 40000, 5);
    CHECK(eval.strategy_name == "z-biased");
    CHECK(eval.analytic == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(std::abs(eval.brute_force - eval.analytic) < 1e-12);
    CHECK(eval.epsilon == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(eval.sifted_rounds == 40000);
    CHECK(eval.mc_std_error > 0.0);
    CHECK(std::abs(eval.monte_carlo - eval.analytic) < 4.0 * eval.mc_std_error);

    auto neutral = evaluate_eve(Bb84Variant::XY, 0.4, 40000, 5);
    CHECK(std::abs(neutral.analytic - 0.25) < 1e-15);
    CHECK(std::abs(neutral.epsilon) < 1e-15);
    CHECK(std::abs(neutral.monte_carlo - 0.25) < 4.0 * neutral.mc_std_error);

    CHECK_THROWS_AS(evaluate_eve(Bb84Variant::ZX, -0.1, 100, 1), ValidationError);
    CHECK_THROWS_AS(evaluate_eve(Bb84Variant::ZX, 0.5, 0, 1), ValidationError);
}
