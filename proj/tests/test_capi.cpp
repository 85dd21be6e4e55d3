#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "qkdsim.h"

TEST_CASE("version, status names and defaults") {
    CHECK(std::string(qkd_version()) == "0.1.0");
    CHECK(std::string(qkd_status_name(QKD_OK)) == "ok");
    CHECK(std::string(qkd_status_name(QKD_ERR_INVALID_ARGUMENT)) == "invalid argument");
    CHECK(qkd_default_t1() == 188610.0);
}

TEST_CASE("time and decay-fraction conversions") {
    double lambda = -1.0;
    REQUIRE(qkd_lambda_from_time(0.0, 188610.0, &lambda) == QKD_OK);
    CHECK(lambda == 0.0);
    REQUIRE(qkd_lambda_from_time(188610.0, 188610.0, &lambda) == QKD_OK);
    CHECK(lambda == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));

    double t = -1.0;
    REQUIRE(qkd_time_from_lambda(0.5, 1000.0, &t) == QKD_OK);
    CHECK(t == doctest::Approx(1000.0 * std::log(2.0)).epsilon(1e-14));
    REQUIRE(qkd_time_from_lambda(1.0, 1000.0, &t) == QKD_OK);
    CHECK(std::isinf(t));

    CHECK(qkd_lambda_from_time(-5.0, 188610.0, &lambda) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(qkd_last_error()) > 0);
    CHECK(qkd_lambda_from_time(5.0, 188610.0, nullptr) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_time_from_lambda(1.5, 188610.0, &t) == QKD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sweep handles expose rows, csv and the comparison gate") {
    qkd_sweep_config_t cfg = qkd_sweep_config_default();
    CHECK(cfg.protocol == QKD_PROTOCOL_BB84_ZX);
    CHECK(cfg.t_start_ns == 0.0);
    CHECK(cfg.t_end_ns == doctest::Approx(5.0 * 188610.0).epsilon(1e-15));
    CHECK(cfg.steps == 50);
    CHECK(cfg.shots == 100000);
    CHECK(cfg.seed == 1);

    cfg.protocol = QKD_PROTOCOL_BB84_XY;
    cfg.steps = 3;
    cfg.shots = 2000;
    cfg.seed = 9;

    qkd_sweep_result_t* result = nullptr;
    REQUIRE(qkd_sweep_run(&cfg, &result) == QKD_OK);
    REQUIRE(result != nullptr);
    CHECK(qkd_sweep_row_count(result) == 6);  // 3 grid points x 2 quantities

    qkd_sweep_row_t row{};
    REQUIRE(qkd_sweep_row(result, 0, &row) == QKD_OK);
    CHECK(row.t_ns == 0.0);
    CHECK(row.lambda == 0.0);
    CHECK(std::string(row.quantity) == "pplusi_given_plusi");
    CHECK(row.analytic == 1.0);
    CHECK(row.empirical == 1.0);
    CHECK(row.std_error == 0.0);
    REQUIRE(qkd_sweep_row(result, 1, &row) == QKD_OK);
    CHECK(std::string(row.quantity) == "success");
    CHECK(row.shots == 2000);
    CHECK(qkd_sweep_row(result, 6, &row) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_sweep_row(result, -1, &row) == QKD_ERR_INVALID_ARGUMENT);

    char* csv = nullptr;
    REQUIRE(qkd_sweep_csv(result, &csv) == QKD_OK);
    CHECK(std::string(csv).rfind("t_ns,lambda,quantity,analytic,empirical,std_error,shots\n", 0) ==
          0);
    qkd_string_free(csv);

    int pass = -1;
    char* report = nullptr;
    REQUIRE(qkd_sweep_compare(result, 4.0, &pass, &report) == QKD_OK);
    CHECK(pass == 1);
    CHECK(std::string(report).find("PASS") != std::string::npos);
    qkd_string_free(report);
    qkd_sweep_free(result);
}

TEST_CASE("sweep rejects bad configs and null arguments") {
    qkd_sweep_result_t* result = nullptr;
    CHECK(qkd_sweep_run(nullptr, &result) == QKD_ERR_INVALID_ARGUMENT);

    qkd_sweep_config_t cfg = qkd_sweep_config_default();
    cfg.steps = 0;
    CHECK(qkd_sweep_run(&cfg, &result) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(qkd_last_error()).find("steps") != std::string::npos);

    cfg = qkd_sweep_config_default();
    CHECK(qkd_sweep_run(&cfg, nullptr) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_sweep_row_count(nullptr) == 0);
    CHECK(qkd_sweep_csv(nullptr, nullptr) == QKD_ERR_INVALID_ARGUMENT);
    qkd_sweep_free(nullptr);  // must be a no-op
    qkd_string_free(nullptr);
}

TEST_CASE("guessing-strategy evaluation through the C interface") {
    qkd_eve_report_t rep{};
    REQUIRE(qkd_eve_evaluate(QKD_VARIANT_ZX, 1.0, 20000, 3, &rep) == QKD_OK);
    CHECK(rep.analytic == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(std::abs(rep.brute_force - rep.analytic) < 1e-12);
    CHECK(std::string(rep.strategy_name) == "z-biased");
    CHECK(rep.strategy_probs[0] == 0.5);
    CHECK(rep.sifted_rounds == 20000);
    CHECK(std::abs(rep.monte_carlo - rep.analytic) < 4.0 * rep.mc_std_error);
    CHECK(rep.epsilon == doctest::Approx(0.125).epsilon(1e-12));

    REQUIRE(qkd_eve_evaluate(QKD_VARIANT_XY, 0.7, 20000, 3, &rep) == QKD_OK);
    CHECK(rep.analytic == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(rep.epsilon) < 1e-15);

    CHECK(qkd_eve_evaluate(QKD_VARIANT_ZX, -0.5, 20000, 3, &rep) == QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_eve_evaluate(static_cast<qkd_variant_t>(9), 0.5, 100, 3, &rep) ==
          QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_eve_evaluate(QKD_VARIANT_ZX, 0.5, 100, 3, nullptr) == QKD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("chsh evaluation: analytic value, bands, empirical agreement") {
    qkd_chsh_report_t rep{};
    REQUIRE(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, 0.0, 188610.0, 0, 1, &rep) == QKD_OK);
    CHECK(rep.s_analytic == doctest::Approx(2.8284271247461903).epsilon(1e-13));
    CHECK(rep.band == QKD_BAND_SECURE);
    CHECK(rep.empirical == 0);
    CHECK(rep.corr_analytic[0] == doctest::Approx(-0.7071067811865475).epsilon(1e-13));

    REQUIRE(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, 0.0, 188610.0, 30000, 5, &rep) == QKD_OK);
    CHECK(rep.empirical == 1);
    CHECK(rep.pair_counts[0] > 0);
    CHECK(std::abs(rep.s_empirical - rep.s_analytic) < 4.0 * rep.s_std_error);

    // lambda = 0.05 puts the evolved singlet in the post-process band.
    double t = 0.0;
    REQUIRE(qkd_time_from_lambda(0.05, 188610.0, &t) == QKD_OK);
    REQUIRE(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, t, 188610.0, 0, 1, &rep) == QKD_OK);
    CHECK(rep.band == QKD_BAND_POST_PROCESS);

    // lambda = 0.25 drops S to 2.5/sqrt(2) < 2.
    REQUIRE(qkd_time_from_lambda(0.25, 188610.0, &t) == QKD_OK);
    REQUIRE(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, t, 188610.0, 0, 1, &rep) == QKD_OK);
    CHECK(rep.band == QKD_BAND_DISCARD);
    CHECK(rep.s_analytic == doctest::Approx(2.5 / std::sqrt(2.0)).epsilon(1e-12));

    // The other Bell states saturate the bound at zero idle time too.
    REQUIRE(qkd_chsh_evaluate(QKD_BELL_PHI_PLUS, 0.0, 188610.0, 0, 1, &rep) == QKD_OK);
    CHECK(rep.s_analytic == doctest::Approx(2.8284271247461903).epsilon(1e-12));

    CHECK(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, -1.0, 188610.0, 0, 1, &rep) ==
          QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_chsh_evaluate(static_cast<qkd_bell_t>(17), 0.0, 188610.0, 0, 1, &rep) ==
          QKD_ERR_INVALID_ARGUMENT);
    CHECK(qkd_chsh_evaluate(QKD_BELL_PSI_MINUS, 0.0, 188610.0, 0, 1, nullptr) ==
          QKD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("self verification reports every suite as passing") {
    int all_passed = 0;
    char* report = nullptr;
    REQUIRE(qkd_verify(&all_passed, &report) == QKD_OK);
    CHECK(all_passed == 1);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("PASS") != std::string::npos);
    CHECK(std::string(report).find("FAIL") == std::string::npos);
    qkd_string_free(report);
    REQUIRE(qkd_verify(nullptr, nullptr) == QKD_ERR_INVALID_ARGUMENT);
}
