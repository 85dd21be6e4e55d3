#include "qkdsim.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "qkdsim/sweep.hpp"
#include "qkdsim/verify.hpp"

struct qkd_sweep_result {
    qkd::SweepResult impl;
};

namespace {

thread_local std::string g_last_error;

qkd_status_t fail(qkd_status_t status, const char* message) {
    g_last_error = message;
    return status;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
qkd_status_t guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const qkd::ValidationError& e) {
        return fail(QKD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const qkd::InsufficientDataError& e) {
        return fail(QKD_ERR_INSUFFICIENT_DATA, e.what());
    } catch (const qkd::InvariantError& e) {
        return fail(QKD_ERR_INVARIANT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(QKD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(QKD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QKD_ERR_INTERNAL, "unknown error");
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

qkd::SweepProtocol to_protocol(qkd_protocol_t p) {
    switch (p) {
        case QKD_PROTOCOL_BB84_ZX: return qkd::SweepProtocol::Bb84Zx;
        case QKD_PROTOCOL_BB84_XY: return qkd::SweepProtocol::Bb84Xy;
        case QKD_PROTOCOL_E91_PHI_PLUS: return qkd::SweepProtocol::E91PhiPlus;
        case QKD_PROTOCOL_E91_PSI_PLUS: return qkd::SweepProtocol::E91PsiPlus;
        case QKD_PROTOCOL_CHSH_PSI_MINUS: return qkd::SweepProtocol::ChshPsiMinus;
    }
    throw qkd::ValidationError("unknown protocol enum value");
}

qkd::Bb84Variant to_variant(qkd_variant_t v) {
    switch (v) {
        case QKD_VARIANT_ZX: return qkd::Bb84Variant::ZX;
        case QKD_VARIANT_XY: return qkd::Bb84Variant::XY;
    }
    throw qkd::ValidationError("unknown variant enum value");
}

qkd::StateLabel to_bell(qkd_bell_t b) {
    switch (b) {
        case QKD_BELL_PHI_PLUS: return qkd::StateLabel::PhiPlus;
        case QKD_BELL_PHI_MINUS: return qkd::StateLabel::PhiMinus;
        case QKD_BELL_PSI_PLUS: return qkd::StateLabel::PsiPlus;
        case QKD_BELL_PSI_MINUS: return qkd::StateLabel::PsiMinus;
    }
    throw qkd::ValidationError("unknown Bell state enum value");
}

qkd_chsh_band_t classify_band(double s) {
    const double bound = 2.0 * std::sqrt(2.0);
    if (s >= bound - 1e-9) return QKD_BAND_SECURE;
    if (s > 2.0) return QKD_BAND_POST_PROCESS;
    return QKD_BAND_DISCARD;
}

}  // namespace

extern "C" {

const char* qkd_status_name(qkd_status_t status) {
    switch (status) {
        case QKD_OK: return "ok";
        case QKD_ERR_INVALID_ARGUMENT: return "invalid argument";
        case QKD_ERR_INVARIANT: return "invariant violation";
        case QKD_ERR_INSUFFICIENT_DATA: return "insufficient data";
        case QKD_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* qkd_last_error(void) {
    return g_last_error.c_str();
}

const char* qkd_version(void) {
    return "0.1.0";
}

double qkd_default_t1(void) {
    return qkd::kDefaultT1;
}

qkd_status_t qkd_lambda_from_time(double t_ns, double t1_ns, double* lambda_out) {
    return guarded([&]() {
        if (lambda_out == nullptr) return fail(QKD_ERR_INVALID_ARGUMENT, "lambda_out is NULL");
        *lambda_out = qkd::RelaxationParams::from_time(t_ns, t1_ns).lambda;
        return QKD_OK;
    });
}

qkd_status_t qkd_time_from_lambda(double lambda, double t1_ns, double* t_ns_out) {
    return guarded([&]() {
        if (t_ns_out == nullptr) return fail(QKD_ERR_INVALID_ARGUMENT, "t_ns_out is NULL");
        *t_ns_out = qkd::RelaxationParams::from_lambda(lambda, t1_ns).t;
        return QKD_OK;
    });
}

qkd_sweep_config_t qkd_sweep_config_default(void) {
    const qkd::SweepConfig defaults{};
    qkd_sweep_config_t out{};
    out.protocol = QKD_PROTOCOL_BB84_ZX;
    out.t_start_ns = defaults.t_start;
    out.t_end_ns = defaults.t_end;
    out.steps = defaults.steps;
    out.t1_ns = defaults.t1;
    out.shots = defaults.shots;
    out.seed = defaults.seed;
    return out;
}

qkd_status_t qkd_sweep_run(const qkd_sweep_config_t* config, qkd_sweep_result_t** out) {
    return guarded([&]() {
        if (config == nullptr || out == nullptr) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "config and out must be non-NULL");
        }
        qkd::SweepConfig cfg;
        cfg.protocol = to_protocol(config->protocol);
        cfg.t_start = config->t_start_ns;
        cfg.t_end = config->t_end_ns;
        cfg.steps = config->steps;
        cfg.t1 = config->t1_ns;
        cfg.shots = config->shots;
        cfg.seed = config->seed;
        auto* handle = new qkd_sweep_result{qkd::run_sweep(cfg)};
        *out = handle;
        return QKD_OK;
    });
}

long long qkd_sweep_row_count(const qkd_sweep_result_t* result) {
    if (result == nullptr) return 0;
    return static_cast<long long>(result->impl.rows.size());
}

qkd_status_t qkd_sweep_row(const qkd_sweep_result_t* result, long long index,
                           qkd_sweep_row_t* row_out) {
    return guarded([&]() {
        if (result == nullptr || row_out == nullptr) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "result and row_out must be non-NULL");
        }
        if (index < 0 || index >= qkd_sweep_row_count(result)) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "row index out of range");
        }
        const qkd::SweepRow& row = result->impl.rows[static_cast<std::size_t>(index)];
        row_out->t_ns = row.t;
        row_out->lambda = row.lambda;
        row_out->quantity = row.quantity.c_str();
        row_out->analytic = row.analytic;
        row_out->empirical = row.empirical;
        row_out->std_error = row.std_error;
        row_out->shots = row.shots;
        return QKD_OK;
    });
}

qkd_status_t qkd_sweep_csv(const qkd_sweep_result_t* result, char** csv_out) {
    return guarded([&]() {
        if (result == nullptr || csv_out == nullptr) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "result and csv_out must be non-NULL");
        }
        *csv_out = copy_string(qkd::to_csv(result->impl));
        return QKD_OK;
    });
}

qkd_status_t qkd_sweep_compare(const qkd_sweep_result_t* result, double z_threshold, int* pass_out,
                               char** report_out) {
    return guarded([&]() {
        if (result == nullptr || pass_out == nullptr) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "result and pass_out must be non-NULL");
        }
        const qkd::CompareReport report = qkd::compare(result->impl, z_threshold);
        *pass_out = report.pass ? 1 : 0;
        if (report_out != nullptr) *report_out = copy_string(report.text);
        return QKD_OK;
    });
}

void qkd_sweep_free(qkd_sweep_result_t* result) {
    delete result;
}

void qkd_string_free(char* s) {
    std::free(s);
}

qkd_status_t qkd_eve_evaluate(qkd_variant_t variant, double lambda, long long sifted_rounds,
                              unsigned long long seed, qkd_eve_report_t* report_out) {
    return guarded([&]() {
        if (report_out == nullptr) return fail(QKD_ERR_INVALID_ARGUMENT, "report_out is NULL");
        const qkd::EveEvaluation eval =
            qkd::evaluate_eve(to_variant(variant), lambda, sifted_rounds, seed);
        qkd_eve_report_t out{};
        out.analytic = eval.analytic;
        out.brute_force = eval.brute_force;
        out.monte_carlo = eval.monte_carlo;
        out.mc_std_error = eval.mc_std_error;
        out.epsilon = eval.epsilon;
        out.sifted_rounds = eval.sifted_rounds;
        std::snprintf(out.strategy_name, sizeof(out.strategy_name), "%s",
                      eval.strategy_name.c_str());
        for (std::size_t i = 0; i < 4; ++i) out.strategy_probs[i] = eval.strategy_probs[i];
        *report_out = out;
        return QKD_OK;
    });
}

qkd_status_t qkd_chsh_evaluate(qkd_bell_t source, double t_ns, double t1_ns, long long pairs,
                               unsigned long long seed, qkd_chsh_report_t* report_out) {
    return guarded([&]() {
        if (report_out == nullptr) return fail(QKD_ERR_INVALID_ARGUMENT, "report_out is NULL");
        if (pairs < 0) return fail(QKD_ERR_INVALID_ARGUMENT, "pairs must be >= 0");
        const qkd::StateLabel bell = to_bell(source);
        const qkd::RelaxationParams params = qkd::RelaxationParams::from_time(t_ns, t1_ns);
        const qkd::KrausChannel channel =
            qkd::KrausChannel::relaxation(params).lift_two_qubit();
        const qkd::ChshEstimate analytic =
            qkd::chsh_analytic(channel.apply(qkd::DensityMatrix::of(bell)));

        qkd_chsh_report_t out{};
        out.s_analytic = analytic.s_value;
        out.band = classify_band(analytic.s_value);
        for (std::size_t p = 0; p < 4; ++p) out.corr_analytic[p] = analytic.correlations[p];
        if (pairs > 0) {
            const qkd::E91Transcript transcript = qkd::e91_run(pairs, bell, params, seed);
            const qkd::ChshEstimate empirical = qkd::chsh_empirical(transcript);
            out.empirical = 1;
            out.s_empirical = empirical.s_value;
            out.s_std_error = qkd::chsh_std_error(empirical);
            for (std::size_t p = 0; p < 4; ++p) {
                out.corr_empirical[p] = empirical.correlations[p];
                out.pair_counts[p] = empirical.counts[p];
            }
        }
        *report_out = out;
        return QKD_OK;
    });
}

qkd_status_t qkd_verify(int* all_passed_out, char** report_out) {
    return guarded([&]() {
        if (all_passed_out == nullptr) {
            return fail(QKD_ERR_INVALID_ARGUMENT, "all_passed_out is NULL");
        }
        const auto suites = qkd::run_verification();
        *all_passed_out = qkd::all_passed(suites) ? 1 : 0;
        if (report_out != nullptr) *report_out = copy_string(qkd::format_verification(suites));
        return QKD_OK;
    });
}

}  // extern "C"
