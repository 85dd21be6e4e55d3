#include "qkdsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "qkdsim/rng.hpp"

namespace qkd {

namespace {

constexpr std::uint64_t kSaltChunk = 0xC4115;
constexpr std::uint64_t kSaltEve = 0xE7E;

// Generates rounds in fixed-size chunks and hands them over in order until
// exactly `sifted_target` sifted rounds have been consumed. The chunk
// layout is part of the deterministic contract: re-running with the same
// seed replays the identical round sequence.
template <typename Fn>
void for_each_bb84_round(Bb84Variant variant, const RelaxationParams& params, std::uint64_t seed,
                         std::int64_t sifted_target, Fn&& fn) {
    std::int64_t sifted_seen = 0;
    const std::int64_t chunk_n = std::max<std::int64_t>(sifted_target, 1024);
    for (std::uint64_t chunk = 0; sifted_seen < sifted_target; ++chunk) {
        const Bb84Transcript transcript =
            bb84_run(chunk_n, variant, params, derive_stream(seed, kSaltChunk + chunk));
        for (const Bb84Round& r : transcript.rounds) {
            fn(r);
            if (r.sifted && ++sifted_seen == sifted_target) break;
        }
    }
}

struct Tally {
    std::int64_t num = 0;
    std::int64_t den = 0;

    void add(bool hit) {
        ++den;
        num += hit ? 1 : 0;
    }
};

SweepRow proportion_row(double t, double lambda, std::string quantity, double analytic,
                        const Tally& tally) {
    SweepRow row{t, lambda, std::move(quantity), analytic, 0.0, 0.0, tally.den};
    if (tally.den > 0) {
        const double p = static_cast<double>(tally.num) / static_cast<double>(tally.den);
        row.empirical = p;
        row.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(tally.den));
    }
    return row;
}

std::vector<SweepRow> run_point_bb84(Bb84Variant variant, double t, const RelaxationParams& params,
                                     std::int64_t shots, std::uint64_t seed) {
    const double lambda = params.lambda;
    Tally success, second_kept, cross_kept, plus_in_z;
    const StateLabel second_state = variant == Bb84Variant::ZX ? StateLabel::S1 : StateLabel::PlusI;
    for_each_bb84_round(variant, params, seed, shots, [&](const Bb84Round& r) {
        if (r.sifted) {
            success.add(r.bob_outcome == r.prepared);
            if (r.prepared == second_state) second_kept.add(r.bob_outcome == r.prepared);
            if (variant == Bb84Variant::ZX && r.prepared == StateLabel::Plus) {
                cross_kept.add(r.bob_outcome == r.prepared);
            }
        } else if (variant == Bb84Variant::ZX && r.prepared == StateLabel::Plus &&
                   r.bob_basis == BasisKind::Z) {
            plus_in_z.add(r.bob_outcome == StateLabel::S0);
        }
    });

    const double survival_amp = std::sqrt(1.0 - lambda);
    std::vector<SweepRow> rows;
    if (variant == Bb84Variant::ZX) {
        rows.push_back(proportion_row(t, lambda, "success", bb84_success(lambda), success));
        rows.push_back(proportion_row(t, lambda, "p1_given_1", 1.0 - lambda, second_kept));
        rows.push_back(proportion_row(t, lambda, "pplus_given_plus", 0.5 * (1.0 + survival_amp),
                                      cross_kept));
        rows.push_back(
            proportion_row(t, lambda, "p0_given_plus", 0.5 * (1.0 + lambda), plus_in_z));
    } else {
        rows.push_back(proportion_row(t, lambda, "success", bb84_xy_success(lambda), success));
        rows.push_back(proportion_row(t, lambda, "pplusi_given_plusi",
                                      0.5 * (1.0 + survival_amp), second_kept));
    }
    return rows;
}

std::vector<SweepRow> run_point_e91(StateLabel source, double t, const RelaxationParams& params,
                                    std::int64_t shots, std::uint64_t seed) {
    const double lambda = params.lambda;
    const E91Transcript transcript = e91_run(shots, source, params, seed);

    // Z readout quantities come from the rounds where both parties happened
    // to measure Z, i.e. the (A1, B1) key cell.
    std::array<std::int64_t, 4> zz{};
    std::int64_t n_zz = 0;
    for (const E91Round& r : transcript.rounds) {
        if (r.alice_setting != 1 || r.bob_setting != 1) continue;
        const int o = 2 * (r.alice_outcome < 0 ? 1 : 0) + (r.bob_outcome < 0 ? 1 : 0);
        ++zz[static_cast<std::size_t>(o)];
        ++n_zz;
    }

    const bool phi = source == StateLabel::PhiPlus;
    const double p_cross = 0.5 * lambda * (1.0 - lambda);
    const std::array<double, 4> analytic =
        phi ? std::array<double, 4>{0.5 * (1.0 + lambda * lambda), p_cross, p_cross,
                                    0.5 * (1.0 - lambda) * (1.0 - lambda)}
            : std::array<double, 4>{lambda, 0.5 * (1.0 - lambda), 0.5 * (1.0 - lambda), 0.0};
    const double analytic_success =
        phi ? e91_phiplus_success(lambda) : e91_psiplus_success(lambda);

    Tally success{phi ? zz[0] + zz[3] : zz[1] + zz[2], n_zz};
    std::vector<SweepRow> rows;
    rows.push_back(proportion_row(t, lambda, "success", analytic_success, success));
    const char* names[4] = {"p00", "p01", "p10", "p11"};
    for (std::size_t o = 0; o < 4; ++o) {
        rows.push_back(proportion_row(t, lambda, names[o], analytic[o],
                                      Tally{zz[o], n_zz}));
    }
    return rows;
}

std::vector<SweepRow> run_point_chsh(double t, const RelaxationParams& params, std::int64_t shots,
                                     std::uint64_t seed) {
    const double lambda = params.lambda;
    const E91Transcript transcript = e91_run(shots, StateLabel::PsiMinus, params, seed);
    const ChshEstimate emp = chsh_empirical(transcript);

    const KrausChannel channel = KrausChannel::relaxation(params).lift_two_qubit();
    const ChshEstimate ana = chsh_analytic(channel.apply(DensityMatrix::of(StateLabel::PsiMinus)));

    std::vector<SweepRow> rows;
    std::int64_t test_rounds = 0;
    for (std::int64_t c : emp.counts) test_rounds += c;
    rows.push_back(SweepRow{t, lambda, "chsh_s", ana.s_value, emp.s_value, chsh_std_error(emp),
                            test_rounds});
    for (std::size_t p = 0; p < 4; ++p) {
        const double r = emp.correlations[p];
        const auto n = static_cast<double>(emp.counts[p]);
        std::string name = "corr_";
        for (const char* q = kChshPairNames[p]; *q; ++q) {
            name += static_cast<char>(std::tolower(static_cast<unsigned char>(*q)));
        }
        rows.push_back(SweepRow{t, lambda, std::move(name), ana.correlations[p], r,
                                std::sqrt(std::max(0.0, 1.0 - r * r) / n), emp.counts[p]});
    }
    return rows;
}

std::vector<SweepRow> run_point(const SweepConfig& cfg, double t, std::uint64_t seed) {
    const RelaxationParams params = RelaxationParams::from_time(t, cfg.t1);
    switch (cfg.protocol) {
        case SweepProtocol::Bb84Zx:
            return run_point_bb84(Bb84Variant::ZX, t, params, cfg.shots, seed);
        case SweepProtocol::Bb84Xy:
            return run_point_bb84(Bb84Variant::XY, t, params, cfg.shots, seed);
        case SweepProtocol::E91PhiPlus:
            return run_point_e91(StateLabel::PhiPlus, t, params, cfg.shots, seed);
        case SweepProtocol::E91PsiPlus:
            return run_point_e91(StateLabel::PsiPlus, t, params, cfg.shots, seed);
        case SweepProtocol::ChshPsiMinus:
            return run_point_chsh(t, params, cfg.shots, seed);
    }
    throw ValidationError("unknown sweep protocol");
}

unsigned worker_count(int points) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    n = std::min(n, 8u);
    if (const char* env = std::getenv("QKDSIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 256) {
            throw ValidationError("QKDSIM_THREADS must be an integer in [1, 256]");
        }
        n = static_cast<unsigned>(v);
    }
    return std::min(n, static_cast<unsigned>(points));
}

}  // namespace

std::string_view to_string(SweepProtocol protocol) {
    switch (protocol) {
        case SweepProtocol::Bb84Zx: return "bb84_zx";
        case SweepProtocol::Bb84Xy: return "bb84_xy";
        case SweepProtocol::E91PhiPlus: return "e91_phiplus";
        case SweepProtocol::E91PsiPlus: return "e91_psiplus";
        case SweepProtocol::ChshPsiMinus: return "chsh_psiminus";
    }
    return "?";
}

SweepProtocol parse_sweep_protocol(std::string_view name) {
    for (const SweepProtocol p :
         {SweepProtocol::Bb84Zx, SweepProtocol::Bb84Xy, SweepProtocol::E91PhiPlus,
          SweepProtocol::E91PsiPlus, SweepProtocol::ChshPsiMinus}) {
        if (name == to_string(p)) return p;
    }
    throw ValidationError("unknown sweep protocol: " + std::string(name));
}

std::vector<std::string> protocol_quantities(SweepProtocol protocol) {
    switch (protocol) {
        case SweepProtocol::Bb84Zx:
            return {"p0_given_plus", "p1_given_1", "pplus_given_plus", "success"};
        case SweepProtocol::Bb84Xy:
            return {"pplusi_given_plusi", "success"};
        case SweepProtocol::E91PhiPlus:
        case SweepProtocol::E91PsiPlus:
            return {"p00", "p01", "p10", "p11", "success"};
        case SweepProtocol::ChshPsiMinus:
            return {"chsh_s", "corr_a1b2", "corr_a1b3", "corr_a2b2", "corr_a2b3"};
    }
    throw ValidationError("unknown sweep protocol");
}

void SweepConfig::validate() const {
    if (!std::isfinite(t_start) || t_start < 0.0) {
        throw ValidationError("t_start must be finite and non-negative");
    }
    if (!std::isfinite(t_end)) throw ValidationError("t_end must be finite");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    if (steps > 1 && !(t_end > t_start)) {
        throw ValidationError("t_end must exceed t_start");
    }
    if (!(t1 > 0.0) || !std::isfinite(t1)) throw ValidationError("T1 must be positive and finite");
    if (shots < 1) throw ValidationError("shots must be >= 1");
    const auto known = protocol_quantities(protocol);
    for (const std::string& q : quantities) {
        if (std::find(known.begin(), known.end(), q) == known.end()) {
            throw ValidationError("unknown quantity for protocol " +
                                  std::string(to_string(protocol)) + ": " + q);
        }
    }
}

SweepResult run_sweep(const SweepConfig& config) {
    config.validate();
    const int points = config.steps;
    std::vector<double> ts(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        ts[static_cast<std::size_t>(i)] =
            points == 1 ? config.t_start
                        : config.t_start + (config.t_end - config.t_start) *
                                               (static_cast<double>(i) /
                                                static_cast<double>(points - 1));
    }

    std::vector<std::vector<SweepRow>> per_point(static_cast<std::size_t>(points));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const unsigned workers = worker_count(points);

    auto work = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= points) return;
            try {
                per_point[static_cast<std::size_t>(i)] =
                    run_point(config, ts[static_cast<std::size_t>(i)],
                              derive_stream(config.seed, static_cast<std::uint64_t>(i)));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(points);
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    SweepResult result{config, {}};
    for (auto& rows : per_point) {
        std::sort(rows.begin(), rows.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.quantity < b.quantity; });
        for (SweepRow& row : rows) {
            if (config.quantities.empty() ||
                std::find(config.quantities.begin(), config.quantities.end(), row.quantity) !=
                    config.quantities.end()) {
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::string csv_number(double v) {
    if (!std::isfinite(v)) throw InvariantError("CSV numeric fields must be finite");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string to_csv(const SweepResult& result) {
    std::string out = "t_ns,lambda,quantity,analytic,empirical,std_error,shots\n";
    for (const SweepRow& row : result.rows) {
        out += csv_number(row.t);
        out += ',';
        out += csv_number(row.lambda);
        out += ',';
        out += row.quantity;
        out += ',';
        out += csv_number(row.analytic);
        out += ',';
        out += csv_number(row.empirical);
        out += ',';
        out += csv_number(row.std_error);
        out += ',';
        out += std::to_string(row.shots);
        out += '\n';
    }
    return out;
}

namespace {

double log_binom_pmf(std::int64_t n, std::int64_t k, double p) {
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
           kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

// P(X >= k) for X ~ Binomial(n, p), summed outward from k. Only called when
// k sits at or above the mean, so the terms decay geometrically.
double binom_tail_upper(std::int64_t n, double p, std::int64_t k) {
    double total = 0.0;
    double pmf = std::exp(log_binom_pmf(n, k, p));
    for (std::int64_t j = k; j <= n; ++j) {
        total += pmf;
        if (pmf < total * 1e-15) break;
        pmf *= (p / (1.0 - p)) * (static_cast<double>(n - j) / static_cast<double>(j + 1));
    }
    return std::min(total, 1.0);
}

// P(X <= k), summed downward from k; only called below the mean.
double binom_tail_lower(std::int64_t n, double p, std::int64_t k) {
    double total = 0.0;
    double pmf = std::exp(log_binom_pmf(n, k, p));
    for (std::int64_t j = k; j >= 0; --j) {
        total += pmf;
        if (pmf < total * 1e-15) break;
        pmf *= ((1.0 - p) / p) * (static_cast<double>(j) / static_cast<double>(n - j + 1));
    }
    return std::min(total, 1.0);
}

// Two-sided p-value for k successes out of n against the null rate p. Uses
// the normal tail when the expected counts support it and the exact
// binomial tail (doubled short side) when they are thin; a z test alone
// badly understates the tail mass of near-empty cells.
double binomial_pvalue(std::int64_t n, double p, std::int64_t k) {
    const double mean = static_cast<double>(n) * p;
    if (std::min(mean, static_cast<double>(n) - mean) >= 25.0) {
        const double z = std::abs(static_cast<double>(k) - mean) / std::sqrt(mean * (1.0 - p));
        return std::erfc(z / std::numbers::sqrt2);
    }
    const double tail = static_cast<double>(k) >= mean ? binom_tail_upper(n, p, k)
                                                       : binom_tail_lower(n, p, k);
    return std::min(1.0, 2.0 * tail);
}

enum class RowKind { Proportion, Correlation, SValue };

RowKind classify_row(const std::string& quantity) {
    if (quantity == "chsh_s") return RowKind::SValue;
    if (quantity.rfind("corr_", 0) == 0) return RowKind::Correlation;
    return RowKind::Proportion;
}

}  // namespace

CompareReport compare(const SweepResult& result, double z_threshold) {
    if (!(z_threshold > 0.0) || !std::isfinite(z_threshold)) {
        throw ValidationError("z threshold must be positive and finite");
    }
    // The gate is a two-sided tail probability; z_threshold expresses it in
    // normal sigmas (4 -> 6.33e-5).
    const double p_threshold = std::erfc(z_threshold / std::numbers::sqrt2);
    CompareReport report{};
    std::ostringstream text;
    std::int64_t skipped = 0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        if (row.shots == 0) {
            ++skipped;
            continue;
        }
        ++report.rows_checked;
        const RowKind kind = classify_row(row.quantity);

        if (kind == RowKind::SValue) {
            // Propagated statistic: gate on its own standard error.
            const double diff = std::abs(row.empirical - row.analytic);
            if (row.std_error == 0.0) {
                if (diff > 1e-12) {
                    report.hard_failures.push_back(i);
                    text << "hard failure: " << row.quantity << " at t=" << row.t
                         << " diff=" << diff << " with zero std_error\n";
                }
                continue;
            }
            const double z = diff / row.std_error;
            report.max_z = std::max(report.max_z, z);
            if (z > z_threshold) {
                report.failing_rows.push_back(i);
                text << "z=" << z << " above threshold: " << row.quantity << " at t=" << row.t
                     << " analytic=" << row.analytic << " empirical=" << row.empirical << "\n";
            }
            continue;
        }

        // Proportions are binomial counts; a correlation of +/-1 outcomes is
        // one too, through p = (1 + r)/2.
        const double p =
            kind == RowKind::Proportion ? row.analytic : 0.5 * (1.0 + row.analytic);
        const double phat =
            kind == RowKind::Proportion ? row.empirical : 0.5 * (1.0 + row.empirical);
        const std::int64_t k = std::llround(phat * static_cast<double>(row.shots));

        if (p <= 0.0 || p >= 1.0) {
            // Deterministic null: the simulation must reproduce it exactly.
            const std::int64_t expected = p <= 0.0 ? 0 : row.shots;
            if (k != expected) {
                report.hard_failures.push_back(i);
                text << "hard failure: " << row.quantity << " at t=" << row.t
                     << " observed rate " << phat << " against a deterministic " << p << "\n";
            }
            continue;
        }

        const double null_se = std::sqrt(p * (1.0 - p) / static_cast<double>(row.shots));
        const double z = std::abs(phat - p) / null_se;
        report.max_z = std::max(report.max_z, z);
        const double pval = binomial_pvalue(row.shots, p, k);
        if (pval < p_threshold) {
            report.failing_rows.push_back(i);
            text << "tail probability " << pval << " below gate " << p_threshold << ": "
                 << row.quantity << " at t=" << row.t << " analytic=" << row.analytic
                 << " empirical=" << row.empirical << " (z=" << z << ")\n";
        }
    }
    report.pass = report.failing_rows.empty() && report.hard_failures.empty();
    text << "rows checked: " << report.rows_checked;
    if (skipped > 0) text << " (skipped " << skipped << " with empty denominators)";
    text << ", max z: " << report.max_z << ", gate: two-sided tail below " << p_threshold
         << " (" << z_threshold << " sigma equivalent)\n";
    text << (report.pass ? "PASS" : "FAIL") << "\n";
    report.text = text.str();
    return report;
}

EveEvaluation evaluate_eve(Bb84Variant variant, double lambda, std::int64_t sifted_rounds,
                           std::uint64_t seed) {
    if (sifted_rounds < 1) throw ValidationError("sifted_rounds must be >= 1");
    const EveStrategy strategy = EveStrategy::biased_default(variant);
    const OutcomeDistribution distribution = OutcomeDistribution::sifted(variant, lambda);

    EveEvaluation eval{};
    eval.variant = variant;
    eval.lambda = lambda;
    eval.strategy_name = strategy.name();
    eval.strategy_probs = strategy.probabilities();
    eval.analytic = eve_success(strategy, distribution);
    eval.brute_force = eve_brute_force(strategy, variant, lambda);
    eval.epsilon = eval.analytic - 0.25;
    eval.sifted_rounds = sifted_rounds;
    eval.seed = seed;

    const RelaxationParams params = RelaxationParams::from_lambda(lambda);
    RandomStream guesses(derive_stream(seed, kSaltEve));
    const auto& probs = strategy.probabilities();
    const auto support = variant_states(variant);
    std::int64_t hits = 0;
    for_each_bb84_round(variant, params, seed, sifted_rounds, [&](const Bb84Round& r) {
        if (!r.sifted) return;
        const std::size_t g =
            sample_outcome(std::span<const double>(probs.data(), probs.size()), guesses);
        if (support[g] == r.bob_outcome) ++hits;
    });
    eval.monte_carlo = static_cast<double>(hits) / static_cast<double>(sifted_rounds);
    eval.mc_std_error =
        std::sqrt(eval.monte_carlo * (1.0 - eval.monte_carlo) / static_cast<double>(sifted_rounds));
    return eval;
}

}  // namespace qkd
