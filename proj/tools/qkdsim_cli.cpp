// Command line front end. Talks to the simulator exclusively through the C
// API in qkdsim.h.
//
// Exit codes: 0 success, 1 verification or comparison failure, 2 usage or
// parameter error, 3 I/O error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qkdsim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Locale-independent number formatting, 17 significant digits: matches the
// CSV emitted by the library.
std::string fmt17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int fail_status(qkd_status_t status) {
    std::cerr << "error: " << qkd_last_error() << "\n";
    return status == QKD_ERR_INVALID_ARGUMENT ? kExitUsage : kExitCheckFailed;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

// Flat key=value pairs, one per line, '#' starts a comment. Keys use the
// long option names with '-' or '_' interchangeably.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
        }
        std::replace(key.begin(), key.end(), '_', '-');
        entries.emplace_back(std::move(key), value);
    }
    return entries;
}

// Splices config entries in as "--key=value" tokens right after the
// subcommand. Every option takes the last occurrence, and explicit flags
// sit after the injected tokens, so flags override the config and the
// config overrides defaults.
void inject_config(const CLI::App& app, std::vector<std::string>& args) {
    std::string sub_name;
    std::size_t sub_pos = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub_name = args[i];
            sub_pos = i;
            break;
        }
    }
    if (sub_name.empty()) return;
    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(sub_name);
    } catch (const CLI::OptionNotFound&) {
        return;  // parse() will report the unknown subcommand
    }

    std::string config_path;
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) return;

    std::vector<std::string> tokens;
    for (const auto& [key, value] : read_config_file(config_path)) {
        if (key == "config") {
            throw UsageError("config files cannot set 'config'");
        }
        if (const_cast<CLI::App*>(sub)->get_option_no_throw("--" + key) == nullptr) {
            throw UsageError("unknown config key for '" + sub_name + "': " + key);
        }
        tokens.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, tokens.begin(),
                tokens.end());
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing to " + path);
}

const char* band_name(qkd_chsh_band_t band) {
    switch (band) {
        case QKD_BAND_SECURE: return "secure (S at 2*sqrt(2))";
        case QKD_BAND_POST_PROCESS: return "post-process (2 < S < 2*sqrt(2))";
        case QKD_BAND_DISCARD: return "discard (S <= 2)";
    }
    return "?";
}

struct SweepArgs {
    int protocol = QKD_PROTOCOL_BB84_ZX;
    double t_start = 0.0;
    double t_end = 0.0;
    int steps = 50;
    double t1 = 0.0;
    long long shots = 100000;
    unsigned long long seed = 1;
    double z_threshold = 0.0;
    std::string out;
    std::string config;
    CLI::Option* t_end_opt = nullptr;
};

int run_sweep(const SweepArgs& a) {
    qkd_sweep_config_t cfg = qkd_sweep_config_default();
    cfg.protocol = static_cast<qkd_protocol_t>(a.protocol);
    cfg.t_start_ns = a.t_start;
    cfg.t_end_ns = a.t_end_opt->count() > 0 ? a.t_end : 5.0 * a.t1;
    cfg.steps = a.steps;
    cfg.t1_ns = a.t1;
    cfg.shots = a.shots;
    cfg.seed = a.seed;

    qkd_sweep_result_t* result = nullptr;
    if (const qkd_status_t st = qkd_sweep_run(&cfg, &result); st != QKD_OK) {
        return fail_status(st);
    }
    char* csv = nullptr;
    if (const qkd_status_t st = qkd_sweep_csv(result, &csv); st != QKD_OK) {
        qkd_sweep_free(result);
        return fail_status(st);
    }
    const std::string text(csv);
    qkd_string_free(csv);
    write_text(a.out, text);

    int exit_code = kExitOk;
    if (a.z_threshold > 0.0) {
        int pass = 0;
        char* report = nullptr;
        if (const qkd_status_t st = qkd_sweep_compare(result, a.z_threshold, &pass, &report);
            st != QKD_OK) {
            qkd_sweep_free(result);
            return fail_status(st);
        }
        // Keep a stdout CSV clean: the gate report goes to stderr.
        std::ostream& os = (a.out.empty() || a.out == "-") ? std::cerr : std::cout;
        os << report;
        qkd_string_free(report);
        if (pass == 0) exit_code = kExitCheckFailed;
    }
    qkd_sweep_free(result);
    return exit_code;
}

struct EveArgs {
    int variant = QKD_VARIANT_ZX;
    double lambda = 0.0;
    double t = 0.0;
    double t1 = 0.0;
    long long shots = 100000;
    unsigned long long seed = 1;
    std::string out;
    std::string config;
    CLI::Option* lambda_opt = nullptr;
    CLI::Option* t_opt = nullptr;
};

int run_eve(const EveArgs& a) {
    double lambda = a.lambda;
    if (a.t_opt->count() > 0) {
        if (const qkd_status_t st = qkd_lambda_from_time(a.t, a.t1, &lambda); st != QKD_OK) {
            return fail_status(st);
        }
    }
    qkd_eve_report_t rep{};
    if (const qkd_status_t st = qkd_eve_evaluate(static_cast<qkd_variant_t>(a.variant), lambda,
                                                 a.shots, a.seed, &rep);
        st != QKD_OK) {
        return fail_status(st);
    }

    double t_ns = 0.0;
    if (const qkd_status_t st = qkd_time_from_lambda(lambda, a.t1, &t_ns); st != QKD_OK) {
        return fail_status(st);
    }
    static const char* const kZxNames[] = {"0", "1", "+", "-"};
    static const char* const kXyNames[] = {"+", "-", "+i", "-i"};
    const char* const* names = a.variant == QKD_VARIANT_ZX ? kZxNames : kXyNames;

    std::cout << "variant:      " << (a.variant == QKD_VARIANT_ZX ? "zx" : "xy") << "\n";
    std::cout << "lambda:       " << fmt17(lambda) << "  (t = "
              << (std::isinf(t_ns) ? std::string("inf") : fmt17(t_ns))
              << " ns at T1 = " << fmt17(a.t1) << " ns)\n";
    std::cout << "strategy:     " << rep.strategy_name;
    for (int i = 0; i < 4; ++i) {
        std::cout << "  p(" << names[i] << ")=" << fmt17(rep.strategy_probs[i]);
    }
    std::cout << "\n";
    std::cout << "analytic:     " << fmt17(rep.analytic) << "\n";
    std::cout << "brute force:  " << fmt17(rep.brute_force) << "\n";
    std::cout << "monte carlo:  " << fmt17(rep.monte_carlo) << " +/- " << fmt17(rep.mc_std_error)
              << "  (" << rep.sifted_rounds << " sifted rounds, seed " << a.seed << ")\n";
    std::cout << "epsilon:      " << fmt17(rep.epsilon) << " over the blind 1/4\n";

    if (!a.out.empty()) {
        if (std::isinf(t_ns)) {
            throw UsageError("no finite idle time corresponds to lambda = 1; use lambda < 1 with --out");
        }
        std::string csv = "t_ns,lambda,quantity,analytic,empirical,std_error,shots\n";
        csv += fmt17(t_ns) + "," + fmt17(lambda) + ",eve_success," + fmt17(rep.analytic) + "," +
               fmt17(rep.monte_carlo) + "," + fmt17(rep.mc_std_error) + "," +
               std::to_string(rep.sifted_rounds) + "\n";
        write_text(a.out, csv);
    }
    return kExitOk;
}

struct ChshArgs {
    int source = QKD_BELL_PSI_MINUS;
    double t = 0.0;
    double lambda = 0.0;
    double t1 = 0.0;
    long long shots = 0;
    unsigned long long seed = 1;
    std::string config;
    CLI::Option* lambda_opt = nullptr;
};

int run_chsh(const ChshArgs& a) {
    double t_ns = a.t;
    if (a.lambda_opt->count() > 0) {
        if (const qkd_status_t st = qkd_time_from_lambda(a.lambda, a.t1, &t_ns); st != QKD_OK) {
            return fail_status(st);
        }
    }
    double lambda = 0.0;
    if (const qkd_status_t st = qkd_lambda_from_time(t_ns, a.t1, &lambda); st != QKD_OK) {
        return fail_status(st);
    }
    qkd_chsh_report_t rep{};
    if (const qkd_status_t st = qkd_chsh_evaluate(static_cast<qkd_bell_t>(a.source), t_ns, a.t1,
                                                  a.shots, a.seed, &rep);
        st != QKD_OK) {
        return fail_status(st);
    }

    static const char* kSources[] = {"phi_plus", "phi_minus", "psi_plus", "psi_minus"};
    static const char* kPairs[] = {"A1B3", "A1B2", "A2B3", "A2B2"};
    std::cout << "source:  " << kSources[a.source] << "   t = "
              << (std::isinf(t_ns) ? std::string("inf") : fmt17(t_ns)) << " ns   T1 = "
              << fmt17(a.t1) << " ns   lambda = " << fmt17(lambda) << "\n";
    std::cout << "pair    analytic                 empirical                rounds\n";
    for (int p = 0; p < 4; ++p) {
        std::printf("%-7s %-24s", kPairs[p], fmt17(rep.corr_analytic[p]).c_str());
        if (rep.empirical != 0) {
            std::printf(" %-24s %lld\n", fmt17(rep.corr_empirical[p]).c_str(), rep.pair_counts[p]);
        } else {
            std::printf(" %-24s %s\n", "-", "-");
        }
    }
    std::cout << "S (analytic)  = " << fmt17(rep.s_analytic) << "\n";
    if (rep.empirical != 0) {
        std::cout << "S (empirical) = " << fmt17(rep.s_empirical) << " +/- "
                  << fmt17(rep.s_std_error) << "\n";
    }
    std::cout << "band: " << band_name(rep.band) << "\n";
    return kExitOk;
}

int run_verify() {
    int all_passed = 0;
    char* report = nullptr;
    if (const qkd_status_t st = qkd_verify(&all_passed, &report); st != QKD_OK) {
        return fail_status(st);
    }
    std::cout << report;
    qkd_string_free(report);
    return all_passed != 0 ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QKD relaxation-noise simulator: analytic curves cross-checked against "
                 "seeded Monte Carlo runs."};
    app.require_subcommand(0, 1);

    const std::map<std::string, int> protocol_names{{"bb84_zx", QKD_PROTOCOL_BB84_ZX},
                                                    {"bb84_xy", QKD_PROTOCOL_BB84_XY},
                                                    {"e91_phiplus", QKD_PROTOCOL_E91_PHI_PLUS},
                                                    {"e91_psiplus", QKD_PROTOCOL_E91_PSI_PLUS},
                                                    {"chsh_psiminus", QKD_PROTOCOL_CHSH_PSI_MINUS}};
    const std::map<std::string, int> variant_names{{"zx", QKD_VARIANT_ZX}, {"xy", QKD_VARIANT_XY}};
    const std::map<std::string, int> source_names{{"phi_plus", QKD_BELL_PHI_PLUS},
                                                  {"phi_minus", QKD_BELL_PHI_MINUS},
                                                  {"psi_plus", QKD_BELL_PSI_PLUS},
                                                  {"psi_minus", QKD_BELL_PSI_MINUS}};

    SweepArgs sweep_args;
    sweep_args.t1 = qkd_default_t1();
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Sweep idle time, writing analytic and Monte Carlo columns as CSV");
    sweep->add_option("--protocol", sweep_args.protocol, "Protocol to sweep")
        ->transform(CLI::CheckedTransformer(protocol_names))
        ->take_last();
    sweep->add_option("--t-start", sweep_args.t_start, "Grid start, ns")->take_last();
    sweep_args.t_end_opt =
        sweep->add_option("--t-end", sweep_args.t_end, "Grid end, ns (default 5*T1)")->take_last();
    sweep->add_option("--steps", sweep_args.steps, "Grid points")->take_last();
    sweep->add_option("--t1", sweep_args.t1, "Relaxation time constant, ns")->take_last();
    sweep->add_option("--shots", sweep_args.shots,
                      "Sifted rounds (BB84) or source pairs (E91) per grid point")
        ->take_last();
    sweep->add_option("--seed", sweep_args.seed, "Random seed")->take_last();
    sweep->add_option("--z-threshold", sweep_args.z_threshold,
                      "Gate each row's tail probability at this sigma level (0 = off)")
        ->take_last();
    sweep->add_option("--out", sweep_args.out, "Output CSV path ('-' = stdout)")->take_last();
    sweep->add_option("--config", sweep_args.config, "key=value config file")->take_last();

    EveArgs eve_args;
    eve_args.t1 = qkd_default_t1();
    CLI::App* eve = app.add_subcommand(
        "eve", "Evaluate the intercepting guesser: analytic, enumerated, Monte Carlo");
    eve->add_option("--variant", eve_args.variant, "Encoding bases")
        ->transform(CLI::CheckedTransformer(variant_names))
        ->take_last();
    eve_args.lambda_opt =
        eve->add_option("--lambda", eve_args.lambda, "Decay fraction in [0, 1]")->take_last();
    eve_args.t_opt = eve->add_option("--t", eve_args.t, "Idle time, ns")->take_last();
    eve->add_option("--t1", eve_args.t1, "Relaxation time constant, ns")->take_last();
    eve->add_option("--shots", eve_args.shots, "Sifted rounds for the Monte Carlo estimate")
        ->take_last();
    eve->add_option("--seed", eve_args.seed, "Random seed")->take_last();
    eve->add_option("--out", eve_args.out, "Optional CSV path (sweep schema)")->take_last();
    eve->add_option("--config", eve_args.config, "key=value config file")->take_last();

    ChshArgs chsh_args;
    chsh_args.t1 = qkd_default_t1();
    CLI::App* chsh = app.add_subcommand(
        "chsh", "CHSH S for an evolved Bell pair, with the three-band classification");
    chsh->add_option("--source", chsh_args.source, "Bell state")
        ->transform(CLI::CheckedTransformer(source_names))
        ->take_last();
    chsh->add_option("--t", chsh_args.t, "Idle time, ns")->take_last();
    chsh_args.lambda_opt =
        chsh->add_option("--lambda", chsh_args.lambda, "Decay fraction (alternative to --t)")
            ->take_last();
    chsh->add_option("--t1", chsh_args.t1, "Relaxation time constant, ns")->take_last();
    chsh->add_option("--shots", chsh_args.shots, "E91 pairs to simulate (0 = analytic only)")
        ->take_last();
    chsh->add_option("--seed", chsh_args.seed, "Random seed")->take_last();
    chsh->add_option("--config", chsh_args.config, "key=value config file")->take_last();

    CLI::App* verify =
        app.add_subcommand("verify", "Run the analytic invariant suites and report per suite");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        inject_config(app, args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const std::string& s : args) cargv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sweep->parsed()) {
            return run_sweep(sweep_args);
        }
        if (eve->parsed()) {
            if (eve_args.lambda_opt->count() > 0 && eve_args.t_opt->count() > 0) {
                throw UsageError("--lambda and --t are mutually exclusive");
            }
            if (eve_args.lambda_opt->count() == 0 && eve_args.t_opt->count() == 0) {
                throw UsageError("provide exactly one of --lambda or --t");
            }
            return run_eve(eve_args);
        }
        if (chsh->parsed()) {
            if (chsh_args.lambda_opt->count() > 0) {
                CLI::Option* t_opt = chsh->get_option("--t");
                if (t_opt->count() > 0) {
                    throw UsageError("--lambda and --t are mutually exclusive");
                }
            }
            return run_chsh(chsh_args);
        }
        if (verify->parsed()) {
            return run_verify();
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::cerr << app.help();
    return kExitUsage;
}
