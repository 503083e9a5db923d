// Command-line front end: exact rank computations, seeded Monte Carlo sweeps,
// concentration-bound evaluation, and the distribution-constant report.
//
// Exit codes: 0 on success, 2 on invalid configuration or input, 3 when an
// exact enumeration exceeds its budget.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freiman/boolean_poly.hpp"
#include "freiman/experiments.hpp"

namespace {

using namespace freiman;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;

SubsetOfZn parse_set_argument(const std::string& arg) {
    if (arg.find('@') != std::string::npos) {
        // literal form "a,b,c@N"
        auto at = arg.find('@');
        std::uint32_t n = static_cast<std::uint32_t>(std::stoul(arg.substr(at + 1)));
        std::vector<std::uint32_t> members;
        std::istringstream stream(arg.substr(0, at));
        for (std::string tok; std::getline(stream, tok, ',');)
            if (!tok.empty()) members.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        return SubsetOfZn(CyclicGroup(n), members);
    }
    std::ifstream in(arg);
    if (!in) throw InvalidConfig("cannot open set file: " + arg);
    nlohmann::json j;
    in >> j;
    return SubsetOfZn(CyclicGroup(j.at("n").get<std::uint32_t>()),
                      j.at("members").get<std::vector<std::uint32_t>>());
}

void write_or_print(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InvalidConfig("cannot open output file: " + out_path);
    out << text;
}

struct SweepOptions {
    std::string config_path;
    std::vector<std::uint32_t> n_list;
    std::vector<double> alphas;
    std::vector<double> p_list;
    std::optional<std::uint32_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> levels;
    bool deterministic = false;
    bool jsonl = false;
    std::string out_path;
};

void add_sweep_options(CLI::App* cmd, SweepOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file");
    cmd->add_option("--n", opt.n_list, "prime moduli")->delimiter(',');
    cmd->add_option("--alpha", opt.alphas, "density exponents, p = N^-alpha")->delimiter(',');
    cmd->add_option("--p", opt.p_list, "explicit densities")->delimiter(',');
    auto* trials = cmd->add_option("--trials", "trials per cell");
    trials->each([&opt](const std::string& v) { opt.trials = std::stoul(v); });
    auto* seed = cmd->add_option("--seed", "master seed");
    seed->each([&opt](const std::string& v) { opt.seed = std::stoull(v); });
    auto* levels = cmd->add_option("--levels", "subdivision level");
    levels->each([&opt](const std::string& v) { opt.levels = std::stoul(v); });
    cmd->add_flag("--deterministic", opt.deterministic, "suppress the timestamp header");
    cmd->add_flag("--jsonl", opt.jsonl, "write per-trial records next to --out");
    cmd->add_option("--out", opt.out_path, "output CSV path (stdout when omitted)");
}

ExperimentConfig resolve_config(const SweepOptions& opt) {
    ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw InvalidConfig("cannot open config file: " + opt.config_path);
        nlohmann::json j;
        in >> j;
        cfg = ExperimentConfig::from_json(j);
    }
    if (!opt.n_list.empty()) cfg.n_list = opt.n_list;
    if (!opt.alphas.empty()) {
        cfg.alphas = opt.alphas;
        cfg.p_list.clear();
    }
    if (!opt.p_list.empty()) {
        cfg.p_list = opt.p_list;
        if (!opt.alphas.empty()) throw InvalidConfig("give either --alpha or --p, not both");
        cfg.alphas.clear();
    }
    if (opt.trials) cfg.trials = *opt.trials;
    if (opt.seed) cfg.master_seed = *opt.seed;
    if (opt.levels) cfg.level = *opt.levels;
    if (opt.deterministic) cfg.deterministic = true;
    if (opt.jsonl) cfg.jsonl = true;
    cfg.validate();
    if (cfg.jsonl && opt.out_path.empty())
        throw InvalidConfig("--jsonl requires --out for the record stream");
    return cfg;
}

void emit_experiment(const ExperimentOutput& out, const SweepOptions& opt) {
    write_or_print(out.csv, opt.out_path);
    if (!out.jsonl.empty()) write_or_print(out.jsonl, opt.out_path + ".jsonl");
}

int run(int argc, char** argv) {
    CLI::App app{"Exact Freiman rank computations and seeded threshold experiments on Z_N"};
    app.require_subcommand(1);

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "rank of a set given as a,b,c@N or a JSON file");
    std::string set_arg, rank_out;
    bool rank_pairs = false;
    rank_cmd->add_option("set", set_arg, "subset literal or file")->required();
    rank_cmd->add_flag("--pairs", rank_pairs, "also report the pair-constraint kernel");
    rank_cmd->add_option("--out", rank_out, "output path");

    // sweeps
    SweepOptions sweep_opt, lower_opt, lambda_opt;
    auto* sweep_cmd = app.add_subcommand("sweep", "linearity fraction sweep");
    add_sweep_options(sweep_cmd, sweep_opt);
    auto* lower_cmd = app.add_subcommand("lowerbound", "isolated-element construction sweep");
    add_sweep_options(lower_cmd, lower_opt);
    auto* lambda_cmd = app.add_subcommand("lambda", "subdivision positivity sweep");
    add_sweep_options(lambda_cmd, lambda_opt);
    std::string lambda_set, lambda_mode = "positivity", table_out;
    lambda_cmd->add_option("--set", lambda_set,
                           "compute the table of one set (a,b,c@N or file) instead of sweeping");
    lambda_cmd->add_option("--mode", lambda_mode, "table mode for --set")
        ->check(CLI::IsMember({"positivity", "exact"}));
    lambda_cmd->add_option("--out-table", table_out, "binary table dump path for --set");

    // vu
    auto* vu_cmd = app.add_subcommand("vu", "evaluate the polynomial concentration bound");
    std::string poly_kind = "triangle", vu_out;
    std::uint32_t vertices = 10, vu_modulus = 13;
    std::vector<std::uint32_t> abc = {1, 2, 6};
    bool filtered = false;
    double vu_p = 0.5, vu_lambda = 1.0, vu_ck = 1.0, vu_dk = 1.0;
    std::vector<double> schedule_f;
    vu_cmd->add_option("--poly", poly_kind, "triangle or lambda1")
        ->check(CLI::IsMember({"triangle", "lambda1"}));
    vu_cmd->add_option("--vertices", vertices, "vertex count for the triangle polynomial");
    vu_cmd->add_option("--modulus", vu_modulus, "modulus for the lambda1 polynomial");
    vu_cmd->add_option("--abc", abc, "parameter triple for lambda1")->delimiter(',');
    vu_cmd->add_flag("--filtered", filtered, "use the nondegenerate expansion");
    vu_cmd->add_option("--p", vu_p, "density");
    vu_cmd->add_option("--schedule", schedule_f, "F_0,...,F_k")->delimiter(',')->required();
    vu_cmd->add_option("--lambda", vu_lambda, "lambda parameter")->required();
    vu_cmd->add_option("--ck", vu_ck, "scale constant c_k");
    vu_cmd->add_option("--dk", vu_dk, "scale constant d_k");
    std::uint32_t vu_trials = 0;
    std::uint64_t vu_seed = 0;
    std::string vu_dump_poly;
    vu_cmd->add_option("--empirical", vu_trials, "also simulate this many trials");
    vu_cmd->add_option("--seed", vu_seed, "seed for --empirical");
    vu_cmd->add_option("--dump-poly", vu_dump_poly, "write the polynomial as JSON lines");
    vu_cmd->add_option("--out", vu_out, "output path");

    // distreport
    auto* dist_cmd = app.add_subcommand("distreport", "distribution constants of the exact expansion");
    std::vector<std::uint32_t> dist_n = {13, 17};
    std::vector<std::uint32_t> dist_abc = {1, 2, 6};
    double dist_p = 0.3;
    std::string dist_out;
    bool dist_deterministic = false;
    dist_cmd->add_option("--n", dist_n, "moduli, each at most 17")->delimiter(',');
    dist_cmd->add_option("--p", dist_p, "density used for the derivative ratios");
    dist_cmd->add_option("--abc", dist_abc, "parameter triple")->delimiter(',');
    dist_cmd->add_flag("--deterministic", dist_deterministic, "suppress the timestamp header");
    dist_cmd->add_option("--out", dist_out, "output path");

    CLI11_PARSE(app, argc, argv);

    if (rank_cmd->parsed()) {
        auto set = parse_set_argument(set_arg);
        write_or_print(rank_report(set, rank_pairs).dump() + "\n", rank_out);
        return kExitOk;
    }
    if (sweep_cmd->parsed()) {
        auto cfg = resolve_config(sweep_opt);
        emit_experiment(sweep_linearity(cfg), sweep_opt);
        return kExitOk;
    }
    if (lower_cmd->parsed()) {
        auto cfg = resolve_config(lower_opt);
        emit_experiment(lower_bound_experiment(cfg), lower_opt);
        return kExitOk;
    }
    if (lambda_cmd->parsed()) {
        if (!lambda_set.empty()) {
            auto set = parse_set_argument(lambda_set);
            std::uint32_t level = lambda_opt.levels.value_or(1);
            auto table = lambda_table(set, level,
                                      lambda_mode == "exact" ? LambdaMode::exact_count
                                                             : LambdaMode::positivity);
            if (!table_out.empty()) {
                std::ofstream out(table_out, std::ios::binary);
                if (!out) throw InvalidConfig("cannot open output file: " + table_out);
                write_lambda_table(table, out);
            }
            std::ostringstream csv;
            write_lambda_table_csv(table, csv);
            write_or_print(csv.str(), lambda_opt.out_path);
            return kExitOk;
        }
        auto cfg = resolve_config(lambda_opt);
        emit_experiment(lambda_threshold_experiment(cfg), lambda_opt);
        return kExitOk;
    }
    if (vu_cmd->parsed()) {
        ReducedBooleanPolynomial poly =
            poly_kind == "triangle"
                ? from_triangle_count(vertices)
                : [&] {
                      if (abc.size() != 3) throw InvalidConfig("--abc needs three values");
                      return from_lambda1(CyclicGroup(vu_modulus), abc[0], abc[1], abc[2],
                                          filtered);
                  }();
        if (!vu_dump_poly.empty()) {
            std::ofstream out(vu_dump_poly);
            if (!out) throw InvalidConfig("cannot open output file: " + vu_dump_poly);
            write_polynomial_jsonl(poly, out);
        }
        DerivativeIndex index(poly);
        nlohmann::json j;
        std::vector<double> ejs;
        for (std::uint32_t jdx = 0; jdx <= poly.degree(); ++jdx)
            ejs.push_back(index.max_expected_derivative(jdx, vu_p));
        j["e_j"] = ejs;
        VuSchedule schedule{schedule_f, vu_lambda, vu_ck, vu_dk};
        auto bound = vu_bound(poly, schedule, vu_p);
        j["c_k"] = vu_ck;
        j["d_k"] = vu_dk;
        j["deviation"] = bound.deviation;
        j["probability_bound"] = bound.probability_bound;
        std::string text = j.dump() + "\n";
        if (vu_trials > 0) {
            auto s = empirical_concentration(poly, vu_p, vu_trials, vu_seed);
            std::ostringstream csv;
            csv << "mean,variance,min,max,q05,q25,median,q75,q95\n"
                << s.mean << ',' << s.variance << ',' << s.min << ',' << s.max << ',' << s.q05
                << ',' << s.q25 << ',' << s.median << ',' << s.q75 << ',' << s.q95 << '\n';
            text += csv.str();
        }
        write_or_print(text, vu_out);
        return kExitOk;
    }
    if (dist_cmd->parsed()) {
        if (dist_abc.size() != 3) throw InvalidConfig("--abc needs three values");
        write_or_print(dist_bound_report(dist_n, dist_p, dist_abc[0], dist_abc[1], dist_abc[2],
                                         dist_deterministic),
                       dist_out);
        return kExitOk;
    }
    return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const TooLarge& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const LevelCapExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const ScheduleInvalid& e) {
        std::cerr << "invalid schedule: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const InvalidConfig& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
