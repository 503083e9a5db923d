#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "freiman/boolean_poly.hpp"
#include "freiman/errors.hpp"
#include "freiman/hom_space.hpp"
#include "freiman/lambda.hpp"
#include "freiman/pair_complex.hpp"
#include "freiman/zn.hpp"

namespace freiman {

/**
 * Sweep configuration.  Densities are given either explicitly or as an
 * exponent grid p = N^{-alpha}; exactly one of the two must be present.
 */
struct ExperimentConfig {
    std::vector<std::uint32_t> n_list;
    std::vector<double> alphas;  // p = N^{-alpha}
    std::vector<double> p_list;  // explicit densities
    std::uint32_t trials = 1;
    std::uint64_t master_seed = 0;
    std::uint32_t level = 1;
    bool deterministic = false;
    bool jsonl = false;

    void validate() const {
        if (n_list.empty()) throw InvalidConfig("n_list must be nonempty");
        for (std::uint32_t n : n_list)
            if (!CyclicGroup::is_prime(n) || n < 3)
                throw InvalidConfig("moduli must be primes at least 3");
        if (alphas.empty() == p_list.empty())
            throw InvalidConfig("exactly one of alphas and p_list must be given");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0)) throw InvalidConfig("alpha values must lie in (0, 1)");
        for (double p : p_list)
            if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("densities must lie in [0, 1]");
        if (trials < 1) throw InvalidConfig("trials must be at least 1");
        if (level > kDefaultLevelCap) throw InvalidConfig("level exceeds the cap");
    }

    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig cfg;
        if (j.contains("n_list")) cfg.n_list = j.at("n_list").get<std::vector<std::uint32_t>>();
        if (j.contains("alphas")) cfg.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.contains("p_list")) cfg.p_list = j.at("p_list").get<std::vector<double>>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint32_t>();
        if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("level")) cfg.level = j.at("level").get<std::uint32_t>();
        if (j.contains("deterministic")) cfg.deterministic = j.at("deterministic").get<bool>();
        if (j.contains("jsonl")) cfg.jsonl = j.at("jsonl").get<bool>();
        return cfg;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"n_list", n_list},   {"alphas", alphas},
                              {"p_list", p_list},   {"trials", trials},
                              {"master_seed", master_seed}, {"level", level},
                              {"deterministic", deterministic}, {"jsonl", jsonl}};
    }
};

struct Cell {
    std::uint32_t n = 0;
    double p = 0.0;
    std::optional<double> alpha;
};

inline std::vector<Cell> config_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (std::uint32_t n : cfg.n_list) {
        for (double a : cfg.alphas)
            cells.push_back({n, std::pow(static_cast<double>(n), -a), a});
        for (double p : cfg.p_list) cells.push_back({n, p, std::nullopt});
    }
    return cells;
}

/// Everything measured about one sampled subset.  Rank is recorded as absent
/// for empty and sub-3-element samples rather than dropping the trial.
struct TrialRecord {
    std::uint32_t n = 0;
    double p = 0.0;
    std::uint32_t trial_index = 0;
    std::uint32_t size = 0;
    bool diff_set_full = false;
    std::optional<std::uint32_t> rank;
    bool linear = false;  // rank == 1
    bool isolated_found = false;
    std::uint64_t quadruple_count = 0;
    std::vector<bool> lambda_positive;  // per-level positivity flags when computed

    nlohmann::json to_json() const {
        nlohmann::json j{{"n", n},
                         {"p", p},
                         {"trial", trial_index},
                         {"size", size},
                         {"diff_set_full", diff_set_full},
                         {"linear", linear},
                         {"isolated_found", isolated_found},
                         {"quadruple_count", quadruple_count}};
        if (rank)
            j["rank"] = *rank;
        else
            j["rank"] = nullptr;
        if (!lambda_positive.empty()) j["lambda_positive"] = lambda_positive;
        return j;
    }
};

namespace detail {

template <typename Fn>
void parallel_trials(std::uint32_t trials, Fn&& fn) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, 16);
    if (workers <= 1 || trials < 8) {
        for (std::uint32_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::uint32_t t; (t = next.fetch_add(1)) < trials;) fn(t);
        });
    for (auto& th : pool) th.join();
}

inline std::string format_fixed(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6f", v);
    return buffer;
}

inline std::string csv_header_line(bool deterministic) {
    if (deterministic) return {};
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return std::string("# generated ") + stamp + "\n";
}

/// Common per-trial measurements for the linearity experiments.
inline TrialRecord measure_trial(const CyclicGroup& group, const Cell& cell,
                                 std::uint64_t master_seed, std::uint32_t trial,
                                 std::optional<std::uint32_t> lambda_level) {
    TrialRecord rec;
    rec.n = cell.n;
    rec.p = cell.p;
    rec.trial_index = trial;
    auto set = sample_subset(group, RandomModel{cell.p, master_seed}, trial);
    rec.size = set.size();
    rec.diff_set_full = difference_set(set).size() == group.modulus();
    rec.quadruple_count = count_additive_quadruples(set);
    if (set.size() >= 3) {
        rec.rank = solve_hom_space(set).rank;
        rec.linear = *rec.rank == 1;
        rec.isolated_found = find_isolated_element(set).has_value();
    }
    if (lambda_level) {
        auto tables = build_lambda_tables(set, *lambda_level, LambdaMode::positivity);
        for (const auto& table : tables)
            rec.lambda_positive.push_back(all_triangles_positive(table));
    }
    return rec;
}

}  // namespace detail

struct ExperimentOutput {
    std::string csv;
    std::string jsonl;  // nonempty only when the config asks for per-trial records
};

/// One aggregated row per (N, p): fraction linear, fraction with full
/// difference set, mean rank over trials where it is defined, mean size.
inline ExperimentOutput sweep_linearity(const ExperimentConfig& cfg) {
    cfg.validate();
    std::ostringstream csv, jsonl;
    csv << detail::csv_header_line(cfg.deterministic);
    csv << "n,p,alpha,trials,frac_linear,frac_diffset_full,mean_rank,mean_size\n";
    for (const Cell& cell : config_cells(cfg)) {
        CyclicGroup group(cell.n);
        std::vector<TrialRecord> records(cfg.trials);
        detail::parallel_trials(cfg.trials, [&](std::uint32_t t) {
            records[t] = detail::measure_trial(group, cell, cfg.master_seed, t, std::nullopt);
        });
        std::uint64_t linear = 0, diff_full = 0, rank_defined = 0;
        double rank_sum = 0.0, size_sum = 0.0;
        for (const auto& rec : records) {
            linear += rec.linear ? 1 : 0;
            diff_full += rec.diff_set_full ? 1 : 0;
            size_sum += rec.size;
            if (rec.rank) {
                ++rank_defined;
                rank_sum += *rec.rank;
            }
            if (cfg.jsonl) jsonl << rec.to_json().dump() << '\n';
        }
        csv << cell.n << ',' << detail::format_fixed(cell.p) << ','
            << (cell.alpha ? detail::format_fixed(*cell.alpha) : std::string()) << ','
            << cfg.trials << ',' << detail::format_fixed(double(linear) / cfg.trials) << ','
            << detail::format_fixed(double(diff_full) / cfg.trials) << ','
            << (rank_defined ? detail::format_fixed(rank_sum / double(rank_defined))
                             : std::string())
            << ',' << detail::format_fixed(size_sum / cfg.trials) << '\n';
    }
    return {csv.str(), jsonl.str()};
}

/// Exact E[X] for the all-quadruple count, by classifying the N^2 difference
/// patterns of (0, b, c, b + c) and weighting each by p^{#distinct values}.
inline double exact_quadruple_expectation(std::uint32_t n, double p) {
    CyclicGroup g(n);
    double total = 0.0;
    for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c) {
            std::uint32_t d = g.add(b, c);
            // count distinct values among {0, b, c, b+c}
            std::uint32_t vals[4] = {0, b, c, d};
            std::uint32_t distinct = 0;
            for (int i = 0; i < 4; ++i) {
                bool repeat = false;
                for (int j = 0; j < i; ++j) repeat |= vals[j] == vals[i];
                if (!repeat) ++distinct;
            }
            total += std::pow(p, static_cast<double>(distinct));
        }
    return total * static_cast<double>(n);
}

/**
 * The isolated-element construction run over sampled subsets.  Reports the
 * success fraction over trials with at least three elements (empty and
 * smaller samples are tallied separately), verifies every constructed
 * indicator table, and compares the mean quadruple count with the exact
 * expectation (N <= 31) and with the N^3 p^4 bound.
 */
inline ExperimentOutput lower_bound_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::ostringstream csv, jsonl;
    csv << detail::csv_header_line(cfg.deterministic);
    csv << "n,p,alpha,trials,n_empty,n_small,n_eligible,frac_isolated,n_isolated,n_verified,"
           "mean_x,exact_ex,bound_n3p4\n";
    for (const Cell& cell : config_cells(cfg)) {
        CyclicGroup group(cell.n);
        std::vector<TrialRecord> records(cfg.trials);
        std::vector<std::uint8_t> verified(cfg.trials, 0);
        detail::parallel_trials(cfg.trials, [&](std::uint32_t t) {
            records[t] = detail::measure_trial(group, cell, cfg.master_seed, t, std::nullopt);
            if (records[t].isolated_found) {
                auto set = sample_subset(group, RandomModel{cell.p, cfg.master_seed}, t);
                auto x0 = find_isolated_element(set);
                auto f = indicator_hom_from_isolated(set, *x0);
                verified[t] =
                    verify_freiman_hom(set, f) && !is_restriction_of_linear(set, f) ? 1 : 0;
            }
        });
        std::uint64_t n_empty = 0, n_small = 0, n_eligible = 0, n_isolated = 0, n_verified = 0;
        double x_sum = 0.0;
        for (const auto& rec : records) {
            if (rec.size == 0)
                ++n_empty;
            else if (rec.size < 3)
                ++n_small;
            else
                ++n_eligible;
            if (rec.isolated_found) ++n_isolated;
            x_sum += static_cast<double>(rec.quadruple_count);
            if (cfg.jsonl) jsonl << rec.to_json().dump() << '\n';
        }
        for (std::uint8_t v : verified) n_verified += v;
        double frac_isolated =
            n_eligible ? static_cast<double>(n_isolated) / static_cast<double>(n_eligible) : 0.0;
        double bound = std::pow(static_cast<double>(cell.n), 3.0) * std::pow(cell.p, 4.0);
        csv << cell.n << ',' << detail::format_fixed(cell.p) << ','
            << (cell.alpha ? detail::format_fixed(*cell.alpha) : std::string()) << ','
            << cfg.trials << ',' << n_empty << ',' << n_small << ',' << n_eligible << ','
            << detail::format_fixed(frac_isolated) << ',' << n_isolated << ',' << n_verified
            << ',' << detail::format_fixed(x_sum / cfg.trials) << ','
            << (cell.n <= 31
                    ? detail::format_fixed(exact_quadruple_expectation(cell.n, cell.p))
                    : std::string())
            << ',' << detail::format_fixed(bound) << '\n';
    }
    return {csv.str(), jsonl.str()};
}

/// Per (N, p): fraction of trials with full positivity at each level up to the
/// configured one, next to the fraction linear; level positivity is sufficient
/// but not necessary for linearity, and violations of that implication are
/// counted (expected zero).
inline ExperimentOutput lambda_threshold_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::ostringstream csv, jsonl;
    csv << detail::csv_header_line(cfg.deterministic);
    csv << "n,p,alpha,trials,frac_linear";
    for (std::uint32_t l = 0; l <= cfg.level; ++l) csv << ",frac_positive_l" << l;
    csv << ",implication_violations\n";
    for (const Cell& cell : config_cells(cfg)) {
        CyclicGroup group(cell.n);
        std::vector<TrialRecord> records(cfg.trials);
        detail::parallel_trials(cfg.trials, [&](std::uint32_t t) {
            records[t] = detail::measure_trial(group, cell, cfg.master_seed, t, cfg.level);
        });
        std::uint64_t linear = 0, violations = 0;
        std::vector<std::uint64_t> positive(cfg.level + 1, 0);
        for (const auto& rec : records) {
            linear += rec.linear ? 1 : 0;
            bool any_positive = false;
            for (std::uint32_t l = 0; l <= cfg.level; ++l) {
                if (rec.lambda_positive[l]) {
                    ++positive[l];
                    any_positive = true;
                }
            }
            if (any_positive && !rec.linear) ++violations;
            if (cfg.jsonl) jsonl << rec.to_json().dump() << '\n';
        }
        csv << cell.n << ',' << detail::format_fixed(cell.p) << ','
            << (cell.alpha ? detail::format_fixed(*cell.alpha) : std::string()) << ','
            << cfg.trials << ',' << detail::format_fixed(double(linear) / cfg.trials);
        for (std::uint32_t l = 0; l <= cfg.level; ++l)
            csv << ',' << detail::format_fixed(double(positive[l]) / cfg.trials);
        csv << ',' << violations << '\n';
    }
    return {csv.str(), jsonl.str()};
}

/**
 * Measured distribution constants of the exact nondegenerate level-1
 * expansion: per |B| bucket the largest containment ratio scaled by
 * N^{ceil(|B|/2)} (N^4 for the full bucket), plus the expected-derivative
 * ratios against the (N p^2)^{-ceil(j/2)} N^4 p^9 shape and the degenerate
 * tuple fraction.
 */
inline std::string dist_bound_report(const std::vector<std::uint32_t>& n_list, double p,
                                     std::uint32_t a, std::uint32_t b, std::uint32_t c,
                                     bool deterministic = true,
                                     std::uint64_t subset_budget = kDefaultSubsetBudget) {
    std::ostringstream csv;
    csv << detail::csv_header_line(deterministic);
    csv << "n,p,a,b,c,total_tuples,degenerate_count,degenerate_fraction,param_relation,m_empty,"
           "c_b1,c_b2,c_b3,c_b4,c_b9,ej_ratio_1,ej_ratio_2,ej_ratio_3,ej_ratio_4\n";
    for (std::uint32_t n : n_list) {
        if (n > 17) throw TooLarge("exact expansion report limited to N <= 17");
        CyclicGroup group(n);
        auto stats = lambda_tilde_stats(SubsetOfZn::full(group), 1, a, b, c);
        auto poly = from_lambda1(group, a, b, c, /*filtered=*/true);
        DerivativeIndex index(poly, subset_budget);
        const double m_empty = static_cast<double>(monomial_count(poly, {}));
        std::uint64_t degenerate = stats.total_tuples - stats.nondegenerate_count;

        csv << n << ',' << detail::format_fixed(p) << ',' << a << ',' << b << ',' << c << ','
            << stats.total_tuples << ',' << degenerate << ','
            << detail::format_fixed(double(degenerate) / double(stats.total_tuples)) << ','
            << (stats.parameter_relation ? 1 : 0) << ',' << stats.nondegenerate_count;
        for (std::uint32_t bucket : {1u, 2u, 3u, 4u, 9u}) {
            double scale = bucket == 9 ? std::pow(double(n), 4.0)
                                       : std::pow(double(n), std::ceil(bucket / 2.0));
            double c_measured = double(index.max_monomial_count(bucket)) / m_empty * scale;
            csv << ',' << detail::format_fixed(c_measured);
        }
        double base = std::pow(double(n), 4.0) * std::pow(p, 9.0);
        double np2 = double(n) * p * p;
        for (std::uint32_t j = 1; j <= 4; ++j) {
            double shape = base * std::pow(np2, -std::ceil(j / 2.0));
            csv << ',' << detail::format_fixed(index.max_expected_derivative(j, p) / shape);
        }
        csv << '\n';
    }
    return csv.str();
}

/// JSON record of a rank computation, basis included as value tables aligned
/// with the sorted member list.  With include_pairs, the kernel of the
/// pair-constraint system is attached as full tables over 0..N-1 (requires
/// A - A = Z_N).
inline nlohmann::json rank_report(const SubsetOfZn& set, bool include_pairs = false) {
    auto result = solve_hom_space(set);
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& f : result.basis) basis.push_back(f.values);
    nlohmann::json j{{"n", set.modulus()},
                     {"members", set.members()},
                     {"size", set.size()},
                     {"dimension", result.dimension},
                     {"rank", result.rank},
                     {"linear", result.rank == 1},
                     {"basis", basis}};
    if (include_pairs) {
        auto kernel = induced_space_basis(set);
        j["induced_dimension"] = kernel.size();
        j["induced_basis"] = kernel;
        j["linear_via_pairs"] = kernel.size() == 1;
    }
    return j;
}

}  // namespace freiman
