#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "freiman/errors.hpp"
#include "freiman/lambda.hpp"
#include "freiman/zn.hpp"

namespace freiman {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::uint32_t kMaxDerivativeDegree = 9;
inline constexpr std::uint64_t kDefaultSubsetBudget = 1ull << 28;

/// One reduced monomial: a set of variable indices and a nonnegative weight.
struct BoolTerm {
    std::vector<std::uint32_t> vars;  // sorted, no repeats
    std::uint64_t weight = 1;
};

/**
 * A multilinear polynomial in 0/1 variables with nonnegative integer weights,
 * kept in reduced form: every variable appears at most once per term and
 * coinciding terms have their weights merged.
 */
class ReducedBooleanPolynomial {
  public:
    ReducedBooleanPolynomial(std::uint32_t variable_count, std::vector<BoolTerm> raw_terms)
        : nvars_(variable_count) {
        std::map<std::vector<std::uint32_t>, std::uint64_t> merged;
        for (auto& t : raw_terms) {
            std::sort(t.vars.begin(), t.vars.end());
            t.vars.erase(std::unique(t.vars.begin(), t.vars.end()), t.vars.end());
            for (std::uint32_t v : t.vars)
                if (v >= nvars_) throw InvalidConfig("variable index out of range");
            if (t.weight != 0) merged[t.vars] += t.weight;
        }
        for (auto& [vars, w] : merged) terms_.push_back({vars, w});
    }

    std::uint32_t variable_count() const { return nvars_; }
    const std::vector<BoolTerm>& terms() const { return terms_; }

    std::uint32_t degree() const {
        std::size_t deg = 0;
        for (const auto& t : terms_) deg = std::max(deg, t.vars.size());
        return static_cast<std::uint32_t>(deg);
    }

    std::uint64_t evaluate(const std::vector<std::uint8_t>& assignment) const {
        if (assignment.size() != nvars_) throw InvalidConfig("assignment width mismatch");
        std::uint64_t total = 0;
        for (const auto& t : terms_) {
            bool on = true;
            for (std::uint32_t v : t.vars)
                if (!assignment[v]) { on = false; break; }
            if (on) total += t.weight;
        }
        return total;
    }

  private:
    std::uint32_t nvars_;
    std::vector<BoolTerm> terms_;
};

/// m(C, l; P): the weighted number of terms of length l containing t_C;
/// without l, summed over all lengths.  m(empty; P) is the total weight.
inline std::uint64_t monomial_count(const ReducedBooleanPolynomial& poly,
                                    const std::vector<std::uint32_t>& c,
                                    std::optional<std::uint32_t> length = std::nullopt) {
    std::vector<std::uint32_t> key = c;
    std::sort(key.begin(), key.end());
    std::uint64_t total = 0;
    for (const auto& t : poly.terms()) {
        if (length && t.vars.size() != *length) continue;
        if (std::includes(t.vars.begin(), t.vars.end(), key.begin(), key.end()))
            total += t.weight;
    }
    return total;
}

/// Proportion of weighted terms containing t_B; B must be nonempty.
inline double pb_ratio(const ReducedBooleanPolynomial& poly, const std::vector<std::uint32_t>& b) {
    if (b.empty()) throw InvalidConfig("B must be nonempty");
    std::uint64_t total = monomial_count(poly, {});
    if (total == 0) throw InvalidConfig("polynomial has no terms");
    return static_cast<double>(monomial_count(poly, b)) / static_cast<double>(total);
}

/// d/dt_C of P: sum of w(B) t_{B \ C} over B containing C.
inline ReducedBooleanPolynomial partial_derivative(const ReducedBooleanPolynomial& poly,
                                                   const std::vector<std::uint32_t>& c) {
    std::vector<std::uint32_t> key = c;
    std::sort(key.begin(), key.end());
    std::vector<BoolTerm> out;
    for (const auto& t : poly.terms()) {
        if (!std::includes(t.vars.begin(), t.vars.end(), key.begin(), key.end())) continue;
        BoolTerm reduced;
        reduced.weight = t.weight;
        std::set_difference(t.vars.begin(), t.vars.end(), key.begin(), key.end(),
                            std::back_inserter(reduced.vars));
        out.push_back(std::move(reduced));
    }
    return ReducedBooleanPolynomial(poly.variable_count(), std::move(out));
}

inline double expectation(const ReducedBooleanPolynomial& poly, double p) {
    double total = 0.0;
    for (const auto& t : poly.terms())
        total += static_cast<double>(t.weight) * std::pow(p, static_cast<double>(t.vars.size()));
    return total;
}

inline Rational expectation_exact(const ReducedBooleanPolynomial& poly, const Rational& p) {
    Rational total = 0;
    for (const auto& t : poly.terms()) {
        Rational pw = 1;
        for (std::size_t i = 0; i < t.vars.size(); ++i) pw *= p;
        total += Rational(t.weight) * pw;
    }
    return total;
}

namespace detail {

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace detail

/**
 * Aggregated m(C, l) over every C contained in at least one term (any other C
 * contributes an expected derivative of zero).  Per-term subset expansion is
 * capped at degree 9, with a global budget on the number of expansions.
 */
class DerivativeIndex {
  public:
    explicit DerivativeIndex(const ReducedBooleanPolynomial& poly,
                             std::uint64_t subset_budget = kDefaultSubsetBudget) {
        if (poly.degree() > kMaxDerivativeDegree)
            throw TooLarge("degree exceeds the subset-expansion cap");
        std::uint64_t expansions = 0;
        for (const auto& t : poly.terms()) {
            expansions += 1ull << t.vars.size();
            if (expansions > subset_budget) throw TooLarge("subset expansion exceeds the budget");
        }
        for (const auto& t : poly.terms()) {
            const std::uint32_t k = static_cast<std::uint32_t>(t.vars.size());
            const std::uint32_t len = k;
            std::vector<std::uint32_t> subset;
            for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
                subset.clear();
                for (std::uint32_t bit = 0; bit < k; ++bit)
                    if (mask & (1u << bit)) subset.push_back(t.vars[bit]);
                index_[subset][len] += t.weight;
            }
        }
    }

    /// E_j(P): max over C with |C| >= j of E[d/dt_C P] at density p.
    double max_expected_derivative(std::uint32_t j, double p) const {
        double best = 0.0;
        for (const auto& [c, by_len] : index_) {
            if (c.size() < j) continue;
            double e = 0.0;
            for (auto [len, w] : by_len)
                e += static_cast<double>(w) * std::pow(p, static_cast<double>(len - c.size()));
            best = std::max(best, e);
        }
        return best;
    }

    Rational max_expected_derivative_exact(std::uint32_t j, const Rational& p) const {
        Rational best = 0;
        for (const auto& [c, by_len] : index_) {
            if (c.size() < j) continue;
            Rational e = 0;
            for (auto [len, w] : by_len) {
                Rational pw = 1;
                for (std::uint32_t i = 0; i < len - c.size(); ++i) pw *= p;
                e += Rational(w) * pw;
            }
            if (e > best) best = e;
        }
        return best;
    }

    /// Largest m(C) over sets C of the given size.
    std::uint64_t max_monomial_count(std::uint32_t size) const {
        std::uint64_t best = 0;
        for (const auto& [c, by_len] : index_) {
            if (c.size() != size) continue;
            std::uint64_t total = 0;
            for (auto [len, w] : by_len) total += w;
            best = std::max(best, total);
        }
        return best;
    }

  private:
    std::unordered_map<std::vector<std::uint32_t>, std::map<std::uint32_t, std::uint64_t>,
                       detail::VecHash>
        index_;
};

inline double ej(const ReducedBooleanPolynomial& poly, std::uint32_t j, double p,
                 std::uint64_t subset_budget = kDefaultSubsetBudget) {
    return DerivativeIndex(poly, subset_budget).max_expected_derivative(j, p);
}

inline Rational ej_exact(const ReducedBooleanPolynomial& poly, std::uint32_t j, const Rational& p,
                         std::uint64_t subset_budget = kDefaultSubsetBudget) {
    return DerivativeIndex(poly, subset_budget).max_expected_derivative_exact(j, p);
}

// ---------------------------------------------------------------------------
// Constructors for the polynomials the experiments use.
// ---------------------------------------------------------------------------

/// Triangle-count polynomial on the n(n-1)/2 edge variables of K_n.
inline ReducedBooleanPolynomial from_triangle_count(std::uint32_t n) {
    if (n < 3) throw InvalidConfig("need at least three vertices");
    auto edge = [n](std::uint32_t i, std::uint32_t j) {
        // lexicographic index of edge {i, j}, i < j
        return i * n - i * (i + 1) / 2 + (j - i - 1);
    };
    std::vector<BoolTerm> terms;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            for (std::uint32_t k = j + 1; k < n; ++k)
                terms.push_back({{edge(i, j), edge(j, k), edge(i, k)}, 1});
    return ReducedBooleanPolynomial(n * (n - 1) / 2, std::move(terms));
}

/**
 * Explicit expansion of the level-1 count polynomial over the N variables
 * t_0 .. t_{N-1}: one monomial per free tuple, with weights aggregated across
 * tuples whose reduced term coincides.  The filtered variant keeps only the
 * nondegenerate tuples, so every term has length exactly 9.
 */
inline ReducedBooleanPolynomial from_lambda1(const CyclicGroup& group, std::uint32_t a,
                                             std::uint32_t b, std::uint32_t c, bool filtered) {
    if (group.modulus() > 64) throw TooLarge("explicit expansion limited to N <= 64");
    if (a == b || b == c || a == c) throw InvalidConfig("parameters must be distinct");
    LinearFormSet forms = psi_forms(1);
    std::unordered_map<std::vector<std::uint32_t>, std::uint64_t, detail::VecHash> merged;
    detail::scan_form_tuples(
        group, forms, a, b, c, /*require_distinct_values=*/filtered, nullptr,
        [&](const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>& values) {
            std::vector<std::uint32_t> vars = values;
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            ++merged[vars];
        });
    std::vector<BoolTerm> terms;
    terms.reserve(merged.size());
    for (auto& [vars, w] : merged) terms.push_back({vars, w});
    return ReducedBooleanPolynomial(group.modulus(), std::move(terms));
}

// ---------------------------------------------------------------------------
// Concentration bounds.
// ---------------------------------------------------------------------------

/// Tail bound 2 e^{-lambda/4} for a sum of independent Bernoulli variables at
/// deviation sqrt(lambda N).
inline double chernoff_bound(std::uint64_t, double, double lambda) {
    if (lambda <= 0) throw InvalidConfig("lambda must be positive");
    return 2.0 * std::exp(-lambda / 4.0);
}

/// Martingale tail bound 2 exp(-lambda^2 / (2 sum ||d_i||_inf^2)).
inline double azuma_bound(double sum_sq_increments, double lambda) {
    if (sum_sq_increments <= 0) throw InvalidConfig("increment sum must be positive");
    if (lambda <= 0) throw InvalidConfig("lambda must be positive");
    return 2.0 * std::exp(-lambda * lambda / (2.0 * sum_sq_increments));
}

/// Worst-case final martingale increment |E[P | all] - E[P | all but var]| for
/// a polynomial with nonnegative weights: max(p, 1-p) times the all-ones value
/// of the derivative in that variable.
inline double azuma_last_increment(const ReducedBooleanPolynomial& poly, double p,
                                   std::uint32_t var) {
    ReducedBooleanPolynomial deriv = partial_derivative(poly, {var});
    std::vector<std::uint8_t> ones(poly.variable_count(), 1);
    return std::max(p, 1.0 - p) * static_cast<double>(deriv.evaluate(ones));
}

/// A candidate parameter sequence for the polynomial concentration bound.
/// The scale constants are caller-supplied and default to 1.
struct VuSchedule {
    std::vector<double> f;  // F_0 > F_1 > ... > F_k
    double lambda = 0.0;
    double c_k = 1.0;
    double d_k = 1.0;
};

/// Empty when the schedule is admissible against the given E_j values;
/// otherwise a diagnostic naming the first failing condition.  A schedule may
/// stop short of the degree (the classical triangle schedule does); the
/// conditions are checked over the indices it provides.
inline std::optional<std::string> schedule_violation(const std::vector<double>& ej_values,
                                                     const VuSchedule& schedule,
                                                     std::uint64_t variable_count) {
    const std::size_t k1 = schedule.f.size();
    if (k1 < 2) return std::string("schedule needs at least F_0 and F_1");
    if (k1 > ej_values.size())
        return "schedule length " + std::to_string(k1) + " exceeds degree+1 = " +
               std::to_string(ej_values.size());
    if (schedule.lambda <= 0) return std::string("lambda must be positive");
    for (std::size_t j = 0; j < k1; ++j) {
        if (schedule.f[j] <= 0)
            return "F_" + std::to_string(j) + " must be positive";
        if (j + 1 < k1 && schedule.f[j] <= schedule.f[j + 1])
            return "F_" + std::to_string(j) + " must exceed F_" + std::to_string(j + 1);
    }
    for (std::size_t j = 0; j < k1; ++j)
        if (schedule.f[j] < ej_values[j])
            return "F_" + std::to_string(j) + " = " + std::to_string(schedule.f[j]) +
                   " is below E_" + std::to_string(j) + " = " + std::to_string(ej_values[j]);
    const double logn = std::log(static_cast<double>(variable_count));
    for (std::size_t j = 0; j + 1 < k1; ++j) {
        double required = schedule.lambda + 4.0 * static_cast<double>(j) * logn;
        if (schedule.f[j] / schedule.f[j + 1] < required)
            return "F_" + std::to_string(j) + "/F_" + std::to_string(j + 1) + " = " +
                   std::to_string(schedule.f[j] / schedule.f[j + 1]) + " is below lambda + 4j log N = " +
                   std::to_string(required);
    }
    return std::nullopt;
}

struct VuBound {
    double deviation = 0.0;          // c_k sqrt(lambda F_0 F_1)
    double probability_bound = 0.0;  // d_k e^{-lambda/4}
};

/// Evaluates the concentration bound after verifying the schedule against the
/// polynomial's actual E_j values.
inline VuBound vu_bound(const ReducedBooleanPolynomial& poly, const VuSchedule& schedule, double p,
                        std::uint64_t subset_budget = kDefaultSubsetBudget) {
    DerivativeIndex index(poly, subset_budget);
    std::vector<double> ejs;
    for (std::uint32_t j = 0; j <= poly.degree(); ++j)
        ejs.push_back(index.max_expected_derivative(j, p));
    if (auto why = schedule_violation(ejs, schedule, poly.variable_count()))
        throw ScheduleInvalid(*why);
    VuBound out;
    out.deviation = schedule.c_k * std::sqrt(schedule.lambda * schedule.f[0] * schedule.f[1]);
    out.probability_bound = schedule.d_k * std::exp(-schedule.lambda / 4.0);
    return out;
}

// ---------------------------------------------------------------------------
// Simulation.
// ---------------------------------------------------------------------------

struct ConcentrationSummary {
    double mean = 0.0;
    double variance = 0.0;  // sample variance
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    std::uint64_t q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0;
};

/// Evaluates P on independent Bernoulli(p) assignments; deterministic under
/// (seed, trials).  Quantiles use the lower nearest-rank convention.
inline ConcentrationSummary empirical_concentration(const ReducedBooleanPolynomial& poly, double p,
                                                    std::uint32_t trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidConfig("need at least one trial");
    std::vector<std::uint64_t> values;
    values.reserve(trials);
    std::vector<std::uint8_t> assignment(poly.variable_count());
    for (std::uint32_t t = 0; t < trials; ++t) {
        std::uint64_t state = detail::mix_seed(seed, t);
        for (std::uint32_t v = 0; v < poly.variable_count(); ++v)
            assignment[v] = detail::to_unit_interval(detail::splitmix64_next(state)) < p ? 1 : 0;
        values.push_back(poly.evaluate(assignment));
    }
    std::vector<std::uint64_t> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    ConcentrationSummary out;
    double sum = 0.0;
    for (std::uint64_t v : values) sum += static_cast<double>(v);
    out.mean = sum / trials;
    double ss = 0.0;
    for (std::uint64_t v : values) {
        double d = static_cast<double>(v) - out.mean;
        ss += d * d;
    }
    out.variance = trials > 1 ? ss / (trials - 1) : 0.0;
    out.min = sorted.front();
    out.max = sorted.back();
    auto quantile = [&](double q) {
        return sorted[static_cast<std::size_t>(q * (sorted.size() - 1))];
    };
    out.q05 = quantile(0.05);
    out.q25 = quantile(0.25);
    out.median = quantile(0.50);
    out.q75 = quantile(0.75);
    out.q95 = quantile(0.95);
    return out;
}

/// One JSON object per line: {"vars": [..], "w": weight}.
inline void write_polynomial_jsonl(const ReducedBooleanPolynomial& poly, std::ostream& os) {
    for (const auto& t : poly.terms()) {
        os << "{\"vars\":[";
        for (std::size_t i = 0; i < t.vars.size(); ++i) {
            if (i) os << ',';
            os << t.vars[i];
        }
        os << "],\"w\":" << t.weight << "}\n";
    }
}

}  // namespace freiman
