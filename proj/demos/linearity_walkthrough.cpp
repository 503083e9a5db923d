// Walkthrough of the main library surfaces on two small sets: a progression
// (rank 1, only affine maps survive) and a Sidon set (rank |A| - 1, every map
// survives), plus the positivity certificate and a micro sweep.

#include <iostream>

#include "freiman/experiments.hpp"

using namespace freiman;

namespace {

void describe(const SubsetOfZn& set, const char* label) {
    std::cout << "== " << label << " (N = " << set.modulus() << ", |A| = " << set.size()
              << ")\n";
    auto result = solve_hom_space(set);
    std::cout << "  solution-space dimension " << result.dimension << ", rank " << result.rank
              << ", linear: " << (result.rank == 1 ? "yes" : "no") << '\n';

    if (difference_set(set).size() == set.modulus()) {
        std::cout << "  pair-constraint kernel dimension " << induced_space_dimension(set)
                  << ", cell-boundary rank " << triangle_generator_rank(set) << " (N - 2 = "
                  << set.modulus() - 2 << ")\n";
    } else {
        std::cout << "  difference set incomplete; pair route not applicable\n";
    }

    if (auto x0 = find_isolated_element(set)) {
        auto f = indicator_hom_from_isolated(set, *x0);
        std::cout << "  isolated element " << *x0 << ": indicator table verifies as a "
                  << (is_restriction_of_linear(set, f) ? "linear" : "nonlinear")
                  << " homomorphism\n";
    } else {
        std::cout << "  no isolated element\n";
    }

    auto level = min_level_all_positive(set, 2);
    if (level)
        std::cout << "  every triangle positive from level " << *level << '\n';
    else
        std::cout << "  no level at or below 2 makes every triangle positive\n";
}

}  // namespace

int main() {
    CyclicGroup g13(13);
    describe(SubsetOfZn::full(g13), "full set Z_13");
    describe(SubsetOfZn(g13, {0, 1, 2, 3, 4, 5, 6}), "progression in Z_13");
    // {0, 1, 3, 9} is a perfect difference set: every nonzero value arises
    // exactly once as a difference, so the set is Sidon with A - A = Z_13
    describe(SubsetOfZn(g13, {0, 1, 3, 9}), "Sidon set in Z_13");

    std::cout << "== micro sweep (N = 101, 40 trials per cell)\n";
    ExperimentConfig cfg;
    cfg.n_list = {101};
    cfg.alphas = {0.4, 0.8};
    cfg.trials = 40;
    cfg.master_seed = 1;
    cfg.deterministic = true;
    std::cout << sweep_linearity(cfg).csv;
    return 0;
}
