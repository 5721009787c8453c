#pragma once

#include <vector>

#include "supmmd/kernel.hpp"

namespace supmmd {

// greedy budgeted summary selection; candidate rows/cols refer to one sentence set
struct SelectorInput {
    const Matrix* K_cc = nullptr;  // candidate self kernel, required
    Vector z;                      // log importance scores of candidates (drives q)
    Vector p;                      // importance distribution over candidate rows
    // contrast side, active when lambda != 0
    const Matrix* K_xc = nullptr;  // contrast rows x candidate cols
    Vector z_alt;                  // alternative scores over candidates (drives the contrast q)
    Vector p_alt;                  // importance distribution over contrast rows
    double lambda = 0.0;
    std::vector<int> lengths;
    int budget = 100;
    double r = 0.0;
};

struct SelectionResult {
    std::vector<int> picked;  // selection order
    double objective = 0.0;
    int words = 0;
    std::vector<double> trajectory;  // objective after each pick
    bool singleton_fallback = false;
};

double summary_objective(const SelectorInput& in, const std::vector<int>& subset);

SelectionResult select_summary(const SelectorInput& in);

}  // namespace supmmd
