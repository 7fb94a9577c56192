// SPDX-License-Identifier: Apache-2.0
//
// Minimal usage example: build one random slot scenario, run the alternating
// optimization with both reflection solvers, print the objective traces.

#include <cstdio>

#include "irsim/experiments.hpp"

int main()
{
    using namespace irsim;

    ScenarioConfig cfg;
    cfg.bs_antennas = 8;
    cfg.irs_units = 2;
    cfg.elements_per_unit = 16;
    cfg.users = 3;

    Pcg32 rng(2024);
    const SlotProblem problem = build_slot_problem(cfg, cfg.elements_per_unit, rng);
    const AoState init = initial_ao_state(problem);

    for (ReflectionSolver solver : {ReflectionSolver::dual, ReflectionSolver::ucmo})
    {
        AoOptions opts;
        opts.solver = solver;
        const AoState st = run_ao(problem, init, opts);
        std::printf("%s solver: %zu iterations, sum-rate %.4f -> %.4f bit/s/Hz\n",
                    solver == ReflectionSolver::dual ? "dual" : "ucmo",
                    st.objective_trace.size() - 1, st.objective_trace.front(),
                    st.objective_trace.back());
    }
    return 0;
}
