// SPDX-License-Identifier: Apache-2.0
//
// Minimal usage example: configure the IRS once per frame with rsPSO from
// statistical CSI, then compare the slot-level schemes on validation samples.

#include <cstdio>

#include "irsim/experiments.hpp"

int main()
{
    using namespace irsim;

    ScenarioConfig cfg;
    cfg.bs_antennas = 8;
    cfg.users = 4;
    cfg.streams = 2;
    cfg.elements_per_unit = 16;
    cfg.frame_slots = 10;
    cfg.pso = PsoParams{12, 0.7, 1.5, 1.5, 10, 10, 4};

    const Pcg32 master(7);
    Pcg32 placement = master.split(1);
    const SCsi s_csi = build_s_csi(cfg, 0.8, placement);
    const FrameConfig frame{cfg.frame_slots, cfg.delay_slots, cfg.streams, cfg.power_watts(),
                            cfg.noise_watts()};

    const RspsoResult pso = run_rspso(frame, s_csi, cfg.pso, master.split(2));
    const SampleSet validation = draw_samples(s_csi, frame, 40, master.split(3));

    std::printf("rsPSO best surrogate fitness: %.4f (consumed %ld sample-draws)\n",
                pso.best_fitness, pso.diag.samples_used);
    std::printf("AASR svd-zf:    %.4f bit/s/Hz\n",
                average_sum_rate(pso.best_position, s_csi, validation, 0, validation.size(), frame,
                                 SmallTimescaleScheme::svd_zf));
    std::printf("AASR svd-plain: %.4f bit/s/Hz\n",
                average_sum_rate(pso.best_position, s_csi, validation, 0, validation.size(), frame,
                                 SmallTimescaleScheme::svd_plain));
    std::printf("AASR upper:     %.4f bit/s/Hz\n",
                average_sum_rate(pso.best_position, s_csi, validation, 0, validation.size(), frame,
                                 SmallTimescaleScheme::upper));
    return 0;
}
