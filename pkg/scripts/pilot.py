#!/usr/bin/env python3
"""Calibration pilot: measures the success rates and slot counts the
acceptance suite pins. Slow; run offline, not from pytest."""

import sys
import time

from radiocount.harness import ExperimentConfig, run_experiment
from radiocount.protocols import ProtocolParams


def cell(tag, **kw):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(workers=2, keep_records=False, **kw)
    stats = run_experiment(cfg).stats
    el = time.perf_counter() - t0
    med = stats.total_slots.median if stats.total_slots else -1
    smed = stats.success_slots.median if stats.success_slots else -1
    amed = stats.acquisition_slots.median if stats.acquisition_slots else -1
    print(f"{tag:46s} rate={stats.success_rate:.4f} "
          f"({stats.success_count}/{stats.success_total}) "
          f"abort={stats.abort_rate:.3f} cutoff={stats.cutoff_rate:.3f} "
          f"med={med:.0f} smed={smed:.0f} amed={amed:.0f} [{el:.0f}s]",
          flush=True)
    return stats


which = sys.argv[1] if len(sys.argv) > 1 else "fast"

if which in ("fast", "all"):
    for n, trials in ((64, 2000), (256, 1000), (1024, 500)):
        cap = 2 * ((n - 1).bit_length() + 6)
        cell(f"sh_nocd_const clique:{n}", protocol="count_sh_nocd_const",
             topology=f"clique:{n}", trials=trials, master_seed=101,
             predicate="sh_identical_range_4x_v1", max_slots=cap)
    for n, trials in ((64, 500), (256, 500)):
        cell(f"sh_cd_const clique:{n}", protocol="count_sh_cd_const",
             topology=f"clique:{n}", trials=trials, master_seed=103,
             predicate="sh_identical_range_4x_v1", max_slots=400)
    cell("sh_cd_const clique:1024", protocol="count_sh_cd_const",
         topology="clique:1024", trials=500, master_seed=103,
         predicate="sh_identical_range_4x_v1", max_slots=400)
    for n, trials in ((64, 500), (256, 500)):
        cell(f"sh_cd_high clique:{n}", protocol="count_sh_cd_high",
             topology=f"clique:{n}", trials=trials, master_seed=104,
             predicate="sh_identical_range_64x_v1", max_slots=10**5)
    cell("est_upper_sh clique:256", protocol="est_upper_sh",
         topology="clique:256", trials=2000, master_seed=105,
         predicate="lg_upper_bound_v1", max_slots=64)
    cell("all_nocd_a clique:256", protocol="count_all_nocd_a",
         topology="clique:256", trials=500, master_seed=106,
         predicate="node_range_4x_v1", max_slots=10**4,
         params=ProtocolParams(known_N_delta=256))
    cell("all_nocd_a star:256", protocol="count_all_nocd_a",
         topology="star:256", trials=500, master_seed=106,
         predicate="center_node_range_4x_v1", max_slots=10**4,
         params=ProtocolParams(known_N_delta=256))
    cell("all_cd_a clique:256", protocol="count_all_cd_a",
         topology="clique:256", trials=500, master_seed=107,
         predicate="node_range_4x_v1", max_slots=10**4)
    cell("all_cd_a star:256", protocol="count_all_cd_a",
         topology="star:256", trials=500, master_seed=107,
         predicate="center_node_range_4x_v1", max_slots=10**4)
    cell("center_nocd_const star:256", protocol="count_center_nocd_const",
         topology="star:256", trials=1000, master_seed=108,
         predicate="center_done_range_4x_v1", max_slots=10**4)
    cell("center_nocd_high star:256", protocol="count_center_nocd_high",
         topology="star:256", trials=500, master_seed=109,
         predicate="center_done_range_4x_v1", max_slots=10**4)
    cell("center_cd_const star:1024", protocol="count_center_cd_const",
         topology="star:1024", trials=1000, master_seed=110,
         predicate="center_done_range_4x_v1", max_slots=400)
    cell("center_cd_high star:1024", protocol="count_center_cd_high",
         topology="star:1024", trials=500, master_seed=111,
         predicate="center_done_range_64x_v1", max_slots=10**5)
    cell("est_upper_center star:256", protocol="est_upper_center",
         topology="star:256", trials=2000, master_seed=112,
         predicate="lg_upper_bound_v1", max_slots=64)

if which in ("high", "all"):
    for n, trials in ((64, 500), (256, 500), (1024, 500)):
        cell(f"sh_nocd_high clique:{n}", protocol="count_sh_nocd_high",
             topology=f"clique:{n}", trials=trials, master_seed=102,
             predicate="sh_identical_range_4x_v1", max_slots=10**5)
    cell("sh_cd_high clique:1024", protocol="count_sh_cd_high",
         topology="clique:1024", trials=500, master_seed=104,
         predicate="sh_identical_range_64x_v1", max_slots=10**5)

if which in ("dc", "all"):
    trials = int(sys.argv[2]) if len(sys.argv) > 2 else 120
    cell(f"all_nocd_b clique:64 x{trials}", protocol="count_all_nocd_b",
         topology="clique:64", trials=trials, master_seed=113,
         predicate="all_done_range_5x_v1", max_slots=10**6,
         params=ProtocolParams(known_N=64))
