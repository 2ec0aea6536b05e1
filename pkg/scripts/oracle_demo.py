"""Walk through the three-coefficient example, Gamma^2 = (0.5, 0.3, 0.2),
with closed forms next to the simulated circuit and a sampled run.

    python3 scripts/oracle_demo.py [--samples 100000] [--seed 42]
"""

import argparse

import numpy as np

from qswap import discrimination as disc
from qswap import oracle
from qswap.channels import profile_from_gamma_sq
from qswap.protocol import StagePolicy, average_smc, postselected_average, success_probability
from qswap.verify import monte_carlo_check, worked_example_channel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    chain = disc.stage_chain(profile_from_gamma_sq([0.5, 0.3, 0.2]))
    print("stage recursion")
    for st in chain:
        print(f"  beta={st.beta}  Gamma^2={np.round(st.gamma_arr**2, 12)}  N={st.support_size}  p_succ={st.p_succ_next:.12f}")
    final = disc.terminal_residual(chain, len(chain))
    print(f"  after {len(chain)} failures Gamma^2={np.round(final.gamma_arr**2, 12)}")

    ch = worked_example_channel()
    pol = StagePolicy.fixed(ch, 2)
    e, f = average_smc(ch, pol)
    e_post, f_post, p = postselected_average(ch, pol)
    print(f"\nclosed form: p_succ={success_probability(ch, pol):.6f}  <E>={e:.6f}  <F>={f:.6f}  "
          f"<E>|succ={e_post:.6f}  <F>|succ={f_post:.6f}")

    run = oracle.enumerate_trajectories(ch, pol.betas)
    p_sim = sum(t.probability for t in run.trajectories if t.success)
    e_sim = sum(t.probability * t.entanglement for t in run.trajectories)
    f_sim = sum(t.probability * t.fidelity for t in run.trajectories)
    print(f"circuit:     p_succ={p_sim:.6f}  <E>={e_sim:.6f}  <F>={f_sim:.6f}  ({len(run.trajectories)} records)")

    print()
    print(monte_carlo_check(ch, 2, args.samples, args.seed).format())


if __name__ == "__main__":
    main()
