"""Search for equality configurations on a circular domain and confirm them with the L2 defect."""
import argparse

import numpy as np

from planar_suita.geometry import Circle, DomainSpec, build_domain
from planar_suita.search import FOUND, find_equality_config
from planar_suita.suita import JetConfig, WeightSpec, equality_defect


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--q-max", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--basis-degree", type=int, default=48, help="high orders need a large basis")
    ap.add_argument("--skip-defect", action="store_true", help="only run the search")
    args = ap.parse_args()

    d = build_domain(DomainSpec.circular(Circle(0j, 1.0), [Circle(0.5 + 0j, 0.1), Circle(-0.5 + 0j, 0.1)]))
    res = find_equality_config(d, m=args.m, q_max=args.q_max, rng=np.random.default_rng(args.seed))
    print(f"status {res.status}, q = {res.q}, target r = {res.target}, residual {res.residual:.2e}")
    for z, k in zip(res.points, res.orders):
        print(f"  z = {z.real:+.10f} {z.imag:+.10f}i  k = {k}")
    print("  deltas", ", ".join(f"{x:.12f}" for x in res.deltas))
    if res.status == FOUND and not args.skip_defect:
        j = JetConfig(res.points, res.orders, res.amplitudes)
        rep = equality_defect(d, WeightSpec(), j, basis_degree=args.basis_degree)
        print(f"  defect {rep.defect:.3e} (truncation {rep.eps_trunc:.1e})")


if __name__ == "__main__":
    main()
