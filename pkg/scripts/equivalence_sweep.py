"""Sliding vs disjoint estimates over a range of L_max and n, as CSV on stdout.

    python3 scripts/equivalence_sweep.py --source thue_morse --lmax 4,6,8,10,12
"""

import argparse
import sys

from galelab.dimension import equivalence_experiment
from galelab.seqgen import generate, parse_gen


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--source", default="thue_morse", help="inline generator, e.g. bernoulli:1/4:seed42")
    p.add_argument("--lmax", default="2,4,6,8,10,12")
    p.add_argument("--n", default="100000,1000000")
    args = p.parse_args(argv)
    print("source,n,l_max,disjoint,sliding,gap,argmin_l_disjoint,argmin_l_sliding")
    for n in (int(v) for v in args.n.split(",")):
        stream = generate(parse_gen(args.source, n))
        for lmax in (int(v) for v in args.lmax.split(",")):
            rep = equivalence_experiment(stream, lmax, n)
            arg_d = min(rep.per_l, key=lambda ell: rep.per_l[ell]["disjoint"])
            arg_s = min(rep.per_l, key=lambda ell: rep.per_l[ell]["sliding"])
            print(f"{args.source},{n},{lmax},{rep.disjoint_estimate:.5f},{rep.sliding_estimate:.5f},"
                  f"{rep.estimate_gap:.5f},{arg_d},{arg_s}")
            sys.stdout.flush()


if __name__ == "__main__":
    main()
