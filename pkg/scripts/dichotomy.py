"""Win/lose dichotomy of constructed gamblers around the observed block entropy.

For each s offset, builds the gambler from the prefix, runs it and prints the
tail slope and verdict.  Writes trajectories as CSV when --out is given.
"""

import argparse
from fractions import Fraction
from pathlib import Path

from galelab.dimension import even_checkpoints, prepare_gambler, success_diagnostic
from galelab.entropy import block_entropy, count_blocks
from galelab.gambler import run_log2
from galelab.seqgen import generate, parse_gen


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--source", default="bernoulli:1/4:seed42")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--offsets", default="-0.2,-0.1,-0.05,0.05,0.1,0.2")
    p.add_argument("--out", type=Path)
    args = p.parse_args(argv)
    x = generate(parse_gen(args.source, args.n)).take()
    cps = even_checkpoints(len(x))
    print("mode,l,H_l,s,tail_slope,max_log2_capital,verdict")
    for mode, ell in (("disjoint", 1), ("disjoint", 2), ("sliding", 2), ("sliding", 3)):
        h = block_entropy(count_blocks(x.tolist(), ell, mode))
        _, spec = prepare_gambler(x, ell, mode)
        for off in (float(v) for v in args.offsets.split(",")):
            s = Fraction(h + off)
            if s < 0:
                continue
            traj = run_log2(spec, s, x, cps)
            rep = success_diagnostic(traj)
            print(f"{mode},{ell},{h:.5f},{float(s):.5f},{rep.tail_slope:+.5f},{rep.max_log2_capital:.1f},{rep.verdict}")
            if args.out:
                args.out.mkdir(parents=True, exist_ok=True)
                (args.out / f"{mode}_l{ell}_s{float(s):.3f}.csv").write_text(traj.to_csv())


if __name__ == "__main__":
    main()
