"""Repeat each network attack many times and tally the responder's verdicts.

    python scripts/attack_suite.py --rounds 200
"""

import argparse
import random
from collections import Counter

from adhocauth import gqid, simnet
from adhocauth.chatapp import ChatApp
from adhocauth.puzzle import PuzzleParams
from adhocauth.session import ProtocolConfig


def build(keys, relay, seed):
    app = ChatApp(seed=seed, config=ProtocolConfig(PuzzleParams(n=4, k=6)), keys=keys)
    app.add_node("pi")
    app.add_node("mid", relay)
    app.add_node("ps")
    app.set_path(["pi", "mid", "ps"])
    app.issue("pi", 1, user="realm:bench")
    app.open_conversation("pi", "ps", 1)
    app.spriv("pi", "ps", b"open")
    return app


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--rounds", type=int, default=200)
    ap.add_argument("--bits", type=int, default=512)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    keys = gqid.keygen(args.bits, 65537, random.Random(args.seed))

    tallies = {}
    app = build(keys, simnet.Replayer(), args.seed)
    for kind in ("replay", "replay-proof"):
        tallies[kind] = Counter()
    for i in range(args.rounds):
        app.spriv("pi", "ps", b"m%d" % i)
        for kind in ("replay", "replay-proof"):
            tallies[kind][app.attack(kind, "mid")] += 1

    app = build(keys, simnet.Eavesdropper(), args.seed + 1)
    tallies["impersonate"] = Counter(app.attack("impersonate", "mid") for _ in range(args.rounds))

    mitm = simnet.ManInTheMiddle()
    app = build(keys, mitm, args.seed + 2)
    tallies["tamper"] = Counter()
    for i in range(args.rounds):
        mitm.rules = [simnet.MitmRule.parse(f"auth.sealed=flip:{i % 40}")]
        tallies["tamper"][app.spriv("pi", "ps", b"x" * 8)] += 1

    for kind, tally in tallies.items():
        print(f"{kind:<13}" + "  ".join(f"{v}={n}" for v, n in sorted(tally.items())))


if __name__ == "__main__":
    main()
